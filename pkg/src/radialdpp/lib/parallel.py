"""
Replicate scheduling over worker processes.

Replicates are split into contiguous blocks; each block runs in one worker and
the block results come back in block order, so the output does not depend
on the number of workers.
"""

import concurrent.futures as cf
import logging
import os
from typing import Any
from typing import Callable
from typing import Optional

import radialdpp


logger = logging.getLogger(__name__)

BLOCK_SIZE = 250


def resolve_workers(workers: Optional[int] = None) -> int:
    """Explicit count, else $RADIALDPP_THREADS, else 1; 0 or less means all CPUs."""

    if workers is None:
        raw = os.environ.get(radialdpp.THREADS_ENV, "")
        workers = int(raw) if raw.strip() else 1
    return workers if workers > 0 else os.cpu_count() or 1


def replicate_blocks(replicates: int, block_size: int = BLOCK_SIZE) -> list[tuple[int, int]]:
    return [(start, min(start + block_size, replicates)) for start in range(0, replicates, block_size)]


def map_replicates(
    run_block: Callable[[int, int], Any],
    replicates: int,
    workers: Optional[int] = None,
) -> list:
    """
    Run `run_block(start, stop)` over all replicate blocks.

    Args:
        run_block: A picklable callable handling replicate ids in [start, stop).
        replicates: Number of replicates.
        workers: Worker processes, resolved by `resolve_workers`.

    Returns:
        list: The block results in replicate-id order.
    """
    blocks = replicate_blocks(replicates)
    workers = min(resolve_workers(workers), max(len(blocks), 1))
    logger.debug("Running %d replicates in %d blocks on %d workers", replicates, len(blocks), workers)
    if workers == 1:
        results = [run_block(start, stop) for start, stop in blocks]
    else:
        with cf.ProcessPoolExecutor(max_workers=workers) as ex:
            # map yields in submission order
            results = list(ex.map(run_block, *zip(*blocks)))
    return results
