"""
Keyed random streams.

Every replicate owns a counter-based Philox stream keyed by (seed, replicate_id),
so a replicate's draws do not depend on which worker runs it or in what order.
"""

import numpy as np


SEED_BITS = 64


def stream_key(seed: int, replicate_id: int) -> np.random.SeedSequence:
    if seed < 0 or replicate_id < 0:
        raise ValueError(f"Seed and replicate id must be non-negative, got ({seed}, {replicate_id})")
    return np.random.SeedSequence([seed % (1 << SEED_BITS), replicate_id])


def replicate_generator(seed: int, replicate_id: int) -> np.random.Generator:
    """The generator of one replicate."""

    return np.random.Generator(np.random.Philox(stream_key(seed, replicate_id)))
