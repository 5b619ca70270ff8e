"""
This module contains the CLI command to sample the moduli that fall in a window.

Example:
    $ radialdpp sample --ensemble hyperbolic --alpha 1 --window 0.9:0.99 --reps 5
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "sample",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Sample a radial window",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "window", "coordinate", "R", "scaling", "reps", "seed", "eps", "output", "format", "verbose")
def main(ctx: click.Context, **params):
    """
    Sample the moduli of an ensemble that fall in a window, one replicate per
    stream (seed, replicate_id). Only the points inside the window are drawn.

    With `--coordinate scaled` the window is in x = a_R(c − R), with R from `--R`
    and a_R from `--scaling`.
    """

    ctx.exit(cliconfig.run("sample", params))


if __name__ == "__main__":
    main()
