"""
This module contains the CLI command to run the Poisson experiment at the extreme scale.

Example:
    $ radialdpp poisson --ensemble ginibre --R 200 --T 5 --reps 10000
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "poisson",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Extreme-scale Poisson experiment",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "R", "scaling", "T", "reps", "plan", "seed", "eps", "level", "allow_large_R", "output", "format", "strict", "verbose")
def main(ctx: click.Context, **params):
    """
    Count the rescaled points in [0, T] and collect their spacings, and test
    them against Poisson counts and exponential gaps.
    """

    ctx.exit(cliconfig.run("poisson", params))


if __name__ == "__main__":
    main()
