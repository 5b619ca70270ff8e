"""
This module contains the CLI command to compute exact moments of a linear statistic.

Example:
    $ radialdpp moments --ensemble ginibre --R 50,100,200 --f f.json
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "moments",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Exact and asymptotic moments",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "R", "scaling", "eps", "allow_large_R", "output", "format", "verbose")
def main(ctx: click.Context, **params):
    """
    Compute the exact mean and variance of the linear statistic of f at every R
    of the ladder, next to the asymptotic centering and variance of the declared
    scaling.
    """

    ctx.exit(cliconfig.run("moments", params))


if __name__ == "__main__":
    main()
