"""
This module contains the CLI command to run the fixed-scale CLT experiment.

Example:
    $ radialdpp clt --ensemble hyperbolic --alpha 1 --R 10 --reps 10000
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "clt",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Fixed-scale CLT experiment",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "R", "scaling", "reps", "plan", "seed", "eps", "level", "allow_large_R", "output", "format", "strict", "verbose")
def main(ctx: click.Context, **params):
    """
    Sample the linear statistic of f at fixed scale along the R ladder, test the
    standardized statistic for normality and compare its variance with the limit
    variance.
    """

    ctx.exit(cliconfig.run("clt", params))


if __name__ == "__main__":
    main()
