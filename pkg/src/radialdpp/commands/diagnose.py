"""
This module contains the CLI command to chart the growth diagnostics of a linear statistic.

Example:
    $ radialdpp diagnose --ensemble hyperbolic --alpha 1 --R 6,8,10
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "diagnose",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="CLT and Poisson-limit diagnostics",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "R", "scaling", "eps", "output", "format", "verbose")
def main(ctx: click.Context, **params):
    """
    Chart the variance, sup norm and E S_|f| of the linear statistic along the
    R ladder, and the avoidance gap of the Poisson limit at the extreme scale.
    """

    ctx.exit(cliconfig.run("diagnose", params))


if __name__ == "__main__":
    main()
