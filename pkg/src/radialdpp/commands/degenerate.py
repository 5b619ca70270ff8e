"""
This module contains the CLI command to check the vanishing variance beyond the extreme scale.

Example:
    $ radialdpp degenerate --ensemble ginibre --scaling power:2 --R 50,100
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "degenerate",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Vanishing-variance check",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "R", "scaling", "plan", "eps", "allow_large_R", "output", "format", "strict", "verbose")
def main(ctx: click.Context, **params):
    """
    Compare the exact variance with its vanishing envelope along the R ladder
    and check that it does not increase.
    """

    ctx.exit(cliconfig.run("degenerate", params))


if __name__ == "__main__":
    main()
