"""
This module contains the CLI command to evaluate the limit variance functional of a test function.

Example:
    $ radialdpp vf --ensemble hyperbolic --alpha 1 --f f.json
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "vf",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Limit variance functional",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "output", "verbose")
def main(ctx: click.Context, **params):
    """
    Print the limit variance V_f of the fixed-scale CLT of the ensemble.
    """

    ctx.exit(cliconfig.run("vf", params))


if __name__ == "__main__":
    main()
