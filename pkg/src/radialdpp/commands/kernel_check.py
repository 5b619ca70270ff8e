"""
This module contains the CLI command to check the marginal identity of the hyperbolic kernel.

Example:
    $ radialdpp kernel-check --alpha 1 --xgrid -5:5:41
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "kernel-check",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Check the kernel marginal identity",
)
@click.pass_context
@cliconfig.options("alpha", "xgrid", "probes", "output", "strict", "verbose")
def main(ctx: click.Context, **params):
    """
    Integrate the normalized hyperbolic kernel in y at every x of the grid and
    report the largest deviation from e^x. Without `--alpha` the check runs at
    α = 0.5, 1, 2 and 3.7.
    """

    ctx.exit(cliconfig.run("kernel-check", params))


if __name__ == "__main__":
    main()
