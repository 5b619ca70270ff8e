"""
This module contains the CLI command to run the white-noise experiment at intermediate scales.

Example:
    $ radialdpp whitenoise --ensemble ginibre --scaling power:0.5 --R 400 --reps 10000
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "whitenoise",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="White-noise experiment",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "g", "R", "scaling", "reps", "plan", "seed", "eps", "level", "allow_large_R", "output", "format", "strict", "verbose")
def main(ctx: click.Context, **params):
    """
    Sample the linear statistics of f and g at an intermediate scale, check the
    normalized variance against 2∫f² and the decorrelation of the disjointly
    supported f and g.
    """

    ctx.exit(cliconfig.run("whitenoise", params))


if __name__ == "__main__":
    main()
