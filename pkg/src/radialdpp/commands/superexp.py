"""
This module contains the CLI command to run the jump-driven CLT experiment for a_R << 1.

Example:
    $ radialdpp superexp --ensemble hyperbolic --alpha 1 --scaling power:-0.5 --R 12 --f f.json
"""

import click

import radialdpp
from radialdpp.lib import cliconfig


@click.command(
    "superexp",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Jump-driven CLT experiment for a_R << 1",
)
@click.pass_context
@cliconfig.options("ensemble", "alpha", "f", "R", "scaling", "reps", "plan", "seed", "eps", "level", "exploratory", "allow_large_R", "output", "format", "strict", "verbose")
def main(ctx: click.Context, **params):
    """
    Sample the linear statistic of f with a_R << 1, test its normality and the
    jump variance, or check that it vanishes once R + M_f/a_R <= 0.
    """

    ctx.exit(cliconfig.run("superexp", params))


if __name__ == "__main__":
    main()
