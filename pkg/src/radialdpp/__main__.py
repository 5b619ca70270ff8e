import click

import radialdpp
from . import commands


@click.group("radialdpp", context_settings=radialdpp.CTX_SETTINGS)
@click.version_option(radialdpp.VERSION)
def cli():
    """Simulation and verification of radial linear statistics of Ginibre and hyperbolic point processes."""


for command in commands.COMMANDS.values():
    cli.add_command(command, name=command.name)


if __name__ == "__main__":
    cli(prog_name="radialdpp")  # pragma: no cover
