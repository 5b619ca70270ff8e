"""
This module contains the CLI command to get and set configurations of the program.

Example:
    $ radialdpp config --get "quadrature.rel_tol"
    $ radialdpp config --set "seed" "0xD99"
    $ radialdpp config --unset "workers"
    $ radialdpp config --list
"""

from pathlib import Path

import click

import radialdpp
from radialdpp.lib.config import Config
from radialdpp.lib.config import Settings


def known_keys() -> list[str]:
    return [key for key, _, _, _ in Settings.FIELDS.values()]


@click.command(
    "config",
    context_settings=radialdpp.CTX_SETTINGS,
    short_help="Get and set configurations",
)
@click.option("--get", "key_to_get", help="Get a configuration value")
@click.option("--set", "key_value", nargs=2, help="Set a configuration value")
@click.option("--unset", "key_to_unset", help="Unset a configuration value")
@click.option("--list", "list_all", is_flag=True, help="List all configuration values")
def main(key_to_get: str, key_value: tuple[str, str], key_to_unset: str, list_all: bool):
    """
    Get and set configurations of the program.

    Recognized keys: seed, eps_trunc, workers, quadrature.abs_tol,
    quadrature.rel_tol, quadrature.max_subdivisions and gof.level.
    """

    actions_specified_count = sum(map(bool, [key_to_get, key_value, key_to_unset, list_all]))
    if actions_specified_count != 1:
        raise click.UsageError(
            "Exactly one action should be specified, use `-h` or `--help` to see available options."
        )

    cfg = Config()
    try:
        cfg.load_from_file(radialdpp.CONFIG_PATH, "yaml")
    except FileNotFoundError:
        Path(radialdpp.CONFIG_PATH).parent.mkdir(parents=True, exist_ok=True)
        cfg.data = {}
        cfg.save_to_file(radialdpp.CONFIG_PATH, "yaml")

    if key_to_get:
        value = cfg.get_nested_value(key_to_get)
        if value is not None:
            click.echo(value)
    elif key_value:
        key_to_set, value_to_set = key_value
        if key_to_set not in known_keys():
            click.echo(f"Warning: {key_to_set} is not a recognized key.", err=True)
        cfg.set_nested_value(key_to_set, value_to_set)
        cfg.save_to_file(radialdpp.CONFIG_PATH, "yaml")
    elif key_to_unset:
        cfg.unset_nested_value(key_to_unset)
        cfg.save_to_file(radialdpp.CONFIG_PATH, "yaml")
    elif list_all:
        for key, value in cfg.items():
            click.echo(f"{key}={value}")


if __name__ == "__main__":
    main()
