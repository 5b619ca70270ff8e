import importlib
from pathlib import Path

import click

MAIN_FUNC_NAME = "main"

# command name -> click command
COMMANDS: dict[str, click.Command] = {}

# Import modules as functions
for file in sorted(Path(__file__).parent.iterdir()):
    if file.suffix == ".py" and not file.name.startswith("__"):
        module_name = file.stem
        module = importlib.import_module("." + module_name, package=__name__)
        if MAIN_FUNC_NAME in dir(module):
            command = getattr(module, MAIN_FUNC_NAME)
            globals()[module_name] = command
            COMMANDS[command.name] = command
