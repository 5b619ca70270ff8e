"""
A module for configuration files and the settings resolved from them.

Classes:
    Config: A class to manipulate a nested configuration data object.
    Settings: Run settings resolved from flags, environment and config file.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Optional

import yaml

import radialdpp
from radialdpp.lib.error import DataInvalidError
from radialdpp.lib.error import UnsupportedError


logger = logging.getLogger(__name__)

FORMATS = ("yaml", "json")


def infer_format(filepath: str) -> str:
    """Guess the config format from a file extension, defaulting to yaml."""

    return "json" if Path(filepath).suffix.lower() == ".json" else "yaml"


class Config:
    """
    A class to manipulate a nested configuration data object.

    Attributes:
        data (dict): The configuration data.
    """

    def __init__(self, config: Optional[dict] = None):
        self.data = config if config is not None else {}

    def load_from_file(self, filepath: str, format: Optional[str] = None) -> dict:
        """
        Load configurations from a YAML or JSON file.

        Args:
            filepath (str): Path to the config file.
            format (str): "yaml" or "json"; inferred from the extension if omitted.

        Returns:
            dict: Configurations loaded from the file (empty for an empty file).

        Raises:
            FileNotFoundError: If the config file is not found.
            UnsupportedError: If the format is unknown.
            DataInvalidError: If the file does not hold a mapping.
        """
        format = format or infer_format(filepath)
        if format not in FORMATS:
            raise UnsupportedError(f"Unsupported config file format: {format}")
        if not os.path.exists(filepath):
            raise FileNotFoundError(f"Config file {filepath} not found.")
        with open(filepath, "r") as file:
            config = yaml.safe_load(file) if format == "yaml" else json.load(file)
        if config is None:
            config = {}
        if not isinstance(config, dict):
            raise DataInvalidError(f"Config file {filepath} does not hold a mapping.")
        self.data = config
        return config

    def save_to_file(self, filepath: str, format: Optional[str] = None):
        """
        Save configurations to a YAML or JSON file.

        Args:
            filepath (str): Path to the config file.
            format (str): "yaml" or "json"; inferred from the extension if omitted.
        """
        format = format or infer_format(filepath)
        if format not in FORMATS:
            raise UnsupportedError(f"Unsupported config file format: {format}")
        Path(filepath).parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w") as file:
            if format == "yaml":
                yaml.safe_dump(self.data, file, indent=4, sort_keys=True)
            else:
                json.dump(self.data, file, indent=4, sort_keys=True)

    def get_nested_value(self, key: str) -> Any:
        """
        Get a nested value, `None` if any part of the dotted key is missing.
        """
        node = self.data
        for k in key.split("."):
            if not isinstance(node, dict) or k not in node:
                return None
            node = node[k]
        return node

    def set_nested_value(self, key: str, value: Any):
        """
        Set a nested value, creating intermediate mappings.

        Raises:
            TypeError: If an intermediate key holds a non-mapping value.
        """
        keys = key.split(".")
        node = self.data
        for i, k in enumerate(keys[:-1]):
            child = node.setdefault(k, {})
            if not isinstance(child, dict):
                raise TypeError(f"Nested config {'.'.join(keys[: i + 1])} is not a mapping.")
            node = child
        node[keys[-1]] = value

    def unset_nested_value(self, key: str):
        """Remove a nested value if present."""

        keys = key.split(".")
        node = self.data
        for k in keys[:-1]:
            if not isinstance(node, dict) or k not in node:
                return
            node = node[k]
        if isinstance(node, dict):
            node.pop(keys[-1], None)

    def items(self, prefix: str = "") -> list[tuple[str, Any]]:
        """Flatten the configuration into (dotted key, value) pairs."""

        flat = []

        def walk(node, current):
            if isinstance(node, dict):
                for key in sorted(node):
                    walk(node[key], f"{current}.{key}" if current else str(key))
            else:
                flat.append((current, node))

        walk(self.data, prefix)
        return flat


def load_user_config(path: Optional[str] = None) -> Config:
    """Load the user config file, an empty config if it does not exist."""

    cfg = Config()
    path = path or radialdpp.CONFIG_PATH
    try:
        cfg.load_from_file(path, "yaml")
    except FileNotFoundError:
        logger.debug("No config file at %s", path)
    return cfg


def _coerce(value: Any, cast: Callable[[Any], Any], source: str) -> Any:
    try:
        return cast(value)
    except (TypeError, ValueError) as e:
        raise DataInvalidError(f"Invalid value {value!r} from {source}: {e}") from e


class Settings:
    """
    Run settings resolved with precedence flag > environment > config file > default.

    Attributes:
        seed (int): Master seed of the replicate streams.
        eps_trunc (float): Truncation budget per window.
        workers (int): Worker processes for replicate parallelism.
        abs_tol (float): Absolute quadrature tolerance.
        rel_tol (float): Relative quadrature tolerance.
        max_subdivisions (int): Quadrature subdivision limit.
        level (float): Significance level of goodness-of-fit tests.
    """

    # name: (config key, environment variable, cast, default)
    FIELDS = {
        "seed": ("seed", radialdpp.SEED_ENV, lambda v: int(str(v), 0), radialdpp.DEFAULT_SEED),
        "eps_trunc": ("eps_trunc", radialdpp.EPS_TRUNC_ENV, float, radialdpp.DEFAULT_EPS_TRUNC),
        "workers": ("workers", radialdpp.THREADS_ENV, int, 1),
        "abs_tol": ("quadrature.abs_tol", None, float, 1e-10),
        "rel_tol": ("quadrature.rel_tol", None, float, 1e-10),
        "max_subdivisions": ("quadrature.max_subdivisions", None, int, 200),
        "level": ("gof.level", None, float, 0.01),
    }

    def __init__(self, **values):
        for name, (_, _, _, default) in self.FIELDS.items():
            setattr(self, name, values.get(name, default))

    @classmethod
    def resolve(cls, overrides: Optional[dict] = None, config: Optional[Config] = None) -> "Settings":
        """
        Resolve settings from explicit overrides, the environment and a config.

        Args:
            overrides: Values given explicitly, `None` entries are ignored.
            config: The config to read; the user config file if omitted.

        Returns:
            Settings: The resolved settings.

        Raises:
            DataInvalidError: If a value cannot be converted.
        """
        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        config = config if config is not None else load_user_config()
        values = {}
        for name, (key, env, cast, default) in cls.FIELDS.items():
            if name in overrides:
                values[name] = _coerce(overrides[name], cast, f"option {name}")
            elif env and os.environ.get(env):
                values[name] = _coerce(os.environ[env], cast, f"${env}")
            elif config.get_nested_value(key) is not None:
                values[name] = _coerce(config.get_nested_value(key), cast, f"config {key}")
            else:
                values[name] = default
        if values["workers"] <= 0:
            values["workers"] = os.cpu_count() or 1
        return cls(**values)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}
