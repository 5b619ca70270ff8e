import os

from appdirs import user_config_dir


PACKAGE_ROOT = os.path.dirname(__file__)
SOURCE_ROOT = os.path.dirname(PACKAGE_ROOT)
PROJECT_ROOT = os.path.dirname(SOURCE_ROOT)
CONFIG_PATH = os.path.join(user_config_dir("radialdpp", "radialdpp"), "radialdpp.yaml")
VERSION = "0.1.0"
CTX_SETTINGS = dict(help_option_names=["-h", "--help"])

DEFAULT_SEED = 0xD99
DEFAULT_EPS_TRUNC = 1e-12
THREADS_ENV = "RADIALDPP_THREADS"
SEED_ENV = "RADIALDPP_SEED"
EPS_TRUNC_ENV = "RADIALDPP_EPS_TRUNC"
