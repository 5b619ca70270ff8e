"""
A module for the command-line configuration and its dispatch.

Every command parses its options into a `CliConfig`, which `dispatch` maps to a
library operation and whose result it writes as JSON or CSV.

Exit codes:
    0: success.
    1: numerical failure; the error is written as a JSON document.
    2: usage error (unknown flag, missing value, extra command).
    3: validation error (inconsistent or unsupported values, rejected plans).
    4: a goodness-of-fit check failed and `--strict` was given.

Classes:
    CliConfig: A validated command-line configuration.
    ConfigValidationError: Click exception for validation errors.
"""

import logging
import math
from dataclasses import dataclass
from dataclasses import field
from pathlib import Path
from typing import Any
from typing import Callable
from typing import NamedTuple
from typing import Optional

import click
import numpy as np
import pandas as pd
import yaml

import radialdpp
from radialdpp.lib import asymptotics
from radialdpp.lib import fileutil
from radialdpp.lib import oracle
from radialdpp.lib.asymptotics import ScalingRegime
from radialdpp.lib.config import Settings
from radialdpp.lib.ensembles import COORDINATES
from radialdpp.lib.ensembles import GINIBRE
from radialdpp.lib.ensembles import HYPERBOLIC
from radialdpp.lib.ensembles import KINDS
from radialdpp.lib.ensembles import RAW
from radialdpp.lib.ensembles import SCALED
from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.ensembles import Window
from radialdpp.lib.error import BaseError
from radialdpp.lib.error import DataError
from radialdpp.lib.error import DomainError
from radialdpp.lib.error import ExperimentRejected
from radialdpp.lib.error import RegimeError
from radialdpp.lib.experiments import EXPERIMENTS
from radialdpp.lib.experiments import ExperimentPlan
from radialdpp.lib.experiments import validate_plan
from radialdpp.lib.funcs import QuadratureSpec
from radialdpp.lib.funcs import TestFunction
from radialdpp.lib.gof import GofReport
from radialdpp.lib.sampler import sample_window


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_GOF = 4

EXPERIMENT_COMMANDS = ("clt", "whitenoise", "poisson", "superexp", "degenerate")
COMMANDS = ("sample", "moments", "vf", "kernel-check") + EXPERIMENT_COMMANDS + ("diagnose",)
OUTPUT_FORMATS = ("json", "csv")
JSON_ONLY = ("vf", "kernel-check")
VALIDATION_ERRORS = (DataError, DomainError, RegimeError, ExperimentRejected)

DEFAULT_REPLICATES = 10_000
DEFAULT_SCALINGS = {
    "whitenoise": "power:0.5",
    "poisson": "extreme",
    "superexp": "power:-0.5",
}
DEGENERATE_SCALINGS = {GINIBRE: "power:2", HYPERBOLIC: "exp:2"}

KERNEL_CHECK_ALPHAS = (0.5, 1.0, 2.0, 3.7)
KERNEL_CHECK_TOLERANCE = 1e-8
DEFAULT_XGRID = tuple(np.linspace(-5.0, 5.0, 41).tolist())
PROBE_ALPHAS = (0.5, 1.0, 2.0)
PROBE_Y_GRID = tuple(np.logspace(2, 6, 9).tolist())
PROBE_T_GRID = tuple(np.linspace(0.0, 20.0, 21).tolist())
PROBE_GROWTH_GRID = tuple(np.linspace(0.0, 1.0, 4, endpoint=False).tolist() + np.logspace(0, 3, 31).tolist())
PROBE_C0 = 1.0


class ConfigValidationError(click.ClickException):
    """Raised when the options parse but do not describe a runnable command."""

    exit_code = EXIT_VALIDATION


### Option parsing ###


def parse_float_list(context: click.Context, param: click.Parameter, value: Optional[str]):
    """Parse "1,2.5,4" into a tuple of floats."""

    if value is None:
        return None
    try:
        return tuple(float(x) for x in value.split(",") if x.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {value!r}")


def parse_interval(context: click.Context, param: click.Parameter, value: Optional[str]):
    """Parse "LO:HI"."""

    if value is None:
        return None
    parts = value.split(":")
    try:
        if len(parts) != 2:
            raise ValueError
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise click.BadParameter(f"expected LO:HI, got {value!r}")


def parse_grid(context: click.Context, param: click.Parameter, value: Optional[str]):
    """Parse "LO:HI:N" into N evenly spaced points."""

    if value is None:
        return None
    parts = value.split(":")
    try:
        if len(parts) != 3:
            raise ValueError
        lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise click.BadParameter(f"expected LO:HI:N, got {value!r}")
    if num < 1:
        raise click.BadParameter("the grid needs at least one point")
    return tuple(np.linspace(lo, hi, num).tolist())


def parse_scaling(context: click.Context, param: click.Parameter, value: Optional[str]):
    if value is None:
        return None
    try:
        return ScalingRegime.parse(value)
    except RegimeError as e:
        raise click.BadParameter(str(e))


def parse_seed(context: click.Context, param: click.Parameter, value: Optional[str]):
    """Parse a decimal or 0x-prefixed seed."""

    if value is None:
        return None
    try:
        seed = int(value, 0)
    except ValueError:
        raise click.BadParameter(f"expected an integer, got {value!r}")
    if seed < 0:
        raise click.BadParameter("the seed must be non-negative")
    return seed


OPTIONS = {
    "ensemble": click.option("--ensemble", type=click.Choice(KINDS), help="Ensemble"),
    "alpha": click.option(
        "--alpha",
        callback=parse_float_list,
        help="Hyperbolic parameter α > 0 (kernel-check takes a comma-separated list)",
    ),
    "f": click.option(
        "--f",
        "f_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Test function JSON file  [default: indicator of [0, 1)]",
    ),
    "g": click.option(
        "--g",
        "g_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Second test function JSON file  [default: f shifted by its support width]",
    ),
    "R": click.option("--R", "R", callback=parse_float_list, help="R value or comma-separated increasing ladder"),
    "scaling": click.option("--scaling", callback=parse_scaling, help="fixed | power:P | exp:C | extreme"),
    "reps": click.option("--reps", "replicates", type=click.IntRange(min=1), help="Replicates per R"),
    "T": click.option("--T", "T", type=float, help="Count window length of the Poisson run"),
    "window": click.option("--window", callback=parse_interval, help="Window LO:HI"),
    "coordinate": click.option(
        "--coordinate",
        type=click.Choice(COORDINATES),
        default=RAW,
        show_default=True,
        help="Coordinate of the window",
    ),
    "xgrid": click.option("--xgrid", callback=parse_grid, help="Grid LO:HI:N  [default: -5:5:41]"),
    "plan": click.option(
        "--plan",
        "plan_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Experiment plan (JSON or YAML); flags override its fields",
    ),
    "output": click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output file  [default: stdout]"),
    "format": click.option(
        "--format",
        "output_format",
        type=click.Choice(OUTPUT_FORMATS),
        default="json",
        show_default=True,
        help="Output format",
    ),
    "seed": click.option("--seed", callback=parse_seed, help=f"Master seed  [default: {radialdpp.DEFAULT_SEED:#x}]"),
    "eps": click.option("--eps", type=float, help="Truncation budget per window"),
    "level": click.option("--level", type=click.FloatRange(0, 1, min_open=True, max_open=True), help="Test level"),
    "strict": click.option("--strict", is_flag=True, help="Exit with 4 when a check fails"),
    "exploratory": click.option(
        "--exploratory",
        is_flag=True,
        help="Run without the jump hypothesis and report without pass/fail",
    ),
    "probes": click.option("--probes", is_flag=True, help="Also report the coefficient error probes"),
    "allow_large_R": click.option(
        "--allow-large-R",
        "allow_large_R",
        is_flag=True,
        help="Lift the hyperbolic R ceilings",
    ),
    "verbose": click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG"),
}


def options(*names: str) -> Callable:
    """Apply the named shared options to a command, in the given order."""

    def decorator(func):
        for name in reversed(names):
            func = OPTIONS[name](func)
        return func

    return decorator


### Configuration ###


def _ensemble(name: Optional[str], alphas: Optional[tuple]) -> Optional[Ensemble]:
    if name is None:
        return None
    if name == GINIBRE:
        if alphas:
            raise ConfigValidationError("--alpha applies to the hyperbolic ensemble only.")
        return Ensemble.ginibre()
    if not alphas or len(alphas) != 1:
        raise ConfigValidationError("The hyperbolic ensemble needs exactly one --alpha value.")
    try:
        return Ensemble.hyperbolic(alphas[0])
    except DataError as e:
        raise ConfigValidationError(str(e))


def _load(loader: Callable[[str], Any], path: Optional[str]):
    if path is None:
        return None
    try:
        return loader(path)
    except (BaseError, OSError, ValueError, yaml.YAMLError) as e:
        raise ConfigValidationError(f"Cannot load {path}: {e}")


def _first(*values):
    return next((v for v in values if v is not None), None)


@dataclass
class CliConfig:
    """
    A validated command-line configuration.

    Attributes:
        command (str): One of `COMMANDS`.
        settings (Settings): Seed, truncation, workers, quadrature and test level.
        ensemble (Ensemble): The ensemble, `None` for kernel-check.
        f (TestFunction): The test function.
        g (TestFunction): The second test function of white-noise runs.
        R (tuple[float, ...]): R ladder.
        scaling (ScalingRegime): Declared scaling.
        replicates (int): Replicates per R.
        T (float): Count window length.
        window (tuple[float, float]): Sampling window.
        coordinate (str): Coordinate of the sampling window.
        alphas (tuple[float, ...]): α values of kernel-check.
        xgrid (tuple[float, ...]): x grid of kernel-check.
        output (str): Output path, stdout if `None`.
        format (str): "json" or "csv".
        strict (bool): Exit with 4 on failed checks.
        exploratory (bool): Exploratory superexponential run.
        probes (bool): Report the error probes in kernel-check.
        allow_large_R (bool): Lift the hyperbolic R ceilings.
        variance_tolerance (float): Relative tolerance of variance checks, from a plan.
        verbosity (int): Logging verbosity.
    """

    command: str
    settings: Settings
    ensemble: Optional[Ensemble] = None
    f: TestFunction = field(default_factory=lambda: TestFunction.indicator(0.0, 1.0))
    g: Optional[TestFunction] = None
    R: tuple = ()
    scaling: ScalingRegime = field(default_factory=lambda: ScalingRegime("fixed"))
    replicates: Optional[int] = None
    T: Optional[float] = None
    window: Optional[tuple] = None
    coordinate: str = RAW
    alphas: tuple = ()
    xgrid: tuple = DEFAULT_XGRID
    output: Optional[str] = None
    format: str = "json"
    strict: bool = False
    exploratory: bool = False
    probes: bool = False
    allow_large_R: bool = False
    variance_tolerance: Optional[float] = None
    verbosity: int = 0

    @classmethod
    def from_params(cls, command: str, params: dict) -> "CliConfig":
        """
        Build and validate a configuration from parsed option values.

        Flags take precedence over the fields of a `--plan` file, which take
        precedence over settings from the environment and the config file.

        Raises:
            click.UsageError: If a required option is missing.
            ConfigValidationError: If the options are inconsistent.
        """
        if command not in COMMANDS:
            raise click.UsageError(f"No such command {command!r}.")
        p = dict(params)
        plan = _load(ExperimentPlan.from_file, p.get("plan_path"))
        if plan is not None and command not in EXPERIMENT_COMMANDS:
            raise ConfigValidationError(f"{command} takes no --plan.")
        try:
            settings = Settings.resolve(
                {
                    "seed": _first(p.get("seed"), plan and plan.seed),
                    "eps_trunc": _first(p.get("eps"), plan and plan.eps_trunc),
                    "level": _first(p.get("level"), plan and plan.level),
                }
            )
        except DataError as e:
            raise ConfigValidationError(str(e))

        ensemble = _ensemble(p.get("ensemble"), p.get("alpha")) if command != "kernel-check" else None
        config = cls(
            command=command,
            settings=settings,
            ensemble=_first(ensemble, plan and plan.ensemble),
            f=_first(_load(TestFunction.from_file, p.get("f_path")), plan and plan.f, TestFunction.indicator(0.0, 1.0)),
            g=_first(_load(TestFunction.from_file, p.get("g_path")), plan and plan.g),
            R=_first(p.get("R"), plan and plan.R_ladder, ()),
            replicates=_first(p.get("replicates"), plan and plan.replicates),
            T=_first(p.get("T"), plan and plan.T),
            window=p.get("window"),
            coordinate=p.get("coordinate") or RAW,
            alphas=(p.get("alpha") or ()) if command == "kernel-check" else (),
            xgrid=p.get("xgrid") or DEFAULT_XGRID,
            output=p.get("output"),
            format=p.get("output_format") or "json",
            strict=bool(p.get("strict")),
            exploratory=bool(p.get("exploratory")) or bool(plan and plan.exploratory),
            probes=bool(p.get("probes")),
            allow_large_R=bool(p.get("allow_large_R")) or bool(plan and plan.allow_large_R),
            verbosity=p.get("verbose") or 0,
        )
        config.scaling = _first(p.get("scaling"), plan and plan.scaling) or config.default_scaling()
        config.variance_tolerance = plan.variance_tolerance if plan is not None else None
        if command == "whitenoise" and config.g is None and not config.f.is_zero():
            lo, hi = config.f.support_hull()
            config.g = config.f.translate(hi - lo)
        if command in EXPERIMENT_COMMANDS and config.replicates is None:
            config.replicates = DEFAULT_REPLICATES
        config.validate()
        return config

    def default_scaling(self) -> ScalingRegime:
        if self.command == "degenerate" and self.ensemble is not None:
            return ScalingRegime.parse(DEGENERATE_SCALINGS[self.ensemble.kind])
        return ScalingRegime.parse(DEFAULT_SCALINGS.get(self.command, "fixed"))

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec.from_settings(self.settings)

    def validate(self):
        """
        Raises:
            click.UsageError: If a required option is missing.
            ConfigValidationError: If the options are inconsistent.
        """
        c = self.command
        if c != "kernel-check" and self.ensemble is None:
            raise click.UsageError("Missing option '--ensemble'.")
        if c in ("moments", "diagnose") + EXPERIMENT_COMMANDS and not self.R:
            raise click.UsageError("Missing option '--R'.")
        if c in JSON_ONLY and self.format == "csv":
            raise ConfigValidationError(f"{c} writes JSON only.")
        if c == "sample":
            if self.window is None:
                raise click.UsageError("Missing option '--window'.")
            if self.coordinate == SCALED and len(self.R) != 1:
                raise ConfigValidationError("A scaled window needs exactly one --R value.")
        if c == "kernel-check" and any(not a > 0 for a in self.alphas):
            raise ConfigValidationError("alpha must be > 0.")
        if c in EXPERIMENT_COMMANDS:
            result = validate_plan(self.experiment_plan(), c)
            if not result:
                raise ConfigValidationError(result.message)

    def experiment_plan(self) -> ExperimentPlan:
        try:
            return ExperimentPlan(
                ensemble=self.ensemble,
                f=self.f,
                scaling=self.scaling,
                R_ladder=tuple(self.R),
                replicates=self.replicates,
                seed=self.settings.seed,
                eps_trunc=self.settings.eps_trunc,
                g=self.g,
                T=self.T,
                workers=self.settings.workers,
                level=self.settings.level,
                exploratory=self.exploratory,
                allow_large_R=self.allow_large_R,
                variance_tolerance=self.variance_tolerance,
            )
        except DataError as e:
            raise ConfigValidationError(str(e))


def parse_args(argv: list[str]) -> CliConfig:
    """
    Parse a command line (without the program name) into a `CliConfig`.

    Raises:
        click.UsageError: On unknown flags, missing values or extra commands.
        ConfigValidationError: If the options are inconsistent.
    """
    from radialdpp.commands import COMMANDS as registry

    if not argv:
        raise click.UsageError("Missing command.")
    name, *args = argv
    if name not in registry:
        raise click.UsageError(f"No such command {name!r}.")
    with registry[name].make_context(name, list(args)) as context:
        return CliConfig.from_params(name, context.params)


### Logging ###


def configure_logging(verbosity: int = 0, output: Optional[str] = None):
    """
    Log the package to stderr at a level set by `verbosity`, and with
    timestamps to `<output>.log` when an output file is given.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    package_logger = logging.getLogger(radialdpp.__name__)
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()
    package_logger.setLevel(logging.DEBUG)
    stream = logging.StreamHandler()
    stream.setLevel(level)
    stream.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    package_logger.addHandler(stream)
    path = fileutil.log_path(output)
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        sidecar = logging.FileHandler(path, mode="w")
        sidecar.setLevel(logging.DEBUG)
        sidecar.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        package_logger.addHandler(sidecar)


### Dispatch ###


class Outcome(NamedTuple):
    payload: dict
    frame: Optional[pd.DataFrame] = None
    sidecars: Optional[dict] = None
    passed: Optional[bool] = None


def _header(config: CliConfig) -> dict:
    return {
        "ensemble": config.ensemble.to_dict(),
        "f": config.f.to_dict(),
        "scaling": str(config.scaling),
        "eps_trunc": config.settings.eps_trunc,
    }


def run_sample(config: CliConfig) -> Outcome:
    e, (lo, hi) = config.ensemble, config.window
    if config.coordinate == SCALED:
        R = config.R[0]
        window = Window.scaled(lo, hi, R, config.scaling.a_R(e, R))
    else:
        window = Window(lo, hi, config.coordinate)
    seed, eps = config.settings.seed, config.settings.eps_trunc
    samples = [sample_window(e, window, seed, rid, eps) for rid in range(config.replicates or 1)]
    frame = pd.DataFrame(
        [row for sample in samples for row in sample.rows()],
        columns=["replicate_id", "n", "value"],
    )
    payload = {
        "ensemble": e.to_dict(),
        "window": window.to_dict(),
        "seed": seed,
        "eps_trunc": eps,
        "samples": [sample.to_dict() for sample in samples],
    }
    return Outcome(payload, frame)


def run_moments(config: CliConfig) -> Outcome:
    reports = [
        oracle.moment_report(
            config.ensemble,
            config.f,
            config.scaling,
            R,
            config.settings.eps_trunc,
            config.quadrature,
            config.allow_large_R,
        )
        for R in config.R
    ]
    frame = pd.DataFrame([report.csv_row() for report in reports], columns=list(oracle.MomentReport.CSV_COLUMNS))
    return Outcome({**_header(config), "reports": [report.to_dict() for report in reports]}, frame)


def run_vf(config: CliConfig) -> Outcome:
    e = config.ensemble
    if e.is_hyperbolic:
        value = asymptotics.v_f_hyperbolic(e.alpha, config.f, config.quadrature)
    else:
        value = asymptotics.v_f_ginibre(config.f, config.quadrature)
    return Outcome({"V_f": value})


def run_kernel_check(config: CliConfig) -> Outcome:
    spec = config.quadrature.tightened(10)
    checks = []
    for alpha in config.alphas or KERNEL_CHECK_ALPHAS:
        error = max(abs(asymptotics.beta_kernel_marginal(alpha, x, spec) - math.exp(x)) for x in config.xgrid)
        checks.append(
            GofReport(
                "kernel_marginal",
                error,
                KERNEL_CHECK_TOLERANCE,
                error <= KERNEL_CHECK_TOLERANCE,
                len(config.xgrid),
                details={"alpha": alpha},
            )
        )
        logger.info("Kernel marginal at alpha=%g: max error %.3g", alpha, error)
    passed = all(check.passed for check in checks)
    payload = {
        "max_abs_error": max(check.statistic for check in checks),
        "checks": [check.to_dict() for check in checks],
        "pass": passed,
    }
    if config.probes:
        payload["probes"] = {
            "c0": PROBE_C0,
            "power_decay_constant": asymptotics.power_decay_constant(PROBE_Y_GRID, PROBE_T_GRID, PROBE_C0),
            "coefficient_growth_constant": {
                str(alpha): asymptotics.coefficient_growth_constant(alpha, PROBE_GROWTH_GRID)
                for alpha in PROBE_ALPHAS
            },
        }
    return Outcome(payload, passed=passed)


def run_diagnose(config: CliConfig) -> Outcome:
    e, f, eps = config.ensemble, config.f, config.settings.eps_trunc
    poisson = config.scaling.classify(e) == asymptotics.EXTREME and all(0 <= v < 1 for v in f.values)
    rows = []
    for R in config.R:
        a_R = config.scaling.a_R(e, R)
        row = {"R": R, "a_R": a_R, **oracle.soshnikov_diagnostics(e, f, R, a_R, eps)._asdict()}
        if poisson:
            row.update(oracle.poisson_limit_diagnostics(e, R, a_R, f, eps)._asdict())
        rows.append(row)
    return Outcome({**_header(config), "diagnostics": rows}, pd.DataFrame(rows))


def run_experiment(config: CliConfig) -> Outcome:
    plan = config.experiment_plan()
    run = EXPERIMENTS[config.command]
    result = run(plan) if config.command in ("poisson", "degenerate") else run(plan, config.quadrature)
    curve = result.curve_frame()
    if config.command == "degenerate":
        return Outcome(result.to_dict(), curve, passed=result.passed)
    replicates = result.replicate_frame()
    sidecars = {".curve.csv": curve}
    if config.format == "json":
        sidecars[".replicates.csv"] = replicates
    return Outcome(result.to_dict(), replicates, sidecars, result.passed)


HANDLERS = {
    "sample": run_sample,
    "moments": run_moments,
    "vf": run_vf,
    "kernel-check": run_kernel_check,
    "diagnose": run_diagnose,
    **{name: run_experiment for name in EXPERIMENT_COMMANDS},
}


def _emit(text: str, output: Optional[str]):
    if output:
        fileutil.write_text(text, output)
    else:
        click.echo(text, nl=False)


def dispatch(config: CliConfig) -> int:
    """
    Run the operation of a configuration and write its report.

    Returns:
        int: The exit code.
    """
    try:
        outcome = HANDLERS[config.command](config)
    except VALIDATION_ERRORS as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_VALIDATION
    except BaseError as e:
        logger.error("%s failed: %s", config.command, e)
        _emit(fileutil.dumps_json(e.to_dict()), config.output)
        return EXIT_NUMERICAL

    if config.format == "csv":
        _emit(fileutil.dumps_csv(outcome.frame), config.output)
    else:
        _emit(fileutil.dumps_json(outcome.payload), config.output)
    if config.output:
        for suffix, frame in (outcome.sidecars or {}).items():
            fileutil.write_text(fileutil.dumps_csv(frame), fileutil.sidecar_path(config.output, suffix))
    if outcome.passed is False:
        logger.warning("%s: at least one check failed", config.command)
        if config.strict:
            return EXIT_GOF
    return EXIT_OK


def run(command: str, params: dict) -> int:
    """Configure logging, build the configuration and dispatch it."""

    config = CliConfig.from_params(command, params)
    configure_logging(config.verbosity, config.output)
    logger.debug("Settings: %s", config.settings.to_dict())
    return dispatch(config)
