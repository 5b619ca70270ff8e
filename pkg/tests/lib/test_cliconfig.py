import json
import logging

import click
import numpy as np
import pytest
import yaml

import radialdpp
from radialdpp.lib import cliconfig
from radialdpp.lib.asymptotics import ScalingRegime
from radialdpp.lib.cliconfig import CliConfig
from radialdpp.lib.cliconfig import ConfigValidationError
from radialdpp.lib.cliconfig import parse_args
from radialdpp.lib.ensembles import Ensemble
from radialdpp.lib.error import DomainError
from radialdpp.lib.error import QuadratureError
from radialdpp.lib.experiments import ExperimentPlan
from radialdpp.lib.experiments import ExperimentResult
from radialdpp.lib.experiments import LevelResult
from radialdpp.lib.funcs import TestFunction
from radialdpp.lib.gof import GofReport


### Test for option parsers ###


class TestParsers:
    def test_float_list(self):
        assert cliconfig.parse_float_list(None, None, "1, 2.5,4") == (1.0, 2.5, 4.0)
        assert cliconfig.parse_float_list(None, None, None) is None
        with pytest.raises(click.BadParameter):
            cliconfig.parse_float_list(None, None, "1,x")

    def test_interval(self):
        assert cliconfig.parse_interval(None, None, "-1:2.5") == (-1.0, 2.5)
        for value in ("1", "1:2:3", "a:b"):
            with pytest.raises(click.BadParameter):
                cliconfig.parse_interval(None, None, value)

    def test_grid(self):
        assert cliconfig.parse_grid(None, None, "0:1:3") == (0.0, 0.5, 1.0)
        for value in ("0:1", "0:1:x", "0:1:0"):
            with pytest.raises(click.BadParameter):
                cliconfig.parse_grid(None, None, value)

    def test_scaling(self):
        assert cliconfig.parse_scaling(None, None, "exp:2") == ScalingRegime("exp", 2.0)
        with pytest.raises(click.BadParameter):
            cliconfig.parse_scaling(None, None, "quadratic")

    def test_seed(self):
        assert cliconfig.parse_seed(None, None, "0xD99") == 0xD99
        assert cliconfig.parse_seed(None, None, "17") == 17
        for value in ("seven", "-1"):
            with pytest.raises(click.BadParameter):
                cliconfig.parse_seed(None, None, value)

    def test_default_xgrid(self):
        assert len(cliconfig.DEFAULT_XGRID) == 41
        assert cliconfig.DEFAULT_XGRID[0] == -5.0
        assert cliconfig.DEFAULT_XGRID[-1] == 5.0


### Test for function `parse_args` ###


class TestParseArgs:
    def test_clt(self):
        config = parse_args(["clt", "--ensemble", "ginibre", "--R", "100", "--reps", "200"])
        assert config.command == "clt"
        assert config.ensemble == Ensemble.ginibre()
        assert config.R == (100.0,)
        assert config.replicates == 200
        assert config.scaling == ScalingRegime("fixed")
        assert config.settings.seed == radialdpp.DEFAULT_SEED
        assert config.f == TestFunction.indicator(0.0, 1.0)

    def test_experiment_defaults(self):
        config = parse_args(["whitenoise", "--ensemble", "ginibre", "--R", "400"])
        assert config.scaling == ScalingRegime("power", 0.5)
        assert config.replicates == cliconfig.DEFAULT_REPLICATES
        assert config.g == TestFunction.indicator(1.0, 2.0)

    @pytest.mark.parametrize(
        "argv, scaling",
        [
            (["degenerate", "--ensemble", "ginibre", "--R", "4,8"], "power:2"),
            (["degenerate", "--ensemble", "hyperbolic", "--alpha", "1", "--R", "4,8"], "exp:2"),
            (["poisson", "--ensemble", "ginibre", "--R", "200", "--T", "5"], "extreme"),
            (["superexp", "--ensemble", "ginibre", "--R", "12"], "power:-0.5"),
            (["moments", "--ensemble", "ginibre", "--R", "12"], "fixed"),
        ],
    )
    def test_default_scalings(self, argv, scaling):
        assert str(parse_args(argv).scaling) == scaling

    def test_sample(self):
        config = parse_args(
            ["sample", "--ensemble", "hyperbolic", "--alpha", "2", "--window", "0.9:0.99", "--seed", "0x10"]
        )
        assert config.ensemble == Ensemble.hyperbolic(2.0)
        assert config.window == (0.9, 0.99)
        assert config.coordinate == "raw"
        assert config.settings.seed == 16

    def test_kernel_check(self):
        config = parse_args(["kernel-check", "--alpha", "0.5,2", "--xgrid", "-1:1:3", "--probes"])
        assert config.ensemble is None
        assert config.alphas == (0.5, 2.0)
        assert config.xgrid == (-1.0, 0.0, 1.0)
        assert config.probes

    def test_function_file(self, write_function):
        f = TestFunction((0.0, 1.0, 2.0), (1.0, 3.0))
        config = parse_args(["vf", "--ensemble", "ginibre", "--f", write_function(f)])
        assert config.f == f

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["bootstrap"],
            ["clt", "--ensemble", "ginibre"],
            ["clt", "--R", "10"],
            ["sample", "--ensemble", "ginibre"],
            ["clt", "--ensemble", "ginibre", "--R", "10", "--colour", "red"],
            ["clt", "--ensemble", "ginibre", "--R", "10", "extra"],
            ["clt", "--ensemble", "ginibre", "--R", "1,x"],
            ["vf", "--ensemble", "ginibre", "--format", "csv"],
        ],
    )
    def test_usage_errors(self, argv):
        with pytest.raises(click.UsageError):
            parse_args(argv)

    @pytest.mark.parametrize(
        "argv",
        [
            ["clt", "--ensemble", "ginibre", "--alpha", "1", "--R", "10"],
            ["clt", "--ensemble", "hyperbolic", "--R", "10"],
            ["clt", "--ensemble", "hyperbolic", "--alpha", "-1", "--R", "10"],
            ["clt", "--ensemble", "ginibre", "--R", "20,10"],
            ["clt", "--ensemble", "ginibre", "--R", "10", "--reps", "50"],
            ["clt", "--ensemble", "ginibre", "--R", "10", "--scaling", "extreme"],
            ["clt", "--ensemble", "hyperbolic", "--alpha", "1", "--R", "13"],
            ["poisson", "--ensemble", "ginibre", "--R", "200"],
            ["sample", "--ensemble", "ginibre", "--window", "0:1", "--coordinate", "scaled"],
            ["kernel-check", "--alpha", "0,1"],
        ],
    )
    def test_validation_errors(self, argv):
        with pytest.raises(ConfigValidationError) as excinfo:
            parse_args(argv)
        assert excinfo.value.exit_code == cliconfig.EXIT_VALIDATION

    def test_allow_large_R(self):
        config = parse_args(["clt", "--ensemble", "hyperbolic", "--alpha", "1", "--R", "13", "--allow-large-R"])
        assert config.allow_large_R

    def test_json_only(self):
        with pytest.raises(ConfigValidationError):
            CliConfig.from_params("vf", {"ensemble": "ginibre", "output_format": "csv"})


### Test for configuration precedence ###


class TestPrecedence:
    @pytest.fixture
    def plan_path(self, tmp_path):
        plan = ExperimentPlan(
            ensemble=Ensemble.hyperbolic(1.0),
            f=TestFunction.indicator(0.0, 2.0),
            scaling=ScalingRegime("fixed"),
            R_ladder=(6.0, 8.0),
            replicates=300,
            seed=5,
            variance_tolerance=0.2,
        )
        path = tmp_path / "plan.yaml"
        path.write_text(yaml.safe_dump(plan.to_dict()))
        return str(path)

    def test_plan_fields(self, plan_path):
        config = parse_args(["clt", "--plan", plan_path])
        assert config.ensemble == Ensemble.hyperbolic(1.0)
        assert config.R == (6.0, 8.0)
        assert config.replicates == 300
        assert config.settings.seed == 5
        assert config.variance_tolerance == 0.2
        assert config.experiment_plan().variance_tolerance == 0.2

    def test_flags_override_plan(self, plan_path):
        config = parse_args(["clt", "--plan", plan_path, "--seed", "7", "--R", "10", "--reps", "150"])
        assert config.settings.seed == 7
        assert config.R == (10.0,)
        assert config.replicates == 150

    def test_environment_and_config_file(self, monkeypatch, isolated_config):
        isolated_config.parent.mkdir(parents=True)
        isolated_config.write_text("seed: 3\neps_trunc: 1.0e-10\n")
        config = parse_args(["moments", "--ensemble", "ginibre", "--R", "10"])
        assert (config.settings.seed, config.settings.eps_trunc) == (3, 1e-10)
        monkeypatch.setenv(radialdpp.SEED_ENV, "9")
        assert parse_args(["moments", "--ensemble", "ginibre", "--R", "10"]).settings.seed == 9
        assert parse_args(["moments", "--ensemble", "ginibre", "--R", "10", "--seed", "1"]).settings.seed == 1

    def test_plan_rejected_outside_experiments(self, plan_path):
        with pytest.raises(click.UsageError):
            parse_args(["moments", "--ensemble", "ginibre", "--R", "10", "--plan", plan_path])
        with pytest.raises(ConfigValidationError):
            CliConfig.from_params("moments", {"ensemble": "ginibre", "R": (10.0,), "plan_path": plan_path})

    def test_invalid_plan_file(self, tmp_path):
        path = tmp_path / "plan.yaml"
        path.write_text("ensemble: [unclosed\n")
        with pytest.raises(ConfigValidationError):
            parse_args(["clt", "--plan", str(path)])

    def test_invalid_config_value(self, isolated_config):
        isolated_config.parent.mkdir(parents=True)
        isolated_config.write_text("eps_trunc: tiny\n")
        with pytest.raises(ConfigValidationError):
            parse_args(["moments", "--ensemble", "ginibre", "--R", "10"])


### Test for logging ###


def test_configure_logging(tmp_path):
    output = str(tmp_path / "out.json")
    cliconfig.configure_logging(1, output)
    cliconfig.configure_logging(2, output)
    package_logger = logging.getLogger("radialdpp")
    assert len(package_logger.handlers) == 2
    logging.getLogger("radialdpp.lib.oracle").debug("probe message")
    for handler in package_logger.handlers:
        handler.flush()
    assert "probe message" in (tmp_path / "out.json.log").read_text()
    cliconfig.configure_logging(0)
    assert len(package_logger.handlers) == 1
    assert package_logger.handlers[0].level == logging.WARNING


### Test for function `dispatch` ###


def _failing_result(plan, spec=None):
    level = LevelResult(plan.R_ladder[0], 1.0, checks=[GofReport("variance_ratio", 1.0, 0.07, False, 1)])
    return ExperimentResult("clt", plan, [level])


class TestDispatch:
    def test_vf_to_file(self, tmp_path):
        output = tmp_path / "vf.json"
        config = parse_args(["vf", "--ensemble", "ginibre", "-o", str(output)])
        assert cliconfig.dispatch(config) == cliconfig.EXIT_OK
        assert json.loads(output.read_text())["V_f"] > 0

    def test_numerical_failure(self, tmp_path, mocker):
        output = tmp_path / "vf.json"
        error = QuadratureError("no convergence", value=1.0, error_estimate=0.5)
        mocker.patch.dict(cliconfig.HANDLERS, {"vf": mocker.Mock(side_effect=error)})
        config = parse_args(["vf", "--ensemble", "ginibre", "-o", str(output)])
        assert cliconfig.dispatch(config) == cliconfig.EXIT_NUMERICAL
        assert json.loads(output.read_text()) == error.to_dict()

    def test_validation_failure(self, mocker):
        mocker.patch.dict(cliconfig.HANDLERS, {"vf": mocker.Mock(side_effect=DomainError("bad"))})
        config = parse_args(["vf", "--ensemble", "ginibre"])
        assert cliconfig.dispatch(config) == cliconfig.EXIT_VALIDATION

    def test_failed_check(self, tmp_path, mocker):
        mocker.patch.dict(cliconfig.EXPERIMENTS, {"clt": _failing_result})
        argv = ["clt", "--ensemble", "ginibre", "--R", "10", "--reps", "100", "-o", str(tmp_path / "clt.json")]
        assert cliconfig.dispatch(parse_args(argv)) == cliconfig.EXIT_OK
        assert cliconfig.dispatch(parse_args(argv + ["--strict"])) == cliconfig.EXIT_GOF
        assert json.loads((tmp_path / "clt.json").read_text())["pass"] is False

    def test_sidecars(self, tmp_path):
        output = tmp_path / "run" / "clt.json"
        argv = ["clt", "--ensemble", "ginibre", "--R", "10", "--reps", "100", "-o", str(output)]
        assert cliconfig.run("clt", _params(argv)) in (cliconfig.EXIT_OK, cliconfig.EXIT_GOF)
        replicates = (tmp_path / "run" / "clt.replicates.csv").read_text().splitlines()
        assert replicates[0] == "R,replicate_id,raw_stat,standardized_stat,count"
        assert len(replicates) == 101
        curve = (tmp_path / "run" / "clt.curve.csv").read_text().splitlines()
        assert curve[0] == "R,a_R,empirical_variance,exact_variance,predicted_variance"
        assert (tmp_path / "run" / "clt.json.log").exists()

    def test_csv_output(self, tmp_path):
        output = tmp_path / "moments.csv"
        config = parse_args(["moments", "--ensemble", "ginibre", "--R", "10,20", "--format", "csv", "-o", str(output)])
        assert cliconfig.dispatch(config) == cliconfig.EXIT_OK
        lines = output.read_text().splitlines()
        assert lines[0] == ",".join(cliconfig.oracle.MomentReport.CSV_COLUMNS)
        assert len(lines) == 3
        assert np.isclose(float(lines[1].split(",")[2]), 21.0)


def _params(argv):
    """Parsed option values of a command line, as a command receives them."""
    from radialdpp.commands import COMMANDS

    name, *args = argv
    with COMMANDS[name].make_context(name, list(args)) as context:
        return context.params
