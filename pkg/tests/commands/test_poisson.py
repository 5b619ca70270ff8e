import json

from radialdpp.__main__ import cli


### Test for command `poisson` ###


class TestPoisson:
    def test_report(self, runner, tmp_path):
        output = tmp_path / "poisson.json"
        args = ["poisson", "--ensemble", "ginibre", "--R", "200", "--T", "5", "--reps", "100", "-o", str(output)]
        assert runner.invoke(cli, args).exit_code == 0
        level = json.loads(output.read_text())["levels"][0]
        assert {c["test"] for c in level["checks"]} == {
            "count_mean",
            "dispersion",
            "poisson_chisquare",
            "exponential_spacings_ks",
        }
        assert level["predicted_variance"] > 0

    def test_needs_T(self, runner):
        args = ["poisson", "--ensemble", "ginibre", "--R", "200", "--reps", "100"]
        assert runner.invoke(cli, args).exit_code == 3

    def test_needs_extreme_scaling(self, runner):
        args = ["poisson", "--ensemble", "ginibre", "--R", "200", "--T", "5", "--scaling", "fixed"]
        assert runner.invoke(cli, args).exit_code == 3
