import json

from radialdpp.__main__ import cli
from radialdpp.lib.funcs import TestFunction


### Test for command `superexp` ###


class TestSuperexp:
    def test_ginibre(self, runner, tmp_path):
        output = tmp_path / "superexp.json"
        args = ["superexp", "--ensemble", "ginibre", "--R", "4", "--reps", "100", "-o", str(output)]
        assert runner.invoke(cli, args).exit_code == 0
        report = json.loads(output.read_text())
        assert report["exploratory"] is False
        assert "jump_variance_lower_bound" in {c["test"] for c in report["levels"][0]["checks"]}

    def test_zero_function_rejected(self, runner, write_function):
        path = write_function(TestFunction.zero())
        args = ["superexp", "--ensemble", "ginibre", "--R", "4", "--reps", "100", "--f", path]
        assert runner.invoke(cli, args).exit_code == 3

    def test_exploratory(self, runner, tmp_path):
        output = tmp_path / "superexp.json"
        args = ["superexp", "--ensemble", "ginibre", "--R", "4", "--reps", "100", "--exploratory", "-o", str(output)]
        assert runner.invoke(cli, args).exit_code == 0
        report = json.loads(output.read_text())
        assert report["exploratory"] is True
        assert report["pass"] is None

    def test_zero_statistic(self, runner, write_function, tmp_path):
        path = write_function(TestFunction.indicator(-4.0, -2.0))
        output = tmp_path / "superexp.json"
        args = ["superexp", "--ensemble", "ginibre", "--R", "1,4", "--reps", "100", "--f", path, "-o", str(output)]
        assert runner.invoke(cli, args).exit_code == 0
        first = json.loads(output.read_text())["levels"][0]
        assert [c["test"] for c in first["checks"]] == ["zero_statistic"]
        assert first["pass"] is True
