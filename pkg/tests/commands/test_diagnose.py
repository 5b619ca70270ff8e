import json

from radialdpp.__main__ import cli
from radialdpp.lib.funcs import TestFunction


### Test for command `diagnose` ###


class TestDiagnose:
    def test_soshnikov_columns(self, runner):
        result = runner.invoke(cli, ["diagnose", "--ensemble", "ginibre", "--R", "50,100", "--scaling", "power:0.5"])
        assert result.exit_code == 0
        rows = json.loads(result.stdout)["diagnostics"]
        assert [row["R"] for row in rows] == [50.0, 100.0]
        assert all(row["var"] > 0 for row in rows)
        assert "sum_means" not in rows[0]

    def test_poisson_columns(self, runner, write_function):
        path = write_function(TestFunction((0.0, 1.0), (0.5,)))
        args = ["diagnose", "--ensemble", "ginibre", "--R", "200", "--scaling", "extreme", "--f", path]
        args += ["--format", "csv"]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0
        header = result.stdout.splitlines()[0].split(",")
        assert {"sum_means", "sup_single", "avoidance_gap", "mean_abs_ratio"} <= set(header)
