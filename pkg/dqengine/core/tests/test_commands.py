# pylint: disable=expression-not-assigned,singleton-comparison,unused-variable,redefined-outer-name

import json
from io import StringIO

from django.core.management import CommandError, call_command

import numpy as np
import pandas as pd
import pytest

from dqengine.backtest.helpers import load_sample_csv
from dqengine.core.helpers import significant
from dqengine.dq import helpers as dq


def run(name: str, **options) -> dict:
    stdout = StringIO()
    call_command(name, stdout=stdout, **options)
    return json.loads(stdout.getvalue())


def write_csv(path, columns: dict):
    pd.DataFrame(columns).to_csv(path, index=False)
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture
def hedge_csv(tmp_path, rng):
    half = rng.normal(size=40)
    base = np.concatenate([half, -half])
    return write_csv(tmp_path / "hedge.csv", {"A": base, "B": -base})


@pytest.fixture
def duplicate_csv(tmp_path, rng):
    base = rng.standard_t(4, size=60)
    return write_csv(tmp_path / "duplicate.csv", {"A": base, "B": base})


def describe_compute():
    def it_reports_one_for_duplicated_columns(expect, duplicate_csv):
        data = run("compute", input=duplicate_csv, alpha=0.1)

        expect(data["dq_ex"]) == pytest.approx(1.0)
        expect(data["alpha"]) == 0.1

    def it_reports_zero_for_hedges(expect, hedge_csv):
        data = run("compute", input=hedge_csv, alpha=0.1)

        expect(data["dq_ex"]) == 0.0

    def it_matches_the_library(expect, tmp_path, rng):
        values = rng.normal(size=(100, 5))
        columns = {f"X{i}": values[:, i] for i in range(5)}
        path = write_csv(tmp_path / "gauss.csv", columns)
        expected = dq.report(load_sample_csv(path), 0.05)

        data = run("compute", input=path, alpha=0.05)

        expect(data["dq_ex"]) == significant(expected.dq_ex)
        expect(data["dq_var"]) == significant(expected.dq_var)
        expect(data["marginal_risks"]) == [
            significant(value) for value in expected.marginal_risks
        ]

    def it_negates_returns(expect, tmp_path):
        path = write_csv(tmp_path / "one.csv", {"A": [1.0, -2.0, 0.5]})

        losses = run("compute", input=path, alpha=0.2, measure="var")
        gains = run("compute", input=path, alpha=0.2, measure="var", returns=True)

        expect(losses["aggregate_threshold"]) == 1.0
        expect(gains["aggregate_threshold"]) == 2.0

    def it_writes_the_output_file(expect, hedge_csv, tmp_path):
        output = tmp_path / "out" / "report.json"

        call_command("compute", input=hedge_csv, output=str(output), stdout=StringIO())

        expect(json.loads(output.read_text())["dq_ex"]) == 0.0

    def it_merges_config_files_under_flags(expect, duplicate_csv, tmp_path):
        config = tmp_path / "engine.cfg"
        config.write_text(f"input={duplicate_csv}\nalpha=0.3\n")

        data = run("compute", config=str(config), alpha=0.1)

        expect(data["alpha"]) == 0.1

    def describe_errors():
        def it_requires_an_input(expect):
            with pytest.raises(CommandError) as error:
                run("compute")
            expect(error.value.returncode) == 2

        def it_rejects_upper_half_levels(expect, hedge_csv):
            with pytest.raises(CommandError) as error:
                run("compute", input=hedge_csv, alpha=0.7)
            expect(error.value.returncode) == 2

        def it_rejects_malformed_cells(expect, tmp_path):
            path = tmp_path / "bad.csv"
            path.write_text("A,B\n1.0,2.0\n3.0,oops\n")

            with pytest.raises(CommandError, match="Row 2, column B") as error:
                run("compute", input=str(path))
            expect(error.value.returncode) == 2

        def it_reports_missing_files(expect, tmp_path):
            with pytest.raises(CommandError) as error:
                run("compute", input=str(tmp_path / "missing.csv"))
            expect(error.value.returncode) == 4

        def it_rejects_unknown_config_keys(expect, tmp_path):
            config = tmp_path / "engine.cfg"
            config.write_text("colour=blue\n")

            with pytest.raises(CommandError, match="colour") as error:
                run("compute", config=str(config))
            expect(error.value.returncode) == 2


def describe_optimize():
    def it_balances_the_hedge(expect, hedge_csv):
        data = run("optimize", input=hedge_csv, alpha=0.1)

        expect(data["weights"]) == pytest.approx([0.5, 0.5], abs=1e-9)
        expect(data["objective"]) == pytest.approx(0.0, abs=1e-12)
        expect(data["status"]) == "optimal"
        expect(data["labels"]) == ["A", "B"]

    def it_supports_other_methods(expect, hedge_csv):
        data = run("optimize", input=hedge_csv, alpha=0.1, method="gradient")

        expect(data["dq"]) == pytest.approx(0.0, abs=1e-9)

    def it_maximizes_omega(expect, tmp_path, rng):
        base = rng.normal(size=50)
        path = write_csv(tmp_path / "omega.csv", {"A": base - 1.0, "B": base})

        data = run("optimize", input=path, strategy="max_omega")

        expect(data["weights"]) == pytest.approx([1.0, 0.0], abs=1e-9)
        expect(data["omega"] > 0) == True

    def it_exits_with_solver_failures(expect, tmp_path):
        path = write_csv(tmp_path / "flat.csv", {"A": [1.0, 1.0], "B": [2.0, 2.0]})

        with pytest.raises(CommandError) as error:
            run("optimize", input=path, alpha=0.1)
        expect(error.value.returncode) == 3


def describe_frontier():
    def it_lists_points_and_the_best_ratio(expect, tmp_path, rng):
        values = rng.normal(size=(60, 3))
        columns = {f"X{i}": values[:, i] for i in range(3)}
        path = write_csv(tmp_path / "gauss.csv", columns)

        data = run("frontier", input=path, alpha=0.1)

        expect(len(data["points"]) > 1) == True
        ratios = [point["ratio"] for point in data["points"]]
        expect(data["best"]["ratio"] <= min(ratios) + 1e-9) == True
        expect(0 <= data["best"]["dq"] <= 1) == True


def describe_backtest():
    @pytest.fixture
    def panel_csv(tmp_path, rng):
        dates = pd.bdate_range("2022-01-03", periods=90).strftime("%Y-%m-%d")
        returns = rng.normal(0.0005, 0.01, size=(90, 3))
        return write_csv(
            tmp_path / "panel.csv",
            {"date": dates, **{f"T{i}": returns[:, i] for i in range(3)}},
        )

    def it_keeps_flat_wealth_on_zero_returns(expect, tmp_path):
        dates = pd.bdate_range("2022-01-03", periods=30).strftime("%Y-%m-%d")
        path = write_csv(tmp_path / "flat.csv", {"date": dates, "A": 0.0, "B": 0.0})

        data = run(
            "backtest", input=path, window=10, rebalance="5", strategy="equal_weight"
        )

        expect(set(data["wealth"])) == {1.0}
        expect(data["stats"]) == {"AR": 0.0, "AV": 0.0, "SR": None}

    def it_is_deterministic(expect, panel_csv):
        options = {"input": panel_csv, "window": 40, "rebalance": "every-10"}

        expect(run("backtest", **options)) == run("backtest", **options)

    def it_reports_rolling_quotients_and_plots(expect, panel_csv, tmp_path):
        plots = tmp_path / "plots"

        data = run(
            "backtest",
            input=panel_csv,
            window=50,
            alpha=0.01,
            strategy="equal_weight",
            rolling=True,
            plots=str(plots),
        )

        expect(len(data["rolling"])) == 41
        expect({point["report"]["dq_var"] for point in data["rolling"]}) == {0.0}
        expect({point["report"]["dq_es"] for point in data["rolling"]}) == {0.0}
        expect(sorted(item.name for item in plots.iterdir())) == [
            "dq_es.csv",
            "dq_ex.csv",
            "dq_var.csv",
            "loss_gain.csv",
            "wealth.csv",
        ]

    def it_rejects_short_panels(expect, panel_csv):
        with pytest.raises(CommandError) as error:
            run("backtest", input=panel_csv, window=200)
        expect(error.value.returncode) == 2


def describe_simulate():
    def it_reports_zero_tail_quotients_on_small_samples(expect):
        data = run("simulate", alpha=0.02, r=[0.0], reps=20, seed=1)

        result = data["results"][0]
        expect(result["r"]) == 0.0
        expect(result["size"]) == 49
        expect(result["dq_var"]) == 0.0
        expect(result["dq_es"]) == 0.0
        expect(result["closed_form"] > 0) == True

    def it_runs_independent_models_once(expect):
        data = run("simulate", model="iid_pareto", alpha=0.1, reps=5, size=20)

        expect(len(data["results"])) == 1
        expect(data["results"][0]["closed_form"]) == None
        expect(data["seed"]) == 20240105

    def it_rejects_invalid_models(expect):
        with pytest.raises(CommandError) as error:
            run("simulate", r=[1.5], reps=1)
        expect(error.value.returncode) == 2

    @pytest.mark.slow
    def it_reproduces_the_small_sample_experiment(expect):
        data = run("simulate", alpha=0.02, n=5, size=49, reps=1000)

        means = [result["dq_ex"] for result in data["results"]]
        expect(means) == sorted(means)
        expect({result["dq_var"] for result in data["results"]}) == {0.0}
        expect({result["dq_es"] for result in data["results"]}) == {0.0}
