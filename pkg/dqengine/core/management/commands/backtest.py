from pathlib import Path

from django.conf import settings

import log

from dqengine.api.serializers import BacktestResultSerializer, RollingPointSerializer
from dqengine.backtest import constants as defaults
from dqengine.backtest import helpers as backtest
from dqengine.backtest.types import BacktestConfig, ReturnPanel, Strategy

from ..base import EngineCommand


class Command(EngineCommand):
    help = "Backtest a rebalanced long-only strategy on a dated returns CSV"

    def add_engine_arguments(self, parser):
        self.option(parser, "--input", dest="source", help="date,TICKER1,... CSV")
        self.option(parser, "--alpha", type=float)
        self.option(parser, "--window", type=int)
        self.option(parser, "--rebalance", help="'monthly' or every-K rows")
        self.option(parser, "--strategy", choices=[item.value for item in Strategy])
        self.option(parser, "--threshold-multiple", type=float)
        self.option(parser, "--big-m", type=float)
        self.option(
            parser, "--risk-free-rate", type=float, help="annual rate as a decimal"
        )
        self.option(
            parser,
            "--track-dq",
            action="store_true",
            default=None,
            help="report the DQ of the fitted window at each rebalance",
        )
        self.option(
            parser,
            "--rolling",
            action="store_true",
            default=None,
            help="also report the DQ of every trailing window",
        )
        self.option(parser, "--plots", help="directory for date,value plot data")

    def get_defaults(self):
        return {
            **super().get_defaults(),
            "returns": True,
            "alpha": settings.DQ_DEFAULT_ALPHA,
            "window": defaults.DEFAULT_WINDOW,
            "rebalance": defaults.MONTHLY,
            "strategy": Strategy.MIN_DQ_EX.value,
            "threshold_multiple": 1.0,
            "risk_free_rate": 0.0,
            "track_dq": False,
            "rolling": False,
        }

    def run(self, *, source, returns, plots, rolling, **options):
        panel = backtest.load_returns_csv(self.require(source, "input"))
        if not returns:
            panel = ReturnPanel(panel.dates, -panel.returns, panel.tickers)

        config = BacktestConfig(
            window=options["window"],
            rebalance=options["rebalance"],
            alpha=options["alpha"],
            strategy=options["strategy"],
            threshold_multiple=options["threshold_multiple"],
            risk_free_rate=options["risk_free_rate"],
            seed=options["seed"],
            big_m=options["big_m"],
            track_dq=options["track_dq"],
        )
        result = backtest.run_backtest(panel, config)
        payload = BacktestResultSerializer(result).data

        points = []
        if rolling:
            points = backtest.rolling_dq_series(panel, config.alpha, config.window)
            payload["rolling"] = RollingPointSerializer(points, many=True).data

        if plots:
            self.write_plots(Path(plots), result, points)
        return payload

    def write_plots(self, directory: Path, result, points):
        backtest.write_plot_csv(directory / "wealth.csv", result.dates, result.wealth)
        if points:
            dates = [point.date for point in points]
            for name in ("dq_ex", "dq_var", "dq_es"):
                values = [getattr(point.report, name) for point in points]
                backtest.write_plot_csv(directory / f"{name}.csv", dates, values)
            values = [point.loss_gain for point in points]
            backtest.write_plot_csv(directory / "loss_gain.csv", dates, values)
        log.info(f"Wrote plot data to {directory}")
