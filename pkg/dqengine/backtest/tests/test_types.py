# pylint: disable=expression-not-assigned,singleton-comparison,unused-variable

from datetime import date

import numpy as np
import pytest

from dqengine.risk.types import LevelError

from ..types import BacktestConfig, PanelError, ReturnPanel, Strategy

DATES = (date(2024, 1, 2), date(2024, 1, 3), date(2024, 1, 4))


def describe_return_panel():
    def it_turns_returns_into_losses(expect):
        returns = [[0.01, 0.02], [0.0, -0.01], [0.03, 0.0]]
        panel = ReturnPanel(DATES, returns, ["A", "B"])

        losses = panel.losses(1, 3)

        expect(losses.observations.tolist()) == [[-0.0, 0.01], [-0.03, -0.0]]
        expect(losses.labels) == ("A", "B")

    def it_checks_the_shape(expect):
        with expect.raises(PanelError):
            ReturnPanel(DATES, np.zeros((2, 2)), ["A", "B"])

    def it_rejects_total_losses(expect):
        with expect.raises(PanelError):
            ReturnPanel(DATES, [[0.0], [-1.0], [0.0]], ["A"])

    def it_rejects_non_finite_returns(expect):
        with expect.raises(PanelError):
            ReturnPanel(DATES, [[0.0], [np.nan], [0.0]], ["A"])

    def it_freezes_returns(expect):
        panel = ReturnPanel(DATES, np.zeros((3, 1)), ["A"])

        with expect.raises(ValueError):
            panel.returns[0, 0] = 1.0


def describe_backtest_config():
    def it_has_defaults(expect):
        config = BacktestConfig()

        expect(config.window) == 500
        expect(config.rebalance) == "monthly"
        expect(config.alpha.alpha) == 0.1
        expect(config.strategy) == Strategy.MIN_DQ_EX

    @pytest.mark.parametrize(
        ("value", "period"),
        [("every-5", 5), ("21", 21), (10, 10), ("Monthly", "monthly")],
    )
    def it_parses_rebalance_periods(expect, value, period):
        expect(BacktestConfig(rebalance=value).rebalance) == period

    @pytest.mark.parametrize("value", ["weekly", 0, "every-0"])
    def it_rejects_bad_rebalance_periods(expect, value):
        with expect.raises(PanelError):
            BacktestConfig(rebalance=value)

    def it_requires_a_meaningful_window(expect):
        with expect.raises(PanelError):
            BacktestConfig(window=1)

    def it_requires_a_lower_half_level_for_dq(expect):
        with expect.raises(LevelError):
            BacktestConfig(alpha=0.7)

    def it_allows_any_level_for_omega(expect):
        config = BacktestConfig(alpha=0.7, strategy="max_omega")

        expect(config.strategy) == Strategy.MAX_OMEGA
