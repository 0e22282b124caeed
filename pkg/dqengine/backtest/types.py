from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import Enum
from functools import cached_property

import numpy as np

from dqengine.dq.types import DqReport
from dqengine.optimize.types import PortfolioWeights
from dqengine.risk.types import LossSample, RiskLevel

from . import constants


class PanelError(ValueError):
    """Malformed returns data or an impossible backtest schedule."""


class Strategy(str, Enum):
    MIN_DQ_EX = "min_dq_ex"
    MAX_OMEGA = "max_omega"
    EQUAL_WEIGHT = "equal_weight"


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    dates: tuple[date, ...]
    returns: np.ndarray
    tickers: tuple[str, ...]

    def __post_init__(self):
        returns = np.array(self.returns, dtype=float)
        dates = tuple(self.dates)
        tickers = tuple(str(ticker) for ticker in self.tickers)
        if returns.ndim != 2 or returns.shape != (len(dates), len(tickers)):
            raise PanelError(
                f"Expected {len(dates)} x {len(tickers)} returns: {returns.shape}"
            )
        if not tickers:
            raise PanelError("Panel has no tickers")
        for previous, current in zip(dates, dates[1:]):
            if current <= previous:
                raise PanelError(f"Dates must strictly increase: {current}")
        if not np.all(np.isfinite(returns)):
            raise PanelError("Returns contain non-finite values")
        if np.any(returns <= -1):
            raise PanelError("Returns must exceed -100%")
        returns.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "tickers", tickers)

    def __len__(self):
        return len(self.dates)

    @property
    def width(self) -> int:
        return len(self.tickers)

    def losses(self, start: int, stop: int) -> LossSample:
        return LossSample(-self.returns[start:stop], labels=self.tickers)


def _rebalance(value: str | int) -> str | int:
    if isinstance(value, str):
        text = value.strip().lower()
        if text == constants.MONTHLY:
            return text
        text = text.removeprefix("every-")
        if not text.isdigit():
            raise PanelError(f"Rebalance must be 'monthly' or a day count: {value}")
        value = int(text)
    if value < 1:
        raise PanelError(f"Rebalance period must be positive: {value}")
    return value


@dataclass(frozen=True)
class BacktestConfig:
    window: int = constants.DEFAULT_WINDOW
    rebalance: str | int = constants.MONTHLY
    alpha: RiskLevel = field(default_factory=lambda: RiskLevel(0.1))
    strategy: Strategy = Strategy.MIN_DQ_EX
    threshold_multiple: float = 1.0
    risk_free_rate: float = 0.0
    seed: int = 0
    big_m: float | None = None
    track_dq: bool = False

    def __post_init__(self):
        if self.window < 2:
            raise PanelError(f"Window must cover at least 2 rows: {self.window}")
        object.__setattr__(self, "rebalance", _rebalance(self.rebalance))
        object.__setattr__(self, "alpha", RiskLevel.parse(self.alpha))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.strategy is Strategy.MIN_DQ_EX or self.track_dq:
            self.alpha.require_lower_half()


@dataclass(frozen=True)
class RollingPoint:
    date: date
    report: DqReport
    loss_gain: float


@dataclass(frozen=True)
class PerformanceStats:
    ar: float
    av: float
    sr: float | None


@dataclass(frozen=True, eq=False)
class BacktestResult:
    dates: tuple[date, ...]
    wealth: np.ndarray
    weights_history: list[tuple[date, PortfolioWeights]]
    stats: PerformanceStats
    fallbacks: list[date] = field(default_factory=list)
    dq_series: list[RollingPoint] = field(default_factory=list)
    tickers: tuple[str, ...] = ()

    @cached_property
    def final_wealth(self) -> float:
        return float(self.wealth[-1])
