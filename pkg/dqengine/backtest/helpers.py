from datetime import date
from pathlib import Path

import numpy as np
import pandas as pd

import log

from dqengine.core.helpers import atomic_write
from dqengine.dq import helpers as dq
from dqengine.optimize import helpers as optimize
from dqengine.optimize.types import OptimizationError, PortfolioWeights
from dqengine.risk.types import LossSample, RiskLevel

from . import constants
from .types import (
    BacktestConfig,
    BacktestResult,
    PanelError,
    PerformanceStats,
    ReturnPanel,
    RollingPoint,
    Strategy,
)


def _read_frame(path: str | Path) -> tuple[pd.DataFrame, list[str]]:
    frame = pd.read_csv(
        path, dtype=str, keep_default_na=False, skipinitialspace=True
    ).fillna("")
    return frame, [str(column).strip() for column in frame.columns]


def _numbers(frame: pd.DataFrame, labels: list[str], offset: int) -> np.ndarray:
    values = np.empty((len(frame), len(labels)))
    for position, label in enumerate(labels):
        cells = frame.iloc[:, position + offset].str.strip()
        parsed = pd.to_numeric(cells, errors="coerce")
        for index in np.flatnonzero(parsed.isna().to_numpy()):
            problem = "missing value" if not cells.iloc[index] else "non-numeric value"
            raise PanelError(
                f"Row {index + 1}, column {label}: {problem} {cells.iloc[index]!r}"
            )
        values[:, position] = parsed.to_numpy(dtype=float)
    return values


def load_sample_csv(path: str | Path, *, returns: bool = False) -> LossSample:
    """Read a scenario matrix, with or without a leading date column.

    Returns are negated so the sample always holds losses.
    """
    frame, columns = _read_frame(path)
    if columns and columns[0].lower() == "date":
        panel = load_returns_csv(path)
        values, labels = panel.returns, list(panel.tickers)
    else:
        if len(set(columns)) != len(columns) or not all(columns):
            raise PanelError(f"Labels must be unique and named: {','.join(columns)}")
        if frame.empty:
            raise PanelError(f"No rows in {path}")
        values, labels = _numbers(frame, columns, offset=0), columns
    sample = LossSample(values, labels=labels)
    log.info(f"Loaded {sample.size} scenarios of {sample.width} assets from {path}")
    return -sample if returns else sample


def load_returns_csv(path: str | Path) -> ReturnPanel:
    """Read a 'date,TICKER1,...' file of decimal returns, rejecting any gap."""
    frame, columns = _read_frame(path)
    if len(columns) < 2 or columns[0].lower() != "date":
        raise PanelError(f"Header must be 'date,TICKER1,...': {','.join(columns)}")
    tickers = columns[1:]
    if len(set(tickers)) != len(tickers) or not all(tickers):
        raise PanelError(f"Tickers must be unique and named: {','.join(tickers)}")
    if frame.empty:
        raise PanelError(f"No rows in {path}")

    dates: list[date] = []
    for index, text in enumerate(frame.iloc[:, 0]):
        parsed = pd.to_datetime(text.strip(), format="ISO8601", errors="coerce")
        if pd.isna(parsed):
            raise PanelError(f"Row {index + 1}: invalid date {text!r}")
        dates.append(parsed.date())

    seen: set[date] = set()
    for current in dates:
        if current in seen:
            raise PanelError(f"Duplicated date: {current}")
        seen.add(current)

    returns = _numbers(frame, tickers, offset=1)
    log.info(f"Loaded {len(dates)} rows of {len(tickers)} tickers from {path}")
    return ReturnPanel(tuple(dates), returns, tuple(tickers))


def rolling_dq_series(
    panel: ReturnPanel, alpha: RiskLevel | float, window: int
) -> list[RollingPoint]:
    level = RiskLevel.parse(alpha).require_lower_half()
    if window < 2 or len(panel) < window:
        raise PanelError(f"Need at least {window} rows, found {len(panel)}")

    points = []
    for stop in range(window, len(panel) + 1):
        losses = panel.losses(stop - window, stop)
        points.append(
            RollingPoint(
                date=panel.dates[stop - 1],
                report=dq.report(losses, level),
                loss_gain=dq.loss_gain_ratio(losses),
            )
        )
    log.info(f"Computed {len(points)} rolling DQ points with window {window}")
    return points


def rebalance_indices(
    panel: ReturnPanel, window: int, rebalance: str | int
) -> list[int]:
    """Rows where new weights take effect, fitted on the rows before them.

    The first full window always opens the schedule; monthly rebalancing then
    uses the first trading date of each later calendar month.
    """
    if rebalance == constants.MONTHLY:
        return [
            index
            for index in range(window, len(panel))
            if index == window
            or (panel.dates[index].year, panel.dates[index].month)
            != (panel.dates[index - 1].year, panel.dates[index - 1].month)
        ]
    return list(range(window, len(panel), int(rebalance)))


def omega_threshold(losses: LossSample, multiple: float = 1.0) -> float:
    """Expected return of the equal-weight portfolio, scaled by a multiple."""
    equal = -(losses.weights @ losses.observations).mean()
    return multiple * float(equal)


def fit_weights(losses: LossSample, config: BacktestConfig) -> PortfolioWeights:
    if config.strategy is Strategy.EQUAL_WEIGHT:
        return PortfolioWeights.equal(losses.width)
    if config.strategy is Strategy.MAX_OMEGA:
        threshold = omega_threshold(losses, config.threshold_multiple)
        return optimize.max_omega_lp(losses, threshold, config.big_m).weights
    return optimize.min_dq_ex_lp(losses, config.alpha, config.big_m).weights


def run_backtest(panel: ReturnPanel, config: BacktestConfig) -> BacktestResult:
    indices = rebalance_indices(panel, config.window, config.rebalance)
    if not indices:
        raise PanelError(
            f"Need more than {config.window} rows to backtest, found {len(panel)}"
        )

    first = indices[0]
    schedule = set(indices)
    holdings = np.zeros(panel.width)
    wealth = [1.0]
    history: list[tuple[date, PortfolioWeights]] = []
    fallbacks: list[date] = []
    series: list[RollingPoint] = []
    weights: PortfolioWeights | None = None

    for index in range(first, len(panel)):
        if index in schedule:
            losses = panel.losses(index - config.window, index)
            when = panel.dates[index]
            try:
                weights = fit_weights(losses, config)
            except OptimizationError as exc:
                log.warn(f"Keeping previous weights on {when}: {exc}")
                fallbacks.append(when)
                if weights is None:
                    weights = PortfolioWeights.equal(panel.width)
            log.info(f"Rebalanced on {when}: {list(weights)}")
            history.append((when, weights))
            holdings = wealth[-1] * weights.values
            if config.track_dq:
                report = dq.report(losses, config.alpha)
                series.append(RollingPoint(when, report, dq.loss_gain_ratio(losses)))
        holdings = holdings * (1 + panel.returns[index])
        wealth.append(float(holdings.sum()))

    dates = panel.dates[first - 1 :]
    values = np.array(wealth)
    return BacktestResult(
        dates=dates,
        wealth=values,
        weights_history=history,
        stats=performance_stats(values, dates, config.risk_free_rate),
        fallbacks=fallbacks,
        dq_series=series,
        tickers=panel.tickers,
    )


def performance_stats(
    wealth, dates=None, risk_free_rate: float = 0.0
) -> PerformanceStats:
    """Annualized return, volatility and Sharpe ratio, all in percent.

    Returns compound geometrically over 252 trading days; volatility is the
    standard deviation of daily log returns scaled by the square root of 252.
    """
    values = np.asarray(wealth, dtype=float)
    if values.size < 2:
        raise PanelError("Need at least two wealth values")
    if dates is not None and len(dates) != values.size:
        raise PanelError(f"Expected {values.size} dates, got {len(dates)}")
    if not np.all(values > 0):
        raise PanelError("Wealth must stay positive")

    steps = values.size - 1
    growth = values[-1] / values[0]
    annual_return = growth ** (constants.TRADING_DAYS / steps) - 1

    increments = np.diff(np.log(values))
    deviation = float(np.std(increments, ddof=1)) if steps > 1 else 0.0
    annual_volatility = deviation * np.sqrt(constants.TRADING_DAYS)
    if annual_volatility < constants.VOLATILITY_FLOOR:
        annual_volatility = 0.0

    sharpe = None
    if annual_volatility > 0:
        sharpe = 100 * (annual_return - risk_free_rate) / annual_volatility
    else:
        log.debug("Sharpe ratio is undefined without volatility")

    return PerformanceStats(
        ar=100 * float(annual_return), av=100 * float(annual_volatility), sr=sharpe
    )


def write_plot_csv(path: str | Path, dates, values) -> Path:
    if len(dates) != len(values):
        raise PanelError("Plot data needs one value per date")
    frame = pd.DataFrame(
        {
            "date": [day.isoformat() for day in dates],
            "value": np.asarray(values, dtype=float),
        }
    )
    return atomic_write(path, frame.to_csv(index=False, float_format="%.12g"))
