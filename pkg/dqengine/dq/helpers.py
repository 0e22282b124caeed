import numpy as np
from scipy import optimize

import log

from dqengine.risk import helpers as risk
from dqengine.risk.types import Kind, LevelError, LossSample, RiskLevel, ScalarSample

from . import constants
from .types import DegenerateError, DqReport


def marginal_risks(ls: LossSample, level: RiskLevel) -> np.ndarray:
    return np.array([risk.measure(column, level) for column in ls.columns])


def threshold(ls: LossSample, level: RiskLevel) -> float:
    return float(marginal_risks(ls, level).sum())


def _bounded(value: float) -> float:
    return float(min(max(value, 0.0), 1.0))


def dq_ex(ls: LossSample, alpha: RiskLevel | float) -> float:
    """Expectile DQ as the scaled probability-like ratio E(S - t)+ / E|S - t|."""
    level = RiskLevel.parse(alpha).require_lower_half()
    total = ls.aggregate
    t = threshold(ls, level)
    gains = risk.upper_partial_expectation(total, t)
    if gains == 0:
        return 0.0
    losses = risk.lower_partial_expectation(total, t)
    return _bounded(gains / (level.alpha * (gains + losses)))


def dq_ex_tilted(ls: LossSample, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha).require_lower_half()
    t = threshold(ls, level)
    return _bounded((1 - risk.tilted_cdf(ls.aggregate, t)) / level.alpha)


def dq_var(ls: LossSample, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha, Kind.VAR)
    t = threshold(ls, level)
    return risk.tail_probability(ls.aggregate, t) / level.alpha


def dq_es(ls: LossSample, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha, Kind.ES)
    t = threshold(ls, level)
    return risk.es_level_for_threshold(ls.aggregate, t) / level.alpha


def dr(
    ls: LossSample,
    alpha: RiskLevel | float,
    kind: Kind | str = Kind.EXPECTILE,
) -> float:
    level = RiskLevel(float(alpha), Kind(kind))
    if level.kind is Kind.EXPECTILE:
        level.require_lower_half()
    return risk.ratio(risk.measure(ls.aggregate, level), threshold(ls, level))


def _expectile_level(total: ScalarSample, t: float) -> float:
    """Smallest beta with ex_beta(S) <= t, taking inf of the empty set as 1."""
    if total.maximum <= t:
        return 0.0
    if total.minimum >= t:
        return 1.0

    def excess(beta: float) -> float:
        return risk.expectile(total, beta) - t

    low, high = constants.LEVEL_FLOOR, constants.LEVEL_CEILING
    if excess(low) <= 0:
        return low
    if excess(high) > 0:
        return 1.0
    return optimize.brentq(
        excess, low, high, xtol=constants.LEVEL_XTOL, rtol=constants.LEVEL_RTOL
    )


def dq_ex_definition(ls: LossSample, alpha: RiskLevel | float) -> float:
    """Expectile DQ evaluated from its definition on either half of (0, 1)."""
    level = RiskLevel.parse(alpha)
    t = threshold(ls, level)
    return _expectile_level(ls.aggregate, t) / level.alpha


def adjusted_level(ls: LossSample, alpha: RiskLevel | float) -> float:
    """Factor c in (0, 1] with ex_{c alpha}(S) equal to the summed marginals."""
    level = RiskLevel.parse(alpha).require_lower_half()
    if dq_ex(ls, level) == 0:
        raise DegenerateError("No adjusted level exists when the expectile DQ is 0")
    factor = dq_ex_definition(ls, level)
    log.debug(f"Adjusted level factor: {factor}")
    return min(factor, 1.0)


def dq_ex_upper_half(ls: LossSample, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha)
    if level.lower_half:
        raise LevelError(f"alpha must lie in (1/2, 1): {level.alpha}")
    if all(column.degenerate for column in ls.columns):
        raise DegenerateError("Symmetry identity requires a non-degenerate vector")
    mirrored = 1 - level.alpha
    return (1 - mirrored * dq_ex(-ls, mirrored)) / level.alpha


def loss_gain_ratio(ls: LossSample) -> float:
    total = ls.aggregate
    gains = risk.lower_partial_expectation(total, 0.0)
    losses = risk.upper_partial_expectation(total, 0.0)
    return abs(risk.ratio(losses, gains))


def report(
    ls: LossSample, alpha: RiskLevel | float, kind: Kind | str = Kind.EXPECTILE
) -> DqReport:
    """All three quotients at one level; marginals, DR and Omega follow the kind."""
    level = RiskLevel(float(alpha), Kind(kind)).require_lower_half()
    risks = marginal_risks(ls, level)
    t = float(risks.sum())
    value = dq_ex(ls, level.alpha)
    log.info(f"Computed expectile DQ {value} at alpha={level.alpha}")
    return DqReport(
        dq_ex=value,
        dq_var=dq_var(ls, level.alpha),
        dq_es=dq_es(ls, level.alpha),
        dr=dr(ls, level.alpha, level.kind),
        omega_at_t=risk.omega_ratio(ls.aggregate, t),
        adjusted_level=level.alpha * value if value > 0 else None,
        alpha=level,
        marginal_risks=tuple(float(risk_) for risk_ in risks),
        aggregate_threshold=t,
    )
