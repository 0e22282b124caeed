import math

import numpy as np

import log

from . import constants
from .types import Kind, LevelError, RiskLevel, ScalarSample


def ratio(numerator: float, denominator: float) -> float:
    """Divide with 0/0 = 0 and x/0 = sign(x) * inf."""
    if denominator == 0:
        if numerator == 0:
            return 0.0
        return math.copysign(math.inf, numerator)
    return numerator / denominator


def expectile(sample: ScalarSample, alpha: RiskLevel | float) -> float:
    """Unique root of (1 - alpha) E(X - t)+ = alpha E(t - X)+.

    The identification function is decreasing and piecewise linear between
    order statistics, so the root is bracketed on the sorted support and the
    linear piece containing it is solved exactly.
    """
    level = RiskLevel.parse(alpha)
    a = level.alpha
    x = sample.sorted_values
    below = sample.cumulative_weights
    moment = sample.cumulative_moments
    total = sample.mean

    upper = (total - moment) - x * (1 - below)
    lower = x * below - moment
    identification = (1 - a) * upper - a * lower

    index = int(np.argmax(identification <= 0))
    if index == 0:
        return float(x[0])

    w, p = below[index - 1], moment[index - 1]
    root = ((1 - a) * (total - p) + a * p) / ((1 - a) * (1 - w) + a * w)
    return float(min(max(root, x[index - 1]), x[index]))


def var_empirical(sample: ScalarSample, alpha: RiskLevel | float) -> float:
    """Order statistic holding the upper alpha tail mass."""
    a = RiskLevel.parse(alpha, Kind.VAR).alpha
    tail = np.cumsum(sample.sorted_weights[::-1])[::-1]
    index = int(np.count_nonzero(tail >= a - constants.TAIL_MASS_TOLERANCE)) - 1
    return float(sample.sorted_values[max(index, 0)])


def _descending(sample: ScalarSample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = sample.sorted_values[::-1]
    weights = sample.sorted_weights[::-1]
    return values, weights, np.cumsum(weights)


def es_empirical(sample: ScalarSample, alpha: RiskLevel | float) -> float:
    """Average of the upper alpha tail, splitting the boundary atom."""
    a = RiskLevel.parse(alpha, Kind.ES).alpha
    values, weights, mass = _descending(sample)
    taken = np.clip(a - (mass - weights), 0, weights)
    top = values[0]
    return float(top + (values - top) @ taken / a)


def es_level_for_threshold(sample: ScalarSample, threshold: float) -> float:
    """Smallest level beta with ES_beta(S) <= threshold, or 1 if none."""
    if sample.maximum <= threshold:
        return 0.0
    if sample.mean > threshold:
        return 1.0

    values, weights, mass = _descending(sample)
    gap = np.cumsum(values * weights) - threshold * mass
    index = int(np.argmax(gap <= 0))
    if index == 0:
        return 0.0

    start, excess = mass[index - 1], gap[index - 1]
    level = start + excess / (threshold - values[index])
    return float(min(max(level, start), mass[index]))


def tail_probability(sample: ScalarSample, threshold: float) -> float:
    scale = max(1.0, abs(threshold), abs(sample.minimum), abs(sample.maximum))
    exceeds = sample.values > threshold + constants.EXCEEDANCE_TOLERANCE * scale
    return float(sample.weights[exceeds].sum())


def upper_partial_expectation(sample: ScalarSample, threshold: float) -> float:
    excess = np.maximum(sample.values - threshold, 0)
    return float(sample.weights @ excess)


def lower_partial_expectation(sample: ScalarSample, threshold: float) -> float:
    shortfall = np.maximum(threshold - sample.values, 0)
    return float(sample.weights @ shortfall)


def tilted_cdf(sample: ScalarSample, y: float) -> float:
    """Expectile-tilted distribution function, so that ex_alpha = F^-1(1 - alpha)."""
    lower = lower_partial_expectation(sample, y)
    denominator = 2 * lower + sample.mean - y
    if sample.degenerate or denominator <= 0:
        return 1.0 if y >= sample.mean else 0.0
    return float(min(max(lower / denominator, 0.0), 1.0))


def omega_ratio(sample: ScalarSample, threshold: float) -> float:
    gains = upper_partial_expectation(sample, threshold)
    losses = lower_partial_expectation(sample, threshold)
    if losses == 0 and gains > 0:
        log.debug(f"Omega ratio is unbounded at threshold {threshold}")
    return abs(ratio(gains, losses))


def acceptance_ratio(sample: ScalarSample) -> float:
    """Gain-loss ratio of a loss sample: Omega of the returns -X at zero."""
    return omega_ratio(-sample, 0.0)


def measure(sample: ScalarSample, level: RiskLevel) -> float:
    if level.kind is Kind.VAR:
        return var_empirical(sample, level)
    if level.kind is Kind.ES:
        return es_empirical(sample, level)
    if level.kind is Kind.EXPECTILE:
        return expectile(sample, level)
    raise LevelError(f"Unknown risk measure: {level.kind}")
