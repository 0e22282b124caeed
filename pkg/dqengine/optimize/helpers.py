from typing import Callable

import numpy as np
from scipy import optimize

import log

from dqengine.dq.helpers import marginal_risks
from dqengine.risk import helpers as risk
from dqengine.risk.types import LossSample, RiskLevel, ScalarSample

from . import constants
from .simplex import solve_lp
from .types import (
    ConvexityProbe,
    ExcessLosses,
    FrontierPoint,
    Infeasible,
    LpProblem,
    LpSolution,
    OmegaResult,
    OptimizationError,
    OptimizationResult,
    PortfolioWeights,
    Status,
)


def project_to_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum(w) = 1}."""
    values = np.asarray(y, dtype=float)
    ordered = np.sort(values)[::-1]
    partial = np.cumsum(ordered) - 1
    index = np.arange(1, values.size + 1)
    support = np.flatnonzero(ordered - partial / index > 0)[-1]
    shift = partial[support] / (support + 1)
    return np.maximum(values - shift, 0)


def excess_losses(ls: LossSample, alpha: RiskLevel | float) -> ExcessLosses:
    level = RiskLevel.parse(alpha).require_lower_half()
    expectiles = marginal_risks(ls, level)
    return ExcessLosses(expectiles, ls.observations - expectiles, ls.weights)


def _weights(values, width: int) -> np.ndarray:
    w = PortfolioWeights(values).values
    if w.size != width:
        raise ValueError(f"Expected {width} weights, got {w.size}")
    return w


def _strictly_positive(values, width: int) -> np.ndarray:
    w = _weights(values, width)
    if np.any(w <= 0):
        raise ValueError(f"Weights must be strictly positive: {w}")
    return w


def _upside_and_mean(losses: ExcessLosses, w: np.ndarray) -> tuple[float, float]:
    s = losses.portfolio(w)
    p = losses.probabilities
    return float(p @ np.maximum(s, 0)), float(p @ s)


def _fraction(upside: float, mean: float, alpha: float) -> float:
    if upside == 0:
        return 0.0
    return upside / (alpha * (2 * upside - mean))


def portfolio_dq_ex(ls: LossSample, alpha: RiskLevel | float, weights) -> float:
    """Expectile DQ of the weighted vector w * X, with f(0) = 0."""
    level = RiskLevel.parse(alpha).require_lower_half()
    losses = excess_losses(ls, level)
    w = _weights(weights, ls.width)
    if not w.any():
        return 0.0
    return _fraction(*_upside_and_mean(losses, w), level.alpha)


def _gradient(losses: ExcessLosses, w: np.ndarray, alpha: float) -> np.ndarray:
    s = losses.portfolio(w)
    p = losses.probabilities
    upside, mean = float(p @ np.maximum(s, 0)), float(p @ s)
    denominator = 2 * upside - mean
    if denominator <= 0:
        return np.zeros(w.size)

    scale = max(float(np.abs(s).max()), np.finfo(float).tiny)
    kinks = np.abs(s) <= constants.KINK_TOLERANCE * scale
    if p[kinks].sum() > constants.KINK_TOLERANCE:
        log.warn(f"Gradient evaluated with {kinks.sum()} rows at the kink")
    active = (s > 0) | kinks

    positive = (p * active) @ losses.excess
    average = p @ losses.excess
    return (upside * average - positive * mean) / (alpha * denominator**2)


def dq_ex_gradient(ls: LossSample, alpha: RiskLevel | float, weights) -> np.ndarray:
    level = RiskLevel.parse(alpha).require_lower_half()
    w = _strictly_positive(weights, ls.width)
    return _gradient(excess_losses(ls, level), w, level.alpha)


def _default_big_m(denominators: np.ndarray, width: int) -> float:
    return constants.BIG_M_HEADROOM * width / float(np.mean(denominators))


def _bound_active(value: float, bound: float) -> bool:
    return value >= bound * (1 - constants.LP_TOLERANCE)


def _solve_bounded(
    build: Callable[[float], LpProblem], bound: float, column: int
) -> tuple[LpSolution, float, Status, int]:
    """Solve with the scaling variable capped, doubling the cap while it binds."""
    solution = None
    iterations = 0
    for _ in range(constants.BIG_M_DOUBLINGS + 1):
        try:
            solution = solve_lp(build(bound))
        except Infeasible:
            solution = None
        else:
            iterations += solution.iterations
            if not _bound_active(solution.x[column], bound):
                return solution, bound, Status.OPTIMAL, iterations
        bound *= 2
        log.info(f"Doubling big-M bound to {bound}")

    bound /= 2
    if solution is None:
        raise Infeasible(f"No portfolio fits under the big-M bound {bound}")
    log.warn(f"Big-M bound still active at {bound}")
    return solution, bound, Status.BOUND_ACTIVE, iterations


def _fractional_problem(
    excess: np.ndarray,
    cushion: np.ndarray,
    p: np.ndarray,
    bound: float,
    *,
    cap: float | None = None,
) -> LpProblem:
    """Charnes-Cooper form over [w~, v0, d] and optionally [tau+, tau-].

    With a cap on the upside the problem instead minimizes the worst scenario
    excess among portfolios whose upside stays within the cap.
    """
    count, width = excess.shape
    extra = 0 if cap is None else 2
    columns = width + 1 + count + extra

    c = np.zeros(columns)
    if cap is None:
        c[width + 1 : width + 1 + count] = p
    else:
        c[-2:] = [1.0, -1.0]

    a_eq = np.zeros((2, columns))
    a_eq[0, :width] = 1
    a_eq[0, width] = -1
    a_eq[1, :width] = cushion
    b_eq = np.array([0.0, 1.0])

    rows = [np.zeros(columns)]
    rows[0][width] = 1
    b_ub = [bound]

    scenarios = np.zeros((count, columns))
    scenarios[:, :width] = excess
    scenarios[:, width + 1 : width + 1 + count] = -np.eye(count)
    rows.extend(scenarios)
    b_ub.extend([0.0] * count)

    if cap is not None:
        total = np.zeros(columns)
        total[width + 1 : width + 1 + count] = p
        rows.append(total)
        b_ub.append(cap)

        worst = np.zeros((count, columns))
        worst[:, :width] = excess
        worst[:, -2:] = [-1.0, 1.0]
        rows.extend(worst)
        b_ub.extend([0.0] * count)

    return LpProblem(c, np.array(rows), np.array(b_ub), a_eq, b_eq, big_m=bound)


def min_dq_ex_lp(
    ls: LossSample,
    alpha: RiskLevel | float,
    big_m: float | None = None,
    *,
    tie_break: bool = True,
) -> OptimizationResult:
    """Minimize the empirical expectile DQ over long-only portfolios by LP."""
    level = RiskLevel.parse(alpha).require_lower_half()
    losses = excess_losses(ls, level)
    cushion = losses.cushion

    active = cushion > 0
    if not active.any():
        raise Infeasible("No asset has a positive expectile cushion")
    for label in np.array(ls.labels)[~active]:
        log.warn(f"Excluding degenerate asset {label} from the LP")

    excess, mu, p = losses.excess[:, active], cushion[active], losses.probabilities
    width = excess.shape[1]
    bound = big_m or _default_big_m(mu, ls.width)
    log.info(f"Solving DQ LP with {len(ls)} rows and {width} assets")

    solution, bound, status, iterations = _solve_bounded(
        lambda m: _fractional_problem(excess, mu, p, m), bound, width
    )

    x = solution.x
    if tie_break:
        cap = solution.objective * (1 + constants.TIE_BREAK_RELATIVE)
        cap += constants.TIE_BREAK_ABSOLUTE
        try:
            second = solve_lp(_fractional_problem(excess, mu, p, bound, cap=cap))
        except OptimizationError as exc:
            log.warn(f"Keeping the first LP solution: {exc}")
        else:
            iterations += second.iterations
            x = second.x

    values = np.zeros(ls.width)
    values[active] = x[:width] / x[:width].sum()
    weights = PortfolioWeights(values)

    upside, mean = _upside_and_mean(losses, weights.values)
    objective = risk.ratio(upside, -mean) if upside else 0.0
    return OptimizationResult(
        weights=weights,
        objective=objective,
        dq=objective / (level.alpha * (2 * objective + 1)),
        status=status,
        iterations=iterations,
        big_m=bound,
        labels=ls.labels,
    )


def _frontier_problem(
    excess: np.ndarray, cushion: np.ndarray, p: np.ndarray, m: float
) -> LpProblem:
    count, width = excess.shape
    c = np.concatenate([np.zeros(width), p])
    a_eq = np.zeros((2, width + count))
    a_eq[0, :width] = 1
    a_eq[1, :width] = cushion
    a_ub = np.hstack([excess, -np.eye(count)])
    return LpProblem(c, a_ub, np.zeros(count), a_eq, np.array([1.0, m]))


def _frontier_point(losses: ExcessLosses, m: float) -> FrontierPoint:
    problem = _frontier_problem(losses.excess, losses.cushion, losses.probabilities, m)
    solution = solve_lp(problem)
    weights = PortfolioWeights(solution.x[: losses.width]).normalized()
    return FrontierPoint(m, max(solution.objective, 0.0), weights)


def cushion_range(losses: ExcessLosses) -> tuple[float, float]:
    """Smallest and largest attainable cushion; linear, so attained at vertices."""
    return float(losses.cushion.min()), float(losses.cushion.max())


def min_dq_ex_frontier(
    ls: LossSample,
    alpha: RiskLevel | float,
    m_grid=None,
    *,
    refine: bool = True,
) -> tuple[FrontierPoint, list[FrontierPoint]]:
    level = RiskLevel.parse(alpha).require_lower_half()
    losses = excess_losses(ls, level)
    low, high = cushion_range(losses)
    if not high > 0:
        raise Infeasible("No portfolio has a positive expectile cushion")

    if m_grid is None:
        start = max(low, constants.FRONTIER_FLOOR * high)
        if start < high:
            grid = np.unique(np.geomspace(start, high, constants.FRONTIER_POINTS))
        else:
            grid = np.array([high])
    else:
        grid = np.unique(np.asarray(m_grid, dtype=float))
        slack = constants.LP_TOLERANCE * max(1.0, high)
        outside = grid[(grid <= 0) | (grid < low - slack) | (grid > high + slack)]
        if outside.size:
            raise Infeasible(f"Cushion outside the attainable range: {outside[0]}")
        grid = np.clip(grid, low, high)
    if not grid.size:
        raise OptimizationError("Frontier grid is empty")

    frontier = []
    for m in grid:
        try:
            frontier.append(_frontier_point(losses, float(m)))
        except Infeasible as exc:
            log.warn(f"Skipping frontier point m={m}: {exc}")
    if not frontier:
        raise OptimizationError("No frontier point could be solved")

    index = min(range(len(frontier)), key=lambda i: frontier[i].ratio)
    best = frontier[index]
    if refine and len(frontier) > 2:
        left = frontier[max(index - 1, 0)].m
        right = frontier[min(index + 1, len(frontier) - 1)].m

        def slope(m: float) -> float:
            try:
                return _frontier_point(losses, m).ratio
            except Infeasible:
                return np.inf

        found = optimize.minimize_scalar(
            slope,
            bounds=(left, right),
            method="bounded",
            options={"xatol": constants.FRONTIER_XTOL * high},
        )
        if found.fun < best.ratio:
            best = _frontier_point(losses, float(found.x))

    log.info(f"Frontier best ratio {best.ratio} at m={best.m}")
    return best, frontier


def _best_single_asset(
    returns: np.ndarray, p: np.ndarray, t: float, labels: tuple[str, ...]
) -> OmegaResult:
    """Maximizer when every asset's mean return falls below the threshold.

    Omega is then G / (G + E[t - R]) with G = E[(R - t)+] convex and
    homogeneous in w and E[t - R] linear and positive, so the ratio peaks at
    a vertex of the simplex.
    """
    gains = p @ np.maximum(returns - t, 0)
    shortfalls = p @ np.maximum(t - returns, 0)
    ratios = gains / shortfalls
    best = int(np.argmax(ratios))
    log.info(f"Threshold {t} exceeds every mean return, holding asset {best}")
    values = np.zeros(returns.shape[1])
    values[best] = 1.0
    return OmegaResult(
        weights=PortfolioWeights(values),
        omega=float(ratios[best]),
        threshold=t,
        labels=labels,
    )


def max_omega_lp(
    ls: LossSample, threshold: float, big_m: float | None = None
) -> OmegaResult:
    """Maximize the Omega ratio of portfolio returns R = -w.X at a threshold.

    Returns are the negated losses. The Charnes-Cooper scaling z = 1 / E[(t - R)+]
    turns the ratio into the LP max s.r - t z over [s, q, z] with
    q_j >= t z - R_j s, E[q] = 1 and sum(s) = z. That LP needs E[R] >= t,
    which some optimum satisfies as soon as one asset's mean reaches t.
    """
    returns = -ls.observations
    p = ls.weights
    t = float(threshold)
    count, width = returns.shape
    means = p @ returns

    shortfalls = p @ np.maximum(t - returns, 0)
    if not shortfalls.max() > 0:
        raise OptimizationError("Omega ratio is unbounded for every portfolio")
    if means.max() < t:
        return _best_single_asset(returns, p, t, ls.labels)

    columns = width + count + 1
    c = np.zeros(columns)
    c[:width] = -means
    c[-1] = t

    a_eq = np.zeros((2, columns))
    a_eq[0, width:-1] = p
    a_eq[1, :width] = 1
    a_eq[1, -1] = -1
    b_eq = np.array([1.0, 0.0])

    shortfall_rows = np.hstack([-returns, -np.eye(count), np.full((count, 1), t)])
    mean_row = np.concatenate([-means, np.zeros(count), [t]])
    floor_row = np.zeros(columns)
    floor_row[-1] = -1
    floor = -1 / float(shortfalls.max())

    bound_row = np.zeros(columns)
    bound_row[-1] = 1

    def build(m: float) -> LpProblem:
        return LpProblem(
            c,
            np.vstack([shortfall_rows, mean_row, bound_row, floor_row]),
            np.concatenate([np.zeros(count), [0.0, m, floor]]),
            a_eq,
            b_eq,
            big_m=m,
        )

    bound = big_m or _default_big_m(shortfalls[shortfalls > 0], width)
    solution, bound, status, iterations = _solve_bounded(build, bound, -1)

    weights = PortfolioWeights(solution.x[:width]).normalized()
    portfolio = ScalarSample(returns @ weights.values, p)
    omega = risk.omega_ratio(portfolio, t)
    return OmegaResult(
        weights=weights,
        omega=omega,
        threshold=t,
        status=status,
        iterations=iterations,
        big_m=bound,
        labels=ls.labels,
    )


def _steepest_direction(
    losses: ExcessLosses, w: np.ndarray, alpha: float, band: float
) -> np.ndarray:
    """Steepest feasible descent direction, valid at kinks.

    This is the negated minimum-norm element of the subdifferential plus the
    simplex normal cone. Scenarios within `band` of the kink enter with an
    indicator free in [0, 1]; coordinates already at zero may only grow.
    """
    s = losses.portfolio(w)
    p = losses.probabilities
    upside, mean = float(p @ np.maximum(s, 0)), float(p @ s)
    denominator = 2 * upside - mean
    if denominator <= 0:
        return np.zeros(w.size)

    reach = max(float(np.abs(losses.excess).max()), np.finfo(float).tiny) * band
    near = np.abs(s) <= reach
    squared = alpha * denominator**2
    positive = (p * (s > reach)) @ losses.excess
    base = (upside * (p @ losses.excess) - positive * mean) / squared

    boundary = np.flatnonzero(w <= constants.FACE_TOLERANCE)
    kinks = (-mean / squared) * (p[near, None] * losses.excess[near]).T
    center = np.eye(w.size) - 1 / w.size
    matrix = center @ np.hstack([kinks, -np.eye(w.size)[:, boundary]])
    target = -center @ base
    if not matrix.shape[1]:
        return target

    upper = np.concatenate([np.ones(near.sum()), np.full(boundary.size, np.inf)])
    found = optimize.lsq_linear(
        matrix, target, bounds=(np.zeros(matrix.shape[1]), upper), method="bvls"
    )
    return target - matrix @ found.x


def _segment_values(
    losses: ExcessLosses, w: np.ndarray, direction: np.ndarray, steps, alpha: float
) -> np.ndarray:
    s = losses.portfolio(w)
    rates = losses.portfolio(direction)
    p = losses.probabilities
    paths = s[:, None] + rates[:, None] * steps[None, :]
    upside = p @ np.maximum(paths, 0)
    mean = p @ s + steps * (p @ rates)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = upside / (alpha * (2 * upside - mean))
    return np.where(upside > 0, values, 0.0)


def _armijo_step(
    losses: ExcessLosses,
    w: np.ndarray,
    f: float,
    direction: np.ndarray,
    alpha: float,
    value: Callable[[np.ndarray], float],
) -> tuple[np.ndarray, float] | None:
    """Backtrack from the best sign change along the direction.

    Between sign changes the objective is a ratio of affine functions of the
    step, hence monotone, so the segment minimum sits at a sign change or at
    the simplex boundary.
    """
    shrinking = direction < 0
    if not shrinking.any():
        return None
    limit = float(np.min(w[shrinking] / -direction[shrinking]))

    s = losses.portfolio(w)
    rates = losses.portfolio(direction)
    with np.errstate(divide="ignore", invalid="ignore"):
        crossings = -s / rates
    inside = crossings[(crossings > 0) & (crossings < limit)]
    steps = np.unique(np.append(inside, limit))
    values = _segment_values(losses, w, direction, steps, alpha)
    step = float(steps[np.argmin(values)])

    slope = -float(direction @ direction)
    while step >= constants.ARMIJO_MIN_STEP:
        candidate = project_to_simplex(w + step * direction)
        trial = value(candidate)
        accepted = trial <= f + constants.ARMIJO_SLOPE * step * slope
        if accepted and not np.array_equal(candidate, w):
            return candidate, trial
        step *= constants.ARMIJO_BACKTRACK
    return None


def min_dq_ex_gradient_descent(
    ls: LossSample,
    alpha: RiskLevel | float,
    start=None,
    *,
    max_iterations: int = constants.DESCENT_MAX_ITERATIONS,
    tolerance: float = constants.DESCENT_TOLERANCE,
) -> OptimizationResult:
    """Projected steepest descent with Armijo backtracking on the simplex.

    The objective is piecewise smooth, so scenarios sitting at the kink are
    handled through the subdifferential; the kink band widens only when a
    narrower one yields no Armijo step. Every stationary point is a global
    minimum, so the result is compared directly against the LP optimum.
    """
    level = RiskLevel.parse(alpha).require_lower_half()
    losses = excess_losses(ls, level)
    if start is None:
        w = PortfolioWeights.equal(ls.width).values
    else:
        w = _strictly_positive(start, ls.width)
        w = w / w.sum()

    def value(weights: np.ndarray) -> float:
        return _fraction(*_upside_and_mean(losses, weights), level.alpha)

    f = value(w)
    best_w, best_f = w, f
    status = Status.ITERATION_LIMIT
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        moved = None
        for band in constants.KINK_BANDS:
            direction = _steepest_direction(losses, w, level.alpha, band)
            if np.linalg.norm(direction) <= tolerance:
                status = Status.OPTIMAL
                break
            moved = _armijo_step(losses, w, f, direction, level.alpha, value)
            if moved is not None:
                break
            log.debug(f"No Armijo step with kink band {band}")
        if status is Status.OPTIMAL:
            break
        if moved is None:
            status = Status.STALLED
            break

        w, f = moved
        if f < best_f:
            best_w, best_f = w, f
        log.debug(f"Descent iteration {iteration}: f={f}")

    if status is not Status.OPTIMAL:
        log.warn(f"Gradient descent {status.value} after {iteration} iterations")

    upside, mean = _upside_and_mean(losses, best_w)
    return OptimizationResult(
        weights=PortfolioWeights(best_w),
        objective=risk.ratio(upside, -mean) if upside else 0.0,
        dq=best_f,
        status=status,
        iterations=iteration,
        labels=ls.labels,
    )


def pseudo_convexity_probe(
    ls: LossSample, alpha: RiskLevel | float, w, v
) -> ConvexityProbe:
    level = RiskLevel.parse(alpha).require_lower_half()
    losses = excess_losses(ls, level)
    first = _strictly_positive(w, ls.width)
    second = _strictly_positive(v, ls.width)
    return ConvexityProbe(
        f_w=_fraction(*_upside_and_mean(losses, first), level.alpha),
        f_v=_fraction(*_upside_and_mean(losses, second), level.alpha),
        directional=float(_gradient(losses, first, level.alpha) @ (second - first)),
    )


def min_dq_ex(
    ls: LossSample,
    alpha: RiskLevel | float,
    method: str = constants.LP,
    *,
    big_m: float | None = None,
) -> OptimizationResult:
    level = RiskLevel.parse(alpha).require_lower_half()
    if method == constants.LP:
        return min_dq_ex_lp(ls, level, big_m)
    if method == constants.GRADIENT:
        return min_dq_ex_gradient_descent(ls, level)
    if method == constants.FRONTIER:
        best, frontier = min_dq_ex_frontier(ls, level)
        return OptimizationResult(
            weights=best.weights,
            objective=best.ratio,
            dq=best.ratio / (level.alpha * (2 * best.ratio + 1)),
            iterations=len(frontier),
            labels=ls.labels,
        )
    raise ValueError(f"Unknown method {method!r}, expected one of {constants.METHODS}")
