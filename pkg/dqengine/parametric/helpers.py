import math

import numpy as np
from scipy import optimize, stats

import log

from dqengine.dq import helpers as dq
from dqengine.optimize.helpers import project_to_simplex
from dqengine.optimize.types import PortfolioWeights
from dqengine.risk.types import LossSample, RiskLevel

from . import constants
from .types import (
    BernoulliOracle,
    BernoulliSpec,
    EllipticalSpec,
    Family,
    Generator,
    Model,
    ModelError,
    MrvSpec,
    SimulationSummary,
)


def k_sigma(sigma) -> float:
    """Ratio of summed scales to the scale of the sum, at least 1."""
    matrix = np.asarray(sigma, dtype=float)
    total = matrix.sum()
    if not total > 0:
        raise ModelError(f"Dispersion has a non-positive total variance: {total}")
    return float(np.sqrt(np.diag(matrix)).sum() / math.sqrt(total))


def standard_partial_moments(generator: Generator, c: float) -> tuple[float, float]:
    """E[(Y - c)+] and E[(Y - c)-] for the standard marginal Y."""
    if generator.family is Family.STUDENT_T:
        nu = generator.nu
        density = stats.t.pdf(c, nu)
        survival = stats.t.sf(c, nu)
        upper = density * (nu + c * c) / (nu - 1) - c * survival  # type: ignore
    else:
        upper = stats.norm.pdf(c) - c * stats.norm.sf(c)
    upper = max(float(upper), 0.0)
    return upper, max(upper + c, 0.0)


def standard_expectile(generator: Generator, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha).alpha

    def identification(c: float) -> float:
        upper, lower = standard_partial_moments(generator, c)
        return (1 - level) * upper - level * lower

    low, high = -constants.EXPECTILE_BRACKET, constants.EXPECTILE_BRACKET
    for _ in range(constants.EXPECTILE_MAX_EXPANSIONS):
        if identification(low) >= 0 >= identification(high):
            break
        low, high = 2 * low, 2 * high
    else:
        raise ModelError(f"Unable to bracket the {generator} expectile at {level}")

    return optimize.brentq(identification, low, high, xtol=constants.EXPECTILE_XTOL)


def standard_tilted_cdf(generator: Generator, y: float) -> float:
    _upper, lower = standard_partial_moments(generator, y)
    denominator = 2 * lower - y
    if denominator <= 0:
        return 1.0 if y >= 0 else 0.0
    return min(max(lower / denominator, 0.0), 1.0)


def _dq_for_ratio(generator: Generator, alpha: float, k: float) -> float:
    c = k * standard_expectile(generator, alpha)
    upper, lower = standard_partial_moments(generator, c)
    if upper == 0:
        return 0.0
    return min(upper / (alpha * (upper + lower)), 1.0)


def elliptical_dq_ex(spec: EllipticalSpec, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha).require_lower_half()
    return _dq_for_ratio(spec.generator, level.alpha, k_sigma(spec.sigma))


def elliptical_dq_ex_tilted(spec: EllipticalSpec, alpha: RiskLevel | float) -> float:
    level = RiskLevel.parse(alpha).require_lower_half()
    c = k_sigma(spec.sigma) * standard_expectile(spec.generator, level)
    return (1 - standard_tilted_cdf(spec.generator, c)) / level.alpha


def elliptical_portfolio_dq_ex(
    spec: EllipticalSpec, alpha: RiskLevel | float, weights: np.ndarray
) -> float:
    level = RiskLevel.parse(alpha).require_lower_half()
    w = np.asarray(weights, dtype=float)
    if w.shape != (spec.width,) or np.any(w < 0) or not w.sum() > 0:
        raise ModelError("Weights must be nonnegative with a positive total")
    ratio = k_sigma(np.outer(w, w) * spec.sigma)
    return _dq_for_ratio(spec.generator, level.alpha, ratio)


def elliptical_dr(spec: EllipticalSpec) -> float:
    if np.any(spec.mu != 0):
        raise ModelError("Diversification ratio identity needs a centered distribution")
    return 1 / k_sigma(spec.sigma)


def elliptical_optimal_weights(spec: EllipticalSpec) -> PortfolioWeights:
    """Maximize w.sigma / sqrt(w Sigma w) over the simplex.

    In the coordinates u = sigma * w the problem becomes the minimum of
    u R u over the simplex with R the correlation matrix.
    """
    scales = spec.scales
    active = scales > 0
    if not np.any(active):
        raise ModelError("No asset has a positive scale")

    kept = scales[active]
    inner = spec.sigma[np.ix_(active, active)] / np.outer(kept, kept)
    u = np.full(inner.shape[0], 1 / inner.shape[0])
    value = float(u @ inner @ u)
    step = 1.0
    for iteration in range(constants.QP_MAX_ITERATIONS):
        gradient = 2 * inner @ u
        while True:
            moved = project_to_simplex(u - step * gradient)
            trial = float(moved @ inner @ moved)
            decrease = constants.ARMIJO_SLOPE * gradient @ (moved - u)
            if trial <= value + decrease or step < constants.ARMIJO_MIN_STEP:
                break
            step *= constants.ARMIJO_BACKTRACK
        if np.abs(moved - u).max() <= constants.QP_TOLERANCE:
            u = moved
            break
        u, value = moved, trial
        step /= constants.ARMIJO_BACKTRACK
    else:
        raise ModelError(
            f"Elliptical weights did not converge in {iteration + 1} iterations"
        )
    log.debug(f"Elliptical weights converged after {iteration + 1} iterations")

    values = np.zeros(spec.width)
    values[active] = u / scales[active]
    return PortfolioWeights(values / values.sum())


def mrv_eta(spec: MrvSpec, direction: np.ndarray) -> float:
    projections = np.maximum(spec.atoms @ np.asarray(direction, dtype=float), 0)
    return float(spec.weights @ projections**spec.gamma)


def mrv_limit_dq(spec: MrvSpec) -> float:
    marginals = np.array([mrv_eta(spec, e) for e in np.eye(spec.width)])
    if not np.any(marginals > 0):
        raise ModelError("Spectral measure puts no mass on any marginal tail")
    pooled = mrv_eta(spec, np.ones(spec.width))
    return pooled * np.power(marginals, 1 / spec.gamma).sum() ** -spec.gamma


def mrv_limit_dr(n: int, gamma: float) -> float:
    if not gamma > 1 or n < 1:
        raise ModelError(f"Invalid iid tail model: n={n}, gamma={gamma}")
    return n ** (1 / gamma - 1)


def bernoulli_oracle(spec: BernoulliSpec, alpha: RiskLevel | float) -> BernoulliOracle:
    if spec.n != 2:
        raise ModelError(f"Closed forms cover pairs only: n={spec.n}")
    a, p = RiskLevel.parse(alpha).alpha, spec.p

    marginal = (1 - a) * p / (a + p * (1 - 2 * a))
    if a <= p:
        star_ex = p * a / (1 - 2 * a * (1 - p))
    else:
        numerator = a - p + p * p - a * p * p
        star_ex = numerator / (2 * p * a + 1 - 3 * p + 2 * p * p * (1 - a))

    either = 2 * p - p * p
    star_var = either if a > p else 0.0
    if a <= p:
        star_es = 0.0
    elif a <= either:
        star_es = p * p * a / (2 * p - a)
    else:
        star_es = a

    return BernoulliOracle(
        ex_marginal=marginal,
        alpha_star_ex=star_ex,
        alpha_star_var=star_var,
        alpha_star_es=star_es,
    )


def bernoulli_sample(spec: BernoulliSpec) -> LossSample:
    """Exact joint law of n iid Bernoulli losses as 2^n weighted atoms."""
    grid = np.array(np.meshgrid(*[[0.0, 1.0]] * spec.n, indexing="ij"))
    atoms = grid.reshape(spec.n, -1).T
    hits = atoms.sum(axis=1)
    weights = spec.p**hits * (1 - spec.p) ** (spec.n - hits)
    return LossSample(atoms, weights / weights.sum())


def sample_model(model: Model, count: int, seed: int) -> LossSample:
    if count < 1:
        raise ModelError(f"Sample size must be positive: {count}")
    rng = np.random.default_rng(seed)
    log.debug(f"Drawing {count} rows from {model.name} with seed {seed}")
    return LossSample(model.draw(rng, count))


def simulate(
    model: Model,
    alpha: RiskLevel | float,
    *,
    size: int = constants.SIMULATION_SIZE,
    reps: int = constants.SIMULATION_REPS,
    seed: int,
) -> SimulationSummary:
    """Average the sample quotients over independent draws from one generator."""
    level = RiskLevel.parse(alpha).require_lower_half()
    if size < 1 or reps < 1:
        raise ModelError(f"Sizes must be positive: size={size}, reps={reps}")

    rng = np.random.default_rng(seed)
    totals = np.zeros(3)
    for _ in range(reps):
        sample = LossSample(model.draw(rng, size))
        totals += (
            dq.dq_ex(sample, level),
            dq.dq_var(sample, level.alpha),
            dq.dq_es(sample, level.alpha),
        )
    dq_ex, dq_var, dq_es = (float(value) for value in totals / reps)

    closed_form = None
    if model.spec is not None:
        closed_form = elliptical_dq_ex(model.spec, level)
    log.info(f"Simulated {reps} samples of {size} rows from {model.name}")
    return SimulationSummary(
        model=model.name,
        alpha=level.alpha,
        size=size,
        reps=reps,
        dq_ex=dq_ex,
        dq_var=dq_var,
        dq_es=dq_es,
        closed_form=closed_form,
    )
