from dataclasses import dataclass

from dqengine.risk.types import RiskLevel


class DegenerateError(ValueError):
    """Quantity undefined for the given sample."""


@dataclass(frozen=True)
class DqReport:
    dq_ex: float
    dq_var: float
    dq_es: float
    dr: float
    omega_at_t: float
    adjusted_level: float | None
    alpha: RiskLevel
    marginal_risks: tuple[float, ...]
    aggregate_threshold: float
