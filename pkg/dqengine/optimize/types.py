from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class OptimizationError(RuntimeError):
    """Raised when a portfolio problem cannot be solved."""


class Infeasible(OptimizationError):
    pass


class Unbounded(OptimizationError):
    pass


class IterationLimit(OptimizationError):
    pass


class Status(str, Enum):
    OPTIMAL = "optimal"
    BOUND_ACTIVE = "bound_active"
    STALLED = "stalled"
    ITERATION_LIMIT = "iteration_limit"


@dataclass(frozen=True, eq=False)
class PortfolioWeights:
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0 or not np.all(np.isfinite(values)):
            raise ValueError("Weights must be a finite, nonempty vector")
        if np.any(values < -1e-12):
            raise ValueError(f"Weights must be nonnegative: {values}")
        values = np.clip(values, 0, None)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __iter__(self):
        return iter(float(value) for value in self.values)

    @classmethod
    def equal(cls, count: int) -> PortfolioWeights:
        return cls(np.full(count, 1 / count))

    def normalized(self) -> PortfolioWeights:
        total = self.values.sum()
        if not total > 0:
            raise ValueError("Cannot normalize the zero portfolio")
        return PortfolioWeights(self.values / total)


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Minimize c.x subject to A_ub x <= b_ub, A_eq x = b_eq and x >= 0."""

    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    big_m: float | None = None

    def __post_init__(self):
        c = np.array(self.c, dtype=float).reshape(-1)
        object.__setattr__(self, "c", c)
        for rows, rhs in (("a_ub", "b_ub"), ("a_eq", "b_eq")):
            matrix, vector = getattr(self, rows), getattr(self, rhs)
            matrix = np.zeros((0, c.size)) if matrix is None else matrix
            vector = np.zeros(0) if vector is None else vector
            matrix = np.array(matrix, float).reshape(-1, c.size)
            vector = np.array(vector, float).reshape(-1)
            if matrix.shape[0] != vector.size:
                raise ValueError(f"Constraint rows and {rhs} disagree in length")
            object.__setattr__(self, rows, matrix)
            object.__setattr__(self, rhs, vector.reshape(-1))
        if self.big_m is not None and not 0 < self.big_m < np.inf:
            raise ValueError(f"Big-M bound must be positive and finite: {self.big_m}")

    @property
    def width(self) -> int:
        return self.c.size


@dataclass(frozen=True, eq=False)
class LpSolution:
    x: np.ndarray
    objective: float
    iterations: int
    status: Status = Status.OPTIMAL


@dataclass(frozen=True, eq=False)
class FrontierPoint:
    m: float
    upside: float
    weights: PortfolioWeights

    @property
    def ratio(self) -> float:
        return self.upside / self.m


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    weights: PortfolioWeights
    objective: float
    dq: float
    status: Status = Status.OPTIMAL
    iterations: int = 0
    big_m: float | None = None
    labels: tuple[str, ...] = field(default=())

    @property
    def converged(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass(frozen=True)
class ConvexityProbe:
    f_w: float
    f_v: float
    directional: float


@dataclass(frozen=True, eq=False)
class OmegaResult:
    weights: PortfolioWeights
    omega: float
    threshold: float
    status: Status = Status.OPTIMAL
    iterations: int = 0
    big_m: float | None = None
    labels: tuple[str, ...] = field(default=())


@dataclass(frozen=True, eq=False)
class ExcessLosses:
    """Scenario losses in excess of the marginal expectiles."""

    expectiles: np.ndarray
    excess: np.ndarray
    probabilities: np.ndarray

    @property
    def width(self) -> int:
        return self.excess.shape[1]

    @property
    def cushion(self) -> np.ndarray:
        return -(self.probabilities @ self.excess)

    def portfolio(self, weights: np.ndarray) -> np.ndarray:
        return self.excess @ weights
