from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Union

import numpy as np

from . import constants


class ModelError(ValueError):
    """Invalid parametric model or model parameters."""


class Family(str, Enum):
    NORMAL = "normal"
    STUDENT_T = "student_t"


@dataclass(frozen=True)
class Generator:
    family: Family = Family.NORMAL
    nu: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.STUDENT_T:
            if self.nu is None or not self.nu > 1:
                raise ModelError(f"Student-t generator needs nu > 1: {self.nu}")
            object.__setattr__(self, "nu", float(self.nu))
        elif self.nu is not None:
            raise ModelError("Degrees of freedom apply only to Student-t")

    def __str__(self):
        if self.family is Family.STUDENT_T:
            return f"student_t({self.nu:g})"
        return self.family.value

    @classmethod
    def normal(cls) -> Generator:
        return cls(Family.NORMAL)

    @classmethod
    def student_t(cls, nu: float) -> Generator:
        return cls(Family.STUDENT_T, nu)


def _dispersion(sigma) -> np.ndarray:
    matrix = np.array(sigma, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.size == 0:
        raise ModelError(f"Dispersion must be a square matrix: {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ModelError("Dispersion contains non-finite entries")
    if np.abs(matrix - matrix.T).max() > constants.SYMMETRY_TOLERANCE:
        raise ModelError("Dispersion must be symmetric")
    if np.any(np.diag(matrix) < 0):
        raise ModelError("Dispersion has negative variances")
    if not np.any(matrix):
        raise ModelError("Dispersion is the zero matrix")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class EllipticalSpec:
    mu: np.ndarray
    sigma: np.ndarray
    generator: Generator = field(default_factory=Generator)

    def __post_init__(self):
        sigma = _dispersion(self.sigma)
        mu = np.zeros(sigma.shape[0]) if self.mu is None else np.array(self.mu, float)
        if mu.shape != (sigma.shape[0],):
            raise ModelError(f"Location must have {sigma.shape[0]} entries")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def centered(cls, sigma, generator: Generator | None = None) -> EllipticalSpec:
        return cls(None, sigma, generator or Generator())  # type: ignore[arg-type]

    @property
    def width(self) -> int:
        return self.sigma.shape[0]

    @cached_property
    def scales(self) -> np.ndarray:
        return np.sqrt(np.diag(self.sigma))


@dataclass(frozen=True, eq=False)
class MrvSpec:
    gamma: float
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if not self.gamma > 1:
            raise ModelError(f"Tail index must exceed 1: {self.gamma}")
        atoms = np.array(self.atoms, dtype=float)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if atoms.ndim != 2 or atoms.shape[0] != weights.size or weights.size == 0:
            raise ModelError("Expected one weight per spectral atom")
        norms = np.abs(atoms).sum(axis=1)
        if np.abs(norms - 1).max() > constants.ATOM_NORM_TOLERANCE:
            raise ModelError("Spectral atoms must have unit L1 norm")
        drift = abs(weights.sum() - 1)
        if np.any(weights < 0) or drift > constants.ATOM_NORM_TOLERANCE:
            raise ModelError("Spectral weights must be nonnegative and sum to 1")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def coordinates(cls, gamma: float, width: int) -> MrvSpec:
        return cls(gamma, np.eye(width), np.full(width, 1 / width))

    @property
    def width(self) -> int:
        return self.atoms.shape[1]


@dataclass(frozen=True)
class BernoulliSpec:
    p: float
    n: int = 2

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ModelError(f"Bernoulli parameter must lie in (0, 1): {self.p}")
        if self.n < 1:
            raise ModelError(f"Asset count must be positive: {self.n}")


@dataclass(frozen=True)
class BernoulliOracle:
    ex_marginal: float
    alpha_star_ex: float
    alpha_star_var: float
    alpha_star_es: float


@dataclass(frozen=True)
class SimulationSummary:
    """Mean empirical quotients over repeated samples of one model."""

    model: str
    alpha: float
    size: int
    reps: int
    dq_ex: float
    dq_var: float
    dq_es: float
    closed_form: float | None = None


def _mixed_normal(
    rng: np.random.Generator, count: int, factor: np.ndarray, nu: float | None
) -> np.ndarray:
    draws = rng.standard_normal((count, factor.shape[0])) @ factor.T
    if nu is None:
        return draws
    radial = rng.chisquare(nu, size=(count, 1))
    return draws / np.sqrt(radial / nu)


def _factor(sigma: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh(sigma)
    if values.min() < -constants.SYMMETRY_TOLERANCE * max(1.0, values.max()):
        raise ModelError("Dispersion is not positive semi-definite")
    return vectors * np.sqrt(np.clip(values, 0, None))


@dataclass(frozen=True)
class EquicorrelatedNormal:
    n: int
    r: float

    name = "equicorrelated_normal"

    def __post_init__(self):
        if self.n < 1:
            raise ModelError(f"Asset count must be positive: {self.n}")
        lowest = -1 / (self.n - 1) if self.n > 1 else -1.0
        if not lowest < self.r <= 1:
            raise ModelError(f"Correlation must lie in ({lowest:g}, 1]: {self.r}")

    @property
    def dispersion(self) -> np.ndarray:
        return (1 - self.r) * np.eye(self.n) + self.r * np.ones((self.n, self.n))

    @property
    def spec(self) -> EllipticalSpec:
        return EllipticalSpec.centered(self.dispersion)

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return _mixed_normal(rng, count, _factor(self.dispersion), None)


@dataclass(frozen=True, eq=False)
class MultivariateT:
    nu: float
    sigma: np.ndarray

    name = "multivariate_t"

    def __post_init__(self):
        if not self.nu > 1:
            raise ModelError(f"Degrees of freedom must exceed 1: {self.nu}")
        object.__setattr__(self, "sigma", _dispersion(self.sigma))

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @property
    def spec(self) -> EllipticalSpec:
        return EllipticalSpec.centered(self.sigma, Generator.student_t(self.nu))

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return _mixed_normal(rng, count, _factor(self.sigma), self.nu)


@dataclass(frozen=True)
class IidT:
    nu: float
    n: int

    name = "iid_t"

    def __post_init__(self):
        if not self.nu > 1:
            raise ModelError(f"Degrees of freedom must exceed 1: {self.nu}")
        if self.n < 1:
            raise ModelError(f"Asset count must be positive: {self.n}")

    @property
    def spec(self) -> None:
        return None

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        draws = rng.standard_normal((count, self.n))
        radial = rng.chisquare(self.nu, size=(count, self.n))
        return draws / np.sqrt(radial / self.nu)


@dataclass(frozen=True)
class IidPareto:
    gamma: float
    n: int

    name = "iid_pareto"

    def __post_init__(self):
        if not self.gamma > 1:
            raise ModelError(f"Tail index must exceed 1: {self.gamma}")
        if self.n < 1:
            raise ModelError(f"Asset count must be positive: {self.n}")

    @property
    def spec(self) -> None:
        return None

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.pareto(self.gamma, size=(count, self.n)) + 1


Model = Union[EquicorrelatedNormal, MultivariateT, IidT, IidPareto]


def parse_model(
    name: str, *, n: int = 5, r: float = 0.0, nu: float = 3.0, gamma: float = 3.0
) -> Model:
    if name == EquicorrelatedNormal.name:
        return EquicorrelatedNormal(n, r)
    if name == MultivariateT.name:
        return MultivariateT(nu, EquicorrelatedNormal(n, r).dispersion)
    if name == IidT.name:
        return IidT(nu, n)
    if name == IidPareto.name:
        return IidPareto(gamma, n)
    raise ModelError(f"Unknown model: {name}")
