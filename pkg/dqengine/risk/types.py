from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from . import constants


class SampleError(ValueError):
    """Empty, non-finite, or mis-weighted sample."""


class LevelError(ValueError):
    """Risk level outside the band of its measure."""


class Kind(str, Enum):
    EXPECTILE = "expectile"
    VAR = "var"
    ES = "es"


@dataclass(frozen=True)
class RiskLevel:
    alpha: float
    kind: Kind = Kind.EXPECTILE

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or not 0 < alpha < 1:
            raise LevelError(f"alpha must lie in (0, 1): {self.alpha}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "kind", Kind(self.kind))

    def __float__(self):
        return self.alpha

    @property
    def theta(self) -> float:
        """Safe loading of the upper partial moment."""
        return (1 - 2 * self.alpha) / self.alpha

    @property
    def lower_half(self) -> bool:
        return self.alpha < constants.LOWER_HALF

    def require_lower_half(self) -> RiskLevel:
        if not self.lower_half:
            raise LevelError(f"alpha must lie in (0, 1/2): {self.alpha}")
        return self

    @classmethod
    def parse(cls, value: RiskLevel | float, kind: Kind | str = Kind.EXPECTILE):
        if isinstance(value, RiskLevel):
            return value
        return cls(value, Kind(kind))


def _weights(weights: Sequence[float] | np.ndarray | None, count: int) -> np.ndarray:
    if weights is None:
        return np.full(count, 1 / count)
    array = np.array(weights, dtype=float).reshape(-1)
    if array.shape != (count,):
        raise SampleError(f"Expected {count} weights, got {array.size}")
    if not np.all(np.isfinite(array)) or np.any(array < 0):
        raise SampleError("Weights must be finite and nonnegative")
    total = array.sum()
    if abs(total - 1) > constants.WEIGHT_SUM_TOLERANCE * max(count, 1):
        raise SampleError(f"Weights must sum to 1: {total!r}")
    return array / total


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScalarSample:
    values: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise SampleError("Sample is empty")
        if not np.all(np.isfinite(values)):
            raise SampleError("Sample contains non-finite values")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(
            self, "weights", _frozen(_weights(self.weights, values.size))
        )

    def __len__(self):
        return self.values.size

    def __neg__(self) -> ScalarSample:
        return ScalarSample(-self.values, self.weights)

    def shift(self, constant: float) -> ScalarSample:
        return ScalarSample(self.values + constant, self.weights)

    def scale(self, factor: float) -> ScalarSample:
        return ScalarSample(self.values * factor, self.weights)

    @cached_property
    def mean(self) -> float:
        return float(self.weights @ self.values)

    @cached_property
    def minimum(self) -> float:
        return float(self.values[self.weights > 0].min())

    @cached_property
    def maximum(self) -> float:
        return float(self.values[self.weights > 0].max())

    @property
    def degenerate(self) -> bool:
        return self.minimum == self.maximum

    @cached_property
    def _order(self) -> np.ndarray:
        return np.argsort(self.values, kind="stable")

    @cached_property
    def sorted_values(self) -> np.ndarray:
        return _frozen(self.values[self._order])

    @cached_property
    def sorted_weights(self) -> np.ndarray:
        return _frozen(self.weights[self._order])

    @cached_property
    def cumulative_weights(self) -> np.ndarray:
        return _frozen(np.cumsum(self.sorted_weights))

    @cached_property
    def cumulative_moments(self) -> np.ndarray:
        return _frozen(np.cumsum(self.sorted_weights * self.sorted_values))


@dataclass(frozen=True, eq=False)
class LossSample:
    observations: np.ndarray
    weights: np.ndarray = field(default=None)  # type: ignore[assignment]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        observations = np.array(self.observations, dtype=float)
        if observations.ndim == 1:
            observations = observations.reshape(-1, 1)
        if observations.ndim != 2 or 0 in observations.shape:
            raise SampleError(f"Expected an N x n matrix: {observations.shape}")
        if not np.all(np.isfinite(observations)):
            raise SampleError("Observations contain non-finite values")
        count, width = observations.shape
        labels = tuple(str(label) for label in self.labels) or tuple(
            f"X{index}" for index in range(1, width + 1)
        )
        if len(labels) != width:
            raise SampleError(f"Expected {width} labels, got {len(labels)}")
        object.__setattr__(self, "observations", _frozen(observations))
        object.__setattr__(self, "weights", _frozen(_weights(self.weights, count)))
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.size

    def __neg__(self) -> LossSample:
        return LossSample(-self.observations, self.weights, self.labels)

    @property
    def size(self) -> int:
        return self.observations.shape[0]

    @property
    def width(self) -> int:
        return self.observations.shape[1]

    def column(self, index: int) -> ScalarSample:
        return ScalarSample(self.observations[:, index], self.weights)

    @property
    def columns(self) -> list[ScalarSample]:
        return [self.column(index) for index in range(self.width)]

    @cached_property
    def aggregate(self) -> ScalarSample:
        return ScalarSample(self.observations.sum(axis=1), self.weights)

    def shift(self, constants_: Sequence[float] | np.ndarray) -> LossSample:
        shifted = self.observations + np.asarray(constants_, dtype=float)
        return LossSample(shifted, self.weights, self.labels)

    def scale(self, factors: float | Sequence[float] | np.ndarray) -> LossSample:
        scaled = self.observations * np.asarray(factors, dtype=float)
        return LossSample(scaled, self.weights, self.labels)
