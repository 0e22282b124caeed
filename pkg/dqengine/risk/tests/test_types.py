# pylint: disable=expression-not-assigned,singleton-comparison,unused-variable

import numpy as np
import pytest

from ..types import Kind, LevelError, LossSample, RiskLevel, SampleError, ScalarSample


def describe_risk_level():
    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, float("nan")])
    def it_rejects_levels_outside_the_unit_interval(expect, alpha):
        with expect.raises(LevelError):
            RiskLevel(alpha)

    def it_computes_theta(expect):
        expect(RiskLevel(0.25).theta) == 2.0

    def it_requires_the_lower_half_on_demand(expect):
        expect(RiskLevel(0.2).require_lower_half().alpha) == 0.2
        with expect.raises(LevelError):
            RiskLevel(0.5).require_lower_half()

    def it_parses_kinds(expect):
        level = RiskLevel.parse(0.1, "es")
        expect(level.kind) == Kind.ES
        expect(RiskLevel.parse(level)) == level


def describe_scalar_sample():
    def it_defaults_to_uniform_weights(expect):
        sample = ScalarSample([3.0, 1.0, 2.0])
        expect(sample.uniform) == True
        expect(sample.mean) == pytest.approx(2.0)
        expect(list(sample.sorted_values)) == [1.0, 2.0, 3.0]

    def it_is_immutable(expect):
        sample = ScalarSample([1.0, 2.0])
        with expect.raises(ValueError):
            sample.values[0] = 5.0

    def it_rejects_empty_samples(expect):
        with expect.raises(SampleError):
            ScalarSample([])

    def it_rejects_non_finite_values(expect):
        with expect.raises(SampleError):
            ScalarSample([1.0, np.inf])

    @pytest.mark.parametrize("weights", [[0.5, 0.6], [-0.5, 1.5], [1.0]])
    def it_rejects_invalid_weights(expect, weights):
        with expect.raises(SampleError):
            ScalarSample([1.0, 2.0], weights)

    def it_accumulates_sorted_moments(expect):
        sample = ScalarSample([2.0, 0.0, 1.0], [0.5, 0.25, 0.25])
        expect(list(sample.cumulative_weights)) == [0.25, 0.5, 1.0]
        expect(list(sample.cumulative_moments)) == [0.0, 0.25, 1.25]


def describe_loss_sample():
    @pytest.fixture
    def losses():
        return LossSample([[1.0, -1.0], [2.0, 0.5], [0.0, 3.0]], labels=["a", "b"])

    def it_sums_rows(expect, losses):
        expect(list(losses.aggregate.values)) == [0.0, 2.5, 3.0]

    def it_exposes_columns(expect, losses):
        expect(list(losses.column(1).values)) == [-1.0, 0.5, 3.0]
        expect(len(losses.columns)) == 2

    def it_names_columns_by_default(expect):
        expect(LossSample([[1.0, 2.0]]).labels) == ("X1", "X2")

    def it_rejects_label_mismatches(expect):
        with expect.raises(SampleError):
            LossSample([[1.0, 2.0]], labels=["only"])

    def it_scales_columns(expect, losses):
        scaled = losses.scale([2.0, 0.0])
        expect(list(scaled.aggregate.values)) == [2.0, 4.0, 0.0]

    def it_treats_vectors_as_one_column(expect):
        expect(LossSample([1.0, 2.0, 3.0]).width) == 1
