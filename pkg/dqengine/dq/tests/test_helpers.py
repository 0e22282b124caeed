# pylint: disable=expression-not-assigned,singleton-comparison,unused-variable

import math

import numpy as np
import pytest

from dqengine.risk.helpers import omega_ratio
from dqengine.risk.types import Kind, LevelError, LossSample, RiskLevel

from .. import helpers
from ..types import DegenerateError


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def bernoulli_pair():
    return LossSample(
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
        [0.81, 0.09, 0.09, 0.01],
    )


@pytest.fixture
def comonotonic(rng):
    base = rng.standard_t(4, size=1_000)
    return LossSample(np.outer(base, [1.0, 2.0, 0.5]))


@pytest.fixture
def hedge(rng):
    base = rng.normal(size=500)
    return LossSample(np.column_stack([base, -base]))


@pytest.fixture
def gaussian(rng):
    mixing = rng.normal(size=(5, 5))
    return LossSample(rng.normal(size=(2_000, 5)) @ mixing)


def describe_dq_ex():
    def it_is_one_for_comonotonic_duplicates(expect, comonotonic):
        expect(helpers.dq_ex(comonotonic, 0.05)) == pytest.approx(1.0, abs=1e-9)

    def it_is_zero_for_a_perfect_hedge(expect, hedge):
        expect(helpers.dq_ex(hedge, 0.05)) == 0.0

    def it_matches_the_bernoulli_closed_form(expect, bernoulli_pair):
        expected = (0.005 / 0.91) / 0.05
        expect(helpers.dq_ex(bernoulli_pair, 0.05)) == pytest.approx(
            expected, abs=1e-12
        )

    def it_rejects_the_upper_half(expect, gaussian):
        with expect.raises(LevelError):
            helpers.dq_ex(gaussian, 0.5)

    def it_stays_in_the_unit_interval(expect, rng):
        for _ in range(50):
            sample = LossSample(rng.standard_t(3, size=(100, 3)))
            value = helpers.dq_ex(sample, rng.uniform(0.01, 0.49))
            expect(0 <= value <= 1) == True

    def it_vanishes_exactly_when_rows_stay_below_the_threshold(expect, rng):
        for _ in range(50):
            sample = LossSample(rng.normal(size=(8, 2)))
            total = sample.aggregate.values
            below = bool(np.all(total <= helpers.threshold(sample, RiskLevel(0.2))))
            expect(helpers.dq_ex(sample, 0.2) == 0) == below

    def it_is_location_and_scale_invariant(expect, gaussian):
        value = helpers.dq_ex(gaussian, 0.1)
        shifted = gaussian.shift([1.0, -2.0, 3.0, 0.5, 10.0])
        expect(helpers.dq_ex(shifted, 0.1)) == pytest.approx(value, abs=1e-10)
        expect(helpers.dq_ex(gaussian.scale(7.5), 0.1)) == pytest.approx(
            value, abs=1e-10
        )

    def it_orders_samples_like_the_omega_ratio(expect, rng):
        for _ in range(20):
            first = LossSample(rng.normal(size=(300, 3)))
            second = LossSample(rng.standard_t(3, size=(300, 3)))
            omegas = [
                omega_ratio(s.aggregate, helpers.threshold(s, RiskLevel(0.1)))
                for s in (first, second)
            ]
            values = [helpers.dq_ex(s, 0.1) for s in (first, second)]
            expect(omegas[0] <= omegas[1]) == (values[0] <= values[1])


def describe_dq_ex_tilted():
    def it_agrees_with_the_omega_formula(expect, gaussian):
        direct = helpers.dq_ex(gaussian, 0.1)
        expect(helpers.dq_ex_tilted(gaussian, 0.1)) == pytest.approx(direct, abs=1e-10)

    def it_agrees_on_randomized_samples(expect, rng):
        for _ in range(25):
            sample = LossSample(rng.standard_t(5, size=(150, 4)))
            alpha = rng.uniform(0.01, 0.45)
            expected = helpers.dq_ex(sample, alpha)
            expect(helpers.dq_ex_tilted(sample, alpha)) == pytest.approx(
                expected, abs=1e-10
            )

    def it_handles_the_reference_cases(expect, comonotonic, hedge, bernoulli_pair):
        expect(helpers.dq_ex_tilted(comonotonic, 0.05)) == pytest.approx(1.0, abs=1e-9)
        expect(helpers.dq_ex_tilted(hedge, 0.05)) == 0.0
        expected = (0.005 / 0.91) / 0.05
        expect(helpers.dq_ex_tilted(bernoulli_pair, 0.05)) == pytest.approx(expected)


def describe_dq_var():
    def it_is_zero_when_the_level_is_below_one_row(expect, rng):
        sample = LossSample(rng.normal(size=(49, 3)))
        expect(helpers.dq_var(sample, 0.02)) == 0.0

    def it_matches_the_bernoulli_closed_form(expect, bernoulli_pair):
        expect(helpers.dq_var(bernoulli_pair, 0.15)) == pytest.approx(0.19 / 0.15)

    def it_counts_strict_exceedances_for_comonotonic_duplicates(expect, comonotonic):
        # 1000 rows at 5%: 49 order statistics lie strictly above the quantile
        expect(helpers.dq_var(comonotonic, 0.05)) == pytest.approx(49 / 50)


def describe_dq_es():
    def it_is_zero_when_the_level_is_below_one_row(expect, rng):
        sample = LossSample(rng.normal(size=(49, 3)))
        expect(helpers.dq_es(sample, 0.02)) == 0.0

    def it_matches_the_bernoulli_closed_form(expect, bernoulli_pair):
        expect(helpers.dq_es(bernoulli_pair, 0.15)) == pytest.approx(0.2, abs=1e-12)

    def it_is_one_for_comonotonic_duplicates(expect, comonotonic):
        expect(helpers.dq_es(comonotonic, 0.05)) == pytest.approx(1.0, abs=1e-9)


def describe_small_samples():
    def it_separates_expectiles_from_quantiles(expect, rng):
        for _ in range(20):
            sample = LossSample(rng.normal(size=(15, 3)))
            expect(helpers.dq_var(sample, 0.05)) == 0.0
            expect(helpers.dq_es(sample, 0.05)) == 0.0
            t = helpers.threshold(sample, RiskLevel(0.05))
            if sample.aggregate.maximum > t:
                expect(helpers.dq_ex(sample, 0.05)) > 0


def describe_dr():
    def it_is_one_for_comonotonic_duplicates(expect, comonotonic):
        expect(helpers.dr(comonotonic, 0.05)) == pytest.approx(1.0, abs=1e-9)

    def it_approximates_one_over_root_n_for_spherical_samples(expect, rng):
        sample = LossSample(rng.normal(size=(200_000, 4)))
        expect(helpers.dr(sample, 0.05)) == pytest.approx(0.5, abs=0.01)

    def it_is_zero_for_a_perfect_hedge(expect):
        sample = LossSample([[1.0, -1.0], [-1.0, 1.0], [3.0, -3.0], [-3.0, 3.0]])
        expect(helpers.dr(sample, 0.1)) == 0.0

    @pytest.mark.parametrize("kind", [Kind.VAR, Kind.ES])
    def it_supports_quantile_measures(expect, comonotonic, kind):
        expect(helpers.dr(comonotonic, 0.05, kind)) == pytest.approx(1.0, abs=1e-9)


def describe_adjusted_level():
    def it_is_one_for_comonotonic_duplicates(expect, comonotonic):
        expect(helpers.adjusted_level(comonotonic, 0.05)) == pytest.approx(
            1.0, abs=1e-9
        )

    def it_matches_the_bernoulli_closed_form(expect, bernoulli_pair):
        expected = (0.005 / 0.91) / 0.05
        expect(helpers.adjusted_level(bernoulli_pair, 0.05)) == pytest.approx(
            expected, abs=1e-9
        )

    def it_agrees_with_the_omega_formula(expect, gaussian):
        expected = helpers.dq_ex(gaussian, 0.1)
        expect(helpers.adjusted_level(gaussian, 0.1)) == pytest.approx(
            expected, abs=1e-9
        )

    def it_signals_when_no_level_exists(expect, hedge):
        with expect.raises(DegenerateError):
            helpers.adjusted_level(hedge, 0.05)


def describe_dq_ex_definition():
    def it_agrees_with_the_omega_formula(expect, gaussian):
        expected = helpers.dq_ex(gaussian, 0.05)
        expect(helpers.dq_ex_definition(gaussian, 0.05)) == pytest.approx(
            expected, abs=1e-9
        )

    def it_uses_the_empty_set_convention_above_one_half(expect):
        sample = LossSample([[1.0, 1.0], [2.0, 0.0]])
        expect(helpers.dq_ex_definition(sample, 0.6)) == pytest.approx(1 / 0.6)


def describe_dq_ex_upper_half():
    def it_is_one_for_comonotonic_duplicates(expect, comonotonic):
        expect(helpers.dq_ex_upper_half(comonotonic, 0.7)) == pytest.approx(
            1.0, abs=1e-9
        )

    def it_matches_the_definition_for_symmetric_laws(expect, rng):
        half = rng.normal(size=(400, 3)) @ rng.normal(size=(3, 3))
        sample = LossSample(np.vstack([half, -half]))
        direct = helpers.dq_ex_definition(sample, 0.6)
        expect(helpers.dq_ex_upper_half(sample, 0.6)) == pytest.approx(direct, abs=1e-8)

    def it_satisfies_the_symmetry_identity(expect, rng):
        for _ in range(100):
            sample = LossSample(rng.standard_t(4, size=(120, 3)))
            lower = helpers.dq_ex(sample, 0.25)
            upper = helpers.dq_ex_definition(-sample, 0.75)
            expect(0.25 * lower + 0.75 * upper) == pytest.approx(1.0, abs=1e-9)

    def it_rejects_constant_vectors(expect):
        with expect.raises(DegenerateError):
            helpers.dq_ex_upper_half(LossSample([[1.0, 2.0], [1.0, 2.0]]), 0.7)

    def it_rejects_the_lower_half(expect, gaussian):
        with expect.raises(LevelError):
            helpers.dq_ex_upper_half(gaussian, 0.3)


def describe_loss_gain_ratio():
    def it_divides_expected_losses_by_expected_gains(expect):
        sample = LossSample([[2.0], [-1.0]])
        expect(helpers.loss_gain_ratio(sample)) == 2.0

    def it_is_zero_without_losses(expect):
        expect(helpers.loss_gain_ratio(LossSample([[-1.0], [-2.0]]))) == 0.0

    def it_is_unbounded_without_gains(expect):
        expect(helpers.loss_gain_ratio(LossSample([[1.0], [0.0]]))) == math.inf


def describe_report():
    def it_collects_every_index(expect, bernoulli_pair):
        report = helpers.report(bernoulli_pair, 0.05)
        expect(report.dq_ex) == pytest.approx((0.005 / 0.91) / 0.05)
        expect(report.adjusted_level) == pytest.approx(0.005 / 0.91)
        expect(report.aggregate_threshold) == pytest.approx(2 * 0.095 / 0.14)
        expect(len(report.marginal_risks)) == 2

    def it_omits_the_adjusted_level_for_hedges(expect, hedge):
        report = helpers.report(hedge, 0.05)
        expect(report.adjusted_level) == None
        expect(report.alpha.alpha) == 0.05

    def it_uses_the_requested_marginals(expect, bernoulli_pair):
        report = helpers.report(bernoulli_pair, 0.05, Kind.VAR)
        expect(report.marginal_risks) == (1.0, 1.0)
        expect(report.aggregate_threshold) == 2.0
        expect(report.dr) == pytest.approx(0.5)
        expect(report.dq_ex) == pytest.approx((0.005 / 0.91) / 0.05)
