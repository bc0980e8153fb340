# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from channel import (ChannelSpec, ScenarioSpec, average_sinr, equivalent_noise_limited, noise_limited,
                     partial_fraction_weights, sample_sinr, sample_sinr_batch, scenario_to_channel,
                     sinr_cdf, sinr_survival, slot_capacity, spawn_rngs)
from errors import DomainError, DuplicateRatioError, IllConditionedWarning, InfeasibleScenarioError
from estimators import ks_distance


class TestChannelSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            ChannelSpec(0.0)
        with pytest.raises(DomainError):
            ChannelSpec(10.0, (-1.0,))
        with pytest.raises(DuplicateRatioError):
            ChannelSpec(10.0, (2.0, 2.0))
        with pytest.raises(DomainError):
            ChannelSpec(10.0, (), symbols_per_slot=0.0)

    def test_properties(self):
        spec = ChannelSpec(10.0, (2.0, 5.0))
        assert spec.n_interferers == 2
        assert not spec.is_noise_limited
        assert spec.interferer_powers == pytest.approx((5.0, 2.0))
        assert spec.rate_scale == pytest.approx(1.0)
        assert ChannelSpec(10.0, (), 1.0).rate_scale == pytest.approx(1.0 / math.log(2.0))

    def test_hashable_for_caching(self):
        assert hash(ChannelSpec(10.0, [2.0, 5.0])) == hash(ChannelSpec(10.0, (2.0, 5.0)))

    def test_average_sinr(self):
        spec = ChannelSpec(10.0, (2.0, 5.0))
        assert average_sinr(spec) == pytest.approx(10.0 / 8.0)
        assert equivalent_noise_limited(spec).avg_snr == pytest.approx(1.25)


class TestPartialFractions:
    def test_single_interferer(self):
        assert partial_fraction_weights(ChannelSpec(10.0, (3.0,))).weights == (3.0,)

    def test_two_interferers(self):
        weights = partial_fraction_weights(ChannelSpec(10.0, (2.0, 4.0))).weights
        assert weights == pytest.approx((4.0, -4.0))
        assert weights[0] / 2.0 + weights[1] / 4.0 == pytest.approx(1.0)

    def test_noise_limited_is_empty(self):
        assert partial_fraction_weights(noise_limited(5.0)).weights == ()

    def test_equivalence_with_product_form(self, rng):
        for size in range(1, 7):
            a = tuple((rng.uniform(0.5, 2.0) * 3.0 ** np.arange(size)).tolist())
            spec = ChannelSpec(7.0, a)
            weights = partial_fraction_weights(spec)
            assert not weights.ill_conditioned
            for x in rng.uniform(0.0, 30.0, 5):
                product = np.prod([ai / (ai + x) for ai in a])
                series = math.fsum(u / (ai + x) for u, ai in zip(weights.weights, a))
                assert series == pytest.approx(product, rel=1e-8)
            assert math.fsum(u / ai for u, ai in zip(weights.weights, a)) == pytest.approx(1.0, rel=1e-8)

    def test_ill_conditioned_warns(self):
        with pytest.warns(IllConditionedWarning):
            weights = partial_fraction_weights(ChannelSpec(10.0, (3.0, 3.0003)))
        assert weights.ill_conditioned
        assert weights.min_relative_gap < 1e-4


class TestDistribution:
    def test_cdf_examples(self):
        assert sinr_cdf(ChannelSpec(10.0, (5.0,)), 0.0) == 0.0
        assert sinr_cdf(noise_limited(1.0), 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)
        assert sinr_cdf(ChannelSpec(10.0, (5.0,)), 2.0) == pytest.approx(1.0 - math.exp(-0.2) * 5.0 / 7.0)

    def test_cdf_vectorized_and_monotone(self):
        x = np.linspace(0.0, 50.0, 101)
        values = sinr_cdf(ChannelSpec(10.0, (2.0, 4.0)), x)
        assert values.shape == x.shape
        assert np.all(np.diff(values) >= 0)
        np.testing.assert_allclose(values + sinr_survival(ChannelSpec(10.0, (2.0, 4.0)), x), 1.0, rtol=1e-14)

    def test_cdf_domain(self):
        with pytest.raises(DomainError):
            sinr_cdf(noise_limited(1.0), -0.1)

    def test_samples_follow_cdf(self, rng):
        spec = ChannelSpec(31.62, (2.0, 4.0, 8.0))
        samples = sample_sinr_batch(spec, rng, 1_000_000)
        assert ks_distance(samples, lambda x: sinr_cdf(spec, x)) < 0.002

    def test_noise_limited_samples_are_exponential(self, rng):
        samples = sample_sinr_batch(noise_limited(5.0), rng, 1_000_000)
        assert samples.mean() == pytest.approx(5.0, rel=0.01)

    def test_determinism(self):
        spec = ChannelSpec(10.0, (2.0,))
        first = sample_sinr_batch(spec, np.random.default_rng(7), 100)
        second = sample_sinr_batch(spec, np.random.default_rng(7), 100)
        np.testing.assert_array_equal(first, second)
        assert sample_sinr(spec, np.random.default_rng(9)) == sample_sinr(spec, np.random.default_rng(9))

    def test_spawned_streams_differ(self):
        a, b = spawn_rngs(3, 2)
        assert not np.array_equal(a.random(10), b.random(10))

    def test_slot_capacity(self):
        spec = noise_limited(10.0, symbols_per_slot=1.0)
        assert slot_capacity(spec, 1.0) == pytest.approx(1.0)
        assert slot_capacity(spec, 3.0) == pytest.approx(2.0)


class TestScenario:
    def test_single_interferer(self):
        g0, g_bar = 10 ** 1.5, 10 ** 0.8
        spec = scenario_to_channel(ScenarioSpec(g0, g_bar, 1))
        assert spec.interferer_ratios == pytest.approx((g0 / (10 ** 0.7 - 1.0),))
        assert average_sinr(spec) == pytest.approx(g_bar, rel=1e-12)

    def test_no_interferers(self):
        spec = scenario_to_channel(ScenarioSpec(20.0, 20.0, 0))
        assert spec.is_noise_limited and spec.avg_snr == 20.0
        with pytest.raises(InfeasibleScenarioError):
            scenario_to_channel(ScenarioSpec(20.0, 10.0, 0))

    def test_perturbed_split(self):
        g0, g_bar = 10 ** 1.5, 10 ** 0.8
        spec = scenario_to_channel(ScenarioSpec(g0, g_bar, 5, 1e-2))
        assert len(set(spec.interferer_ratios)) == 5
        assert average_sinr(spec) == pytest.approx(g_bar, rel=1e-2)

    @pytest.mark.parametrize("scenario", [
        ScenarioSpec(10.0, 20.0, 1),
        ScenarioSpec(10.0, 10.0, 2),
        ScenarioSpec(10.0, 5.0, 5, perturbation=0.6),
    ])
    def test_infeasible(self, scenario):
        with pytest.raises(InfeasibleScenarioError):
            scenario_to_channel(scenario)
