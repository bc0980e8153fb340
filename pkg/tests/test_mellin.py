# -*- coding: utf-8 -*-
import itertools
import math

import numpy as np
import pytest

from channel import (ChannelSpec, ScenarioSpec, noise_limited, partial_fraction_weights, sample_sinr_batch,
                     scenario_to_channel)
from errors import DomainError, IllConditionedWarning, TruncationWarning
from estimators import RunningMoments
from mellin import (MellinParams, average_capacity, effective_capacity, identical_power_mellin,
                    lemma1_integral, lemma2_integral, lemma_integral_quadrature, log_mellin_service,
                    mellin_interference_limited, mellin_service, mellin_service_quadrature, psi_bracket,
                    rayleigh_mellin, rayleigh_mellin_alternative)
from numerics import integrate_adaptive, upper_incomplete_gamma
from simulator import estimate_capacity_mc, estimate_mellin_mc

SNR_GRID = (1.0, 10.0, 31.62, 251.0)
S_GRID = (-1.0, 0.0, 0.3, 0.7, 0.9)
SPEC_SEED = 314159


class TestClosedForms:
    @pytest.mark.parametrize("g, s", list(itertools.product(SNR_GRID, S_GRID)))
    def test_rayleigh_recurrence_identity(self, g, s):
        assert rayleigh_mellin_alternative(g, s) == pytest.approx(rayleigh_mellin(g, s), rel=1e-10)

    @pytest.mark.parametrize("g, s", list(itertools.product(SNR_GRID, S_GRID)))
    def test_identical_power_form(self, g, s):
        value = mellin_service(ChannelSpec(g, (1.0,)), MellinParams(s=s))
        assert value.lower == pytest.approx(value.upper, rel=1e-12)
        assert value.point == pytest.approx(identical_power_mellin(g, s), rel=1e-10)

    def test_s_equal_one(self):
        assert rayleigh_mellin(5.0, 1.0) == 1.0
        assert mellin_service(ChannelSpec(5.0, (2.0, 3.0)), MellinParams(s=1.0)).point == 1.0

    def test_series_requires_s_below_one(self):
        with pytest.raises(DomainError):
            rayleigh_mellin(5.0, 1.5)
        with pytest.raises(DomainError):
            mellin_service(noise_limited(5.0), MellinParams(s=1.2))


class TestLemmaIntegral:
    @pytest.mark.parametrize("a, g, s, k", list(itertools.product(
        (1.5, 2.5, 5.0, 20.0, 100.0), SNR_GRID, S_GRID, (2, 4, 8, 16, 32))))
    def test_truncation_brackets_quadrature(self, a, g, s, k):
        lower, upper = psi_bracket(a, g, s, k)
        oracle = lemma_integral_quadrature(a, g, s)
        slack = 1e-12 * abs(oracle.value) + oracle.abs_error
        assert lower - slack <= oracle.value <= upper + slack

    @pytest.mark.parametrize("a", [0.3, 0.9, 1.0, 1.7, 2.0, 5.0, 40.0])
    def test_adaptive_matches_quadrature(self, a):
        value = lemma1_integral(a, 31.62, 0.5)
        oracle = lemma_integral_quadrature(a, 31.62, 0.5)
        assert value.converged
        assert value.point == pytest.approx(oracle.value, rel=1e-8)

    def test_large_ratio_limit(self):
        g, s, a = 10.0, 0.5, 1e8
        expected = math.exp(1.0 / g) * g ** (s - 1.0) * upper_incomplete_gamma(s - 1.0, 1.0 / g)
        assert a * lemma1_integral(a, g, s).point == pytest.approx(expected, rel=1e-4)

    def test_identical_power(self):
        g, s = 10.0, 0.4
        expected = math.exp(1.0 / g) * g ** (s - 2.0) * upper_incomplete_gamma(s - 2.0, 1.0 / g)
        assert lemma1_integral(1.0, g, s).point == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("a", [0.5, 5.0])
    def test_noiseless_form(self, a):
        s = 0.5
        oracle = integrate_adaptive(lambda x: (1.0 + x) ** (s - 2.0) / (a + x), 0.0, np.inf)
        assert lemma2_integral(a, s).point == pytest.approx(oracle.value, rel=1e-8)

    def test_explicit_k_is_a_bracket(self):
        oracle = lemma_integral_quadrature(0.5, 10.0, 0.3)
        value = lemma1_integral(0.5, 10.0, 0.3, k=4)
        assert value.k_used == 4
        assert value.lower - oracle.abs_error <= oracle.value <= value.upper + oracle.abs_error

    def test_psi_bracket_domain(self):
        with pytest.raises(DomainError):
            psi_bracket(0.5, 10.0, 0.5, 4)

    def test_params_validation(self):
        with pytest.raises(DomainError):
            MellinParams(k=3)
        with pytest.raises(DomainError):
            MellinParams(delta=-1.0)

    def test_unreachable_target_falls_back_to_quadrature(self):
        spec = ChannelSpec(10.0, (5.0,))
        with pytest.warns(TruncationWarning):
            value = mellin_service(spec, MellinParams(s=0.5, target_rel_width=1e-300))
        assert value.method == 'quadrature'
        assert value.point == pytest.approx(mellin_service_quadrature(spec, 0.5), rel=1e-8)


class TestMellinService:
    def test_noise_limited_matches_closed_form(self):
        assert mellin_service(noise_limited(31.62), MellinParams(s=0.3)).point == pytest.approx(
            rayleigh_mellin(31.62, 0.3), rel=1e-14)

    @pytest.mark.parametrize("s", [-1.0, 0.2, 0.5, 0.8])
    def test_quadrature_inside_bracket(self, three_interferers, s):
        value = mellin_service(three_interferers, MellinParams(s=s))
        q = mellin_service_quadrature(three_interferers, s)
        assert value.lower <= value.upper <= 1.0
        assert q == pytest.approx(value.point, rel=1e-8)

    @pytest.mark.parametrize("s", [-1.0, 0.2, 0.5, 0.8])
    def test_three_scenario_interferers_use_series(self, s):
        spec = scenario_to_channel(ScenarioSpec(31.62, 2.512, 3, 0.5, 1.0))
        weights = partial_fraction_weights(spec)
        assert not weights.ill_conditioned
        assert weights.amplification < 100
        value = mellin_service(spec, MellinParams(s=s))
        assert value.method == 'series'
        assert mellin_service_quadrature(spec, s) == pytest.approx(value.point, rel=1e-7)

    def test_quadrature_matches_closed_form(self):
        assert mellin_service_quadrature(noise_limited(3.0), 0.4) == pytest.approx(
            rayleigh_mellin(3.0, 0.4), rel=1e-8)

    @pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
    def test_monte_carlo_oracle(self, three_interferers, s):
        value = mellin_service(three_interferers, MellinParams(s=s))
        mean, stderr = estimate_mellin_mc(three_interferers, s, 1_000_000, seed=11)
        assert value.lower - 4 * stderr <= mean <= value.upper + 4 * stderr

    @pytest.mark.slow
    def test_monte_carlo_oracle_random_specs(self):
        rng = np.random.default_rng(SPEC_SEED)
        s_values = (0.2, 0.5, 0.8)
        for _ in range(12):
            n = int(rng.integers(1, 6))
            avg_snr = float(10 ** rng.uniform(0.0, 2.5))
            spec = ChannelSpec(avg_snr, tuple(float(a) for a in 10 ** rng.uniform(-0.3, 1.5, n)))
            moments = [RunningMoments() for _ in s_values]
            samples = np.random.default_rng(int(rng.integers(1 << 31)))
            remaining = 10_000_000
            while remaining > 0:
                size = min(1 << 20, remaining)
                log_sinr = np.log1p(sample_sinr_batch(spec, samples, size))
                for s, acc in zip(s_values, moments):
                    acc.update(np.exp(spec.rate_scale * (s - 1.0) * log_sinr))
                remaining -= size
            for s, acc in zip(s_values, moments):
                value = mellin_service(spec, MellinParams(s=s))
                assert value.lower - 3 * acc.stderr <= acc.mean <= value.upper + 3 * acc.stderr, (spec, s)

    def test_ill_conditioned_uses_quadrature(self):
        spec = ChannelSpec(10.0, (3.0, 3.0003))
        with pytest.warns(IllConditionedWarning):
            value = mellin_service(spec, MellinParams(s=0.5))
        assert value.method == 'quadrature'
        assert 0.0 < value.point < 1.0

    def test_large_negative_argument_stays_positive(self, three_interferers):
        value = mellin_service(three_interferers, MellinParams(s=-90.0, use_quadrature=True))
        assert 0.0 < value.lower <= value.upper < 2e-2

    def test_symbols_per_slot_scaling(self):
        spec = noise_limited(10.0, symbols_per_slot=1.0)
        s = 0.6
        expected = rayleigh_mellin(10.0, (s - 1.0) / math.log(2.0) + 1.0)
        assert mellin_service(spec, MellinParams(s=s)).point == pytest.approx(expected, rel=1e-14)

    def test_log_mellin_uses_upper(self, three_interferers):
        value = mellin_service(three_interferers, MellinParams(s=0.4))
        assert log_mellin_service(three_interferers, 0.4) == pytest.approx(math.log(value.upper), rel=1e-15)


class TestInterferenceLimited:
    def test_single_interferer_against_quadrature(self):
        s, a = 0.5, 5.0
        oracle = integrate_adaptive(lambda x: (1.0 + x) ** (s - 2.0) / (a + x), 0.0, np.inf).value
        value = mellin_interference_limited(ChannelSpec(10.0, (a,)), MellinParams(s=s))
        assert value.point == pytest.approx(1.0 + a * (s - 1.0) * oracle, rel=1e-8)

    def test_limit_of_vanishing_noise(self):
        a = (2.0, 4.0, 8.0)
        params = MellinParams(s=0.5)
        noiseless = mellin_interference_limited(ChannelSpec(10.0, a), params).point
        assert mellin_service(ChannelSpec(1e6, a), params).point == pytest.approx(noiseless, rel=1e-3)

    def test_trivial_cases(self):
        assert mellin_interference_limited(ChannelSpec(10.0, (3.0,)), MellinParams(s=1.0)).point == 1.0
        with pytest.raises(DomainError):
            mellin_interference_limited(noise_limited(10.0), MellinParams(s=0.5))


class TestCapacity:
    def test_average_capacity_closed_form(self):
        assert average_capacity(noise_limited(1.0)) == pytest.approx(0.5963473623, rel=1e-8)
        assert average_capacity(noise_limited(1.0, symbols_per_slot=1.0)) == pytest.approx(
            0.5963473623 / math.log(2.0), rel=1e-8)

    @pytest.mark.parametrize("spec", [noise_limited(10.0), ChannelSpec(10.0, (1.0,))])
    def test_small_s_approaches_average_capacity(self, spec):
        mean, _ = estimate_capacity_mc(spec, 4_000_000, seed=5)
        assert effective_capacity(spec, 1e-4) == pytest.approx(mean, rel=5e-3)
        assert average_capacity(spec) == pytest.approx(mean, rel=5e-3)

    def test_decreasing_in_s(self, three_interferers):
        values = [effective_capacity(three_interferers, s) for s in np.geomspace(1e-3, 10.0, 15)]
        assert np.all(np.diff(values) < 0)

    def test_noise_limited_dominates_equal_power_interferer(self):
        g = 10.0
        for s in np.geomspace(1e-3, 10.0, 12):
            assert effective_capacity(noise_limited(g), s) > effective_capacity(ChannelSpec(g, (1.0,)), s)

    def test_large_s(self):
        spec = noise_limited(1.0)
        assert 0.0 < effective_capacity(spec, 10.0) < average_capacity(spec)

    def test_fewer_interferers_more_capacity(self):
        values = [average_capacity(scenario_to_channel(ScenarioSpec(31.62, 6.31, n))) for n in (1, 3, 8)]
        assert values[0] > values[1] > values[2]

    def test_domain(self):
        with pytest.raises(DomainError):
            effective_capacity(noise_limited(1.0), 0.0)
