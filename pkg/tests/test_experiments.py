# -*- coding: utf-8 -*-
import math

import numpy as np
import pandas as pd
import pytest

from config import AppConfig, EXPERIMENT_KINDS
from errors import ConfigError
from experiments import (EQUAL_POWER, NOISE_LIMITED, build_metadata, build_tasks, check_reproduction,
                         delay_rate_point, run_experiment)
from parsers import experiment_params, read_dataset

Columns = AppConfig.Columns

SMALL_AVGCAP = {'avg_snr_db_grid': [10.0, 16.0, 22.0], 'avg_sinr_db_list': [8.0], 'n_interferers_list': [1, 3]}


class TestTasks:
    def test_every_kind_builds(self):
        for kind in EXPERIMENT_KINDS:
            assert build_tasks(kind, experiment_params(kind))

    def test_interferer_sweep_includes_reference(self):
        tasks = build_tasks('delay-vs-interferers', experiment_params('delay-vs-interferers'))
        assert len(tasks) == 3 * 9
        assert sorted({t.kwargs['n'] for t in tasks}) == [-1] + list(range(1, 9))

    def test_validate_seeds_differ_per_scenario(self):
        tasks = build_tasks('validate', experiment_params('validate'), seed=10)
        assert [t.kwargs['seed'] for t in tasks] == [10, 11, 12, 13]

    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            build_tasks('figure-9', {})

    def test_metadata_has_linear_twins(self):
        metadata = build_metadata('delay-vs-epsilon', experiment_params('delay-vs-epsilon'), 3)
        assert metadata['kind'] == 'delay-vs-epsilon'
        assert metadata['seed'] == 3
        assert metadata['avg_snr_linear'] == pytest.approx(10 ** 1.5)
        assert metadata['avg_sinr_linear_list'] == pytest.approx([1.0, 10 ** 0.4])
        assert 'rate_normalization' in metadata


class TestPoints:
    def test_infeasible_scenario_row(self):
        rows = delay_rate_point(15.0, 20.0, 2, 1e-2, 1.0, 0.5, 1e-3)
        assert len(rows) == 1
        assert rows[0][Columns.STATUS].startswith('infeasible')

    def test_unstable_rate_has_no_delay(self):
        row = delay_rate_point(15.0, 4.0, 1, 1e-2, 1.0, 10.0, 1e-6)[0]
        assert math.isnan(row[Columns.W])
        assert row[Columns.STABLE] is False

    def test_reference_channel_and_rate_units(self):
        row = delay_rate_point(15.0, 8.0, -1, 1e-2, 2.0, 1.0, 1e-3)[0]
        assert row[Columns.CHANNEL] == NOISE_LIMITED
        assert row[Columns.RATE] == 0.5
        assert row[Columns.RATE_PER_SLOT] == 1.0
        assert row[Columns.W] >= 0


class TestRuns:
    def test_avgcap_run_passes_checks(self, tmp_path):
        out = str(tmp_path / 'avgcap.csv')
        dataset = run_experiment('avgcap-vs-snr', SMALL_AVGCAP, out=out)
        assert len(dataset.frame) == 6
        assert not dataset.errors
        metadata, frame = read_dataset(out)
        report = check_reproduction(metadata, frame)
        assert report.passed, report.render()

    def test_effective_capacity_run_passes_checks(self):
        params = {'avg_snr_db_list': [0.0, 10.0], 's_min': 1e-3, 's_max': 10.0, 's_points': 8}
        dataset = run_experiment('effective-capacity', params)
        assert set(dataset.frame[Columns.CHANNEL]) == {NOISE_LIMITED, EQUAL_POWER}
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.passed, report.render()

    def test_delay_vs_epsilon_run_passes_checks(self):
        params = {'avg_sinr_db_list': [4.0], 'n_interferers_list': [1], 'w_max': 60, 'w_step': 20}
        dataset = run_experiment('delay-vs-epsilon', params)
        assert dataset.frame[Columns.W].tolist() == [0, 20, 40, 60]
        log_eps = dataset.frame[Columns.LOG_EPSILON].to_numpy()
        np.testing.assert_allclose(np.exp(log_eps), dataset.frame[Columns.EPSILON].to_numpy(), rtol=1e-12)
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.passed, report.render()

    def test_delay_vs_epsilon_far_tail_passes_checks(self):
        params = {'avg_sinr_db_list': [4.0], 'n_interferers_list': [1], 'rate': 0.1,
                  'w_max': 6000, 'w_step': 2000}
        dataset = run_experiment('delay-vs-epsilon', params)
        frame = dataset.frame.sort_values(Columns.W)
        assert (frame[Columns.EPSILON] > 0).all()
        assert frame[Columns.LOG_EPSILON].iloc[-1] < -745
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.passed, report.render()

    def test_delay_vs_rate_run_passes_checks(self):
        params = {'avg_sinr_db_list': [4.0], 'n_interferers_list': [1],
                  'rate_grid': [0.3, 0.6, 0.85, 1.2, 3.0]}
        dataset = run_experiment('delay-vs-rate', params)
        assert len(dataset.frame) == 5
        assert not dataset.frame.sort_values(Columns.RATE)[Columns.STABLE].iloc[-1]
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.passed, report.render()

    @pytest.mark.slow
    def test_delay_vs_interferers_run_passes_checks(self):
        dataset = run_experiment('delay-vs-interferers', {'rates': [2.0], 'n_interferers_max': 4})
        assert sorted(dataset.frame[Columns.N_INTERFERERS]) == [-1, 1, 2, 3, 4]
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.passed, report.render()

    @pytest.mark.slow
    def test_maxrate_run_passes_checks(self):
        params = {'avg_snr_db_grid': [10.0, 17.0, 24.0], 'avg_sinr_db_list': [8.0],
                  'n_interferers_list': [1, 3, 8]}
        dataset = run_experiment('maxrate-vs-snr', params)
        frame = dataset.frame
        assert len(frame) == 9
        assert (frame[Columns.MAX_RATE] < frame[Columns.AVERAGE_CAPACITY]).all()
        report = check_reproduction(dataset.metadata, frame)
        assert report.passed, report.render()

    @pytest.mark.slow
    def test_validate_run_passes_checks(self):
        params = {'avg_sinr_db_list': [4.0], 'n_interferers_list': [1, 5], 'slots': 2_000_000,
                  'w_max': 100, 'w_step': 5}
        dataset = run_experiment('validate', params, seed=1)
        assert not dataset.errors
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.checks[0].passed, report.render()
        assert report.checks[1].passed, report.render()
        assert report.passed, report.render()

    def test_progress_reported(self):
        seen = []
        run_experiment('avgcap-vs-snr', SMALL_AVGCAP, progress_callback=lambda done, msg: seen.append(done))
        assert seen == list(range(1, 7))


def _report(kind, frame):
    return check_reproduction({'kind': kind}, frame)


class TestChecks:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            check_reproduction({'kind': 'nope'}, pd.DataFrame({'w': [1]}))

    def test_no_usable_rows(self):
        frame = pd.DataFrame({Columns.W: [1.0], Columns.STATUS: ['infeasible: x']})
        report = _report('delay-vs-rate', frame)
        assert not report.passed
        assert '[FAIL]' in report.render()

    def test_delay_vs_epsilon(self):
        frame = pd.DataFrame({
            Columns.AVG_SINR_DB: [4.0] * 4, Columns.N_INTERFERERS: [1] * 4,
            Columns.W: [0, 5, 10, 15], Columns.EPSILON: [1.0, 1.0, 0.5, 0.1], Columns.STATUS: ['ok'] * 4,
        })
        assert _report('delay-vs-epsilon', frame).passed
        frame.loc[3, Columns.EPSILON] = 0.6
        assert not _report('delay-vs-epsilon', frame).passed

    def test_delay_vs_rate(self):
        frame = pd.DataFrame({
            Columns.AVG_SINR_DB: [4.0] * 4, Columns.N_INTERFERERS: [1] * 4,
            Columns.RATE: [0.1, 0.5, 0.9, 1.2], Columns.W: [1.0, 3.0, 10.0, np.nan],
            Columns.STABLE: [True, True, True, False], Columns.STATUS: ['ok'] * 4,
        })
        report = _report('delay-vs-rate', frame)
        assert report.passed, report.render()

        regress = frame.copy()
        regress.loc[2, Columns.W] = 2.0
        assert not _report('delay-vs-rate', regress).passed

        flapping = frame.copy()
        flapping[Columns.STABLE] = [True, False, True, False]
        assert not _report('delay-vs-rate', flapping).passed

    def _interferer_frame(self, delays, reference=50.0):
        n = [-1] + list(range(1, len(delays) + 1))
        return pd.DataFrame({
            Columns.RATE: [2.0] * len(n), Columns.N_INTERFERERS: n,
            Columns.W: [reference] + list(delays), Columns.STATUS: ['ok'] * len(n),
        })

    def test_delay_vs_interferers(self):
        assert _report('delay-vs-interferers', self._interferer_frame([10.0, 20.0, 30.0])).passed
        assert not _report('delay-vs-interferers', self._interferer_frame([20.0, 10.0, 30.0])).passed
        assert not _report('delay-vs-interferers', self._interferer_frame([10.0, 20.0, 60.0])).passed
        # 不穩定 (NaN) 視為無窮大延遲
        assert not _report('delay-vs-interferers', self._interferer_frame([10.0, np.nan, 30.0])).passed
        assert _report('delay-vs-interferers',
                       self._interferer_frame([10.0, np.nan, np.nan], reference=np.nan)).passed

    def test_maxrate(self):
        frame = pd.DataFrame({
            Columns.AVG_SINR_DB: [8.0] * 4, Columns.AVG_SNR_DB: [10.0, 20.0, 10.0, 20.0],
            Columns.N_INTERFERERS: [1, 1, 3, 3], Columns.MAX_RATE: [1.0, 1.5, 0.9, 1.4],
            Columns.AVERAGE_CAPACITY: [2.0, 2.5, 1.9, 2.4], Columns.STATUS: ['ok'] * 4,
        })
        assert _report('maxrate-vs-snr', frame).passed
        bad = frame.copy()
        bad.loc[2, Columns.MAX_RATE] = 1.2
        assert not _report('maxrate-vs-snr', bad).passed
        over = frame.copy()
        over.loc[1, Columns.MAX_RATE] = 2.6
        assert not _report('maxrate-vs-snr', over).passed

    def test_avgcap(self):
        frame = pd.DataFrame({
            Columns.AVG_SINR_DB: [8.0, 8.0], Columns.AVG_SNR_DB: [16.0, 16.0],
            Columns.N_INTERFERERS: [1, 3], Columns.AVERAGE_CAPACITY: [2.0, 1.9], Columns.STATUS: ['ok', 'ok'],
        })
        assert _report('avgcap-vs-snr', frame).passed
        frame[Columns.AVERAGE_CAPACITY] = [1.9, 2.0]
        assert not _report('avgcap-vs-snr', frame).passed

    def test_effective_capacity_dominance(self):
        rows = []
        for g, gap in ((0.0, 0.1), (10.0, 0.3)):
            for channel, offset in ((NOISE_LIMITED, gap), (EQUAL_POWER, 0.0)):
                for s, value in ((0.001, 1.0), (1.0, 0.8), (10.0, 0.5)):
                    rows.append({Columns.AVG_SNR_DB: g, Columns.CHANNEL: channel, Columns.S: s,
                                 Columns.EFFECTIVE_CAPACITY: value + offset,
                                 Columns.AVERAGE_CAPACITY: 1.001 + offset, Columns.STATUS: 'ok'})
        frame = pd.DataFrame(rows)
        assert _report('effective-capacity', frame).passed
        swapped = frame.replace({Columns.CHANNEL: {NOISE_LIMITED: EQUAL_POWER, EQUAL_POWER: NOISE_LIMITED}})
        assert not _report('effective-capacity', swapped).passed

    def _validate_frame(self, analytic_slope):
        w = np.arange(0, 45, 5)
        frames = []
        for sinr_db, rate, decay in ((4.0, 0.5, 0.2), (0.0, 0.4, 0.3)):
            empirical = 0.5 * np.exp(-decay * w)
            frames.append(pd.DataFrame({
                Columns.AVG_SINR_DB: sinr_db, Columns.N_INTERFERERS: 1, Columns.W: w,
                Columns.RATE_PER_SLOT: rate, Columns.AVERAGE_CAPACITY: 1.0,
                Columns.EPSILON: np.minimum(3 * empirical, 1.0), Columns.EMPIRICAL: empirical,
                Columns.UPPER_99: 1.1 * empirical, Columns.DECAY_SLOPE: analytic_slope * decay,
                Columns.STATUS: 'ok',
            }))
        return pd.concat(frames, ignore_index=True)

    def test_validate(self):
        assert _report('validate', self._validate_frame(-1.05)).passed
        assert not _report('validate', self._validate_frame(-1.5)).passed

        broken = self._validate_frame(-1.0)
        broken.loc[3, Columns.EPSILON] = 0.5 * broken.loc[3, Columns.EMPIRICAL]
        report = _report('validate', broken)
        assert not report.checks[0].passed
        assert report.checks[1].passed


def _fail_second_call(monkeypatch):
    import experiments
    from errors import TruncationError
    calls = []
    original = experiments.average_capacity

    def flaky(spec, *args, **kwargs):
        calls.append(spec)
        if len(calls) == 2:
            raise TruncationError("級數未收斂")
        return original(spec, *args, **kwargs)

    monkeypatch.setattr(experiments, 'average_capacity', flaky)


class TestFailedPoints:
    PARAMS = {'avg_snr_db_grid': [10.0, 16.0, 22.0], 'avg_sinr_db_list': [8.0], 'n_interferers_list': [1]}

    def test_failed_point_becomes_error_row(self, monkeypatch, tmp_path):
        _fail_second_call(monkeypatch)
        out = str(tmp_path / 'avgcap.csv')
        dataset = run_experiment('avgcap-vs-snr', self.PARAMS, out=out)
        assert len(dataset.errors) == 1
        assert len(dataset.frame) == 3
        status = dataset.frame[Columns.STATUS].tolist()
        assert status.count('ok') == 2
        failed = dataset.frame[dataset.frame[Columns.STATUS] != 'ok'].iloc[0]
        assert failed[Columns.STATUS].startswith('error: TruncationError')
        assert failed[Columns.AVG_SNR_DB] == 16.0
        assert failed[Columns.N_INTERFERERS] == 1

        metadata, frame = read_dataset(out)
        assert len(frame) == 3
        report = check_reproduction(metadata, frame)
        assert not report.passed
        assert not report.checks[-1].passed

    def test_complete_run_reports_completeness(self):
        dataset = run_experiment('avgcap-vs-snr', self.PARAMS)
        report = check_reproduction(dataset.metadata, dataset.frame)
        assert report.passed, report.render()
        assert report.checks[-1].name == '所有掃描點完成'
