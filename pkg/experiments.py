# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 實驗模組
產生各實驗的結果表 (效能容量、延遲 vs 違反機率 / 速率 / 干擾源數、最大速率、平均容量、模擬驗證)，
並對結果檔執行重現性檢查
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from bounds import ArrivalSpec, delay_bound, max_rate, violation_probability
from channel import ChannelSpec, ScenarioSpec, noise_limited, scenario_to_channel
from config import AppConfig, EXPERIMENT_KINDS, RATE_NORMALIZATION, db_to_linear
from errors import ConfigError, DelayAnalyzerError
from estimators import fit_log_slope
from mellin import average_capacity, effective_capacity
from parsers import experiment_params, write_dataset
from simulator import SimConfig, run_queue
from workers import SweepRunner, SweepTask

Columns = AppConfig.Columns
STATUS_OK = 'ok'
STATUS_ERROR = 'error'
NOISE_LIMITED = 'noise-limited'
EQUAL_POWER = 'equal-power-interferer'


@dataclass
class Dataset:
    """實驗結果：中繼資料 + 表格"""
    kind: str
    metadata: Dict[str, object]
    frame: pd.DataFrame
    errors: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass
class ReproductionReport:
    kind: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [f"=== 重現檢查: {self.kind} ==="]
        for c in self.checks:
            mark = 'PASS' if c.passed else 'FAIL'
            lines.append(f"[{mark}] {c.name}: {c.detail}")
        lines.append(f"結果: {'全部通過' if self.passed else '有檢查未通過'} "
                     f"({sum(c.passed for c in self.checks)}/{len(self.checks)})")
        return '\n'.join(lines)


# ============================================================
# 掃描點 (模組層級函式，可於子行程執行)
# ============================================================

def _scenario_row(avg_snr_db, avg_sinr_db, n):
    return {
        Columns.AVG_SNR_DB: float(avg_snr_db),
        Columns.AVG_SNR: db_to_linear(avg_snr_db),
        Columns.AVG_SINR_DB: float(avg_sinr_db),
        Columns.AVG_SINR: db_to_linear(avg_sinr_db),
        Columns.N_INTERFERERS: int(n),
    }


def _build_channel(avg_snr_db, avg_sinr_db, n, perturbation, symbols) -> ChannelSpec:
    """n = -1 表示以 γ̄ 為 SNR 的無干擾參考通道"""
    if n < 0:
        return noise_limited(db_to_linear(avg_sinr_db), symbols)
    scenario = ScenarioSpec(db_to_linear(avg_snr_db), db_to_linear(avg_sinr_db), n, perturbation, symbols)
    return scenario_to_channel(scenario)


def _channel_label(n):
    return NOISE_LIMITED if n <= 0 else 'interference'


def _rate_columns(rate, symbols_per_slot):
    """設定檔的 rate 為 bits/slot；rate 欄位為每符號速率"""
    return {Columns.RATE: float(rate) / symbols_per_slot, Columns.RATE_PER_SLOT: float(rate)}


def effective_capacity_point(avg_snr_db, channel, s_grid, symbols_per_slot):
    g = db_to_linear(avg_snr_db)
    spec = noise_limited(g, symbols_per_slot) if channel == NOISE_LIMITED else ChannelSpec(g, (1.0,), symbols_per_slot)
    avg_cap = average_capacity(spec)
    rows = []
    for s in s_grid:
        rows.append({
            Columns.AVG_SNR_DB: float(avg_snr_db),
            Columns.AVG_SNR: g,
            Columns.CHANNEL: channel,
            Columns.S: float(s),
            Columns.EFFECTIVE_CAPACITY: effective_capacity(spec, s),
            Columns.AVERAGE_CAPACITY: avg_cap,
            Columns.STATUS: STATUS_OK,
        })
    return rows


def delay_epsilon_point(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot, rate, w_grid):
    base = _scenario_row(avg_snr_db, avg_sinr_db, n)
    base.update({Columns.CHANNEL: _channel_label(n), **_rate_columns(rate, symbols_per_slot)})
    try:
        spec = _build_channel(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot)
    except DelayAnalyzerError as e:
        return [dict(base, **{Columns.STATUS: f"infeasible: {e}"})]
    arrivals = ArrivalSpec(rate)
    rows = []
    for w in w_grid:
        result = violation_probability(arrivals, spec, 1, int(w))
        rows.append(dict(base, **{
            Columns.W: int(w),
            Columns.EPSILON: result.epsilon,
            Columns.LOG_EPSILON: result.log_epsilon,
            Columns.S_STAR: result.s_star,
            Columns.STABLE: bool(result.stable),
            Columns.STATUS: STATUS_OK,
        }))
    return rows


def delay_rate_point(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot, rate, epsilon):
    base = _scenario_row(avg_snr_db, avg_sinr_db, n)
    base.update({Columns.CHANNEL: _channel_label(n), Columns.EPSILON: float(epsilon),
                 **_rate_columns(rate, symbols_per_slot)})
    try:
        spec = _build_channel(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot)
    except DelayAnalyzerError as e:
        return [dict(base, **{Columns.STATUS: f"infeasible: {e}"})]
    result = delay_bound(ArrivalSpec(rate), spec, 1, epsilon)
    return [dict(base, **{
        Columns.W: float(result.w) if result.w is not None else math.nan,
        Columns.S_STAR: result.s_star,
        Columns.STABLE: bool(result.stable),
        Columns.STATUS: STATUS_OK,
    })]


def maxrate_point(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot, w, epsilon):
    base = _scenario_row(avg_snr_db, avg_sinr_db, n)
    base.update({Columns.W: int(w), Columns.EPSILON: float(epsilon)})
    try:
        spec = _build_channel(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot)
    except DelayAnalyzerError as e:
        return [dict(base, **{Columns.STATUS: f"infeasible: {e}"})]
    result = max_rate(spec, 1, int(w), epsilon)
    return [dict(base, **{
        Columns.MAX_RATE: result.rate,
        Columns.AVERAGE_CAPACITY: result.stable_limit,
        Columns.STATUS: STATUS_OK,
    })]


def avgcap_point(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot):
    base = _scenario_row(avg_snr_db, avg_sinr_db, n)
    try:
        spec = _build_channel(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot)
    except DelayAnalyzerError as e:
        return [dict(base, **{Columns.STATUS: f"infeasible: {e}"})]
    return [dict(base, **{Columns.AVERAGE_CAPACITY: average_capacity(spec), Columns.STATUS: STATUS_OK})]


def _log_bracket(result):
    if result.mellin_bracket_used is None:
        return math.nan
    return math.log(result.mellin_bracket_used.upper)


def validate_point(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot, rate, w_grid, slots, seed, hops):
    base = _scenario_row(avg_snr_db, avg_sinr_db, n)
    base.update({Columns.CHANNEL: _channel_label(n), **_rate_columns(rate, symbols_per_slot)})
    try:
        spec = _build_channel(avg_snr_db, avg_sinr_db, n, perturbation, symbols_per_slot)
    except DelayAnalyzerError as e:
        return [dict(base, **{Columns.STATUS: f"infeasible: {e}"})]
    arrivals = ArrivalSpec(rate)
    avg_cap = average_capacity(spec)
    analytic = [violation_probability(arrivals, spec, hops, int(w)) for w in w_grid]
    outcome = run_queue(SimConfig(spec, arrivals, slots=int(slots), seed=int(seed),
                                  delay_grid=tuple(int(w) for w in w_grid), hops=int(hops)))
    rows = []
    for i, w in enumerate(outcome.delay_grid):
        rows.append(dict(base, **{
            Columns.W: int(w),
            Columns.EPSILON: analytic[i].epsilon,
            Columns.LOG_EPSILON: analytic[i].log_epsilon,
            Columns.S_STAR: analytic[i].s_star,
            Columns.DECAY_SLOPE: _log_bracket(analytic[i]),
            Columns.EMPIRICAL: outcome.violation_freq[i],
            Columns.UPPER_99: outcome.ccdf_upper_99[i],
            Columns.AVERAGE_CAPACITY: avg_cap,
            Columns.SLOTS: outcome.slots_run,
            Columns.SEED: outcome.seed,
            Columns.CONFIG_HASH: outcome.config_hash,
            Columns.STATUS: STATUS_OK,
        }))
    return rows


# ============================================================
# 實驗組裝
# ============================================================

def _scenario_grid(params):
    for avg_sinr_db in params['avg_sinr_db_list']:
        for n in params['n_interferers_list']:
            yield avg_sinr_db, n


def _w_grid(params):
    return list(range(0, int(params['w_max']) + 1, int(params['w_step'])))


def build_tasks(kind, params, seed=0) -> List[SweepTask]:
    """依實驗種類展開掃描點"""
    tasks = []
    if kind == 'effective-capacity':
        s_grid = np.geomspace(params['s_min'], params['s_max'], int(params['s_points'])).tolist()
        for avg_snr_db in params['avg_snr_db_list']:
            for channel in (NOISE_LIMITED, EQUAL_POWER):
                tasks.append(SweepTask((avg_snr_db, channel), effective_capacity_point,
                                       dict(avg_snr_db=avg_snr_db, channel=channel, s_grid=s_grid,
                                            symbols_per_slot=params['symbols_per_slot'])))
    elif kind in ('delay-vs-epsilon', 'delay-vs-rate', 'validate'):
        common = dict(avg_snr_db=params['avg_snr_db'], perturbation=params['perturbation'],
                      symbols_per_slot=params['symbols_per_slot'])
        for index, (avg_sinr_db, n) in enumerate(_scenario_grid(params)):
            scenario = dict(common, avg_sinr_db=avg_sinr_db, n=n)
            if kind == 'delay-vs-epsilon':
                tasks.append(SweepTask((avg_sinr_db, n), delay_epsilon_point,
                                       dict(scenario, rate=params['rate'], w_grid=_w_grid(params))))
            elif kind == 'delay-vs-rate':
                for rate in params['rate_grid']:
                    tasks.append(SweepTask((avg_sinr_db, n, rate), delay_rate_point,
                                           dict(scenario, rate=rate, epsilon=params['epsilon'])))
            else:
                tasks.append(SweepTask((avg_sinr_db, n), validate_point,
                                       dict(scenario, rate=params['rate'], w_grid=_w_grid(params),
                                            slots=params['slots'], seed=seed + index, hops=params['hops'])))
    elif kind == 'delay-vs-interferers':
        for rate in params['rates']:
            for n in [-1] + list(range(1, int(params['n_interferers_max']) + 1)):
                tasks.append(SweepTask((rate, n), delay_rate_point,
                                       dict(avg_snr_db=params['avg_snr_db'], avg_sinr_db=params['avg_sinr_db'],
                                            n=n, perturbation=params['perturbation'],
                                            symbols_per_slot=params['symbols_per_slot'],
                                            rate=rate, epsilon=params['epsilon'])))
    elif kind in ('maxrate-vs-snr', 'avgcap-vs-snr'):
        for avg_sinr_db in params['avg_sinr_db_list']:
            for n in params['n_interferers_list']:
                for avg_snr_db in params['avg_snr_db_grid']:
                    kwargs = dict(avg_snr_db=avg_snr_db, avg_sinr_db=avg_sinr_db, n=n,
                                  perturbation=params['perturbation'],
                                  symbols_per_slot=params['symbols_per_slot'])
                    if kind == 'maxrate-vs-snr':
                        tasks.append(SweepTask((avg_sinr_db, n, avg_snr_db), maxrate_point,
                                               dict(kwargs, w=params['w'], epsilon=params['epsilon'])))
                    else:
                        tasks.append(SweepTask((avg_sinr_db, n, avg_snr_db), avgcap_point, kwargs))
    else:
        raise ConfigError(f"未知的實驗種類 '{kind}' (可用: {', '.join(EXPERIMENT_KINDS)})")
    return tasks


def _failed_rows(task: SweepTask, summary) -> List[Dict[str, object]]:
    """由掃描點參數重建失敗列，status 以 'error: ' 開頭"""
    kwargs = task.kwargs
    if 'avg_sinr_db' in kwargs:
        row = _scenario_row(kwargs['avg_snr_db'], kwargs['avg_sinr_db'], kwargs['n'])
        row[Columns.CHANNEL] = _channel_label(kwargs['n'])
    else:
        row = {Columns.AVG_SNR_DB: float(kwargs['avg_snr_db']), Columns.CHANNEL: kwargs.get('channel')}
    if 'rate' in kwargs:
        row.update(_rate_columns(kwargs['rate'], kwargs['symbols_per_slot']))
    if 'epsilon' in kwargs:
        row[Columns.EPSILON] = float(kwargs['epsilon'])
    if 'w' in kwargs:
        row[Columns.W] = int(kwargs['w'])
    row[Columns.STATUS] = f"{STATUS_ERROR}: {summary}"
    return [row]


def build_metadata(kind, params, seed) -> Dict[str, object]:
    """CSV 標頭：工具版本、種類、種子、速率單位與所有參數 (dB 參數附線性值)"""
    metadata = {
        'tool': AppConfig.TOOL_NAME,
        'version': AppConfig.VERSION,
        'kind': kind,
        'seed': int(seed),
        'rate_normalization': RATE_NORMALIZATION,
    }
    for key, value in params.items():
        metadata[key] = value
        if '_db' in key:
            linear_key = key.replace('_db', '_linear')
            if isinstance(value, list):
                metadata[linear_key] = [db_to_linear(v) for v in value]
            else:
                metadata[linear_key] = db_to_linear(value)
    return metadata


def run_experiment(kind, params=None, seed=0, threads=1, out=None,
                   progress_callback: Optional[Callable[[int, str], None]] = None) -> Dataset:
    """
    執行實驗並 (選擇性) 寫出 CSV

    Args:
        kind: 實驗種類 (EXPERIMENT_KINDS)
        params: 實驗參數 (None 時使用預設值)
        seed: 模擬亂數種子
        threads: 平行行程數
        out: 輸出 CSV 路徑
    """
    params = experiment_params(kind, params)
    tasks = build_tasks(kind, params, seed)
    logging.info(f"實驗 {kind}: {len(tasks)} 個掃描點, threads={threads}")
    sweep = SweepRunner(threads, progress_callback).run(tasks)
    keyed = list(sweep.results)
    keyed.extend((task.key, _failed_rows(task, summary)) for task, summary in sweep.failures)
    keyed.sort(key=lambda kv: kv[0])
    rows = [row for _, point_rows in keyed for row in point_rows]
    frame = pd.DataFrame(rows)
    if sweep.errors:
        logging.warning(f"實驗 {kind} 有 {len(sweep.errors)} 個掃描點失敗，已寫入 status=error 列")
    dataset = Dataset(kind, build_metadata(kind, params, seed), frame, sweep.errors)
    if out:
        write_dataset(out, dataset.metadata, frame)
    return dataset


# ============================================================
# 重現檢查
# ============================================================

_REL_TOL = 1e-9


def _ok_rows(frame):
    if Columns.STATUS in frame.columns:
        return frame[frame[Columns.STATUS] == STATUS_OK]
    return frame


def _monotone(values, increasing, tol=0.0):
    values = np.asarray(values, dtype=float)
    if increasing:
        return bool(np.all(values[1:] >= values[:-1] - tol))
    return bool(np.all(values[1:] <= values[:-1] + tol))


def _check_effective_capacity(frame) -> List[CheckResult]:
    frame = _ok_rows(frame)
    checks = []
    bad = []
    for (g, channel), group in frame.groupby([Columns.AVG_SNR_DB, Columns.CHANNEL]):
        values = group.sort_values(Columns.S)[Columns.EFFECTIVE_CAPACITY].to_numpy()
        if not _monotone(values, increasing=False, tol=_REL_TOL * np.abs(values).max()):
            bad.append(f"{g} dB/{channel}")
    checks.append(CheckResult("效能容量隨 s 遞減", not bad, "全部曲線遞減" if not bad else f"違反: {bad}"))

    pivot = frame.pivot_table(index=[Columns.AVG_SNR_DB, Columns.S], columns=Columns.CHANNEL,
                              values=Columns.EFFECTIVE_CAPACITY)
    if {NOISE_LIMITED, EQUAL_POWER} <= set(pivot.columns):
        gap = pivot[NOISE_LIMITED] - pivot[EQUAL_POWER]
        dominates = bool((gap >= 0).all())
        checks.append(CheckResult("無干擾曲線在每個 s 都高於干擾曲線", dominates,
                                  f"最小差距 {gap.min():.4g}"))
        mean_gap = gap.groupby(level=0).mean().sort_index()
        widening = _monotone(mean_gap.to_numpy(), increasing=True)
        checks.append(CheckResult("干擾造成的差距隨 SNR 增大", widening,
                                  ', '.join(f"{g:g} dB: {v:.4f}" for g, v in mean_gap.items())))
    else:
        checks.append(CheckResult("無干擾曲線在每個 s 都高於干擾曲線", False, "缺少其中一種通道"))

    worst = 0.0
    for _, group in frame.groupby([Columns.AVG_SNR_DB, Columns.CHANNEL]):
        first = group.sort_values(Columns.S).iloc[0]
        worst = max(worst, abs(first[Columns.EFFECTIVE_CAPACITY] / first[Columns.AVERAGE_CAPACITY] - 1.0))
    checks.append(CheckResult("最小 s 時趨近平均容量 (1% 內)", worst <= 0.01, f"最大相對差 {worst:.3%}"))
    return checks


def _scenario_groups(frame):
    return frame.groupby([Columns.AVG_SINR_DB, Columns.N_INTERFERERS])


def _check_delay_vs_epsilon(frame) -> List[CheckResult]:
    frame = _ok_rows(frame)
    bad_mono, bad_decay = [], []
    for key, group in _scenario_groups(frame):
        group = group.sort_values(Columns.W)
        if Columns.LOG_EPSILON in group.columns:
            log_eps = group[Columns.LOG_EPSILON].to_numpy(dtype=float)
        else:
            log_eps = np.log(group[Columns.EPSILON].to_numpy(dtype=float))
        if not _monotone(log_eps, increasing=False, tol=_REL_TOL):
            bad_mono.append(key)
        tail = log_eps[log_eps < 0.0]
        if tail.size >= 2 and not np.all(np.diff(tail) < 0):
            bad_decay.append(key)
    return [
        CheckResult("ε(w) 隨 w 不增", not bad_mono, "全部情境成立" if not bad_mono else f"違反: {bad_mono}"),
        CheckResult("ε < 1 的區段嚴格遞減", not bad_decay, "全部情境成立" if not bad_decay else f"違反: {bad_decay}"),
    ]


def _check_delay_vs_rate(frame) -> List[CheckResult]:
    frame = _ok_rows(frame)
    bad_mono, bad_stable = [], []
    for key, group in _scenario_groups(frame):
        group = group.sort_values(Columns.RATE)
        stable = group[Columns.STABLE].astype(bool).to_numpy()
        if not _monotone(stable.astype(float), increasing=False):
            bad_stable.append(key)
        w = group[stable][Columns.W].to_numpy()
        if not _monotone(w, increasing=True):
            bad_mono.append(key)
    return [
        CheckResult("延遲界限隨速率不減", not bad_mono, "全部情境成立" if not bad_mono else f"違反: {bad_mono}"),
        CheckResult("超過穩定極限後維持不穩定", not bad_stable,
                    "全部情境成立" if not bad_stable else f"違反: {bad_stable}"),
    ]


def _check_delay_vs_interferers(frame) -> List[CheckResult]:
    frame = _ok_rows(frame)
    bad_mono, bad_ref = [], []
    for rate, group in frame.groupby(Columns.RATE):
        reference = group[group[Columns.N_INTERFERERS] < 0][Columns.W]
        interf = group[group[Columns.N_INTERFERERS] > 0].sort_values(Columns.N_INTERFERERS)
        delays = interf[Columns.W].fillna(np.inf).to_numpy()
        if not _monotone(delays, increasing=True):
            bad_mono.append(rate)
        if reference.empty or not np.all(delays <= float(reference.fillna(np.inf).iloc[0])):
            bad_ref.append(rate)
    return [
        CheckResult("延遲隨干擾源數不減", not bad_mono, "全部速率成立" if not bad_mono else f"違反速率: {bad_mono}"),
        CheckResult("延遲不超過無干擾 (γ_∅ = γ̄) 參考值", not bad_ref,
                    "全部速率成立" if not bad_ref else f"違反速率: {bad_ref}"),
    ]


def _check_maxrate(frame) -> List[CheckResult]:
    frame = _ok_rows(frame)
    tol = 2 * AppConfig.RATE_TOL
    bad_snr, bad_n = [], []
    for key, group in frame.groupby([Columns.AVG_SINR_DB, Columns.N_INTERFERERS]):
        if not _monotone(group.sort_values(Columns.AVG_SNR_DB)[Columns.MAX_RATE], increasing=True, tol=tol):
            bad_snr.append(key)
    for key, group in frame.groupby([Columns.AVG_SINR_DB, Columns.AVG_SNR_DB]):
        if not _monotone(group.sort_values(Columns.N_INTERFERERS)[Columns.MAX_RATE], increasing=False, tol=tol):
            bad_n.append(key)
    below = bool((frame[Columns.MAX_RATE] < frame[Columns.AVERAGE_CAPACITY]).all())
    return [
        CheckResult("最大速率隨平均 SNR 不減", not bad_snr, "全部成立" if not bad_snr else f"違反: {bad_snr}"),
        CheckResult("最大速率隨干擾源數不增", not bad_n, "全部成立" if not bad_n else f"違反: {bad_n}"),
        CheckResult("最大速率低於平均容量", below, "全部成立" if below else "存在超過平均容量的點"),
    ]


def _check_avgcap(frame) -> List[CheckResult]:
    frame = _ok_rows(frame)
    bad = []
    for key, group in frame.groupby([Columns.AVG_SINR_DB, Columns.AVG_SNR_DB]):
        values = group.sort_values(Columns.N_INTERFERERS)[Columns.AVERAGE_CAPACITY].to_numpy()
        if not _monotone(values, increasing=False, tol=_REL_TOL * np.abs(values).max()):
            bad.append(key)
    return [CheckResult("干擾源越少平均容量越大", not bad, "全部成立" if not bad else f"違反: {bad}")]


def _check_validate(frame, slope_tol=0.15) -> List[CheckResult]:
    frame = _ok_rows(frame)
    considered = frame[frame[Columns.UPPER_99] > 1e-4]
    violations = considered[considered[Columns.EMPIRICAL] > considered[Columns.EPSILON]]
    checks = [CheckResult("解析界限 >= 模擬違反頻率 (上信賴界 > 1e-4 的點)", violations.empty,
                          f"檢查 {len(considered)} 點" if violations.empty
                          else f"{len(violations)} 點違反, 例如 w={violations[Columns.W].tolist()[:5]}")]

    scenarios = []
    for key, group in _scenario_groups(frame):
        utilization = float(group[Columns.RATE_PER_SLOT].iloc[0] / group[Columns.AVERAGE_CAPACITY].iloc[0])
        if utilization >= 1.0:
            continue
        scenarios.append((utilization, key, group.sort_values(Columns.W)))
    scenarios.sort(key=lambda item: item[0])
    details, passed = [], bool(scenarios)
    for utilization, key, group in scenarios[:2]:
        min_prob = 1e-5
        mask = (group[Columns.EMPIRICAL] >= min_prob).to_numpy()
        empirical, reliability = fit_log_slope(group[Columns.W][mask], group[Columns.EMPIRICAL][mask], min_prob)
        # ln M_g(1 - s*) 取可解析區段最大 w 的值
        analytic = float(group[Columns.DECAY_SLOPE][mask].iloc[-1]) if mask.any() else math.nan
        if reliability == 'invalid' or not (analytic < 0):
            passed = False
            details.append(f"{key}: 可用點不足")
            continue
        rel = abs(empirical / analytic - 1.0)
        passed &= rel <= slope_tol
        details.append(f"{key} (負載 {utilization:.2f}): 模擬 {empirical:.4g} / 解析 {analytic:.4g} ({rel:.1%})")
    checks.append(CheckResult(f"低負載情境的衰減斜率一致 ({slope_tol:.0%} 內)", passed, '; '.join(details)))
    return checks


def _check_complete(frame) -> CheckResult:
    if Columns.STATUS not in frame.columns:
        return CheckResult("所有掃描點完成", True, "無 status 欄位")
    failed = frame[frame[Columns.STATUS].astype(str).str.startswith(STATUS_ERROR)]
    if failed.empty:
        return CheckResult("所有掃描點完成", True, f"{len(frame)} 列")
    return CheckResult("所有掃描點完成", False,
                       f"{len(failed)} 列失敗, 例如 {failed[Columns.STATUS].iloc[0]}")


_CHECKS = {
    'effective-capacity': _check_effective_capacity,
    'delay-vs-epsilon': _check_delay_vs_epsilon,
    'delay-vs-rate': _check_delay_vs_rate,
    'delay-vs-interferers': _check_delay_vs_interferers,
    'maxrate-vs-snr': _check_maxrate,
    'avgcap-vs-snr': _check_avgcap,
    'validate': _check_validate,
}


def check_reproduction(metadata: Dict[str, object], frame: pd.DataFrame) -> ReproductionReport:
    """依結果檔的 kind 執行對應的定性檢查"""
    kind = str(metadata.get('kind', ''))
    if kind not in _CHECKS:
        raise ConfigError(f"無法辨識的實驗種類 '{kind}'", key='kind')
    if _ok_rows(frame).empty:
        return ReproductionReport(kind, [CheckResult("資料非空", False, "表格沒有任何可用 (status=ok) 的列")])
    report = ReproductionReport(kind, _CHECKS[kind](frame) + [_check_complete(frame)])
    logging.info(f"重現檢查 {kind}: {'通過' if report.passed else '未通過'}")
    return report
