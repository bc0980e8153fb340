# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 佇列模擬模組
以時槽為單位模擬固定速率到達、Rayleigh 干擾通道服務的 FIFO 佇列 (可串接多跳)，
估計延遲違反頻率並提供 Mellin 轉換的 Monte Carlo 驗證

時槽 t 的服務量 c_t = 𝒩 ln(1 + γ_t)，同一時槽內到達的位元可於該時槽離開。
虛擬延遲 W(t) = min{u >= 0 : D(t+u) >= A(t)}
"""
import hashlib
import json
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd

from bounds import ArrivalSpec
from channel import ChannelSpec, make_rng, sample_sinr_batch, slot_capacity, spawn_rngs
from config import AppConfig
from errors import DomainError, SimulationUnstableError
from estimators import RunningMoments, clopper_pearson_upper

Columns = AppConfig.Columns


@dataclass(frozen=True)
class SimConfig:
    """
    模擬設定
    constant_capacity 設定時每時槽服務量固定 (退化通道，用於檢查)
    """
    spec: ChannelSpec
    arrivals: ArrivalSpec
    slots: int = AppConfig.DESK_SLOTS
    seed: int = 0
    delay_grid: Tuple[int, ...] = tuple(range(0, 101, 5))
    hops: int = 1
    constant_capacity: Optional[float] = None
    chunk: int = AppConfig.SIM_CHUNK
    max_in_flight: int = AppConfig.SIM_MAX_IN_FLIGHT

    def __post_init__(self):
        object.__setattr__(self, 'delay_grid', tuple(int(w) for w in self.delay_grid))
        if int(self.slots) < 1:
            raise DomainError(f"模擬時槽數必須 >= 1 (got {self.slots})")
        if not self.delay_grid:
            raise DomainError("delay_grid 不可為空")
        if any(w < 0 for w in self.delay_grid) or list(self.delay_grid) != sorted(set(self.delay_grid)):
            raise DomainError(f"delay_grid 必須為遞增的非負整數 (got {self.delay_grid})")
        if int(self.hops) < 1:
            raise DomainError(f"跳數必須 >= 1 (got {self.hops})")
        if self.slots <= max(self.delay_grid):
            raise DomainError(f"模擬時槽數 {self.slots} 必須大於最大延遲 {max(self.delay_grid)}")
        if self.constant_capacity is not None and not self.constant_capacity >= 0:
            raise DomainError(f"constant_capacity 必須 >= 0 (got {self.constant_capacity})")
        if int(self.chunk) < 1:
            raise DomainError(f"chunk 必須 >= 1 (got {self.chunk})")

    def to_mapping(self) -> dict:
        """決定模擬結果的所有參數 (chunk 不影響結果故不列入)"""
        return {
            'avg_snr': self.spec.avg_snr,
            'interferer_ratios': list(self.spec.interferer_ratios),
            'symbols_per_slot': self.spec.symbols_per_slot,
            'rate': self.arrivals.rate,
            'slots': int(self.slots),
            'seed': int(self.seed),
            'delay_grid': list(self.delay_grid),
            'hops': int(self.hops),
            'constant_capacity': self.constant_capacity,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_mapping(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class SimOutcome:
    """模擬結果：各 w 的違反頻率與 99% 信賴上界"""
    delay_grid: Tuple[int, ...]
    violation_freq: Tuple[float, ...]
    ccdf_upper_99: Tuple[float, ...]
    violation_count: Tuple[int, ...]
    measured_slots: int
    max_backlog: float
    slots_run: int
    mean_delay: float
    seed: int
    config_hash: str

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            Columns.CONFIG_HASH: [self.config_hash] * len(self.delay_grid),
            Columns.W: list(self.delay_grid),
            Columns.EMPIRICAL: list(self.violation_freq),
            Columns.UPPER_99: list(self.ccdf_upper_99),
            Columns.SLOTS: [self.slots_run] * len(self.delay_grid),
            Columns.SEED: [self.seed] * len(self.delay_grid),
        })


def lindley_backlog(arrivals, capacity, q0=0.0) -> np.ndarray:
    """
    向量化 Lindley 遞迴 q_t = max(q_{t-1} + a_t - c_t, 0)
    q_t = X_t - min(-q0, min_{j<=t} X_j)，X 為 (a - c) 的累積和
    """
    x = np.cumsum(np.asarray(arrivals, dtype=float) - np.asarray(capacity, dtype=float))
    return x - np.minimum(-q0, np.minimum.accumulate(x))


def run_queue(config: SimConfig, progress_callback: Callable[[int, int], None] = None) -> SimOutcome:
    """
    分段模擬 config.slots 個時槽

    只統計 t <= T-1-max(w) 的時槽；模擬結束時仍未離開的時槽視為所有 w 皆違反。
    未離開的時槽數超過 max_in_flight 時拋出 SimulationUnstableError。
    """
    total_slots = int(config.slots)
    grid = np.asarray(config.delay_grid, dtype=np.int64)
    measured_limit = total_slots - 1 - int(grid.max())
    rho = config.arrivals.rate
    rngs = spawn_rngs(config.seed, config.hops)

    queue = np.zeros(config.hops)
    pending_slots = np.empty(0, dtype=np.int64)
    pending_levels = np.empty(0)
    counts = np.zeros(grid.size, dtype=np.int64)
    delay_sum = 0.0
    resolved_count = 0
    max_backlog = 0.0

    logging.info(f"開始模擬: ρ={rho}, γ_∅={config.spec.avg_snr:.6g}, 干擾源={config.spec.n_interferers}, "
                 f"H={config.hops}, T={total_slots}, seed={config.seed}")

    for start in range(0, total_slots, int(config.chunk)):
        n = min(int(config.chunk), total_slots - start)
        flow = np.full(n, rho)
        backlog = np.zeros(n)
        for hop in range(config.hops):
            if config.constant_capacity is not None:
                capacity = np.full(n, float(config.constant_capacity))
            else:
                capacity = slot_capacity(config.spec, sample_sinr_batch(config.spec, rngs[hop], n))
            q = lindley_backlog(flow, capacity, queue[hop])
            previous = np.concatenate(([queue[hop]], q[:-1]))
            departures = np.maximum(previous + flow - q, 0.0)
            queue[hop] = q[-1]
            backlog += q
            flow = departures
        max_backlog = max(max_backlog, float(backlog.max()))

        t = np.arange(start, start + n, dtype=np.int64)
        cum_arrivals = rho * (t + 1.0)
        cum_departures = np.maximum.accumulate(cum_arrivals - backlog)

        slots = np.concatenate((pending_slots, t))
        levels = np.concatenate((pending_levels, cum_arrivals))
        tolerance = 1e-12 * levels + 1e-12
        idx = np.searchsorted(cum_departures, levels - tolerance, side='left')
        resolved = idx < n

        delays = np.maximum(start + idx[resolved] - slots[resolved], 0)
        measured = slots[resolved] <= measured_limit
        delays = np.sort(delays[measured])
        counts += delays.size - np.searchsorted(delays, grid, side='right')
        delay_sum += float(delays.sum())
        resolved_count += delays.size

        keep = (~resolved) & (slots <= measured_limit)
        pending_slots = slots[keep]
        pending_levels = levels[keep]
        if pending_slots.size > config.max_in_flight:
            raise SimulationUnstableError(
                f"未離開的時槽數 {pending_slots.size} 超過上限 {config.max_in_flight}，佇列可能不穩定 (ρ={rho})",
                slot=start + n - 1, in_flight=int(pending_slots.size))

        if progress_callback:
            progress_callback(start + n, total_slots)

    measured_slots = measured_limit + 1
    counts += pending_slots.size
    freq = counts / measured_slots
    upper = np.atleast_1d(clopper_pearson_upper(counts, measured_slots, AppConfig.CONFIDENCE))
    mean_delay = delay_sum / resolved_count if resolved_count else math.nan
    if pending_slots.size:
        logging.warning(f"模擬結束時仍有 {pending_slots.size} 個時槽未離開，計為所有 w 的違反")

    outcome = SimOutcome(
        delay_grid=tuple(int(w) for w in grid),
        violation_freq=tuple(float(f) for f in freq),
        ccdf_upper_99=tuple(float(u) for u in upper),
        violation_count=tuple(int(c) for c in counts),
        measured_slots=int(measured_slots),
        max_backlog=max_backlog,
        slots_run=total_slots,
        mean_delay=mean_delay,
        seed=int(config.seed),
        config_hash=config.config_hash(),
    )
    logging.info(f"模擬完成: 量測時槽={measured_slots}, 平均延遲={mean_delay:.4g}, 最大積壓={max_backlog:.4g}")
    return outcome


def estimate_mellin_mc(spec: ChannelSpec, s, n_samples, seed=0, chunk=AppConfig.MC_CHUNK):
    """
    E[(1+γ)^(𝒩(s-1))] 的 Monte Carlo 估計
    Returns:
        (mean, stderr)
    """
    if s > 1:
        raise DomainError(f"Monte Carlo Mellin 估計需要 s <= 1 (got s={s})")
    if s == 1:
        return 1.0, 0.0
    exponent = spec.rate_scale * (s - 1.0)
    return _monte_carlo(spec, lambda g: np.exp(exponent * np.log1p(g)), n_samples, seed, chunk)


def estimate_capacity_mc(spec: ChannelSpec, n_samples, seed=0, chunk=AppConfig.MC_CHUNK):
    """E[𝒩 ln(1+γ)] 的 Monte Carlo 估計，回傳 (mean, stderr)"""
    return _monte_carlo(spec, lambda g: slot_capacity(spec, g), n_samples, seed, chunk)


def _monte_carlo(spec, transform, n_samples, seed, chunk):
    n_samples = int(n_samples)
    if n_samples < 2:
        raise DomainError(f"Monte Carlo 樣本數必須 >= 2 (got {n_samples})")
    rng = make_rng(seed)
    moments = RunningMoments()
    remaining = n_samples
    while remaining > 0:
        size = min(int(chunk), remaining)
        moments.update(transform(sample_sinr_batch(spec, rng, size)))
        remaining -= size
    return moments.mean, moments.stderr
