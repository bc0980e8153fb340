# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 延遲界限模組 (SNR 域隨機網路演算)
到達過程 Mellin 轉換、穩定條件、穩態核心 (單跳 / 多跳)、
違反機率界限、延遲界限與最大速率搜尋

核心 (單跳):  K(s, -w) = M_g(1-s)^w / (1 - M_α(1+s) M_g(1-s))
違反機率:     Pr[W > w] <= inf_{s>0} K(s, -w)
所有運算在 log 域進行；服務 Mellin 一律取括號上界。
"""
import sys
import math
import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from channel import ChannelSpec
from config import AppConfig
from errors import DomainError, QuadratureError, TruncationError, UnstableQueueError
from mellin import MellinParams, MellinValue, average_capacity, mellin_service, rayleigh_mellin
from numerics import golden_section_minimize

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)
_FLOAT_TINY = sys.float_info.min


@dataclass(frozen=True)
class ArrivalSpec:
    """固定速率到達過程，rate 單位 bits/slot"""
    rate: float

    def __post_init__(self):
        object.__setattr__(self, 'rate', float(self.rate))
        if not (self.rate >= 0 and math.isfinite(self.rate)):
            raise DomainError(f"到達速率必須 >= 0 (got {self.rate})")


@dataclass(frozen=True)
class DelayBoundResult:
    """
    違反機率 / 延遲界限結果
    stable=False 時 epsilon = 1 (無意義界限)，w 在 delay_bound 中為 None
    epsilon 下限為最小正規浮點數；極小機率請看 log_epsilon
    """
    w: Optional[int]
    epsilon: float
    s_star: float
    stable: bool
    kernel_value: float
    hops: int = 1
    mellin_bracket_used: Optional[MellinValue] = None
    searched: Tuple[int, int] = (0, 0)
    log_epsilon: float = 0.0


@dataclass(frozen=True)
class MaxRateResult:
    """最大速率搜尋結果"""
    rate: float
    stable_limit: float
    w: int
    epsilon: float
    iterations: int


def _check_hops(hops) -> int:
    if int(hops) != hops or hops < 1:
        raise DomainError(f"跳數 H 必須為 >= 1 的整數 (got {hops})")
    return int(hops)


def _check_delay(w) -> int:
    if int(w) != w or w < 0:
        raise DomainError(f"延遲 w 必須為 >= 0 的整數 (got {w})")
    return int(w)


def _check_positive_s(s):
    if not (s > 0 and math.isfinite(s)):
        raise DomainError(f"需要 s > 0 (got s={s})")


def _safe_exp(log_value):
    return math.exp(log_value) if log_value < _LOG_FLOAT_MAX else math.inf


# ============================================================
# 到達過程與穩定條件
# ============================================================

def log_arrival_mellin(arrivals: ArrivalSpec, s, interval):
    if interval < 0:
        raise DomainError(f"時間區間必須 >= 0 (got {interval})")
    return arrivals.rate * (s - 1.0) * interval


def arrival_mellin(arrivals: ArrivalSpec, s, interval):
    """M_α(s, n) = e^(ρ(s-1)n)"""
    return _safe_exp(log_arrival_mellin(arrivals, s, interval))


def service_mellin_at(spec: ChannelSpec, s, params: MellinParams = None) -> MellinValue:
    """M_g(1-s) 的括號"""
    return mellin_service(spec, (params or MellinParams()).with_s(1.0 - s))


def stability_margin(arrivals: ArrivalSpec, spec: ChannelSpec, s, params: MellinParams = None):
    """1 - M_α(1+s) M_g(1-s)，為正表示在此 s 下穩定"""
    _check_positive_s(s)
    log_m = math.log(service_mellin_at(spec, s, params).upper)
    return -math.expm1(arrivals.rate * s + log_m)


# ============================================================
# 穩態核心
# ============================================================

def _log_multi_hop_sum(q_log, log_m, hops, w):
    """
    ln Σ_u e^(u q) C(H-1+u+w, u+w) M^(u+w)，q = ln M_α(1+s) M_g(1-s) < 0

    相鄰項比 r_u = e^q (H+u+w)/(u+w+1) 隨 u 遞減，r_u < 1 後尾端 <= t_u r_u/(1-r_u)。
    """
    const = w * log_m - gammaln(hops)
    log_tol = math.log(AppConfig.MULTI_HOP_TAIL_TOL)
    running = -math.inf
    start = 0
    block = AppConfig.MULTI_HOP_BLOCK
    with np.errstate(divide='ignore', invalid='ignore'):
        while start < AppConfig.MULTI_HOP_MAX_TERMS:
            u = np.arange(start, start + block, dtype=float)
            log_terms = const + u * q_log + gammaln(hops + u + w) - gammaln(u + w + 1.0)
            partial = np.logaddexp.accumulate(np.concatenate(([running], log_terms)))[1:]
            log_ratio = q_log + np.log(hops + u + w) - np.log(u + w + 1.0)
            decaying = log_ratio < 0
            log_tail = np.full(u.shape, np.inf)
            log_tail[decaying] = (log_terms[decaying] + log_ratio[decaying]
                                  - np.log(-np.expm1(log_ratio[decaying])))
            done = decaying & (log_tail <= log_tol + partial)
            if done.any():
                i = int(np.argmax(done))
                return float(np.logaddexp(partial[i], log_tail[i]))
            running = float(partial[-1])
            start += block
    raise TruncationError(f"多跳核心級數超過 {AppConfig.MULTI_HOP_MAX_TERMS:.0e} 項仍未收斂 "
                          f"(q={q_log:.3e}, H={hops}, w={w})")


def _log_kernel(rate, log_m, s, hops, w):
    """ln K(s, -w)；不穩定時回傳 inf"""
    q_log = rate * s + log_m
    if q_log >= 0:
        return math.inf
    if hops == 1:
        return w * log_m - math.log(-math.expm1(q_log))
    return _log_multi_hop_sum(q_log, log_m, hops, w)


def _log_kernel_checked(arrivals, log_m, s, hops, w):
    value = _log_kernel(arrivals.rate, log_m, s, hops, w)
    if math.isinf(value):
        raise UnstableQueueError(f"s={s} 時不滿足穩定條件 (ρ={arrivals.rate}, ln M_g(1-s)={log_m:.6g})")
    return value


def kernel_single_hop(arrivals: ArrivalSpec, spec: ChannelSpec, s, w, params: MellinParams = None):
    """K(s, -w) = M_g(1-s)^w / (1 - M_α(1+s) M_g(1-s))"""
    _check_positive_s(s)
    w = _check_delay(w)
    log_m = math.log(service_mellin_at(spec, s, params).upper)
    return _safe_exp(_log_kernel_checked(arrivals, log_m, s, 1, w))


def kernel_rayleigh(arrivals: ArrivalSpec, avg_snr, s, w):
    """無干擾 Rayleigh 通道的閉式核心"""
    _check_positive_s(s)
    w = _check_delay(w)
    log_m = math.log(rayleigh_mellin(avg_snr, 1.0 - s))
    return _safe_exp(_log_kernel_checked(arrivals, log_m, s, 1, w))


def kernel_multi_hop(arrivals: ArrivalSpec, spec: ChannelSpec, hops, s, w, params: MellinParams = None):
    """H 個獨立同分佈串接鏈路的核心；H=1 即單跳核心"""
    hops = _check_hops(hops)
    if hops == 1:
        return kernel_single_hop(arrivals, spec, s, w, params)
    _check_positive_s(s)
    w = _check_delay(w)
    log_m = math.log(service_mellin_at(spec, s, params).upper)
    return _safe_exp(_log_kernel_checked(arrivals, log_m, s, hops, w))


def network_mellin_bound(m_g, hops, n):
    """H 跳串接的網路服務 Mellin 界限 C(H-1+n, n) M_g^n"""
    hops = _check_hops(hops)
    if n < 0:
        raise DomainError(f"n 必須 >= 0 (got {n})")
    log_binom = gammaln(hops + n) - gammaln(n + 1.0) - gammaln(hops)
    return _safe_exp(float(log_binom) + n * math.log(m_g))


def convolution_mellin_bound(first: Sequence[float], second: Sequence[float]) -> np.ndarray:
    """兩個服務元素串接：M_{S1⊗S2}(n) <= Σ_j M_{S1}(j) M_{S2}(n-j)"""
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    length = min(first.size, second.size)
    return np.convolve(first[:length], second[:length])[:length]


# ============================================================
# s 的最佳化
# ============================================================

def _s_grid():
    return 2.0 ** np.arange(AppConfig.S_GRID_MIN_EXP, AppConfig.S_GRID_MAX_EXP + 1, dtype=float)


def _minimize_over_s(objective: Callable[[float], float]) -> Tuple[float, float]:
    """
    幾何格點 2^-20 .. 2^6 找出最佳區段，再於 log2(s) 上黃金分割細化
    不假設單峰：回傳所有評估點中的最小值
    """
    grid = _s_grid()
    values = np.array([objective(s) for s in grid])
    if not np.isfinite(values).any():
        return math.nan, math.inf
    i = int(np.argmin(values))
    lo = math.log2(grid[max(i - 1, 0)])
    hi = math.log2(grid[min(i + 1, grid.size - 1)])
    x, fx = golden_section_minimize(lambda t: objective(2.0 ** t), lo, hi, AppConfig.GOLDEN_TOL)
    if fx < values[i]:
        return 2.0 ** x, fx
    return float(grid[i]), float(values[i])


def _log_service_upper(spec, params):
    """ln M_g(1-s) 上界；數值積分失敗時退回平凡界限 M_g <= 1"""
    def log_m(s):
        try:
            return math.log(service_mellin_at(spec, s, params).upper)
        except QuadratureError as e:
            logging.warning(f"s={s} 的 Mellin 評估失敗，改用平凡界限: {e}")
            return 0.0
    return log_m


def violation_probability(arrivals: ArrivalSpec, spec: ChannelSpec, hops=1, w=0,
                          params: MellinParams = None) -> DelayBoundResult:
    """ε(w) = min(inf_{s>0} K(s, -w), 1)"""
    hops = _check_hops(hops)
    w = _check_delay(w)
    params = params or MellinParams()
    log_m = _log_service_upper(spec, params)

    def objective(s):
        try:
            return _log_kernel(arrivals.rate, log_m(s), s, hops, w)
        except TruncationError as e:
            logging.debug(f"略過 s={s}: {e}")
            return math.inf

    s_star, log_k = _minimize_over_s(objective)
    if not math.isfinite(log_k):
        logging.debug(f"ρ={arrivals.rate} 不存在穩定的 s (H={hops}, w={w})")
        return DelayBoundResult(w, 1.0, math.nan, False, math.inf, hops, None)
    kernel_value = _safe_exp(log_k)
    epsilon = min(max(kernel_value, _FLOAT_TINY), 1.0)
    return DelayBoundResult(w, epsilon, s_star, True, kernel_value, hops,
                            service_mellin_at(spec, s_star, params), log_epsilon=min(log_k, 0.0))


def _single_hop_delay_estimate(arrivals, spec, epsilon, params) -> int:
    """單跳核心對 w 的直接反解 min_s (ln ε + ln(1 - e^q)) / ln M，作為搜尋起點"""
    log_m = _log_service_upper(spec, params)
    log_eps = math.log(epsilon)

    def objective(s):
        lm = log_m(s)
        q_log = arrivals.rate * s + lm
        if q_log >= 0 or lm >= 0:
            return math.inf
        return max((log_eps + math.log(-math.expm1(q_log))) / lm, 0.0)

    _, w_real = _minimize_over_s(objective)
    if not math.isfinite(w_real):
        return 1
    return max(int(math.ceil(w_real - 1e-9)), 1)


def delay_bound(arrivals: ArrivalSpec, spec: ChannelSpec, hops=1, epsilon=1e-6,
                params: MellinParams = None) -> DelayBoundResult:
    """
    最小整數 w 使 violation_probability(w).epsilon <= ε

    先以單跳反解估計起點 (多跳核心 >= 單跳核心，故為下界)，
    再指數擴張找到可行的上端，最後二分搜尋。
    """
    hops = _check_hops(hops)
    if not (0 < epsilon <= 1):
        raise DomainError(f"目標機率 ε 必須在 (0, 1] (got {epsilon})")
    params = params or MellinParams()

    log_target = math.log(epsilon)
    first = violation_probability(arrivals, spec, hops, 0, params)
    if not first.stable:
        return replace(first, w=None)
    if first.log_epsilon <= log_target:
        return first

    lo = 0
    hi = _single_hop_delay_estimate(arrivals, spec, epsilon, params)
    best = violation_probability(arrivals, spec, hops, hi, params)
    while best.log_epsilon > log_target:
        lo = hi
        hi *= 2
        if hi > AppConfig.W_SEARCH_CAP:
            raise TruncationError(f"延遲搜尋超過上限 {AppConfig.W_SEARCH_CAP} (ρ={arrivals.rate}, ε={epsilon})")
        best = violation_probability(arrivals, spec, hops, hi, params)

    step = 1
    while hi - lo > 1:
        trial = max(lo + 1, hi - step)
        result = violation_probability(arrivals, spec, hops, trial, params)
        if result.log_epsilon <= log_target:
            hi, best = trial, result
            step *= 2
        else:
            lo = trial
            break

    while hi - lo > 1:
        mid = (lo + hi) // 2
        result = violation_probability(arrivals, spec, hops, mid, params)
        if result.log_epsilon <= log_target:
            hi, best = mid, result
        else:
            lo = mid

    logging.debug(f"delay_bound: ρ={arrivals.rate}, ε={epsilon}, H={hops} → w={hi} (s*={best.s_star:.4g})")
    return replace(best, searched=(lo, hi))


def decay_slope(arrivals: ArrivalSpec, spec: ChannelSpec, hops=1, w=0, params: MellinParams = None) -> float:
    """ln M_g(1 - s*)：ln ε(w) 對 w 的漸近斜率"""
    result = violation_probability(arrivals, spec, hops, w, params)
    if not result.stable:
        raise UnstableQueueError(f"ρ={arrivals.rate} 時佇列不穩定，斜率無定義")
    return math.log(result.mellin_bracket_used.upper)


def _single_hop_rate_estimate(spec, w, epsilon, params) -> float:
    """max_s [ln(1 - M^w/ε) - ln M] / s，單跳核心對 ρ 的直接反解"""
    log_m = _log_service_upper(spec, params)
    log_eps = math.log(epsilon)

    def objective(s):
        lm = log_m(s)
        excess = w * lm - log_eps
        if excess >= 0:
            return math.inf
        return -(math.log(-math.expm1(excess)) - lm) / s

    _, neg_rate = _minimize_over_s(objective)
    return -neg_rate if math.isfinite(neg_rate) else math.nan


def max_rate(spec: ChannelSpec, hops=1, w=10, epsilon=1e-6, params: MellinParams = None) -> MaxRateResult:
    """
    sup{ρ : delay_bound(ρ, ε).w <= w}，對 ρ 二分搜尋至 1e-4

    上界為穩定極限 (即平均容量)；可行性以 violation_probability(w) <= ε 判定。
    """
    hops = _check_hops(hops)
    w = _check_delay(w)
    if not (0 < epsilon <= 1):
        raise DomainError(f"目標機率 ε 必須在 (0, 1] (got {epsilon})")
    params = params or MellinParams()
    stable_limit = average_capacity(spec)
    if w == 0 and epsilon < 1:
        logging.debug(f"w=0 時核心 K(s, 0) >= 1，ε={epsilon} < 1 無可行速率")
        return MaxRateResult(0.0, stable_limit, w, epsilon, 0)
    log_target = math.log(epsilon)
    iterations = 0

    def feasible(rate):
        nonlocal iterations
        iterations += 1
        return violation_probability(ArrivalSpec(rate), spec, hops, w, params).log_epsilon <= log_target

    if not feasible(0.0):
        logging.info(f"即使 ρ=0 也無法滿足 (w={w}, ε={epsilon})")
        return MaxRateResult(0.0, stable_limit, w, epsilon, iterations)

    tol = AppConfig.RATE_TOL
    estimate = _single_hop_rate_estimate(spec, w, epsilon, params)
    if not math.isfinite(estimate):
        estimate = stable_limit
    lo, hi = 0.0, stable_limit
    start = min(max(estimate + tol, tol), stable_limit)
    if start < stable_limit:
        if feasible(start):
            lo = start
        else:
            hi = start
            step = tol
            while hi - lo > tol:
                candidate = max(lo, hi - step)
                if feasible(candidate):
                    lo = candidate
                    break
                hi = candidate
                step *= 2

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid

    logging.debug(f"max_rate: H={hops}, w={w}, ε={epsilon} → ρ={lo:.6f} (穩定極限 {stable_limit:.6f})")
    return MaxRateResult(lo, stable_limit, w, epsilon, iterations)
