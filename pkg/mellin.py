# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 服務過程 Mellin 轉換模組
計算 g(γ) = (1+γ)^𝒩 的 Mellin 轉換 M_g(s) = E[(1+γ)^(s-1)]

干擾通道：
    M_g(s) = 1 + Σ_i u_i (s-1) J_i(s)
    J_i(s) = ∫_0^∞ (1+x)^(s-2) / (a_i+x) · e^(-x/γ_∅) dx
以 z = x+1 換元並在 z = a_i - 1 附近切出寬度 δ 的區段，
兩側分別展開成交錯 (a_i > 1) 或幾何 (a_i < 1) 級數，
截斷於偶數 k 時得到上下界括號。
"""
import math
import logging
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from channel import ChannelSpec, PartialFractionWeights, partial_fraction_weights, sinr_survival
from config import AppConfig
from errors import DomainError, TruncationWarning
from numerics import (QuadratureResult, QuadratureSpec, integrate_adaptive, log_gamma_interval,
                      log_upper_incomplete_gamma, log_upper_incomplete_gamma_sequence)


@dataclass(frozen=True)
class MellinParams:
    """
    Mellin 評估參數
    k=None 時採自適應截斷 (16, 32, ... 4096)；delta < 1e-8 視為 δ→0 極限
    """
    s: float = 0.5
    k: Optional[int] = None
    delta: float = AppConfig.DEFAULT_DELTA
    use_quadrature: bool = False
    diagnostics: bool = False
    target_rel_width: float = AppConfig.BRACKET_TARGET

    def __post_init__(self):
        object.__setattr__(self, 's', float(self.s))
        if not math.isfinite(self.s):
            raise DomainError(f"Mellin 參數 s 必須為有限值 (got {self.s})")
        if self.k is not None:
            if int(self.k) != self.k or self.k < 0 or int(self.k) % 2:
                raise DomainError(f"截斷階數 k 必須為非負偶數 (got {self.k})")
            object.__setattr__(self, 'k', int(self.k))
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise DomainError(f"分割寬度 δ 必須 >= 0 (got {self.delta})")
        if not self.target_rel_width > 0:
            raise DomainError(f"target_rel_width 必須 > 0 (got {self.target_rel_width})")

    def with_s(self, s) -> 'MellinParams':
        return replace(self, s=float(s))


@dataclass(frozen=True)
class MellinValue:
    """括號 [lower, upper] 與中點；延遲界限一律使用 upper"""
    lower: float
    upper: float
    point: float
    k_used: int = 0
    converged: bool = True
    method: str = 'series'

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _exact(value, method='closed-form') -> MellinValue:
    return MellinValue(value, value, value, 0, True, method)


def _check_below_one(s):
    if not s < 1:
        raise DomainError(f"級數評估需要 s < 1 (got s={s})")


# ============================================================
# Rayleigh 特例 (閉式)
# ============================================================

def rayleigh_mellin(avg_snr, s):
    """無干擾 Rayleigh 通道：M_g(s) = e^(1/γ) γ^(s-1) Γ(s, 1/γ)"""
    if s == 1:
        return 1.0
    _check_below_one(s)
    g = float(avg_snr)
    return math.exp(1.0 / g + (s - 1.0) * math.log(g) + log_upper_incomplete_gamma(s, 1.0 / g))


def rayleigh_mellin_alternative(avg_snr, s):
    """遞迴關係改寫的等價形式：1 + (s-1) e^(1/γ) γ^(s-1) Γ(s-1, 1/γ)"""
    if s == 1:
        return 1.0
    _check_below_one(s)
    g = float(avg_snr)
    return 1.0 + (s - 1.0) * math.exp(1.0 / g + (s - 1.0) * math.log(g)
                                      + log_upper_incomplete_gamma(s - 1.0, 1.0 / g))


def identical_power_mellin(avg_snr, s):
    """單一同功率干擾源 (a_1 = 1)：1 + (s-1) e^(1/γ) γ^(s-2) Γ(s-2, 1/γ)"""
    if s == 1:
        return 1.0
    _check_below_one(s)
    g = float(avg_snr)
    return 1.0 + (s - 1.0) * math.exp(1.0 / g + (s - 2.0) * math.log(g)
                                      + log_upper_incomplete_gamma(s - 2.0, 1.0 / g))


# ============================================================
# 單一干擾源積分 J_i
# ============================================================

def _log_power_difference(p, log_base):
    """ln((A^p - 1)/p)，A > 1；p = 0 時取極限 ln(ln A)"""
    p = np.asarray(p, dtype=float)
    out = np.full(p.shape, math.log(log_base))
    pos = p > 0
    neg = p < 0
    x_pos = p[pos] * log_base
    out[pos] = x_pos + np.log(-np.expm1(-x_pos)) - np.log(p[pos])
    x_neg = p[neg] * log_base
    out[neg] = np.log(-np.expm1(x_neg)) - np.log(-p[neg])
    return out


def _series_terms(a, avg_snr, s, count, delta):
    """
    回傳 (I1 各項, I2 各項)，n = 0 .. count-1，不含 e^(1/γ) 因子
    avg_snr=None 表示無雜訊 (干擾受限) 形式
    """
    n = np.arange(count, dtype=float)
    signs = np.where(n % 2 == 0, 1.0, -1.0)

    t1 = np.zeros(count)
    upper_limit = a - 1.0 - delta
    if upper_limit > 1.0:
        log_am1 = math.log(a - 1.0)
        if avg_snr is None:
            log_inner = _log_power_difference(s - 1.0 + n, math.log(upper_limit))
        else:
            log_g = math.log(avg_snr)
            log_inner = (s + n - 1.0) * log_g + log_gamma_interval(
                s + n - 1.0, 1.0 / avg_snr, upper_limit / avg_snr)
        t1 = signs * np.exp(log_inner - (n + 1.0) * log_am1)

    lower_limit = max(1.0, a - 1.0 + delta)
    if avg_snr is None:
        log_tail = (s - 2.0 - n) * math.log(lower_limit) - np.log(n + 2.0 - s)
    else:
        log_tail = (s - n - 2.0) * math.log(avg_snr) + log_upper_incomplete_gamma_sequence(
            s - 2.0, lower_limit / avg_snr, count)

    if a == 1.0:
        t2 = np.zeros(count)
        t2[0] = math.exp(log_tail[0])
    else:
        t2 = np.exp(n * math.log(abs(1.0 - a)) + log_tail)
        if a > 1.0:
            t2 = signs * t2
    return t1, t2


def _bracket_from_terms(a, t1, t2, k, lower_limit):
    """截斷於偶數 k 的括號：a > 1 交錯級數，a < 1 幾何級數加尾端界限"""
    if a == 1.0:
        return t2[0], t2[0]
    if a > 1.0:
        upper = math.fsum(np.concatenate((t1[:k + 1], t2[:k + 1])))
        lower = upper + t1[k + 1] + t2[k + 1]
        return lower, upper
    ratio = (1.0 - a) / lower_limit
    lower = math.fsum(t2[:k + 2])
    upper = lower + t2[k + 1] * ratio / (1.0 - ratio)
    return lower, upper


def _lemma_integrand(a, avg_snr, s):
    if avg_snr is None:
        return lambda x: (1.0 + x) ** (s - 2.0) / (a + x)
    return lambda x: (1.0 + x) ** (s - 2.0) / (a + x) * math.exp(-x / avg_snr)


def _split_integrand(a, avg_snr, s):
    """z 座標下的被積函數 (不含 e^(1/γ))"""
    if avg_snr is None:
        return lambda z: z ** (s - 2.0) / (z + a - 1.0)
    return lambda z: z ** (s - 2.0) / (z + a - 1.0) * math.exp(-z / avg_snr)


def _integrate_half_line(f, spec: QuadratureSpec = None) -> QuadratureResult:
    """∫_0^∞ 拆成 [0,1] 與 [1,∞) 兩段"""
    head = integrate_adaptive(f, 0.0, 1.0, spec)
    tail = integrate_adaptive(f, 1.0, np.inf, spec)
    return QuadratureResult(head.value + tail.value, head.abs_error + tail.abs_error,
                            head.evaluations + tail.evaluations)


def _split_piece(a, avg_snr, s, delta) -> QuadratureResult:
    """z ∈ [max(1, a-1-δ), max(1, a-1+δ)] 區段的數值積分"""
    lo = max(1.0, a - 1.0 - delta)
    hi = max(1.0, a - 1.0 + delta)
    return integrate_adaptive(_split_integrand(a, avg_snr, s), lo, hi)


def lemma_integral_quadrature(a_i, avg_snr, s, spec: QuadratureSpec = None) -> QuadratureResult:
    """J_i(s) 的數值積分 (avg_snr=None 為無雜訊形式)"""
    if not a_i > 0:
        raise DomainError(f"a_i 必須 > 0 (got {a_i})")
    _check_below_one(s)
    return _integrate_half_line(_lemma_integrand(float(a_i), avg_snr, float(s)), spec)


def _lemma_value(a, avg_snr, s, params: MellinParams) -> MellinValue:
    """J_i(s) 的括號 (含 e^(1/γ))，k=None 時自適應並在必要時退回數值積分"""
    adaptive = params.k is None
    if adaptive:
        delta = max(params.delta, AppConfig.ADAPTIVE_SPLIT * abs(a - 1.0))
        schedule = []
        k = AppConfig.K_START
        while k <= AppConfig.K_MAX:
            schedule.append(k)
            k *= 2
    else:
        delta = params.delta
        schedule = [params.k]

    delta_eff = 0.0 if delta < AppConfig.DELTA_SKIP_BELOW else delta
    if delta_eff > 0:
        piece = _split_piece(a, avg_snr, s, delta_eff)
    else:
        piece = QuadratureResult(0.0, 0.0, 0)
        if params.diagnostics and params.delta > 0:
            skipped = _split_piece(a, avg_snr, s, params.delta)
            logging.info(f"[診斷] a={a:.6g}, s={s:.6g}: 略去的 I_δ(δ={params.delta:.1e}) = {skipped.value:.3e}")
            if abs(skipped.value) > 1e-12:
                logging.warning(f"[診斷] 略去的 I_δ 超過 1e-12 (a={a:.6g}, s={s:.6g}, I_δ={skipped.value:.3e})")

    scale = 1.0 if avg_snr is None else math.exp(1.0 / avg_snr)
    lower_limit = max(1.0, a - 1.0 + delta_eff)
    lower = upper = math.nan
    for k in schedule:
        t1, t2 = _series_terms(a, avg_snr, s, k + 2, delta_eff)
        lo, hi = _bracket_from_terms(a, t1, t2, k, lower_limit)
        lower = scale * (lo + piece.value - piece.abs_error)
        upper = scale * (hi + piece.value + piece.abs_error)
        point = 0.5 * (lower + upper)
        if upper - lower <= params.target_rel_width * abs(point):
            return MellinValue(lower, upper, point, k, True, 'series')

    if not adaptive:
        logging.debug(f"k={params.k} 未達目標括號寬度 (a={a:.6g}, s={s:.6g}, 寬度={upper - lower:.3e})")
        return MellinValue(lower, upper, 0.5 * (lower + upper), params.k, False, 'series')

    # k = K_MAX 仍未收斂：與數值積分結果取交集
    oracle = lemma_integral_quadrature(a, avg_snr, s)
    q_lo = oracle.value - oracle.abs_error
    q_hi = oracle.value + oracle.abs_error
    message = (f"級數於 k={AppConfig.K_MAX} 未達目標寬度 (a={a:.6g}, s={s:.6g})，改用數值積分 "
               f"(積分值={oracle.value:.12g} ± {oracle.abs_error:.1e})")
    logging.warning(message)
    warnings.warn(message, TruncationWarning, stacklevel=3)
    lo, hi = max(lower, q_lo), min(upper, q_hi)
    if lo > hi:
        lo, hi = q_lo, q_hi
    return MellinValue(lo, hi, 0.5 * (lo + hi), AppConfig.K_MAX, False, 'quadrature')


def lemma1_integral(a_i, avg_snr, s, k=None, delta=AppConfig.DEFAULT_DELTA) -> MellinValue:
    """
    J_i(s) = ∫_0^∞ (1+x)^(s-2)/(a_i+x) e^(-x/γ_∅) dx = e^(1/γ_∅)(I1 + I_δ + I2)
    a_i > 1 時括號為 [Ψ^(k+1), Ψ^k]
    """
    if not a_i > 0:
        raise DomainError(f"a_i 必須 > 0 (got {a_i})")
    if not avg_snr > 0:
        raise DomainError(f"平均 SNR 必須 > 0 (got {avg_snr})")
    _check_below_one(s)
    params = MellinParams(s=s, k=k, delta=delta)
    return _lemma_value(float(a_i), float(avg_snr), float(s), params)


def lemma2_integral(a_i, s, k=None, delta=AppConfig.DEFAULT_DELTA) -> MellinValue:
    """無雜訊形式 ∫_0^∞ (1+x)^(s-2)/(a_i+x) dx"""
    if not a_i > 0:
        raise DomainError(f"a_i 必須 > 0 (got {a_i})")
    _check_below_one(s)
    params = MellinParams(s=s, k=k, delta=delta)
    return _lemma_value(float(a_i), None, float(s), params)


def psi_bracket(a_i, avg_snr, s, k) -> Tuple[float, float]:
    """δ→0 的截斷括號 (Ψ^(k+1), Ψ^k)，需要 a_i > 1 與偶數 k"""
    if not a_i > 1:
        raise DomainError(f"交錯級數括號需要 a_i > 1 (got {a_i})")
    value = lemma1_integral(a_i, avg_snr, s, k=k, delta=0.0)
    return value.lower, value.upper


# ============================================================
# 通道 Mellin 轉換
# ============================================================

@lru_cache(maxsize=4096)
def _weights(spec: ChannelSpec) -> PartialFractionWeights:
    return partial_fraction_weights(spec)


def _scaled_argument(spec: ChannelSpec, s):
    """M_{g^𝒩}(s) = M_g(𝒩(s-1) + 1)"""
    if s > 1:
        raise DomainError(f"Mellin 轉換需要 s <= 1 (got s={s})")
    return spec.rate_scale * (s - 1.0) + 1.0


def _survival_factory(spec: ChannelSpec, noiseless):
    if not noiseless:
        return lambda x: sinr_survival(spec, x)
    ratios = spec.interferer_ratios

    def survival(x):
        value = 1.0
        for a in ratios:
            value *= a / (a + x)
        return value
    return survival


def _density_factory(spec: ChannelSpec, noiseless):
    """f(x) = (1 - F(x)) (1/γ_∅ + Σ 1/(a_i+x))"""
    survival = _survival_factory(spec, noiseless)
    base = 0.0 if noiseless else 1.0 / spec.avg_snr
    ratios = spec.interferer_ratios

    def density(x):
        return survival(x) * (base + math.fsum(1.0 / (a + x) for a in ratios))
    return density


def _quadrature_value(spec: ChannelSpec, s, noiseless=False, q: QuadratureSpec = None) -> MellinValue:
    """M_g(s) = ∫_0^∞ (1+x)^(s-1) f(x) dx (乘積形式密度，不經部分分式，被積函數恆正)"""
    density = _density_factory(spec, noiseless)
    result = _integrate_half_line(lambda x: (1.0 + x) ** (s - 1.0) * density(x), q)
    point = min(result.value, 1.0)
    lower = max(result.value - result.abs_error, 0.0)
    upper = min(result.value + result.abs_error, 1.0)
    return MellinValue(lower, upper, point, 0, True, 'quadrature')


def _compose(spec: ChannelSpec, params: MellinParams, noiseless: bool) -> MellinValue:
    """1 + Σ u_i (s-1) J_i，依係數符號翻轉各項括號後加總"""
    s = params.s
    weights = _weights(spec)
    if params.use_quadrature or weights.ill_conditioned:
        return _quadrature_value(spec, s, noiseless)

    avg_snr = None if noiseless else spec.avg_snr
    lows, highs = [], []
    converged = True
    k_used = 0
    method = 'series'
    for a, u in zip(spec.interferer_ratios, weights.weights):
        value = _lemma_value(a, avg_snr, s, params)
        c = u * (s - 1.0)
        pair = (c * value.lower, c * value.upper)
        lows.append(min(pair))
        highs.append(max(pair))
        converged &= value.converged
        k_used = max(k_used, value.k_used)
        if value.method == 'quadrature':
            method = 'quadrature'

    lower = 1.0 + math.fsum(lows)
    upper = min(1.0, 1.0 + math.fsum(highs))
    if not upper > 0:
        logging.warning(f"級數組合結果非正 (s={s}, upper={upper:.3e})，改用數值積分")
        return _quadrature_value(spec, s, noiseless)
    lower = max(lower, 0.0)
    point = min(max(0.5 * (lower + upper), lower), upper)
    return MellinValue(lower, upper, point, k_used, converged, method)


@lru_cache(maxsize=65536)
def _mellin_cached(spec: ChannelSpec, params: MellinParams, noiseless: bool) -> MellinValue:
    if params.s == 1.0:
        return _exact(1.0, 'exact')
    if spec.is_noise_limited:
        if noiseless:
            raise DomainError("無雜訊形式需要至少一個干擾源")
        return _exact(rayleigh_mellin(spec.avg_snr, params.s))
    return _compose(spec, params, noiseless)


def mellin_service(spec: ChannelSpec, params: MellinParams) -> MellinValue:
    """
    干擾通道服務過程的 Mellin 轉換 M_{g(γ)}(s)，回傳括號

    𝒩 ≠ 1 時於縮放後的參數 𝒩(s-1)+1 評估。
    部分分式病態或 use_quadrature 時走數值積分路徑。
    """
    scaled = params.with_s(_scaled_argument(spec, params.s))
    return _mellin_cached(spec, scaled, False)


def mellin_interference_limited(spec: ChannelSpec, params: MellinParams) -> MellinValue:
    """γ_∅ → ∞ (無雜訊) 極限下的 Mellin 轉換"""
    if spec.is_noise_limited:
        raise DomainError("干擾受限形式需要至少一個干擾源")
    scaled = params.with_s(_scaled_argument(spec, params.s))
    return _mellin_cached(spec, scaled, True)


def mellin_service_quadrature(spec: ChannelSpec, s, q: QuadratureSpec = None) -> float:
    """
    數值積分路徑，作為級數的交叉驗證
    使用密度形式 M_g(s) = ∫_0^∞ (1+x)^{𝒩(s-1)} f(x) dx，
    f(x) = (1 - F(x)) (1/γ_∅ + Σ_i 1/(a_i + x))，被積函數恆正
    """
    s_scaled = _scaled_argument(spec, s)
    if s_scaled == 1.0:
        return 1.0
    return _quadrature_value(spec, s_scaled, False, q).point


def log_mellin_service(spec: ChannelSpec, s, params: MellinParams = None) -> float:
    """ln M_g(s) 的上界 (延遲界限使用)"""
    params = (params or MellinParams()).with_s(s)
    return math.log(mellin_service(spec, params).upper)


def effective_capacity(spec: ChannelSpec, s, params: MellinParams = None) -> float:
    """效能容量 -(1/s) ln M_g(1-s)，單位 bits/slot"""
    if not s > 0:
        raise DomainError(f"效能容量需要 s > 0 (got s={s})")
    params = (params or MellinParams()).with_s(1.0 - s)
    value = mellin_service(spec, params)
    return -math.log(value.point) / s


def average_capacity(spec: ChannelSpec, q: QuadratureSpec = None) -> float:
    """平均容量 E[𝒩 ln(1+γ)] = 𝒩 ∫_0^∞ (1 - F(x)) / (1+x) dx"""
    result = _integrate_half_line(lambda x: sinr_survival(spec, x) / (1.0 + x), q)
    return spec.rate_scale * result.value


def clear_cache():
    """清除 Mellin 快取 (測試與基準測試用)"""
    _mellin_cached.cache_clear()
    _weights.cache_clear()
