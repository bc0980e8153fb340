# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 數值計算模組
包含全實數參數的上不完全 Gamma 函數 (線性 / log 版本)、
區間積分、序列計算，以及自適應數值積分與黃金分割搜尋

Γ(a, x) = ∫_x^∞ t^(a-1) e^(-t) dt
"""
import math
import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from scipy import integrate, special

from config import AppConfig
from errors import DomainError, GammaOverflowError, QuadratureError, TruncationError

_FPMIN = 1e-300
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class QuadratureSpec:
    """數值積分容忍度設定"""
    rel_tol: float = AppConfig.QUAD_REL_TOL
    abs_tol: float = AppConfig.QUAD_ABS_TOL
    max_subdivisions: int = AppConfig.QUAD_MAX_SUBDIVISIONS

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol 必須 > 0 (got {self.rel_tol})")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol 必須 >= 0 (got {self.abs_tol})")
        if int(self.max_subdivisions) < 1:
            raise DomainError(f"max_subdivisions 必須 >= 1 (got {self.max_subdivisions})")


@dataclass(frozen=True)
class QuadratureResult:
    """積分結果與誤差估計"""
    value: float
    abs_error: float
    evaluations: int


def _check_x(x):
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"不完全 Gamma 函數需要 x > 0 (got x={x})")


# ============================================================
# 內部核心 (向量化)
# ============================================================

def _log_gcf(a, x):
    """
    連分數 (modified Lentz) 計算 ln Γ(a, x)，對任意實數 a 有效，
    在 x >= max(1, a+1) 時快速收斂。a 可為陣列。
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    with np.errstate(all='ignore'):
        b = x + 1.0 - a
        c = np.full_like(a, 1.0 / _FPMIN)
        d = 1.0 / b
        h = d.copy()
        active = np.ones(a.shape, dtype=bool)
        for i in range(1, AppConfig.CF_MAX_ITERATIONS + 1):
            an = -i * (i - a)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
            c = b + an / c
            c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
            d = 1.0 / d
            step = d * c
            h = np.where(active, h * step, h)
            active &= np.abs(step - 1.0) >= AppConfig.CF_EPSILON
            if not active.any():
                break
        else:
            raise TruncationError(f"Gamma 連分數未收斂 (x={x}, a={a[active][:3]})")
        return np.log(h) - x + a * math.log(x)


def _log_gser(a, x):
    """
    冪級數計算 ln γ(a, x) (下不完全 Gamma)，需要 a > 0。a 可為陣列。
    γ(a, x) = x^a e^(-x) Σ x^n / (a (a+1) ... (a+n))
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    ap = a.copy()
    term = 1.0 / a
    total = term.copy()
    active = np.ones(a.shape, dtype=bool)
    for _ in range(AppConfig.SERIES_MAX_ITERATIONS):
        ap = ap + 1.0
        term = term * (x / ap)
        total = np.where(active, total + term, total)
        active &= np.abs(term) >= np.abs(total) * AppConfig.CF_EPSILON
        if not active.any():
            break
    else:
        raise TruncationError(f"Gamma 冪級數未收斂 (x={x})")
    return np.log(total) - x + a * math.log(x)


def _log_upper_recurrence(a, x):
    """
    a <= 0 且 x < 1：由參考值往下遞迴。
    正規化 r_a = Γ(a,x) e^x x^(-a)，遞迴 r_(a-1) = (x r_a - 1) / (a - 1)，
    x r_a < 1 (a < 1) 故無相消，且不會溢位。
    """
    nearest = round(a)
    if abs(a - nearest) < 1e-12:
        # 整數參數：由 Γ(0, x) = E1(x) 出發
        b = 0.0
        r = float(special.exp1(x)) * math.exp(x)
        steps = int(-nearest)
    else:
        steps = int(math.ceil(-a))
        b = a + steps                      # b ∈ (0, 1)
        r = float(special.gammaincc(b, x)) * math.exp(float(special.gammaln(b)) + x - b * math.log(x))
    for _ in range(steps):
        r = (x * r - 1.0) / (b - 1.0)
        b -= 1.0
    return math.log(r) + a * math.log(x) - x


def _log_upper_array(a, x):
    """ln Γ(a, x)，a 為陣列，逐元素選擇分支"""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.empty_like(a)
    use_cf = x >= np.maximum(1.0, a + 1.0)
    if use_cf.any():
        out[use_cf] = _log_gcf(a[use_cf], x)
    positive = (~use_cf) & (a > 0)
    if positive.any():
        ap = a[positive]
        with np.errstate(divide='ignore'):
            out[positive] = np.log(special.gammaincc(ap, x)) + special.gammaln(ap)
    for idx in np.flatnonzero((~use_cf) & (a <= 0)):
        out[idx] = _log_upper_recurrence(float(a[idx]), x)
    return out


# ============================================================
# 公開函式
# ============================================================

def log_upper_incomplete_gamma(a, x):
    """
    ln Γ(a, x)，a 為任意實數，x > 0

    分支：
    - x >= max(1, a+1): 連分數
    - a > 0, x < a+1:   scipy gammaincc · Γ(a)
    - 其他 (a <= 0, x < 1): 正規化向下遞迴
    """
    _check_x(x)
    return float(_log_upper_array(np.array([float(a)]), float(x))[0])


def upper_incomplete_gamma(a, x):
    """
    Γ(a, x)，結果超出浮點範圍時拋出 GammaOverflowError (不會默默飽和)
    """
    log_value = log_upper_incomplete_gamma(a, x)
    if log_value > _LOG_FLOAT_MAX:
        raise GammaOverflowError(
            f"Γ({a}, {x}) 超出浮點範圍 (ln = {log_value:.3f})，請使用 log_upper_incomplete_gamma")
    return math.exp(log_value)


def log_lower_incomplete_gamma(a, x):
    """ln γ(a, x) (下不完全 Gamma)，a > 0, x > 0"""
    _check_x(x)
    if not a > 0:
        raise DomainError(f"下不完全 Gamma 需要 a > 0 (got a={a})")
    return float(_log_gser(np.array([float(a)]), float(x))[0])


def log_gamma_interval(a, x1, x2):
    """
    ln ∫_{x1}^{x2} t^(a-1) e^(-t) dt，0 < x1 < x2，a 可為陣列

    a > 0 且 x2 <= a+1 時以下不完全 Gamma 相減，否則以上不完全 Gamma 相減，
    兩者皆是大項減小項，避免災難性相消。
    """
    _check_x(x1)
    if not x2 > x1:
        raise DomainError(f"積分區間需 x1 < x2 (got {x1}, {x2})")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.empty_like(a)
    lower = (a > 0) & (x2 <= a + 1.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        if lower.any():
            g2 = _log_gser(a[lower], x2)
            g1 = _log_gser(a[lower], x1)
            out[lower] = g2 + np.log1p(-np.exp(g1 - g2))
        if (~lower).any():
            u1 = _log_upper_array(a[~lower], x1)
            u2 = _log_upper_array(a[~lower], x2)
            out[~lower] = u1 + np.log1p(-np.exp(u2 - u1))
    return out


def log_upper_incomplete_gamma_sequence(a0, x, count):
    """
    ln Γ(a0 - n, x)，n = 0 .. count-1

    x < 1 時沿正規化遞迴一次算完整個序列，x >= 1 時以向量化連分數逐項計算。
    """
    _check_x(x)
    count = int(count)
    if count <= 0:
        return np.empty(0)
    a = float(a0) - np.arange(count, dtype=float)
    if x >= 1.0:
        return _log_upper_array(a, x)
    out = np.empty(count)
    direct = a > 0
    if direct.any():
        out[direct] = _log_upper_array(a[direct], x)
    start = int(np.argmax(~direct)) if (~direct).any() else count
    if start < count:
        log_x = math.log(x)
        log_first = _log_upper_recurrence(float(a[start]), x)
        out[start] = log_first
        r = math.exp(log_first + x - a[start] * log_x)
        for n in range(start + 1, count):
            b = a[n - 1]
            r = (x * r - 1.0) / (b - 1.0)
            out[n] = math.log(r) + a[n] * log_x - x
    return out


def integrate_adaptive(f: Callable[[float], float], lower: float, upper: float,
                       spec: QuadratureSpec = None) -> QuadratureResult:
    """
    自適應數值積分 (scipy.integrate.quad / QUADPACK)

    半無窮區間 (upper = np.inf) 由 QAGI 的區間映射處理尾端。
    未收斂時拋出 QuadratureError，不回傳可疑數值。
    """
    spec = spec or QuadratureSpec()
    if not lower <= upper:
        raise DomainError(f"積分下限需 <= 上限 (got {lower}, {upper})")
    if lower == upper:
        return QuadratureResult(0.0, 0.0, 0)
    result = integrate.quad(f, lower, upper, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                            limit=int(spec.max_subdivisions), full_output=1)
    value, abs_error, info = result[0], result[1], result[2]
    if len(result) > 3:
        message = str(result[3]).strip().splitlines()[0] if result[3] else "quad 未收斂"
        logging.warning(f"數值積分未收斂 [{lower}, {upper}]: {message} (value={value}, err={abs_error})")
        raise QuadratureError(f"積分未收斂: {message}", value=value, abs_error=abs_error)
    if not math.isfinite(value):
        raise QuadratureError(f"積分結果非有限值: {value}", value=value, abs_error=abs_error)
    return QuadratureResult(float(value), float(abs_error), int(info.get('neval', 0)))


def golden_section_minimize(f: Callable[[float], float], a: float, b: float,
                            tol: float = 1e-5) -> Tuple[float, float]:
    """
    黃金分割搜尋，回傳搜尋過程中評估到的最小點 (x, f(x))

    f 可回傳 inf (不可行)，比較時視為最差。
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI_SQUARE * h
    d = a + _INV_PHI * h
    yc = f(c)
    yd = f(d)
    best = min((yc, c), (yd, d))

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = _INV_PHI * h
            c = a + _INV_PHI_SQUARE * h
            yc = f(c)
            best = min(best, (yc, c))
        else:
            a = c
            c = d
            yc = yd
            h = _INV_PHI * h
            d = a + _INV_PHI * h
            yd = f(d)
            best = min(best, (yd, d))

    return best[1], best[0]
