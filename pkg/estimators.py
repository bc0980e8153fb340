# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 統計估計模組
包含 Clopper-Pearson 信賴上界、KS 距離、平均值與標準誤、對數斜率擬合等統計功能
"""
import math

import numpy as np
from scipy import stats as scipy_stats

from config import AppConfig
from errors import DomainError


def clopper_pearson_upper(k, n, level=AppConfig.CONFIDENCE):
    """
    二項比例的 Clopper-Pearson 單邊信賴上界

    Args:
        k: 違反次數 (純量或陣列)
        n: 樣本數
        level: 信賴水準 (預設 0.99)

    Returns:
        上界值 (k >= n 時為 1.0)
    """
    if n <= 0:
        raise DomainError(f"樣本數必須 > 0 (got {n})")
    k = np.asarray(k, dtype=float)
    full = k >= n
    b = np.where(full, 1.0, n - k)
    upper = np.where(full, 1.0, scipy_stats.beta.ppf(level, k + 1.0, b))
    return float(upper) if upper.ndim == 0 else upper


def ks_distance(samples, cdf):
    """樣本與理論 CDF 的 Kolmogorov-Smirnov 距離"""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("KS 檢定需要至少一個樣本")
    return float(scipy_stats.kstest(samples, cdf).statistic)


def mean_and_stderr(values):
    """
    平均值與標準誤 (樣本標準差 / √n)
    Returns:
        (mean, stderr): 樣本數 < 2 時 stderr 為 nan
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return np.nan, np.nan
    mean_val = float(values.mean())
    if values.size < 2:
        return mean_val, np.nan
    return mean_val, float(values.std(ddof=1) / math.sqrt(values.size))


class RunningMoments:
    """分批累積平均值與變異數 (合併各批次的 mean / M2)"""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, batch):
        batch = np.asarray(batch, dtype=float)
        n_b = batch.size
        if n_b == 0:
            return
        mean_b = float(batch.mean())
        m2_b = float(((batch - mean_b) ** 2).sum())
        total = self.count + n_b
        delta = mean_b - self.mean
        self.mean += delta * n_b / total
        self.m2 += m2_b + delta * delta * self.count * n_b / total
        self.count = total

    @property
    def stderr(self):
        if self.count < 2:
            return np.nan
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def fit_log_slope(w, prob, min_prob=1e-6, min_points=3):
    """
    ln(prob) 對 w 的線性回歸斜率

    Args:
        w: 延遲格點
        prob: 對應機率 (僅使用 >= min_prob 且 > 0 的點)
        min_prob: 機率下限，低於此值的點統計誤差過大

    Returns:
        (slope, reliability): reliability 為 'reliable' | 'small_sample' | 'invalid'
    """
    w = np.asarray(w, dtype=float)
    prob = np.asarray(prob, dtype=float)
    mask = (prob >= min_prob) & (prob > 0) & np.isfinite(prob)
    if mask.sum() < 2:
        return np.nan, 'invalid'
    fit = scipy_stats.linregress(w[mask], np.log(prob[mask]))
    reliability = 'reliable' if mask.sum() >= min_points else 'small_sample'
    return float(fit.slope), reliability
