# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 通道模型模組
Rayleigh 衰落下的 SINR 分佈、部分分式權重、情境 (γ_∅, γ̄, n) 轉換與取樣

雜訊功率正規化為 σ² = 1，故 p_0 = γ_∅、p_i = γ_∅ / a_i
"""
import math
import logging
import warnings
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from config import AppConfig
from errors import DomainError, DuplicateRatioError, IllConditionedWarning, InfeasibleScenarioError


@dataclass(frozen=True)
class ChannelSpec:
    """
    單一鏈路的通道規格
    avg_snr:            γ_∅ = p_0 / σ²
    interferer_ratios:  a_i = p_0 / p_i (兩兩相異)
    symbols_per_slot:   N，容量縮放 𝒩 = N / ln 2
    """
    avg_snr: float
    interferer_ratios: Tuple[float, ...] = ()
    symbols_per_slot: float = AppConfig.DEFAULT_SYMBOLS_PER_SLOT

    def __post_init__(self):
        object.__setattr__(self, 'avg_snr', float(self.avg_snr))
        object.__setattr__(self, 'interferer_ratios', tuple(float(a) for a in self.interferer_ratios))
        object.__setattr__(self, 'symbols_per_slot', float(self.symbols_per_slot))

        if not (self.avg_snr > 0 and math.isfinite(self.avg_snr)):
            raise DomainError(f"平均 SNR 必須為正有限值 (got {self.avg_snr})")
        if not (self.symbols_per_slot > 0 and math.isfinite(self.symbols_per_slot)):
            raise DomainError(f"symbols_per_slot 必須 > 0 (got {self.symbols_per_slot})")
        for a in self.interferer_ratios:
            if not (a > 0 and math.isfinite(a)):
                raise DomainError(f"干擾功率比 a_i 必須為正有限值 (got {a})")
        if len(set(self.interferer_ratios)) != len(self.interferer_ratios):
            raise DuplicateRatioError(f"干擾功率比 a_i 必須兩兩相異 (got {self.interferer_ratios})")

    @property
    def n_interferers(self) -> int:
        return len(self.interferer_ratios)

    @property
    def is_noise_limited(self) -> bool:
        return not self.interferer_ratios

    @property
    def rate_scale(self) -> float:
        """𝒩 = N / ln 2"""
        return self.symbols_per_slot / math.log(2.0)

    @property
    def interferer_powers(self) -> Tuple[float, ...]:
        return tuple(self.avg_snr / a for a in self.interferer_ratios)


@dataclass(frozen=True)
class ScenarioSpec:
    """以 (γ_∅, γ̄, n) 描述的干擾情境"""
    avg_snr: float
    avg_sinr: float
    n_interferers: int
    perturbation: float = AppConfig.DEFAULT_PERTURBATION
    symbols_per_slot: float = AppConfig.DEFAULT_SYMBOLS_PER_SLOT


@dataclass(frozen=True)
class PartialFractionWeights:
    """部分分式權重 u_i 與條件數診斷 (amplification = Σ|u_i/a_i|，Σ u_i/a_i = 1)"""
    weights: Tuple[float, ...]
    min_relative_gap: float = math.inf
    amplification: float = 1.0
    ill_conditioned: bool = False


def noise_limited(avg_snr, symbols_per_slot=AppConfig.DEFAULT_SYMBOLS_PER_SLOT) -> ChannelSpec:
    """無干擾源的通道"""
    return ChannelSpec(avg_snr, (), symbols_per_slot)


def average_sinr(spec: ChannelSpec) -> float:
    """γ̄ = p_0 / (σ² + Σ p_i)"""
    return spec.avg_snr / (1.0 + math.fsum(spec.interferer_powers))


def equivalent_noise_limited(spec: ChannelSpec) -> ChannelSpec:
    """以平均 SINR 取代 SNR 的無干擾參考通道"""
    return noise_limited(average_sinr(spec), spec.symbols_per_slot)


def _log_survival(spec: ChannelSpec, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("SINR CDF 需要 x >= 0")
    out = -x / spec.avg_snr
    for a in spec.interferer_ratios:
        out = out - np.log1p(x / a)
    return out


def sinr_survival(spec: ChannelSpec, x):
    """1 - F_γ(x) = e^(-x/γ_∅) Π a_i / (a_i + x)"""
    value = np.exp(_log_survival(spec, x))
    return float(value) if np.ndim(value) == 0 else value


def sinr_cdf(spec: ChannelSpec, x):
    """F_γ(x) = 1 - e^(-x/γ_∅) Π a_i / (a_i + x)，x 可為純量或陣列"""
    value = -np.expm1(_log_survival(spec, x))
    return float(value) if np.ndim(value) == 0 else value


def partial_fraction_weights(spec: ChannelSpec) -> PartialFractionWeights:
    """
    u_i = Π_s a_s / Π_{t≠i} (a_t - a_i)，使 Π a_i/(a_i+x) = Σ u_i/(a_i+x)

    在 log 域計算乘積；a_i 相對間距低於門檻時發出 IllConditionedWarning。
    """
    a = np.asarray(spec.interferer_ratios, dtype=float)
    n = a.size
    if n == 0:
        return PartialFractionWeights(())
    if len(set(a.tolist())) != n:
        raise DuplicateRatioError(f"干擾功率比 a_i 必須兩兩相異 (got {tuple(a)})")
    if n == 1:
        return PartialFractionWeights((float(a[0]),))

    log_prod = float(np.sum(np.log(a)))
    diff = a[None, :] - a[:, None]            # diff[i, t] = a_t - a_i
    np.fill_diagonal(diff, 1.0)
    signs = np.prod(np.sign(diff), axis=1)
    weights = signs * np.exp(log_prod - np.sum(np.log(np.abs(diff)), axis=1))

    scale = np.maximum(a[None, :], a[:, None])
    gaps = np.abs(a[None, :] - a[:, None]) / scale
    np.fill_diagonal(gaps, np.inf)
    min_gap = float(gaps.min())
    amplification = float(np.sum(np.abs(weights / a)))
    ill = min_gap < AppConfig.ILL_CONDITIONED_GAP or amplification > AppConfig.MAX_WEIGHT_AMPLIFICATION
    if ill:
        message = (f"部分分式權重病態 (最小相對間距 {min_gap:.2e}, 放大倍率 {amplification:.2e})，"
                   f"改用數值積分")
        logging.warning(message)
        warnings.warn(message, IllConditionedWarning, stacklevel=2)
    return PartialFractionWeights(tuple(float(u) for u in weights), min_gap, amplification, ill)


def scenario_to_channel(scenario: ScenarioSpec) -> ChannelSpec:
    """
    (γ_∅, γ̄, n) → ChannelSpec
    P_I = γ_∅/γ̄ - 1，p_i = (P_I/n)(1 + η(i - (n+1)/2))，a_i = γ_∅ / p_i

    擾動 η 對稱，Σ p_i = P_I，故重建的平均 SINR 等於 γ̄。
    """
    g0 = float(scenario.avg_snr)
    g_bar = float(scenario.avg_sinr)
    n = int(scenario.n_interferers)
    eta = float(scenario.perturbation)

    if not (g0 > 0 and g_bar > 0):
        raise DomainError(f"γ_∅ 與 γ̄ 必須 > 0 (got {g0}, {g_bar})")
    if n < 0:
        raise DomainError(f"干擾源數量必須 >= 0 (got {n})")
    if g_bar > g0 * (1.0 + 1e-12):
        raise InfeasibleScenarioError(f"平均 SINR 不可大於平均 SNR (γ̄={g_bar:.6g} > γ_∅={g0:.6g})")

    if n == 0:
        if not math.isclose(g_bar, g0, rel_tol=1e-9):
            raise InfeasibleScenarioError(f"無干擾源時 γ̄ 必須等於 γ_∅ (got γ̄={g_bar:.6g}, γ_∅={g0:.6g})")
        return noise_limited(g0, scenario.symbols_per_slot)

    if g_bar >= g0:
        raise InfeasibleScenarioError(f"有干擾源時 γ̄ 必須 < γ_∅ (got γ̄={g_bar:.6g}, γ_∅={g0:.6g})")
    if eta < 0:
        raise DomainError(f"擾動 η 必須 >= 0 (got {eta})")
    if n > 1 and eta * (n - 1) / 2.0 >= 1.0:
        raise InfeasibleScenarioError(f"擾動 η={eta} 過大，n={n} 時功率會變成非正值")

    total_interference = g0 / g_bar - 1.0
    index = np.arange(1, n + 1, dtype=float)
    powers = (total_interference / n) * (1.0 + eta * (index - (n + 1) / 2.0))
    ratios = tuple(float(g0 / p) for p in powers)
    logging.debug(f"情境轉換: γ_∅={g0:.6g}, γ̄={g_bar:.6g}, n={n}, η={eta} → a={ratios}")
    return ChannelSpec(g0, ratios, scenario.symbols_per_slot)


# ============================================================
# 取樣 (numpy Generator / PCG64)
# ============================================================

def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def spawn_rngs(seed, count) -> List[np.random.Generator]:
    """由同一種子產生 count 條獨立亂數流 (每跳一條)"""
    children = np.random.SeedSequence(seed).spawn(int(count))
    return [np.random.default_rng(child) for child in children]


def sample_sinr_batch(spec: ChannelSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """
    一次抽取 size 個獨立 SINR 樣本
    γ = X_0 / (Σ X_i + 1)，X_0 ~ Exp(均值 γ_∅)，X_i ~ Exp(均值 γ_∅ / a_i)
    """
    size = int(size)
    signal = rng.exponential(spec.avg_snr, size)
    interference = np.zeros(size)
    for power in spec.interferer_powers:
        interference += rng.exponential(power, size)
    return signal / (interference + 1.0)


def sample_sinr(spec: ChannelSpec, rng: np.random.Generator) -> float:
    """抽取單一 SINR 樣本"""
    return float(sample_sinr_batch(spec, rng, 1)[0])


def slot_capacity(spec: ChannelSpec, sinr):
    """每時槽服務量 c = 𝒩 ln(1 + γ)"""
    return spec.rate_scale * np.log1p(sinr)
