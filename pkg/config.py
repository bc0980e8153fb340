# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 設定常數模組
集中管理所有應用程式設定、數值預設值與 CSV 欄位名稱
"""
import math
from dataclasses import dataclass


@dataclass
class AppConfig:
    """應用程式設定"""
    VERSION: str = "v1.1.0"
    TITLE: str = f"干擾通道延遲分析工具 (Interference Delay Analyzer) {VERSION}"
    TOOL_NAME: str = "interference-delay-analyzer"
    LOG_FILENAME: str = "delay_analyzer.log"
    DEBUG_ENV: str = "DELAY_ANALYZER_DEBUG"

    # --- numerics ---
    QUAD_REL_TOL: float = 1e-10
    QUAD_ABS_TOL: float = 1e-300
    QUAD_MAX_SUBDIVISIONS: int = 200
    CF_MAX_ITERATIONS: int = 20000
    SERIES_MAX_ITERATIONS: int = 100000
    CF_EPSILON: float = 1e-15

    # --- Mellin 級數 ---
    DEFAULT_DELTA: float = 1e-9         # I_δ 分割寬度
    DELTA_SKIP_BELOW: float = 1e-8      # 小於此值則 δ→0 (截斷括號的極限形式)
    ADAPTIVE_SPLIT: float = 0.25        # 自適應模式的分割寬度 δ = 0.25 |a_i - 1|
    K_START: int = 16
    K_MAX: int = 4096
    BRACKET_TARGET: float = 1e-8        # 相對括號寬度目標
    ILL_CONDITIONED_GAP: float = 1e-4   # a_i 相對間距門檻
    MAX_WEIGHT_AMPLIFICATION: float = 1e4   # Σ|u_i/a_i| 上限 (相消放大倍率)

    # --- network calculus ---
    S_GRID_MIN_EXP: int = -20           # s = 2^-20 ...
    S_GRID_MAX_EXP: int = 6             # ... 2^6
    GOLDEN_TOL: float = 1e-4            # log2(s) 上的黃金分割容忍度
    MULTI_HOP_TAIL_TOL: float = 1e-12
    MULTI_HOP_MAX_TERMS: int = 10_000_000
    MULTI_HOP_BLOCK: int = 4096
    RATE_TOL: float = 1e-4
    W_SEARCH_CAP: int = 1 << 24

    # --- simulator ---
    DESK_SLOTS: int = 10_000_000
    SIM_CHUNK: int = 1 << 20
    SIM_MAX_IN_FLIGHT: int = 1_000_000
    CONFIDENCE: float = 0.99
    MC_CHUNK: int = 1 << 20

    # --- scenario ---
    DEFAULT_PERTURBATION: float = 1e-2
    DEFAULT_SYMBOLS_PER_SLOT: float = math.log(2.0)   # 𝒩 = N / ln 2 = 1

    class Columns:
        """資料欄位名稱"""
        KIND = 'kind'
        CHANNEL = 'channel'
        AVG_SNR_DB = 'avg_snr_db'
        AVG_SNR = 'avg_snr'
        AVG_SINR_DB = 'avg_sinr_db'
        AVG_SINR = 'avg_sinr'
        N_INTERFERERS = 'n_interferers'
        RATE = 'rate'
        RATE_PER_SLOT = 'rate_bits_per_slot'
        S = 's'
        S_STAR = 's_star'
        EFFECTIVE_CAPACITY = 'effective_capacity'
        AVERAGE_CAPACITY = 'average_capacity'
        W = 'w'
        EPSILON = 'epsilon'
        LOG_EPSILON = 'log_epsilon'
        STABLE = 'stable'
        MAX_RATE = 'max_rate'
        EMPIRICAL = 'violation_freq'
        UPPER_99 = 'ccdf_upper_99'
        SLOTS = 'slots'
        SEED = 'seed'
        CONFIG_HASH = 'config_hash'
        DECAY_SLOPE = 'decay_slope'
        STATUS = 'status'


# 實驗種類 (對應 CLI 子命令)
EXPERIMENT_KINDS = (
    'effective-capacity',
    'delay-vs-epsilon',
    'delay-vs-rate',
    'delay-vs-interferers',
    'maxrate-vs-snr',
    'avgcap-vs-snr',
    'validate',
)

# 速率單位說明 (寫入 CSV 標頭)
RATE_NORMALIZATION = ("rates in bits per slot, c = N log2(1+SINR); N = symbols_per_slot "
                      "(experiments use N = 1, i.e. bit/symbol)")

# 實驗預設參數 (JSON 設定檔可覆寫任一鍵)
EXPERIMENT_SYMBOLS_PER_SLOT = 1.0
_SINGLE_HOP_SCENARIOS = {
    'avg_snr_db': 15.0,
    'avg_sinr_db_list': [0.0, 4.0],
    'n_interferers_list': [1, 5],
    'perturbation': AppConfig.DEFAULT_PERTURBATION,
    'symbols_per_slot': EXPERIMENT_SYMBOLS_PER_SLOT,
}
_SNR_SWEEP = {
    'avg_snr_db_grid': [10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 22.0, 24.0],
    'avg_sinr_db_list': [8.0, 9.0],
    'n_interferers_list': [1, 3, 8],
    'perturbation': AppConfig.DEFAULT_PERTURBATION,
    'symbols_per_slot': EXPERIMENT_SYMBOLS_PER_SLOT,
}
EXPERIMENT_DEFAULTS = {
    'effective-capacity': {
        'avg_snr_db_list': [0.0, 4.0, 8.0, 10.0],
        's_min': 1e-3,
        's_max': 10.0,
        's_points': 60,
        'symbols_per_slot': EXPERIMENT_SYMBOLS_PER_SLOT,
    },
    'delay-vs-epsilon': dict(_SINGLE_HOP_SCENARIOS, rate=0.85, w_max=300, w_step=5),
    'delay-vs-rate': dict(_SINGLE_HOP_SCENARIOS, epsilon=1e-6,
                          rate_grid=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 1.0, 1.2, 1.4]),
    'delay-vs-interferers': {
        'avg_snr_db': 15.0,
        'avg_sinr_db': 8.0,
        'epsilon': 1e-6,
        'rates': [1.8, 2.0, 2.2],
        'n_interferers_max': 8,
        'perturbation': AppConfig.DEFAULT_PERTURBATION,
        'symbols_per_slot': EXPERIMENT_SYMBOLS_PER_SLOT,
    },
    'maxrate-vs-snr': dict(_SNR_SWEEP, w=10, epsilon=1e-6),
    'avgcap-vs-snr': dict(_SNR_SWEEP),
    'validate': dict(_SINGLE_HOP_SCENARIOS, rate=0.85, w_max=150, w_step=5, hops=1,
                     slots=AppConfig.DESK_SLOTS),
}


def db_to_linear(value_db):
    """dB 轉線性功率比 (10^(dB/10))"""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    """線性功率比轉 dB"""
    return 10.0 * math.log10(value)


# 版本更新紀錄
UPDATE_LOG = """
=== 版本更新紀錄 ===
[v1.1.0]
1. [新增] 多跳 (multi-hop) 串接核心與模擬：
   - kernel_multi_hop 使用可驗證的尾端界限截斷。
   - 模擬器支援獨立通道的串接佇列。
2. [新增] validate 子命令：解析界限與模擬 CCDF 並列輸出 (含 99% 上信賴界)。
3. [優化] Mellin 級數改為自適應 k (16 → 4096)，必要時退回數值積分。

[v1.0.0]
1. [新增] 干擾通道 SINR 分佈、Mellin 轉換與延遲界限計算。
2. [新增] 效能容量 (effective capacity) 與平均容量。
3. [新增] 六種實驗 CSV 輸出與重現檢查 (check)。
"""
