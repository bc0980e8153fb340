# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 例外與警告類型模組
"""


class DelayAnalyzerError(Exception):
    """本專案所有例外的共同基底"""


class DomainError(DelayAnalyzerError, ValueError):
    """參數超出定義域 (例如 x <= 0、級數要求 s < 1)"""


class GammaOverflowError(DelayAnalyzerError, OverflowError):
    """不完全 Gamma 函數結果超出浮點範圍，請改用 log 版本"""


class QuadratureError(DelayAnalyzerError, RuntimeError):
    """數值積分未收斂"""

    def __init__(self, message, value=None, abs_error=None):
        super().__init__(message)
        self.value = value
        self.abs_error = abs_error


class DuplicateRatioError(DelayAnalyzerError, ValueError):
    """兩個干擾源的功率比 a_i 完全相同，部分分式不存在"""


class InfeasibleScenarioError(DelayAnalyzerError, ValueError):
    """情境不可行 (例如 γ̄ > γ_∅)"""


class UnstableQueueError(DelayAnalyzerError, ArithmeticError):
    """在給定 s 下穩定條件不成立"""


class TruncationError(DelayAnalyzerError, RuntimeError):
    """多跳核心級數超過項數上限仍未達尾端容忍度"""


class SimulationUnstableError(DelayAnalyzerError, RuntimeError):
    """模擬中尚未離開的時槽數超過上限 (佇列不穩定)"""

    def __init__(self, message, slot=None, in_flight=None):
        super().__init__(message)
        self.slot = slot
        self.in_flight = in_flight


class ConfigError(DelayAnalyzerError, ValueError):
    """設定檔驗證錯誤，附帶欄位與行號"""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")
        self.key = key
        self.line = line


class IllConditionedWarning(RuntimeWarning):
    """部分分式權重病態 (a_i 過於接近)"""


class TruncationWarning(RuntimeWarning):
    """級數截斷未達目標括號寬度"""
