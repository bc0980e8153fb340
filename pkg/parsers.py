# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 資料解析模組
包含 JSON 設定檔解析 (實驗參數) 與結果 CSV 的讀寫
"""
import io
import re
import json
import logging
import math
from typing import Dict, Tuple

import pandas as pd

from config import EXPERIMENT_DEFAULTS, EXPERIMENT_KINDS
from errors import ConfigError

try:
    from natsort import natsorted, ns
    HAS_NATSORT = True
except ImportError:
    HAS_NATSORT = False

METADATA_PREFIX = '# '


def natural_keys(text):
    """
    Fallback for natural sorting if natsort is missing.
    """
    try:
        text = str(text)
        return tuple([int(c) if c.isdigit() else c.lower() for c in re.split(r'(\d+)', text)])
    except Exception:
        return (str(text),)


def sort_naturally(items):
    """自然排序 (run2.csv 排在 run10.csv 之前)"""
    if HAS_NATSORT:
        return natsorted(items, alg=ns.IGNORECASE)
    return sorted(items, key=natural_keys)


# ============================================================
# JSON 設定檔
# ============================================================

def parse_json_config(text) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON 語法錯誤: {e.msg}", line=e.lineno) from e
    if not isinstance(data, dict):
        raise ConfigError("設定檔最外層必須是物件 (mapping)")
    return data


def _find_line(text, key):
    if not text:
        return None
    for i, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return i
    return None


def _number(mapping, key, kind=float, text=None, minimum=None):
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"必須是數值 (got {value!r})", key=key, line=_find_line(text, key))
    if kind is int and int(value) != value:
        raise ConfigError(f"必須是整數 (got {value!r})", key=key, line=_find_line(text, key))
    if not math.isfinite(value):
        raise ConfigError(f"必須是有限值 (got {value!r})", key=key, line=_find_line(text, key))
    if minimum is not None and value < minimum:
        raise ConfigError(f"必須 >= {minimum} (got {value!r})", key=key, line=_find_line(text, key))
    return kind(value)


def _number_list(mapping, key, kind=float, text=None):
    value = mapping[key]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"必須是非空陣列 (got {value!r})", key=key, line=_find_line(text, key))
    return [_number({key: v}, key, kind, text) for v in value]


def _reject_unknown(mapping, allowed, text=None):
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"未知的設定鍵 (允許: {', '.join(sorted(allowed))})",
                              key=key, line=_find_line(text, key))


def experiment_params(kind, mapping=None, text=None) -> dict:
    """
    合併實驗預設值與設定檔內容並檢查型別
    Returns:
        dict: 完整的實驗參數
    """
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"未知的實驗種類 '{kind}' (可用: {', '.join(EXPERIMENT_KINDS)})")
    defaults = EXPERIMENT_DEFAULTS[kind]
    mapping = dict(mapping or {})
    _reject_unknown(mapping, defaults.keys(), text)

    params = {}
    for key, default in defaults.items():
        if key not in mapping:
            params[key] = list(default) if isinstance(default, list) else default
            continue
        if isinstance(default, list):
            kind_of = int if all(isinstance(v, int) for v in default) else float
            params[key] = _number_list(mapping, key, kind_of, text)
        elif isinstance(default, int):
            params[key] = _number(mapping, key, int, text, minimum=0)
        else:
            params[key] = _number(mapping, key, float, text)

    for key in ('epsilon',):
        if key in params and not (0 < params[key] <= 1):
            raise ConfigError(f"必須在 (0, 1] (got {params[key]})", key=key, line=_find_line(text, key))
    for key in ('rate', 'perturbation'):
        if key in params and params[key] < 0:
            raise ConfigError(f"必須 >= 0 (got {params[key]})", key=key, line=_find_line(text, key))
    if 'symbols_per_slot' in params and not params['symbols_per_slot'] > 0:
        raise ConfigError("必須 > 0", key='symbols_per_slot', line=_find_line(text, 'symbols_per_slot'))
    if 'w_step' in params and params['w_step'] < 1:
        raise ConfigError("必須 >= 1", key='w_step', line=_find_line(text, 'w_step'))
    if 'hops' in params and params['hops'] < 1:
        raise ConfigError("必須 >= 1", key='hops', line=_find_line(text, 'hops'))
    if 's_points' in params and params['s_points'] < 2:
        raise ConfigError("必須 >= 2", key='s_points', line=_find_line(text, 's_points'))
    if 's_min' in params and not (0 < params['s_min'] < params['s_max']):
        raise ConfigError("需要 0 < s_min < s_max", key='s_min', line=_find_line(text, 's_min'))
    return params


def load_experiment_config(kind, filepath=None) -> dict:
    """讀取實驗設定檔 (可省略，使用預設值)"""
    if filepath is None:
        return experiment_params(kind)
    try:
        with open(filepath, 'r', encoding='utf-8-sig') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"無法讀取設定檔 {filepath}: {e}") from e
    return experiment_params(kind, parse_json_config(text), text)


# ============================================================
# 結果 CSV (# 開頭的中繼資料 + 表格)
# ============================================================

def _format_metadata_value(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return json.dumps(list(value))
    return str(value)


def write_dataset(filepath, metadata: Dict[str, object], frame: pd.DataFrame):
    """寫入結果 CSV：每個中繼資料一行 '# key: value'，接著是 pandas 表格"""
    text = dataset_to_text(metadata, frame)
    with open(filepath, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logging.info(f"已寫入 {filepath} ({len(frame)} 列)")


def dataset_to_text(metadata: Dict[str, object], frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    for key, value in metadata.items():
        buffer.write(f"{METADATA_PREFIX}{key}: {_format_metadata_value(value)}\n")
    frame.to_csv(buffer, index=False, float_format='%.17g', lineterminator='\n')
    return buffer.getvalue()


def read_dataset(filepath) -> Tuple[Dict[str, str], pd.DataFrame]:
    """讀取結果 CSV，回傳 (中繼資料, DataFrame)；中繼資料值保留為字串"""
    try:
        with open(filepath, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"無法讀取資料檔 {filepath}: {e}") from e
    return dataset_from_text(text)


def dataset_from_text(text) -> Tuple[Dict[str, str], pd.DataFrame]:
    metadata = {}
    lines = text.split('\n')
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith('#'):
            body_start = i
            break
        content = line[len(METADATA_PREFIX):] if line.startswith(METADATA_PREFIX) else line[1:]
        key, sep, value = content.partition(': ')
        if not sep:
            raise ConfigError(f"中繼資料格式錯誤: {line!r}", line=i + 1)
        metadata[key] = value
    else:
        body_start = len(lines)
    body = '\n'.join(lines[body_start:])
    if not body.strip():
        raise ConfigError("資料檔缺少表格內容", line=body_start + 1)
    frame = pd.read_csv(io.StringIO(body), float_precision='round_trip')
    return metadata, frame
