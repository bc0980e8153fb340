# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 背景工作模組
包含參數掃描的平行執行器 (multiprocessing.Pool)
"""
import logging
import traceback
import multiprocessing
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple


@dataclass(frozen=True)
class SweepTask:
    """單一掃描點：key 決定結果排序，func 必須是模組層級函式 (可 pickle)"""
    key: Tuple
    func: Callable
    kwargs: Dict = field(default_factory=dict)


@dataclass
class SweepResult:
    """
    依 key 排序後的結果與錯誤訊息
    failures 保留失敗點的 (task, 錯誤摘要)，供呼叫端補上錯誤列
    """
    results: List[Tuple[Tuple, object]]
    errors: List[str]
    failures: List[Tuple[SweepTask, str]] = field(default_factory=list)


def _execute(indexed_task):
    index, task = indexed_task
    try:
        return index, task.func(**task.kwargs), None, None
    except Exception as e:
        lines = str(e).splitlines()
        return index, None, f"{type(e).__name__}: {lines[0] if lines else ''}", traceback.format_exc()


class SweepRunner:
    """
    參數掃描執行器
    threads <= 1 時在目前行程依序執行，否則使用 multiprocessing.Pool；
    各點互不共享狀態，結果依 key 合併，與完成順序無關。
    """

    def __init__(self, threads=1, progress_callback: Optional[Callable[[int, str], None]] = None):
        self.threads = max(int(threads or 1), 1)
        self.progress_callback = progress_callback

    def run(self, tasks: List[SweepTask]) -> SweepResult:
        outputs = {}
        failed = {}
        total = len(tasks)
        indexed = list(enumerate(tasks))

        def collect(done, item):
            index, value, summary, trace = item
            task = tasks[index]
            if summary is not None:
                failed[index] = summary
                logging.error(f"掃描點失敗 {task.key}: {summary}\n{trace}")
            else:
                outputs[index] = value
            if self.progress_callback:
                self.progress_callback(done, f"完成 {done}/{total}: {task.key}")

        if self.threads == 1 or total <= 1:
            for done, item in enumerate(indexed, start=1):
                collect(done, _execute(item))
        else:
            with multiprocessing.Pool(processes=min(self.threads, total)) as pool:
                for done, item in enumerate(pool.imap_unordered(_execute, indexed), start=1):
                    collect(done, item)

        ordered = sorted(outputs.items(), key=lambda kv: tasks[kv[0]].key)
        failures = sorted(((tasks[i], summary) for i, summary in failed.items()), key=lambda kv: kv[0].key)
        return SweepResult([(tasks[i].key, value) for i, value in ordered],
                           [f"{task.key}: {summary}" for task, summary in failures],
                           failures)
