# -*- coding: utf-8 -*-
import pytest

from channel import ChannelSpec, average_sinr
from config import linear_to_db
from workers import SweepRunner, SweepTask


def _tasks():
    specs = [ChannelSpec(10.0 * (i + 1), (2.0,)) for i in range(5)]
    return [SweepTask((i,), average_sinr, {'spec': spec}) for i, spec in reversed(list(enumerate(specs)))]


def test_results_sorted_by_key():
    result = SweepRunner(threads=1).run(_tasks())
    assert [key for key, _ in result.results] == [(i,) for i in range(5)]
    values = [value for _, value in result.results]
    assert values == sorted(values)
    assert result.errors == []


def test_errors_are_collected():
    tasks = _tasks() + [SweepTask((9,), linear_to_db, {'value': -1.0})]
    result = SweepRunner(threads=1).run(tasks)
    assert len(result.results) == 5
    assert len(result.errors) == 1
    assert result.errors[0].startswith('(9,): ValueError')


def test_progress_callback():
    seen = []
    SweepRunner(threads=1, progress_callback=lambda done, msg: seen.append(done)).run(_tasks())
    assert seen == [1, 2, 3, 4, 5]


def test_failures_keep_task():
    bad = SweepTask((9,), linear_to_db, {'value': -1.0})
    result = SweepRunner(threads=1).run(_tasks() + [bad])
    assert len(result.failures) == 1
    task, summary = result.failures[0]
    assert task is bad
    assert summary.startswith('ValueError')
    assert '\n' not in summary


@pytest.mark.slow
def test_pool_matches_serial():
    serial = SweepRunner(threads=1).run(_tasks())
    pooled = SweepRunner(threads=2).run(_tasks())
    assert pooled.results == serial.results
