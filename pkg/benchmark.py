import time
import os
import sys
import psutil
import numpy as np

# Add current directory to path
sys.path.append(os.getcwd())

from bounds import ArrivalSpec, delay_bound
from channel import ScenarioSpec, scenario_to_channel
from config import AppConfig, db_to_linear
from mellin import MellinParams, clear_cache, mellin_service
from simulator import SimConfig, run_queue

# 目標 (秒)
TARGETS = {
    'mellin_sweep': 10.0,
    'delay_bound': 30.0,
    'simulation_1e6': 30.0,
}
MEMORY_TARGET_MB = 500


def _scenario():
    scenario = ScenarioSpec(db_to_linear(15.0), db_to_linear(4.0), 5, AppConfig.DEFAULT_PERTURBATION, 1.0)
    return scenario_to_channel(scenario)


def bench_mellin_sweep(spec):
    clear_cache()
    for s in np.linspace(-1.0, 0.95, 40):
        mellin_service(spec, MellinParams(s=float(s)))


def bench_delay_bound(spec):
    clear_cache()
    delay_bound(ArrivalSpec(0.85), spec, 1, 1e-6)


def bench_simulation(spec):
    run_queue(SimConfig(spec, ArrivalSpec(0.85), slots=1_000_000, seed=1, delay_grid=tuple(range(0, 151, 5))))


def run_benchmark():
    print(f"Starting Benchmark for {AppConfig.TITLE}")
    spec = _scenario()
    process = psutil.Process(os.getpid())
    mem_before = process.memory_info().rss / 1024 / 1024

    durations = {}
    for name, func in (('mellin_sweep', bench_mellin_sweep),
                       ('delay_bound', bench_delay_bound),
                       ('simulation_1e6', bench_simulation)):
        start_time = time.time()
        func(spec)
        durations[name] = time.time() - start_time

    mem_after = process.memory_info().rss / 1024 / 1024
    mem_diff = mem_after - mem_before

    print(f"\nBenchmark Results:")
    for name, duration in durations.items():
        print(f"{name}: {duration:.2f} seconds (Target: < {TARGETS[name]:.0f}s)")
    print(f"Memory Increase: {mem_diff:.2f} MB (Target: < {MEMORY_TARGET_MB}MB)")

    if all(durations[k] < TARGETS[k] for k in TARGETS) and mem_diff < MEMORY_TARGET_MB:
        print("PASS: Performance is within acceptable limits.")
    else:
        print("FAIL: Performance targets exceeded.")


if __name__ == "__main__":
    run_benchmark()
