"""Reference schedulers the optimizer is judged against."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .domain import VmSpec, Workload, build_etc
from .metrics import MetricsReport
from .optimizer import ConvergenceLog, OptimizerConfig, run

__all__ = ["round_robin", "seeded_random", "min_min", "minmin_seeded_hybrid"]


def round_robin(workload: Workload, vms: Sequence[VmSpec]) -> np.ndarray:
    """vm_of[i] = i mod m."""
    _check(workload, vms)
    return np.arange(len(workload), dtype=np.int64) % len(vms)


def seeded_random(workload: Workload, vms: Sequence[VmSpec], seed: int) -> np.ndarray:
    """Uniform random VM per task, reproducible per seed."""
    _check(workload, vms)
    rng = np.random.default_rng(seed)
    return rng.integers(0, len(vms), len(workload), dtype=np.int64)


def min_min(workload: Workload, vms: Sequence[VmSpec]) -> np.ndarray:
    """Classical Min-Min list scheduling.

    Repeatedly commit the (task, VM) pair with the earliest completion time,
    where completion time is the VM's ready time plus the task's ETC. Ties go
    to the lowest task id, then the lowest VM id.
    """
    etc = build_etc(workload, vms)
    remaining = np.arange(etc.n)
    ready = np.zeros(etc.m)
    out = np.empty(etc.n, dtype=np.int64)
    while remaining.size:
        completion = ready + etc.entries[remaining]  # (k, m)
        # argmin returns the first minimum in row-major order, which is
        # exactly lowest task id first, then lowest VM id
        flat = int(np.argmin(completion))
        row, vm = divmod(flat, etc.m)
        task = int(remaining[row])
        out[task] = vm
        ready[vm] = completion[row, vm]
        remaining = np.delete(remaining, row)
    return out


def minmin_seeded_hybrid(
    workload: Workload, vms: Sequence[VmSpec], config: OptimizerConfig
) -> tuple[np.ndarray, MetricsReport, ConvergenceLog]:
    """Hybrid run with one particle's start decoding exactly to the Min-Min plan.

    The seed position is vm + 0.5 per coordinate: floor(|vm + 0.5|) mod m == vm
    for vm in [0, m), so the plain decode inverts it. All other particles start
    at random, and the run proceeds exactly like the standard optimizer.
    """
    plan = min_min(workload, vms)
    seed_position = plan.astype(float) + 0.5
    return run(workload, vms, config, seeded_positions=[seed_position])


def _check(workload: Workload, vms: Sequence[VmSpec]) -> None:
    if len(workload) == 0:
        raise ValueError("empty input: workload has no tasks")
    if len(vms) == 0:
        raise ValueError("empty input: fleet has no VMs")
