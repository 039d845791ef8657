"""Core scheduling domain: tasks, VM fleets, ETC matrices, execution timelines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Task",
    "VmSpec",
    "Workload",
    "EtcMatrix",
    "Timeline",
    "build_etc",
    "build_timeline",
    "check_assignment",
]


@dataclass(frozen=True)
class Task:
    """One unit of work, sized in million instructions (MI)."""

    id: int
    length_mi: float

    def __post_init__(self) -> None:
        if not self.length_mi > 0:
            raise ValueError(f"task {self.id}: length_mi must be positive, got {self.length_mi}")


@dataclass(frozen=True)
class VmSpec:
    """A virtual machine's processing capacity in MIPS."""

    id: int
    mips: float

    def __post_init__(self) -> None:
        if not self.mips > 0:
            raise ValueError(f"vm {self.id}: mips must be positive, got {self.mips}")


@dataclass(frozen=True)
class Workload:
    """An ordered batch of independent tasks, all available at time zero."""

    tasks: tuple[Task, ...]
    source_label: str = "synthetic"

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(self.tasks))
        for index, task in enumerate(self.tasks):
            if task.id != index:
                raise ValueError(
                    f"task ids must be contiguous from 0: index {index} holds id {task.id}"
                )

    def __len__(self) -> int:
        return len(self.tasks)

    def lengths_mi(self) -> np.ndarray:
        return np.array([task.length_mi for task in self.tasks], dtype=float)


@dataclass(frozen=True)
class EtcMatrix:
    """Expected time to compute: entries[i][j] is task i's runtime on VM j, seconds."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.size == 0:
            raise ValueError("etc entries must form a non-empty 2-D table")
        if not np.all(np.isfinite(entries)) or np.any(entries <= 0):
            raise ValueError("etc entries must be finite and positive")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def rows(self) -> list[list[float]]:
        # Plain nested lists, cached: the sequential mapping loops index single
        # cells millions of times and ndarray scalar access is far slower.
        cached = self.__dict__.get("_rows")
        if cached is None:
            cached = self.entries.tolist()
            object.__setattr__(self, "_rows", cached)
        return cached


@dataclass(frozen=True)
class Timeline:
    """Entry/exit instants per task plus each VM's execution order.

    A VM runs its tasks back to back in ascending task id, starting at time 0;
    a task's exit minus entry is exactly its ETC on that VM.
    """

    entry_s: np.ndarray
    exit_s: np.ndarray
    vm_tasks: tuple[tuple[int, ...], ...]


def check_assignment(assignment: Sequence[int] | np.ndarray, n: int, m: int) -> np.ndarray:
    """Validate a task-to-VM map: length n, integer entries in [0, m)."""
    vm_of = np.asarray(assignment)
    if vm_of.size == 0:
        raise ValueError("invalid assignment: empty")
    if vm_of.ndim != 1 or vm_of.shape[0] != n:
        raise ValueError(f"invalid assignment: expected {n} entries, got shape {vm_of.shape}")
    if not np.issubdtype(vm_of.dtype, np.integer):
        raise ValueError("invalid assignment: VM indices must be integers")
    if np.any((vm_of < 0) | (vm_of >= m)):
        raise ValueError(f"invalid assignment: VM index outside [0, {m})")
    return vm_of.astype(np.int64, copy=False)


def build_etc(workload: Workload, vms: Sequence[VmSpec]) -> EtcMatrix:
    """ETC for every (task, VM) pair: length_mi / mips, in seconds."""
    if len(workload) == 0:
        raise ValueError("empty input: workload has no tasks")
    if len(vms) == 0:
        raise ValueError("empty input: fleet has no VMs")
    for index, vm in enumerate(vms):
        if vm.id != index:
            raise ValueError(f"vm ids must be contiguous from 0: index {index} holds id {vm.id}")
    mips = np.array([vm.mips for vm in vms], dtype=float)
    return EtcMatrix(workload.lengths_mi()[:, None] / mips[None, :])


def build_timeline(assignment: Sequence[int] | np.ndarray, etc: EtcMatrix) -> Timeline:
    """Chain each VM's tasks back to back in ascending task id."""
    vm_of = check_assignment(assignment, etc.n, etc.m)
    entry = np.empty(etc.n)
    exit_ = np.empty(etc.n)
    clock = [0.0] * etc.m
    per_vm: list[list[int]] = [[] for _ in range(etc.m)]
    rows = etc.rows()
    for i, j in enumerate(vm_of.tolist()):
        entry[i] = clock[j]
        clock[j] += rows[i][j]
        exit_[i] = clock[j]
        per_vm[j].append(i)
    return Timeline(entry, exit_, tuple(tuple(tasks) for tasks in per_vm))
