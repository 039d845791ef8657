"""Continuous-to-discrete decoding and capacity-aware task mapping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import EtcMatrix

__all__ = [
    "CapacityPolicy",
    "position_bound",
    "clamp_position",
    "decode_position",
    "capacity_threshold",
    "vm_aware_map",
    "map_with_loads",
]


def position_bound(m: int) -> float:
    """Half-width of the position box: ten decode periods of length m."""
    return 10.0 * m


def clamp_position(coords: Sequence[float] | np.ndarray, m: int) -> np.ndarray:
    bound = position_bound(m)
    return np.clip(np.asarray(coords, dtype=float), -bound, bound)


@dataclass(frozen=True)
class CapacityPolicy:
    """Headroom multiplier over each VM's proportional share of the total load."""

    headroom_theta: float = 1.2

    def __post_init__(self) -> None:
        if not self.headroom_theta >= 1:
            raise ValueError(f"headroom_theta must be >= 1, got {self.headroom_theta}")


def decode_position(position: Sequence[float] | np.ndarray, m: int) -> np.ndarray:
    """Map continuous coordinates to VM indices: floor(|x_i|) mod m."""
    if m < 1:
        raise ValueError(f"need at least one VM, got m={m}")
    coords = np.asarray(position, dtype=float)
    if not np.all(np.isfinite(coords)):
        raise ValueError("non-finite coordinate in position")
    # mod in float space: floor(|x|) may exceed the int64 range for wild inputs
    return np.mod(np.floor(np.abs(coords)), m).astype(np.int64)


def capacity_threshold(etc: EtcMatrix, policy: CapacityPolicy) -> float:
    """Per-VM load ceiling: theta times the proportional share of the total work.

    Splitting the total MI in proportion to MIPS busies every VM for the same
    time, so the share is a single number for the whole fleet. It is recovered
    from the ETC columns alone: share = 1 / sum_j (1 / column_sum_j), since
    column j sums to total_mi / mips_j.
    """
    column_sums = etc.entries.sum(axis=0)
    share = 1.0 / float(np.sum(1.0 / column_sums))
    return policy.headroom_theta * share


def vm_aware_map(
    position: Sequence[float] | np.ndarray,
    etc: EtcMatrix,
    policy: CapacityPolicy = CapacityPolicy(),
) -> np.ndarray:
    """Decode a position, rerouting tasks that would breach a VM's ceiling.

    Tasks are placed in ascending id. Each keeps its decoded VM unless that
    VM's load plus the task's ETC would exceed the threshold; the task then
    goes to the currently least-loaded VM (ties to the lowest index). The
    fallback VM is used even if it is itself above threshold: every task must
    land somewhere.
    """
    assignment, _ = map_with_loads(position, etc, capacity_threshold(etc, policy))
    return assignment


def map_with_loads(
    position: Sequence[float] | np.ndarray,
    etc: EtcMatrix,
    threshold: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Capacity-aware mapping that also returns the accumulated per-VM loads."""
    m = etc.m
    raw = decode_position(position, m).tolist()
    rows = etc.rows()
    loads = [0.0] * m
    out = [0] * len(raw)
    for i, j in enumerate(raw):
        cost = rows[i][j]
        if loads[j] + cost > threshold:
            j = loads.index(min(loads))
            cost = rows[i][j]
        loads[j] += cost
        out[i] = j
    return np.array(out, dtype=np.int64), np.array(loads)
