"""Experiment harness: replicated scheduler comparisons with seeds, stats, files."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from time import perf_counter
from typing import IO, Mapping, Sequence

import numpy as np
from scipy.special import betainc

from .baselines import min_min, minmin_seeded_hybrid, round_robin, seeded_random
from .domain import VmSpec, Workload, build_etc
from .metrics import MetricsReport, evaluate_assignment
from .optimizer import ConvergenceLog, OptimizerConfig, run, run_pure_gwo, run_pure_pso
from .workload import SyntheticSpec, generate_synthetic, ingest_trace

__all__ = [
    "ALGORITHMS",
    "SyntheticSource",
    "TraceSource",
    "ExperimentPlan",
    "RunRecord",
    "MetricStats",
    "AggregateResult",
    "TTestResult",
    "PairwiseComparison",
    "ExperimentResult",
    "RAW_CSV_HEADER",
    "TTEST_METRICS",
    "run_scheduler",
    "scheduler_seed",
    "workload_seed",
    "run_experiment",
    "overall_score",
    "paired_t_test",
    "write_raw_csv",
    "write_aggregates_json",
    "write_ttests_json",
    "write_convergence_csvs",
]

ALGORITHMS = ("hybrid", "pso", "gwo", "rr", "minmin", "minmin-hybrid", "random")
_ALGORITHM_INDEX = {name: i for i, name in enumerate(ALGORITHMS)}

RAW_CSV_HEADER = (
    "scheduler",
    "replicate",
    "seed",
    "makespan_s",
    "throughput_tps",
    "cv",
    "boi",
    "fitness",
    "wall_ms",
)

TTEST_METRICS = ("makespan_s", "throughput_tps", "cv")

# Disjoint tags so scheduler seeds and workload seeds never collide.
_SCHEDULER_STREAM = 1
_WORKLOAD_STREAM = 2


@dataclass(frozen=True)
class SyntheticSource:
    """Per-replicate synthetic workloads: same sizes, fresh lengths each replicate."""

    n: int = 800
    min_length_mi: float = 100.0
    max_length_mi: float = 1000.0


@dataclass(frozen=True)
class TraceSource:
    """A fixed trace workload shared by every replicate."""

    path: str
    limit: int = 800
    scale_mi_per_core_s: float = 1000.0


@dataclass(frozen=True)
class ExperimentPlan:
    workload_source: SyntheticSource | TraceSource
    fleet: tuple[VmSpec, ...]
    schedulers: tuple[str, ...]
    replicates: int = 30
    root_seed: int = 0
    config: OptimizerConfig = OptimizerConfig()

    def __post_init__(self) -> None:
        object.__setattr__(self, "fleet", tuple(self.fleet))
        object.__setattr__(self, "schedulers", tuple(self.schedulers))
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not self.schedulers:
            raise ValueError("plan needs at least one scheduler")
        for name in self.schedulers:
            if name not in _ALGORITHM_INDEX:
                raise ValueError(
                    f"unknown scheduler '{name}'; valid: {', '.join(ALGORITHMS)}"
                )
        if len(set(self.schedulers)) != len(self.schedulers):
            raise ValueError("duplicate scheduler in plan")
        if self.root_seed < 0:
            raise ValueError(f"root_seed must be non-negative, got {self.root_seed}")


@dataclass(frozen=True)
class RunRecord:
    """One (scheduler, replicate) cell of an experiment."""

    scheduler: str
    replicate: int
    seed: int
    makespan_s: float
    throughput_tps: float
    cv: float
    boi: float
    fitness: float
    wall_ms: float


@dataclass(frozen=True)
class MetricStats:
    mean: float
    std: float
    median: float


@dataclass(frozen=True)
class AggregateResult:
    scheduler: str
    makespan_s: MetricStats
    throughput_tps: MetricStats
    cv: MetricStats
    boi: MetricStats
    wall_ms_mean: float
    overall_score: float | None


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: int
    p_value: float
    significant_at_005: bool


@dataclass(frozen=True)
class PairwiseComparison:
    metric: str
    a: str
    b: str
    mean_diff: float  # mean(a - b): negative means a is lower on this metric
    ttest: TTestResult


@dataclass(frozen=True)
class ExperimentResult:
    plan: ExperimentPlan
    records: tuple[RunRecord, ...]
    aggregates: dict[str, AggregateResult]
    comparisons: tuple[PairwiseComparison, ...]
    convergence: dict[tuple[str, int], ConvergenceLog]


def scheduler_seed(root_seed: int, scheduler: str, replicate: int) -> int:
    """64-bit run seed, injective over (scheduler, replicate) within a plan."""
    return _derive_seed(root_seed, _SCHEDULER_STREAM, _ALGORITHM_INDEX[scheduler], replicate)


def workload_seed(root_seed: int, replicate: int) -> int:
    """64-bit workload seed: every scheduler sees the same workload per replicate."""
    return _derive_seed(root_seed, _WORKLOAD_STREAM, replicate)


def _derive_seed(*path: int) -> int:
    return int(np.random.SeedSequence(path).generate_state(1, dtype=np.uint64)[0])


def run_scheduler(
    name: str,
    workload: Workload,
    fleet: Sequence[VmSpec],
    config: OptimizerConfig,
) -> tuple[np.ndarray, MetricsReport, ConvergenceLog | None]:
    """Run one scheduler by registry name. Deterministic ones produce no log."""
    if name == "hybrid":
        return run(workload, fleet, config)
    if name == "pso":
        return run_pure_pso(workload, fleet, config)
    if name == "gwo":
        return run_pure_gwo(workload, fleet, config)
    if name == "minmin-hybrid":
        return minmin_seeded_hybrid(workload, fleet, config)
    if name in ("rr", "minmin", "random"):
        etc = build_etc(workload, fleet)
        if name == "rr":
            assignment = round_robin(workload, fleet)
        elif name == "minmin":
            assignment = min_min(workload, fleet)
        else:
            assignment = seeded_random(workload, fleet, config.seed)
        return assignment, evaluate_assignment(assignment, etc, config.resolve(etc).beta), None
    raise ValueError(f"unknown scheduler '{name}'; valid: {', '.join(ALGORITHMS)}")


def _execute_cell(
    args: tuple[str, int, int, Workload, tuple[VmSpec, ...], OptimizerConfig],
) -> tuple[RunRecord, ConvergenceLog | None]:
    name, replicate, seed, workload, fleet, config = args
    start = perf_counter()
    _, report, log = run_scheduler(name, workload, fleet, config)
    wall_ms = (perf_counter() - start) * 1000.0
    record = RunRecord(
        scheduler=name,
        replicate=replicate,
        seed=seed,
        makespan_s=report.makespan_s,
        throughput_tps=report.throughput_tps,
        cv=report.cv,
        boi=report.boi,
        fitness=report.fitness,
        wall_ms=wall_ms,
    )
    return record, log


def _replicate_workloads(plan: ExperimentPlan) -> list[Workload]:
    source = plan.workload_source
    if isinstance(source, TraceSource):
        fixed = ingest_trace(source.path, source.limit, source.scale_mi_per_core_s)
        return [fixed] * plan.replicates
    return [
        generate_synthetic(
            SyntheticSpec(
                source.n,
                source.min_length_mi,
                source.max_length_mi,
                workload_seed(plan.root_seed, r),
            )
        )
        for r in range(plan.replicates)
    ]


def run_experiment(plan: ExperimentPlan, jobs: int = 1) -> ExperimentResult:
    """Run every (scheduler, replicate) cell, aggregate, and t-test all pairs.

    Replicate r of scheduler s is seeded from (root_seed, s, r). Cells are
    independent, so jobs > 1 spreads them over worker processes; results are
    assembled in plan order either way, making output independent of
    completion order.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    workloads = _replicate_workloads(plan)
    cells = [
        (
            name,
            r,
            scheduler_seed(plan.root_seed, name, r),
            workloads[r],
            plan.fleet,
            replace(plan.config, seed=scheduler_seed(plan.root_seed, name, r)),
        )
        for name in plan.schedulers
        for r in range(plan.replicates)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_execute_cell, cells))
    else:
        outcomes = [_execute_cell(cell) for cell in cells]

    records: list[RunRecord] = []
    convergence: dict[tuple[str, int], ConvergenceLog] = {}
    for record, log in outcomes:
        records.append(record)
        if log is not None:
            convergence[(record.scheduler, record.replicate)] = log

    aggregates = _aggregate(plan, records)
    comparisons = _compare_all_pairs(plan, records)
    return ExperimentResult(plan, tuple(records), aggregates, tuple(comparisons), convergence)


def _metric_arrays(records: Sequence[RunRecord], name: str) -> dict[str, np.ndarray]:
    by_scheduler: dict[str, list[float]] = {}
    for record in records:
        by_scheduler.setdefault(record.scheduler, []).append(getattr(record, name))
    return {s: np.asarray(vals) for s, vals in by_scheduler.items()}


def _aggregate(plan: ExperimentPlan, records: Sequence[RunRecord]) -> dict[str, AggregateResult]:
    def stats(values: np.ndarray) -> MetricStats:
        # population std: with one replicate the spread is identically zero
        return MetricStats(float(values.mean()), float(values.std()), float(np.median(values)))

    per_metric = {name: _metric_arrays(records, name) for name in RAW_CSV_HEADER[3:]}
    scores: dict[str, float | None] = {name: None for name in plan.schedulers}
    if len(plan.schedulers) >= 2:
        means = {
            name: {
                "makespan_s": float(per_metric["makespan_s"][name].mean()),
                "throughput_tps": float(per_metric["throughput_tps"][name].mean()),
                "cv": float(per_metric["cv"][name].mean()),
            }
            for name in plan.schedulers
        }
        scores = dict(overall_score(means))
    return {
        name: AggregateResult(
            scheduler=name,
            makespan_s=stats(per_metric["makespan_s"][name]),
            throughput_tps=stats(per_metric["throughput_tps"][name]),
            cv=stats(per_metric["cv"][name]),
            boi=stats(per_metric["boi"][name]),
            wall_ms_mean=float(per_metric["wall_ms"][name].mean()),
            overall_score=scores[name],
        )
        for name in plan.schedulers
    }


def _compare_all_pairs(
    plan: ExperimentPlan, records: Sequence[RunRecord]
) -> list[PairwiseComparison]:
    if plan.replicates < 2 or len(plan.schedulers) < 2:
        return []
    comparisons = []
    for metric in TTEST_METRICS:
        arrays = _metric_arrays(records, metric)
        for i, a in enumerate(plan.schedulers):
            for b in plan.schedulers[i + 1 :]:
                diff = arrays[a] - arrays[b]
                comparisons.append(
                    PairwiseComparison(
                        metric=metric,
                        a=a,
                        b=b,
                        mean_diff=float(diff.mean()),
                        ttest=paired_t_test(arrays[a], arrays[b]),
                    )
                )
    return comparisons


# Metrics where larger values are better; all others count inverted.
_HIGHER_IS_BETTER = frozenset({"throughput_tps"})
_SCORE_METRICS = ("makespan_s", "throughput_tps", "cv", "wall_ms")
_DEFAULT_WEIGHTS = {"makespan_s": 1.0 / 3.0, "throughput_tps": 1.0 / 3.0, "cv": 1.0 / 3.0}


def overall_score(
    metrics_by_scheduler: Mapping[str, Mapping[str, float]],
    weights: Mapping[str, float] | None = None,
) -> dict[str, float]:
    """Composite [0, 1] score from min-max normalized metrics across schedulers.

    Defaults weight makespan, throughput and CV at 1/3 each; wall time joins
    only if given a weight explicitly. A degenerate metric (all schedulers
    equal) contributes its full weight to every scheduler. Oriented so that
    dominating every metric scores 1.0 and being dominated scores 0.0; affine
    rescaling of any single metric across all schedulers changes nothing.
    """
    names = list(metrics_by_scheduler)
    if len(names) < 2:
        raise ValueError("normalization undefined: need at least two schedulers")
    weights = dict(_DEFAULT_WEIGHTS if weights is None else weights)
    for metric in weights:
        if metric not in _SCORE_METRICS:
            raise ValueError(f"unknown metric '{metric}'; valid: {', '.join(_SCORE_METRICS)}")
    total_weight = sum(weights.values())
    if not total_weight > 0:
        raise ValueError("weights must sum to a positive value")

    scores = {name: 0.0 for name in names}
    for metric, weight in weights.items():
        values = {name: float(metrics_by_scheduler[name][metric]) for name in names}
        lo, hi = min(values.values()), max(values.values())
        for name in names:
            if hi == lo:
                oriented = 1.0
            else:
                norm = (values[name] - lo) / (hi - lo)
                oriented = norm if metric in _HIGHER_IS_BETTER else 1.0 - norm
            scores[name] += weight * oriented
    return {name: score / total_weight for name, score in scores.items()}


def paired_t_test(a: Sequence[float] | np.ndarray, b: Sequence[float] | np.ndarray) -> TTestResult:
    """Two-sided paired t-test on per-replicate differences d = a - b.

    t = mean(d) / (sd(d) / sqrt(R)) with the sample standard deviation
    (R - 1 denominator) and R - 1 degrees of freedom. The p-value comes from
    the exact t-distribution CDF via the regularized incomplete beta, not a
    normal approximation. Degenerate zero-spread differences: p = 1 when the
    mean difference is 0, else p = 0.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if a_arr.shape != b_arr.shape or a_arr.ndim != 1:
        raise ValueError("paired t-test needs two equal-length 1-D samples")
    n = a_arr.shape[0]
    if n < 2:
        raise ValueError(f"paired t-test needs at least 2 pairs, got {n}")
    diff = a_arr - b_arr
    mean = float(diff.mean())
    sd = float(diff.std(ddof=1))
    df = n - 1
    if sd == 0:
        if mean == 0:
            t_stat, p_value = 0.0, 1.0
        else:
            t_stat, p_value = math.copysign(math.inf, mean), 0.0
    else:
        t_stat = mean / (sd / math.sqrt(n))
        p_value = float(betainc(df / 2.0, 0.5, df / (df + t_stat * t_stat)))
    return TTestResult(
        t_statistic=t_stat,
        degrees_of_freedom=df,
        p_value=p_value,
        significant_at_005=p_value < 0.05,
    )


def write_raw_csv(records: Sequence[RunRecord], fh: IO[str]) -> None:
    """One row per (scheduler, replicate), in experiment order."""
    writer = csv.writer(fh)
    writer.writerow(RAW_CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.scheduler,
                r.replicate,
                r.seed,
                r.makespan_s,
                r.throughput_tps,
                r.cv,
                r.boi,
                r.fitness,
                r.wall_ms,
            ]
        )


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)  # 'inf'/'-inf'/'nan': strict JSON has no literals for these
    return value


def aggregates_payload(result: ExperimentResult) -> dict:
    return {
        "replicates": result.plan.replicates,
        "root_seed": result.plan.root_seed,
        "schedulers": {
            agg.scheduler: {
                "makespan_s": _stats_payload(agg.makespan_s),
                "throughput_tps": _stats_payload(agg.throughput_tps),
                "cv": _stats_payload(agg.cv),
                "boi": _stats_payload(agg.boi),
                "wall_ms_mean": _jsonable(agg.wall_ms_mean),
                "overall_score": _jsonable(agg.overall_score),
            }
            for agg in result.aggregates.values()
        },
    }


def _stats_payload(stats: MetricStats) -> dict:
    return {
        "mean": _jsonable(stats.mean),
        "std": _jsonable(stats.std),
        "median": _jsonable(stats.median),
    }


def ttests_payload(result: ExperimentResult) -> dict:
    return {
        "metrics": list(TTEST_METRICS),
        "significance_level": 0.05,
        "comparisons": [
            {
                "metric": c.metric,
                "a": c.a,
                "b": c.b,
                "mean_diff": _jsonable(c.mean_diff),
                "t_statistic": _jsonable(c.ttest.t_statistic),
                "degrees_of_freedom": c.ttest.degrees_of_freedom,
                "p_value": _jsonable(c.ttest.p_value),
                "significant_at_005": c.ttest.significant_at_005,
            }
            for c in result.comparisons
        ],
    }


def write_aggregates_json(result: ExperimentResult, fh: IO[str]) -> None:
    json.dump(aggregates_payload(result), fh, indent=2, sort_keys=True)
    fh.write("\n")


def write_ttests_json(result: ExperimentResult, fh: IO[str]) -> None:
    json.dump(ttests_payload(result), fh, indent=2, sort_keys=True)
    fh.write("\n")


def write_convergence_csvs(result: ExperimentResult, directory: str | Path) -> list[Path]:
    """One CSV per (scheduler, replicate) that produced an iteration log."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for (scheduler, replicate), log in sorted(result.convergence.items()):
        path = directory / f"{scheduler}_rep{replicate:03d}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            log.write_csv(fh)
        written.append(path)
    return written
