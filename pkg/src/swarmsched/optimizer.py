"""Hybrid swarm optimizer for task placement.

Each member of the population is simultaneously a PSO particle (inertia plus
personal/global attraction) and a grey-wolf follower (guided by the three best
solutions found so far). A blend weight decaying linearly across iterations
shifts influence from wolf-pack guidance toward velocity refinement. When the
swarm collapses below a diversity floor, a Gaussian mutation reinflates it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import IO, ClassVar, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from .domain import EtcMatrix, VmSpec, Workload, build_etc
from .encoding import (
    CapacityPolicy,
    capacity_threshold,
    clamp_position,
    map_with_loads,
    position_bound,
)
from .metrics import MetricsReport, default_beta, evaluate_assignment

__all__ = [
    "OptimizerConfig",
    "Particle",
    "SwarmState",
    "IterationStats",
    "ConvergenceLog",
    "blend_weight",
    "gwo_coefficient_a",
    "velocity_update",
    "gwo_guidance",
    "combined_update",
    "swarm_diversity",
    "mutation_sigma",
    "inject_mutation",
    "initialize_swarm",
    "step",
    "run",
    "run_pure_pso",
    "run_pure_gwo",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for one optimizer run.

    v_max, d_min, mutation_sigma_scale and beta default to None and are filled
    in against a concrete problem by resolve(): their natural scales depend on
    the VM count m and task count n.
    """

    swarm_size: int = 20
    max_iterations: int = 50
    lambda_max: float = 0.9
    lambda_min: float = 0.4
    inertia: float = 0.7
    c1: float = 1.5
    c2: float = 1.5
    v_max: float | None = None
    d_min: float | None = None
    mutation_sigma_scale: float | None = None
    beta: float | None = None
    headroom_theta: float = 1.2
    diversity_control: bool = True
    blend_weight_on_pso: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be >= 2, got {self.swarm_size}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0 <= self.lambda_min <= self.lambda_max <= 1:
            raise ValueError(
                f"need 0 <= lambda_min <= lambda_max <= 1, got "
                f"({self.lambda_min}, {self.lambda_max})"
            )
        if self.inertia < 0 or self.c1 < 0 or self.c2 < 0:
            raise ValueError("inertia, c1 and c2 must be non-negative")
        if self.v_max is not None and not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")
        if self.d_min is not None and self.d_min < 0:
            raise ValueError(f"d_min must be non-negative, got {self.d_min}")
        if self.mutation_sigma_scale is not None and not self.mutation_sigma_scale > 0:
            raise ValueError("mutation_sigma_scale must be positive")
        if self.beta is not None and self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed}")

    def resolve(self, etc: EtcMatrix) -> "OptimizerConfig":
        """Materialize instance-dependent defaults for a concrete ETC matrix."""
        n, m = etc.n, etc.m
        return replace(
            self,
            v_max=self.v_max if self.v_max is not None else 0.5 * (2.0 * position_bound(m)),
            d_min=self.d_min if self.d_min is not None else 0.05 * m * math.sqrt(n),
            mutation_sigma_scale=(
                self.mutation_sigma_scale if self.mutation_sigma_scale is not None else 0.1 * m
            ),
            beta=self.beta if self.beta is not None else default_beta(etc),
        )


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    personal_best_position: np.ndarray
    personal_best_fitness: float


@dataclass
class SwarmState:
    """Mutable population state; one optimizer run owns exactly one.

    alpha, beta_wolf and delta are the three lowest-fitness positions
    evaluated so far, maintained by the classic cascade; alpha always
    coincides with the global best.
    """

    particles: list[Particle]
    global_best_position: np.ndarray
    global_best_fitness: float
    global_best_assignment: np.ndarray
    alpha: np.ndarray
    beta_wolf: np.ndarray
    delta: np.ndarray
    alpha_fitness: float = math.inf
    beta_fitness: float = math.inf
    delta_fitness: float = math.inf
    iteration: int = 0


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    best_fitness: float
    mean_fitness: float
    diversity: float
    blend_weight: float
    gwo_a: float
    mutated: bool


@dataclass
class ConvergenceLog:
    """Per-iteration trace of one run; serializes to CSV."""

    rows: list[IterationStats] = field(default_factory=list)

    CSV_HEADER: ClassVar[tuple[str, ...]] = (
        "iteration",
        "best_fitness",
        "mean_fitness",
        "diversity",
        "lambda",
        "a",
        "mutated",
    )

    def best_fitness_series(self) -> list[float]:
        return [row.best_fitness for row in self.rows]

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh)
        writer.writerow(self.CSV_HEADER)
        for row in self.rows:
            writer.writerow(
                [
                    row.iteration,
                    row.best_fitness,
                    row.mean_fitness,
                    row.diversity,
                    row.blend_weight,
                    row.gwo_a,
                    int(row.mutated),
                ]
            )


def blend_weight(t: int, config: OptimizerConfig) -> float:
    """Weight on the wolf-guidance term, decaying linearly across iterations."""
    if not 0 <= t <= config.max_iterations:
        raise ValueError(f"iteration {t} outside [0, {config.max_iterations}]")
    return config.lambda_max - (config.lambda_max - config.lambda_min) * (
        t / config.max_iterations
    )


def gwo_coefficient_a(t: int, config: OptimizerConfig) -> float:
    """Wolf step-size coefficient, decaying linearly from 2 to 0."""
    if not 0 <= t <= config.max_iterations:
        raise ValueError(f"iteration {t} outside [0, {config.max_iterations}]")
    return 2.0 * (1.0 - t / config.max_iterations)


def velocity_update(
    particle: Particle,
    global_best: np.ndarray,
    config: OptimizerConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Inertia plus stochastic pulls toward personal and global bests, clamped."""
    n = particle.position.shape[0]
    r1 = rng.random(n)
    r2 = rng.random(n)
    velocity = (
        config.inertia * particle.velocity
        + config.c1 * r1 * (particle.personal_best_position - particle.position)
        + config.c2 * r2 * (global_best - particle.position)
    )
    return np.clip(velocity, -config.v_max, config.v_max)


def gwo_guidance(
    position: np.ndarray,
    alpha: np.ndarray,
    beta_wolf: np.ndarray,
    delta: np.ndarray,
    a: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Mean of the three leader-guided points, fresh draws per leader and component."""
    if a < 0:
        raise ValueError(f"a must be non-negative, got {a}")
    leaders = np.stack([alpha, beta_wolf, delta])
    a_coef = 2.0 * a * rng.random(leaders.shape) - a  # in [-a, a]
    c_coef = 2.0 * rng.random(leaders.shape)  # in [0, 2]
    distance = np.abs(c_coef * leaders - position)
    return (leaders - a_coef * distance).mean(axis=0)


def combined_update(
    position: np.ndarray,
    gwo_position: np.ndarray,
    blend: float,
    velocity: np.ndarray,
    x_max: float,
) -> np.ndarray:
    """blend * guidance + (1 - blend) * (position + velocity), boxed to +/- x_max."""
    if not 0 <= blend <= 1:
        raise ValueError(f"blend must lie in [0, 1], got {blend}")
    proposal = blend * gwo_position + (1.0 - blend) * (position + velocity)
    return np.clip(proposal, -x_max, x_max)


def swarm_diversity(positions: Sequence[Sequence[float]] | np.ndarray) -> float:
    """Mean Euclidean distance over all unordered pairs of particle positions."""
    points = np.asarray(positions, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError("diversity undefined: need at least two particles")
    return float(pdist(points).mean())


def mutation_sigma(config: OptimizerConfig, diversity: float, m: int) -> float:
    """Kick strength grows as diversity falls below the floor; never below 0.01*m."""
    scale = config.mutation_sigma_scale * (1.0 - diversity / config.d_min)
    return max(scale, 0.01 * m)


def inject_mutation(
    particles: Sequence[Particle],
    sigma: float,
    rngs: Sequence[np.random.Generator],
    x_max: float,
) -> None:
    """Perturb every coordinate of every particle by N(0, sigma^2), then re-box.

    Personal bests and velocities are left untouched; only positions move.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    for particle, rng in zip(particles, rngs):
        jolt = rng.normal(0.0, sigma, particle.position.shape[0])
        particle.position = np.clip(particle.position + jolt, -x_max, x_max)


def _cascade_leaders(state: SwarmState, position: np.ndarray, fit: float) -> None:
    # Classic top-three cascade over every evaluation ever made: pushing each
    # candidate through keeps exactly the three lowest fitnesses seen, with
    # fitness(alpha) <= fitness(beta_wolf) <= fitness(delta) at all times.
    if fit < state.alpha_fitness:
        state.delta, state.delta_fitness = state.beta_wolf, state.beta_fitness
        state.beta_wolf, state.beta_fitness = state.alpha, state.alpha_fitness
        state.alpha, state.alpha_fitness = position.copy(), fit
    elif fit < state.beta_fitness:
        state.delta, state.delta_fitness = state.beta_wolf, state.beta_fitness
        state.beta_wolf, state.beta_fitness = position.copy(), fit
    elif fit < state.delta_fitness:
        state.delta, state.delta_fitness = position.copy(), fit


def initialize_swarm(
    etc: EtcMatrix,
    config: OptimizerConfig,
    rngs: Sequence[np.random.Generator],
    seeded_positions: Sequence[np.ndarray] | None = None,
) -> SwarmState:
    """Uniform positions in [0, m) per coordinate, zero velocities, bests evaluated.

    `seeded_positions` occupy the first slots verbatim (after clamping); the
    rest of the swarm is drawn randomly. Config must already be resolved.
    """
    n, m = etc.n, etc.m
    seeded = [clamp_position(p, m) for p in (seeded_positions or [])]
    if len(seeded) > config.swarm_size:
        raise ValueError(
            f"{len(seeded)} seeded positions exceed swarm_size {config.swarm_size}"
        )
    threshold = capacity_threshold(etc, CapacityPolicy(config.headroom_theta))
    particles: list[Particle] = []
    best_fit = math.inf
    best_index = -1
    best_assignment: np.ndarray | None = None
    evaluations: list[tuple[np.ndarray, float]] = []
    for i in range(config.swarm_size):
        position = seeded[i].copy() if i < len(seeded) else rngs[i].uniform(0.0, m, n)
        assignment, loads = map_with_loads(position, etc, threshold)
        report = evaluate_assignment(assignment, etc, config.beta, loads=loads)
        particles.append(Particle(position, np.zeros(n), position.copy(), report.fitness))
        evaluations.append((position, report.fitness))
        if report.fitness < best_fit:
            best_fit = report.fitness
            best_index = i
            best_assignment = assignment
    state = SwarmState(
        particles=particles,
        global_best_position=particles[best_index].position.copy(),
        global_best_fitness=best_fit,
        global_best_assignment=best_assignment,
        alpha=particles[best_index].position.copy(),
        beta_wolf=particles[best_index].position.copy(),
        delta=particles[best_index].position.copy(),
        iteration=0,
    )
    for position, fit in evaluations:
        _cascade_leaders(state, position, fit)
    # packs of two start with delta mirroring beta_wolf
    if not math.isfinite(state.beta_fitness):
        state.beta_wolf, state.beta_fitness = state.alpha.copy(), state.alpha_fitness
    if not math.isfinite(state.delta_fitness):
        state.delta, state.delta_fitness = state.beta_wolf.copy(), state.beta_fitness
    return state


def step(
    state: SwarmState,
    etc: EtcMatrix,
    config: OptimizerConfig,
    rngs: Sequence[np.random.Generator],
    log: ConvergenceLog,
) -> SwarmState:
    """Advance one iteration: diversity check and mutation, then particle updates.

    Synchronous scheme: leaders and the global best are frozen while every
    particle moves and is evaluated (so per-particle work could run in
    parallel on its own RNG substream), then personal bests, the global best
    and the leader cascade absorb the new evaluations in particle order.
    """
    t = state.iteration + 1
    m = etc.m
    x_max = position_bound(m)
    threshold = capacity_threshold(etc, CapacityPolicy(config.headroom_theta))
    diversity = swarm_diversity(np.stack([p.position for p in state.particles]))
    mutated = False
    if config.diversity_control and diversity < config.d_min:
        inject_mutation(state.particles, mutation_sigma(config, diversity, m), rngs, x_max)
        mutated = True
    lam = blend_weight(t, config)
    a = gwo_coefficient_a(t, config)
    blend = (1.0 - lam) if config.blend_weight_on_pso else lam

    evaluations: list[tuple[np.ndarray, float, np.ndarray]] = []
    fitness_total = 0.0
    for particle, rng in zip(state.particles, rngs):
        guide = gwo_guidance(
            particle.position, state.alpha, state.beta_wolf, state.delta, a, rng
        )
        velocity = velocity_update(particle, state.global_best_position, config, rng)
        position = combined_update(particle.position, guide, blend, velocity, x_max)
        particle.velocity = velocity
        particle.position = position
        assignment, loads = map_with_loads(position, etc, threshold)
        report = evaluate_assignment(assignment, etc, config.beta, loads=loads)
        fitness_total += report.fitness
        evaluations.append((position, report.fitness, assignment))

    for particle, (position, fit, assignment) in zip(state.particles, evaluations):
        if fit < particle.personal_best_fitness:
            particle.personal_best_fitness = fit
            particle.personal_best_position = position.copy()
            if fit < state.global_best_fitness:
                state.global_best_fitness = fit
                state.global_best_position = position.copy()
                state.global_best_assignment = assignment
        _cascade_leaders(state, position, fit)
    state.iteration = t
    log.rows.append(
        IterationStats(
            iteration=t,
            best_fitness=state.global_best_fitness,
            mean_fitness=fitness_total / len(state.particles),
            diversity=diversity,
            blend_weight=lam,
            gwo_a=a,
            mutated=mutated,
        )
    )
    return state


def run(
    workload: Workload,
    vms: Sequence[VmSpec],
    config: OptimizerConfig,
    *,
    seeded_positions: Sequence[np.ndarray] | None = None,
) -> tuple[np.ndarray, MetricsReport, ConvergenceLog]:
    """Optimize a placement; returns (assignment, metrics, per-iteration log).

    One root seed drives the whole run; every particle owns an independent
    substream, so per-particle work could be parallelized without changing
    any result.
    """
    etc = build_etc(workload, vms)
    cfg = config.resolve(etc)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.swarm_size)
    rngs = [np.random.default_rng(stream) for stream in streams]
    state = initialize_swarm(etc, cfg, rngs, seeded_positions)
    log = ConvergenceLog()
    for _ in range(cfg.max_iterations):
        step(state, etc, cfg, rngs, log)
    report = evaluate_assignment(state.global_best_assignment, etc, cfg.beta)
    return state.global_best_assignment.copy(), report, log


def run_pure_pso(
    workload: Workload, vms: Sequence[VmSpec], config: OptimizerConfig
) -> tuple[np.ndarray, MetricsReport, ConvergenceLog]:
    """Velocity-only ablation: blend pinned to 0, diversity control off."""
    pinned = replace(
        config,
        lambda_max=0.0,
        lambda_min=0.0,
        diversity_control=False,
        blend_weight_on_pso=False,
    )
    return run(workload, vms, pinned)


def run_pure_gwo(
    workload: Workload, vms: Sequence[VmSpec], config: OptimizerConfig
) -> tuple[np.ndarray, MetricsReport, ConvergenceLog]:
    """Guidance-only ablation: blend pinned to 1, diversity control off."""
    pinned = replace(
        config,
        lambda_max=1.0,
        lambda_min=1.0,
        diversity_control=False,
        blend_weight_on_pso=False,
    )
    return run(workload, vms, pinned)
