"""Schedule quality measures: makespan, throughput, CV, BOI, combined fitness."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
import pytest

from swarmsched.domain import Timeline, build_etc, build_timeline
from swarmsched.metrics import (
    balance_optimality_index,
    coefficient_of_variation,
    default_beta,
    evaluate_assignment,
    fitness,
    load_vector,
    makespan,
    throughput,
)

from conftest import make_fleet, make_workload


@pytest.fixture
def tiny_etc(tiny_workload, tiny_fleet):
    # [[0.1, 0.05], [0.5, 0.25]] seconds
    return build_etc(tiny_workload, tiny_fleet)


def test_makespan_is_last_exit(tiny_etc):
    timeline = build_timeline([0, 1], tiny_etc)
    assert makespan(timeline) == pytest.approx(0.25)


def test_makespan_rejects_empty_timeline():
    empty = Timeline(np.array([]), np.array([]), ())
    with pytest.raises(ValueError, match="empty schedule"):
        makespan(empty)


def test_throughput_hand_value():
    assert throughput(2, 0.25) == pytest.approx(8.0)


def test_throughput_rejects_zero_makespan():
    with pytest.raises(ValueError, match="zero makespan"):
        throughput(5, 0.0)


def test_load_vector_sums_chosen_etcs(tiny_etc):
    npt.assert_allclose(load_vector([0, 1], tiny_etc), [0.1, 0.25])
    npt.assert_allclose(load_vector([1, 1], tiny_etc), [0.0, 0.3])


def test_cv_population_form():
    # loads [0.1, 0.25]: mean 0.175, population std 0.075, CV = 3/7
    assert coefficient_of_variation([0.1, 0.25]) == pytest.approx(3.0 / 7.0)


def test_cv_uniform_loads_is_zero():
    assert coefficient_of_variation([5.0, 5.0, 5.0, 5.0]) == 0.0


def test_cv_uses_population_not_sample_std():
    loads = np.array([1.0, 2.0, 3.0, 4.0])
    expected = loads.std(ddof=0) / loads.mean()
    assert coefficient_of_variation(loads) == pytest.approx(expected)
    assert coefficient_of_variation(loads) != pytest.approx(
        loads.std(ddof=1) / loads.mean()
    )


def test_cv_rejects_degenerate_input():
    with pytest.raises(ValueError, match="no loads"):
        coefficient_of_variation([])
    with pytest.raises(ValueError, match="zero mean"):
        coefficient_of_variation([0.0, 0.0])


def test_boi_endpoints_and_monotonicity():
    assert balance_optimality_index(0.0) == 1.0
    assert balance_optimality_index(1.0) == 0.5
    assert balance_optimality_index(3.0) == 0.25
    with pytest.raises(ValueError, match="non-negative"):
        balance_optimality_index(-0.1)


def test_fitness_formula_and_validation():
    assert fitness(0.25, 0.7, 0.1125) == pytest.approx(0.25 + 0.1125 * 0.3)
    assert fitness(10.0, 1.0, 5.0) == 10.0  # perfect balance adds no penalty
    with pytest.raises(ValueError, match="makespan_s must be positive"):
        fitness(0.0, 0.5, 1.0)
    with pytest.raises(ValueError, match="boi must lie"):
        fitness(1.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="boi must lie"):
        fitness(1.0, 1.5, 1.0)
    with pytest.raises(ValueError, match="beta must be non-negative"):
        fitness(1.0, 0.5, -1.0)


def test_default_beta_hand_value(tiny_etc):
    # mean ETC 0.225 s, n=2, m=2: 0.5 * 0.225 * 2 / 2
    assert default_beta(tiny_etc) == pytest.approx(0.1125)


def test_evaluate_assignment_end_to_end(tiny_etc):
    report = evaluate_assignment([0, 1], tiny_etc, beta=0.1125)
    assert report.makespan_s == pytest.approx(0.25)
    assert report.throughput_tps == pytest.approx(8.0)
    assert report.cv == pytest.approx(3.0 / 7.0)
    assert report.boi == pytest.approx(0.7)
    assert report.fitness == pytest.approx(0.28375)


def test_evaluate_assignment_accepts_precomputed_loads(tiny_etc):
    loads = load_vector([0, 1], tiny_etc)
    via_loads = evaluate_assignment([0, 1], tiny_etc, beta=0.5, loads=loads)
    direct = evaluate_assignment([0, 1], tiny_etc, beta=0.5)
    assert via_loads == direct


def test_makespan_equals_max_load_under_chained_execution():
    rng = np.random.default_rng(7)
    workload = make_workload(rng.uniform(100, 1000, 12))
    fleet = make_fleet([800.0, 1000.0, 1200.0])
    etc = build_etc(workload, fleet)
    assignment = rng.integers(0, 3, 12)
    timeline = build_timeline(assignment, etc)
    loads = load_vector(assignment, etc)
    assert makespan(timeline) == pytest.approx(loads.max())
