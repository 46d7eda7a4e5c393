import csv
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from emfirefly.errors import ConfigError
from emfirefly.gso import (
    Glowworm,
    GsoConfig,
    bench_config,
    bimodal_gaussian,
    brighter_neighbors,
    count_near,
    init_swarm,
    move_probabilities,
    run_gso,
    sample_index,
    step_position,
    update_decision_range,
    update_luciferin,
)


def worm(pos, luc=5.0, r=1.0):
    return Glowworm(np.asarray(pos, dtype=float), luc, r)


def test_luciferin_full_decay_erases_history():
    cfg = SimpleNamespace(decay=1.0, luciferin_gain=0.6)
    assert update_luciferin(worm([0, 0], luc=123.0), 10.0, cfg) == pytest.approx(6.0)


def test_luciferin_fixed_point():
    cfg = SimpleNamespace(decay=0.0, luciferin_gain=0.0)
    assert update_luciferin(worm([0, 0], luc=5.0), 99.0, cfg) == 5.0


def test_luciferin_mixed():
    cfg = GsoConfig(decay=0.4, luciferin_gain=0.6)
    assert update_luciferin(worm([0, 0], luc=5.0), 10.0, cfg) == pytest.approx(9.0)


def test_isolated_worm_has_no_neighbors():
    swarm = [worm([0, 0], 1, 0.5), worm([5, 5], 9, 0.5)]
    assert brighter_neighbors(0, swarm) == []


def test_line_of_three():
    swarm = [worm([0, 0], 1, 1.5), worm([1, 0], 2, 1.5), worm([2, 0], 3, 1.5)]
    assert brighter_neighbors(0, swarm) == [1]


def test_decision_radius_is_per_worm():
    # i sits at the same distance from j and k; only j's decision radius reaches it
    swarm = [worm([0, 0], luc=10, r=1.0), worm([2, 0], luc=1, r=2.5), worm([-2, 0], luc=1, r=1.5)]
    i, j, k = 0, 1, 2
    assert i in brighter_neighbors(j, swarm)
    assert i not in brighter_neighbors(k, swarm)


def test_move_probabilities_examples():
    swarm = [worm([0, 0], 1), worm([1, 0], 3), worm([0, 1], 5)]
    assert move_probabilities(0, [1, 2], swarm) == pytest.approx([2 / 6, 4 / 6])
    assert move_probabilities(0, [2], swarm) == pytest.approx([1.0])
    twin = [worm([0, 0], 1), worm([1, 0], 4), worm([0, 1], 4)]
    assert move_probabilities(0, [1, 2], twin) == pytest.approx([0.5, 0.5])
    assert move_probabilities(0, [], swarm) is None


@given(st.floats(0, 10), st.lists(st.floats(1e-3, 10), min_size=1, max_size=30))
def test_move_probabilities_form_a_distribution(eta_i, gaps):
    swarm = [worm([0, 0], eta_i)] + [worm([0, 0], eta_i + g) for g in gaps]
    p = move_probabilities(0, list(range(1, len(swarm))), swarm)
    assert ((p >= 0) & (p <= 1)).all()
    assert abs(p.sum() - 1) < 1e-12


def test_step_examples():
    assert step_position([0, 0], [1, 1], 0.0).tolist() == [0, 0]
    assert step_position([0, 0], [3, 4], 1.0) == pytest.approx([0.6, 0.8])
    assert step_position([0, 0], [2, 0], 2.0) == pytest.approx([2.0, 0.0])
    assert step_position([1, 1], [1, 1], 0.5).tolist() == [1, 1]


vec = st.lists(st.floats(-100, 100), min_size=2, max_size=2)


@given(vec, vec, st.floats(0, 5))
def test_step_length_is_exact(a, b, s):
    a, b = np.array(a), np.array(b)
    if np.linalg.norm(b - a) < 1e-6:
        return
    moved = step_position(a, b, s)
    assert abs(np.linalg.norm(moved - a) - s) <= 1e-12 * max(1.0, np.abs(a).max())


def test_decision_range_examples():
    cfg = GsoConfig(sensing_radius=3.0, range_gain=0.1, target_neighbors=5, initial_range=2.0)
    assert update_decision_range(worm([0, 0], r=2.0), 5, cfg) == 2.0
    assert update_decision_range(worm([0, 0], r=2.0), 0, cfg) == pytest.approx(2.5)
    assert update_decision_range(worm([0, 0], r=2.9), 0, cfg) == 3.0


@given(st.lists(st.integers(0, 40), max_size=50))
def test_decision_range_stays_bounded(counts):
    cfg = GsoConfig(sensing_radius=3.0, range_gain=0.5, target_neighbors=5, initial_range=1.0)
    w = worm([0, 0], r=1.0)
    for c in counts:
        w.decision_radius = update_decision_range(w, c, cfg)
        assert 0.0 <= w.decision_radius <= 3.0


def test_sample_index_inverse_cdf():
    p = np.array([0.25, 0.25, 0.5])
    assert sample_index(p, 0.0) == 0
    assert sample_index(p, 0.3) == 1
    assert sample_index(p, 0.5) == 2
    assert sample_index(p, 0.999999) == 2


def test_zero_iterations_returns_initial_swarm():
    cfg = bench_config(3, max_iterations=0, swarm_size=10)
    res = run_gso(bimodal_gaussian, cfg)
    init = init_swarm(cfg, np.random.default_rng(3))
    assert np.array_equal(res.positions, np.array([w.position for w in init]))
    assert res.trace.best_luciferin == []


def test_constant_objective_freezes_swarm():
    cfg = bench_config(1, max_iterations=15, swarm_size=20)
    start = np.array([w.position for w in init_swarm(cfg, np.random.default_rng(1))])
    res = run_gso(lambda x: 1.0, cfg)
    assert np.array_equal(res.positions, start)


def test_same_seed_same_trace():
    cfg = bench_config(7, max_iterations=30, swarm_size=30)
    a, b = run_gso(bimodal_gaussian, cfg), run_gso(bimodal_gaussian, cfg)
    assert a.trace == b.trace
    assert np.array_equal(a.positions, b.positions)


def test_positions_stay_in_box():
    cfg = bench_config(2, max_iterations=40, swarm_size=30, step_size=0.5)
    res = run_gso(lambda x: -float(np.sum(x**2)) + 100, cfg)
    assert (res.positions >= -3).all() and (res.positions <= 3).all()


def test_bimodal_single_run_finds_both_peaks():
    res = run_gso(bimodal_gaussian, bench_config(0))
    assert count_near(res.positions, (2, 0), 0.1) >= 10
    assert count_near(res.positions, (-2, 0), 0.1) >= 10


def test_trace_csv(tmp_path):
    res = run_gso(bimodal_gaussian, bench_config(0, max_iterations=5, swarm_size=10))
    path = tmp_path / "trace.csv"
    res.trace.to_csv(path)
    rows = list(csv.DictReader(path.open()))
    assert [r["iteration"] for r in rows] == ["1", "2", "3", "4", "5"]
    assert set(rows[0]) == {"iteration", "best_luciferin", "mean_luciferin", "mean_decision_radius"}
    assert float(rows[0]["best_luciferin"]) == res.trace.best_luciferin[0]


@pytest.mark.parametrize(
    "kwargs",
    [dict(decay=1.0), dict(decay=-0.1), dict(initial_range=4.0), dict(initial_range=0.0), dict(lower=(1, 1), upper=(0, 0))],
)
def test_config_invariants(kwargs):
    with pytest.raises(ConfigError):
        GsoConfig(**kwargs)


def test_swarm_needs_two_worms():
    with pytest.raises(ConfigError):
        run_gso(bimodal_gaussian, bench_config(0, swarm_size=1))
