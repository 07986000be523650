import itertools
import random

import pytest
from hypothesis import given, strategies as st

from oracles import random_edges
from pgg import (
    GameInstance, NotDecreasingError, Schedule, ScheduleKind, build_congestion_game, decreasing,
    is_pne, literal_potential, pgg_utility, potential, potential_range, run_dynamics, step_bound,
)

SCHEDULES = [Schedule(ScheduleKind.ROUND_ROBIN), Schedule(ScheduleKind.FIRST_VIOLATOR),
             Schedule(ScheduleKind.UNIFORM_RANDOM, 7)]


def direct_potential(g, ks, s):
    """Doubled potential written out from the sums, for comparison."""
    edge_part = sum(w * s[u - 1] * s[v - 1] for u, v, w in g.edges)
    return 2 * edge_part + sum((2 * ks[v - 1] - 1) * (1 - s[v - 1]) for v in range(1, g.n + 1))


def decreasing_game(seed, n_range=(1, 12), wmax=1, kmax=4):
    rng = random.Random(seed)
    n = rng.randint(*n_range)
    edges = random_edges(rng, n, rng.random(), wmax)
    ks = [rng.randint(1, kmax) for _ in range(n)]
    return GameInstance.build(n, edges, [decreasing(k) for k in ks]), ks, rng


def test_potential_examples():
    edge = GameInstance.build(2, [(1, 2)], "10*")
    assert potential(edge, (0, 0)) == 2
    assert potential(edge, (1, 0)) == 1
    assert potential(edge, (1, 1)) == 2
    path = GameInstance.build(3, [(1, 2), (2, 3)], ["10*", "110*", "10*"])
    assert potential(path, (1, 1, 1)) == 4
    assert potential(path, (0, 0, 0)) == 5


def test_literal_closed_form_is_not_a_potential():
    edge = GameInstance.build(2, [(1, 2)], "10*")
    assert literal_potential(edge, (0, 0)) == 0
    assert literal_potential(edge, (1, 1)) == 4
    path = GameInstance.build(3, [(1, 2), (2, 3)], ["10*", "110*", "10*"])
    assert literal_potential(path, (1, 1, 1)) == 9
    # (0,0) -> (1,0) is an improving step, yet the closed form goes up
    assert is_pne(edge, (0, 0)).violators == (1, 2)
    assert literal_potential(edge, (1, 0)) > literal_potential(edge, (0, 0))
    assert potential(edge, (1, 0)) < potential(edge, (0, 0))


@pytest.mark.parametrize("seed", range(15))
def test_potential_is_rosenthal_of_congestion_game(seed):
    g, ks, rng = decreasing_game(seed, (1, 8), wmax=3)
    cg = build_congestion_game(g)
    for _ in range(10):
        s = [rng.randint(0, 1) for _ in range(g.n)]
        assert potential(g, s) == cg.doubled_rosenthal(cg.embed(s))


def test_potential_requires_decreasing():
    g = GameInstance.build(2, [(1, 2)], ["10*", "1010*"])
    with pytest.raises(NotDecreasingError):
        potential(g, (0, 0))
    assert run_dynamics(g, (0, 0)).potentials is None


def test_dynamics_examples():
    edge = GameInstance.build(2, [(1, 2)], "10*")
    tr = run_dynamics(edge, (0, 0))
    assert tr.converged and tr.steps == [(1, 1)] and tr.final == (1, 0)
    assert tr.potentials == [2, 1]
    tr = run_dynamics(edge, (0, 1))
    assert tr.converged and tr.steps == [] and tr.final == (0, 1)


@pytest.mark.parametrize("seed", range(40))
def test_exact_potential_property(seed):
    g, ks, rng = decreasing_game(seed, (1, 7), wmax=3)
    for _ in range(15):
        s = [rng.randint(0, 1) for _ in range(g.n)]
        assert potential(g, s) == direct_potential(g, ks, s)
        assert 0 <= potential(g, s) <= potential_range(g) or any(
            k > g.weighted_degree(v) + 1 for v, k in enumerate(ks, 1))
        v = rng.randint(1, g.n)
        t = list(s)
        t[v - 1] ^= 1
        gain = pgg_utility(g, t, v) - pgg_utility(g, s, v)
        assert potential(g, t) - potential(g, s) == -gain


@pytest.mark.parametrize("seed", range(60))
def test_descent_and_bound(seed):
    g, ks, rng = decreasing_game(seed, (1, 25))
    s0 = tuple(rng.randint(0, 1) for _ in range(g.n))
    for sched in SCHEDULES:
        tr = run_dynamics(g, s0, sched)
        assert tr.converged and is_pne(g, tr.final)
        assert len(tr.steps) <= step_bound(g)
        assert tr.replay() == tr.final
        assert all(a - b >= 1 for a, b in zip(tr.potentials, tr.potentials[1:]))
        s = list(s0)
        assert tr.potentials[0] == potential(g, s)
        for (v, b), phi in zip(tr.steps, tr.potentials[1:]):
            s[v - 1] = b
            assert phi == potential(g, s)


@pytest.mark.parametrize("seed", range(20))
def test_weighted_games_converge(seed):
    g, ks, rng = decreasing_game(seed, (2, 15), wmax=5, kmax=8)
    tr = run_dynamics(g, (0,) * g.n, Schedule(ScheduleKind.UNIFORM_RANDOM, seed))
    assert tr.converged and is_pne(g, tr.final)
    assert all(a > b for a, b in zip(tr.potentials, tr.potentials[1:]))


def test_every_step_flips_a_violator_to_its_response():
    g, ks, rng = decreasing_game(3, (10, 10))
    tr = run_dynamics(g, (1,) * g.n, Schedule(ScheduleKind.UNIFORM_RANDOM, 11))
    s = list(tr.initial)
    for v, b in tr.steps:
        assert v in is_pne(g, s).violators and b != s[v - 1]
        s[v - 1] = b


def test_first_violator_takes_smallest():
    g = GameInstance.build(4, [], "10*")
    tr = run_dynamics(g, (0, 0, 0, 0), Schedule(ScheduleKind.FIRST_VIOLATOR))
    assert [v for v, _ in tr.steps] == [1, 2, 3, 4]


def test_round_robin_resumes_after_last_flip():
    # 1-2 edge; 3 isolated.  From (0,0,0): 1 flips, 2 is now fine, 3 flips.
    g = GameInstance.build(3, [(1, 2)], "10*")
    tr = run_dynamics(g, (0, 0, 0))
    assert tr.steps == [(1, 1), (3, 1)]
    # after flipping 2 the scan continues at 3, then wraps to 1
    tr = run_dynamics(g, (1, 1, 0))
    assert [v for v, _ in tr.steps] == [1, 3]


def test_random_schedule_is_deterministic():
    g, ks, rng = decreasing_game(5, (20, 20))
    a = run_dynamics(g, (0,) * 20, Schedule(ScheduleKind.UNIFORM_RANDOM, 42))
    b = run_dynamics(g, (0,) * 20, Schedule(ScheduleKind.UNIFORM_RANDOM, 42))
    assert a.steps == b.steps


def test_max_steps_and_non_convergence():
    # matching pennies: vertex 1 avoids its neighbour, vertex 2 copies it
    g = GameInstance.build(2, [(1, 2)], ["10*", "0(1)*"])
    tr = run_dynamics(g, (0, 0), max_steps=10)
    assert not tr.converged and len(tr.steps) == 10 and tr.potentials is None
    assert run_dynamics(g, (0, 0), max_steps=0).steps == []
    with pytest.raises(ValueError):
        run_dynamics(g, (0, 0), max_steps=-1)


def test_schedule_parse():
    assert Schedule.parse("first").kind is ScheduleKind.FIRST_VIOLATOR
    with pytest.raises(ValueError):
        Schedule.parse("sideways")


def test_clamped_bound():
    # k far beyond the degree does not inflate the bound
    g = GameInstance.build(2, [(1, 2)], decreasing(50))
    assert step_bound(g) == 2 * (1 + 2 * 2)


@given(st.integers(0, 2**32))
def test_existence_small_graphs(seed):
    g, ks, rng = decreasing_game(seed, (1, 7))
    tr = run_dynamics(g, (0,) * g.n)
    assert tr.converged


def test_all_graphs_on_four_vertices_converge_from_every_start():
    pairs = list(itertools.combinations(range(1, 5), 2))
    for mask in range(1 << len(pairs)):
        edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
        g = GameInstance.build(4, edges, ["10*", "110*", "1110*", "10*"])
        for s0 in itertools.product((0, 1), repeat=4):
            tr = run_dynamics(g, s0)
            assert tr.converged and len(tr.steps) <= step_bound(g)
