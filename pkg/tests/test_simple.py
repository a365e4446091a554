import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slotopt.instances import GenConfig, generate_instance, probe_customers, window_setup
from slotopt.booking import fill_schedule, snapshot_at_fill
from slotopt.metrics import infeasibility_condition
from slotopt.model import (
    Depot, EuclideanTravel, Location, Order, StructureError, Tour, check_insertion_feasible,
    empty_schedule, insert_at, is_schedule_feasible,
)
from slotopt.simple import SlotQuery, commit_simple, simple_insert, solve_sop_simple

from randfix import DEPOT, feasible_tour, random_candidate, random_matrix


def test_empty_tour_gives_position_zero():
    w = window_setup("I")[3]
    cand = Order(1, Location(500, 500), 5, 300, w)
    tour = Tour(1, 27000, 66600, 200, DEPOT)
    assert simple_insert(tour, cand, w, EuclideanTravel()) == 0


def test_empty_schedule_all_windows_available():
    windows = window_setup("III")
    s = empty_schedule(3, windows, EuclideanTravel(), Depot(Location(10000, 10000)), (27000, 66600), 200)
    cand = Order(1, Location(12000, 9000), 7, 300, windows[0])
    result = solve_sop_simple(SlotQuery(s, cand))
    assert result.available == frozenset(w.id for w in windows)
    assert all(v.vehicle == 1 and v.position == 0 for v in result.verdicts.values())


def test_candidate_already_scheduled_is_rejected():
    windows = window_setup("I")
    s = empty_schedule(1, windows, EuclideanTravel(), DEPOT, (27000, 66600), 200)
    cand = Order(1, Location(10, 10), 7, 300, windows[0])
    s = s.replace_tour(0, insert_at(s.tours[0], 0, cand))
    with pytest.raises(StructureError):
        SlotQuery(s, cand)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(0, 12))
def test_first_feasible_position(seed, n):
    rng = np.random.default_rng(seed)
    travel = random_matrix(rng, n + 2)
    tour = feasible_tour(rng, travel, n, early=(0, 1200), late=(0, 1200))
    cand, w = random_candidate(rng, n + 1, length=(600, 3600))
    pos = simple_insert(tour, cand, w, travel)
    scan = [i for i in range(n + 1) if check_insertion_feasible(tour, i, cand, w, travel)]
    assert pos == (scan[0] if scan else None)
    if infeasibility_condition(tour, cand, w, travel):
        assert pos is None


def test_query_does_not_mutate_and_commits_replay():
    inst = generate_instance(GenConfig(seed=2, vehicles=4, n_customer_pool=300))
    traj = fill_schedule(inst, "non-optimized")
    s = snapshot_at_fill(traj, 0.9)
    before = s.fingerprint()
    for cand in probe_customers(inst, s, 10, seed=1):
        result = solve_sop_simple(SlotQuery(s, cand))
        assert s.fingerprint() == before
        for v in result.verdicts.values():
            if v.feasible:
                assert is_schedule_feasible(commit_simple(s, v, cand))
