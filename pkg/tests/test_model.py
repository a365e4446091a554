import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slotopt.model import (
    Depot, EuclideanTravel, Location, MatrixTravel, Order, Schedule, StructureError,
    TimeWindow, Tour, WindowSet, check_insertion_feasible, compute_arrival_profile,
    empty_schedule, insert_at, insertion_range, is_schedule_feasible, is_tour_feasible,
    schedule_travel_time, tour_travel_time,
)

from randfix import (
    DEPOT, feasible_tour, is_asymmetric, random_candidate, random_matrix, scratch_feasible,
    violates_triangle,
)

W1 = TimeWindow(1, 28800, 32400)


def one_order_tour(capacity=10):
    travel = MatrixTravel({0: {0: 0, 1: 600}, 1: {0: 600, 1: 0}})
    a = Order(1, Location(1, 0), 5, 300, W1)
    return Tour(1, 28800, 36000, capacity, DEPOT, (a,)), travel


def straight_line_profile(tour, travel):
    # the two recursions written out longhand, with no shortcuts
    nodes = [tour.depot, *tour.visits, tour.depot]
    n = len(tour.visits)
    alpha = [tour.shift_start]
    for i in range(1, n + 2):
        prev, cur = nodes[i - 1], nodes[i]
        s_prev = prev.service if 1 <= i - 1 <= n else 0
        reach = alpha[-1] + s_prev + travel(prev, cur)
        alpha.append(max(cur.window.start, reach) if i <= n else reach)
    beta = [0] * (n + 2)
    beta[n + 1] = tour.shift_end
    for i in range(n, 0, -1):
        cur, nxt = nodes[i], nodes[i + 1]
        beta[i] = min(cur.window.end, beta[i + 1] - cur.service - travel(cur, nxt))
    beta[0] = beta[1] - travel(nodes[0], nodes[1])
    return alpha, beta


def test_empty_tour_profile():
    tour = Tour(1, 28800, 36000, 10, DEPOT)
    prof = compute_arrival_profile(tour, EuclideanTravel())
    assert prof.alpha == (28800, 28800)
    assert prof.beta == (36000, 36000)
    assert is_tour_feasible(tour, EuclideanTravel())


def test_one_order_profile_matches_hand_values():
    tour, travel = one_order_tour()
    prof = compute_arrival_profile(tour, travel)
    assert prof.alpha == (28800, 29400, 30300)
    assert prof.beta == (31800, 32400, 36000)
    alpha, beta = straight_line_profile(tour, travel)
    assert list(prof.alpha) == alpha and list(prof.beta) == beta
    assert is_tour_feasible(tour, travel)


def test_capacity_below_weight_is_infeasible():
    tour, travel = one_order_tour(capacity=4)
    assert not is_tour_feasible(tour, travel)


def test_profile_is_total_for_infeasible_tours():
    travel = MatrixTravel({0: {0: 0, 1: 5000}, 1: {0: 600, 1: 0}})
    a = Order(1, Location(1, 0), 5, 300, W1)
    tour = Tour(1, 28800, 36000, 10, DEPOT, (a,))
    prof = compute_arrival_profile(tour, travel)
    assert prof.alpha[1] > prof.beta[1]
    assert not is_tour_feasible(tour, travel)


def test_schedule_feasibility():
    travel = EuclideanTravel()
    windows = WindowSet([W1])
    s = empty_schedule(2, windows, travel, DEPOT, (28800, 36000), 10)
    assert is_schedule_feasible(s)
    late = Order(1, Location(19000, 19000), 5, 300, TimeWindow(1, 28800, 28900))
    s = s.replace_tour(1, insert_at(s.tours[1], 0, late))
    assert not is_schedule_feasible(s)


def test_duplicate_orders_rejected():
    tour, travel = one_order_tour()
    with pytest.raises(StructureError):
        Schedule((tour, Tour(2, 28800, 36000, 10, DEPOT, tour.visits)), WindowSet([W1]), travel, DEPOT)


def test_window_and_tour_validation():
    with pytest.raises(StructureError):
        TimeWindow(1, 100, 100)
    with pytest.raises(StructureError):
        Tour(1, 100, 50, 10, DEPOT)
    with pytest.raises(StructureError):
        WindowSet([W1, TimeWindow(1, 0, 10)])
    with pytest.raises(StructureError):
        Order(1, Location(0, 0), 0, 300, W1)
    with pytest.raises(StructureError):
        MatrixTravel([[1, 2], [3, 0]])


def test_overlap_flag():
    assert not WindowSet([TimeWindow(1, 0, 10), TimeWindow(2, 10, 20)]).overlapping
    assert WindowSet([TimeWindow(1, 0, 11), TimeWindow(2, 10, 20)]).overlapping


def test_insert_at_positions():
    a, b, x = (Order(i, Location(i, 0), 1, 60, W1) for i in (1, 2, 3))
    empty = Tour(1, 0, 100000, 10, DEPOT)
    assert insert_at(empty, 0, x).visits == (x,)
    tour = empty.with_visits([a, b])
    assert insert_at(tour, 2, x).visits == (a, b, x)
    assert insert_at(tour, 1, x).visits == (a, x, b)
    assert tour.visits == (a, b)
    with pytest.raises(StructureError):
        insert_at(tour, 3, x)


def test_insertion_range_empty_tour():
    tour = Tour(1, 27000, 66600, 200, DEPOT)
    cand = Order(9, Location(5, 5), 5, 300, W1)
    r = insertion_range(tour, cand, W1, EuclideanTravel())
    assert (r.lo, r.hi) == (0, 0) and not r.empty


def test_insertion_range_empty_when_both_sets_empty():
    tour, travel = one_order_tour()
    travel = MatrixTravel({0: {0: 0, 1: 600, 2: 0}, 1: {0: 600, 1: 0, 2: 0}, 2: {0: 0, 1: 0, 2: 0}})
    early = TimeWindow(7, 20000, 21000)
    cand = Order(2, Location(2, 0), 1, 300, early)
    r = insertion_range(tour, cand, early, travel)
    # every departure is after the window ends, so hi < 0 while lo >= 0
    assert r.empty


def theta_by_comprehension(tour, cand, window, travel):
    prof = compute_arrival_profile(tour, travel)
    n = len(tour.visits)
    lows = [i for i in range(n + 1) if window.start + cand.service <= prof.beta[i + 1]]
    highs = [i for i in range(n + 1)
             if prof.alpha[i] + (tour.visits[i - 1].service if i else 0) <= window.end]
    return (min(lows) if lows else n + 1), (max(highs) if highs else -1)


def test_insertion_range_three_customers():
    windows = [TimeWindow(k, 28800 + 3600 * (k - 1), 28800 + 3600 * k) for k in (1, 2, 3)]
    travel = EuclideanTravel()
    orders = [Order(k, Location(10000 + 500 * k, 10000), 5, 300, windows[k - 1]) for k in (1, 2, 3)]
    tour = Tour(1, 27000, 66600, 200, Depot(Location(10000, 10000)), tuple(orders))
    cand = Order(4, Location(10400, 10100), 5, 300, windows[1])
    r = insertion_range(tour, cand, windows[1], travel)
    assert (r.lo, r.hi) == theta_by_comprehension(tour, cand, windows[1], travel)
    assert r.lo <= 2 <= r.hi and 1 in r


def test_check_insertion_examples():
    travel = EuclideanTravel()
    tour = Tour(1, 27000, 66600, 10, DEPOT)
    cand = Order(1, Location(100, 100), 5, 300, W1)
    assert check_insertion_feasible(tour, 0, cand, W1, travel)
    heavy = Order(2, Location(100, 100), 11, 300, W1)
    assert not check_insertion_feasible(tour, 0, heavy, W1, travel)


def test_random_fixtures_are_asymmetric_and_break_triangles():
    rng = np.random.default_rng(7)
    mats = [random_matrix(rng, 8) for _ in range(5)]
    assert all(is_asymmetric(m) for m in mats)
    assert any(violates_triangle(m) for m in mats)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(0, 12))
def test_fast_check_matches_recomputation(seed, n):
    rng = np.random.default_rng(seed)
    travel = random_matrix(rng, n + 2)
    tour = feasible_tour(rng, travel, n, early=(0, 900), late=(0, 900))
    assert is_tour_feasible(tour, travel) and scratch_feasible(tour, travel)
    cand, w = random_candidate(rng, n + 1, length=(300, 3600))
    theta = insertion_range(tour, cand, w, travel)
    for i in range(n + 1):
        inserted = insert_at(tour, i, cand.in_window(w))
        fast = check_insertion_feasible(tour, i, cand, w, travel)
        assert fast == is_tour_feasible(inserted, travel) == scratch_feasible(inserted, travel)
        if fast:
            assert i in theta


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 10))
def test_profile_locality_after_insertion(seed, n):
    rng = np.random.default_rng(seed)
    travel = random_matrix(rng, n + 2)
    tour = feasible_tour(rng, travel, n)
    cand, w = random_candidate(rng, n + 1)
    before = compute_arrival_profile(tour, travel)
    for i in range(n + 1):
        after = compute_arrival_profile(insert_at(tour, i, cand.in_window(w)), travel)
        assert after.alpha[:i + 1] == before.alpha[:i + 1]
        assert after.beta[i + 2:] == before.beta[i + 1:]


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(0, 10))
def test_profile_matches_longhand_recursion(seed, n):
    rng = np.random.default_rng(seed)
    travel = random_matrix(rng, n + 1)
    tour = feasible_tour(rng, travel, n, wait=(0, 2000))
    prof = compute_arrival_profile(tour, travel)
    alpha, beta = straight_line_profile(tour, travel)
    assert list(prof.alpha) == alpha
    assert list(prof.beta)[1:] == beta[1:]


def test_euclidean_travel_rounding():
    travel = EuclideanTravel()
    assert travel.seconds(Location(0, 0), Location(3000, 4000)) == 1350
    assert travel.seconds(Location(5, 5), Location(5, 5)) == 0


def test_travel_time_totals():
    tour, travel = one_order_tour()
    assert tour_travel_time(tour, travel) == 1200
    s = Schedule((tour, Tour(2, 28800, 36000, 10, DEPOT)), WindowSet([W1]), travel, DEPOT)
    assert schedule_travel_time(s) == 1200
