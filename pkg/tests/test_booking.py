import math

import pytest

from slotopt.ans import apply_move
from slotopt.booking import (
    Accept, _best_relocation, fill_schedule, optimize_travel_time, snapshot_at_fill,
)
from slotopt.instances import GenConfig, Instance, generate_instance
from slotopt.model import (
    Depot, EuclideanTravel, Location, Order, Schedule, TimeWindow, Tour, WindowSet,
    insert_at, is_schedule_feasible, is_tour_feasible, schedule_travel_time,
)

DAY = TimeWindow(1, 28800, 64800)
DEPOT = Depot(Location(10000, 10000))


@pytest.fixture(scope="module")
def small():
    return generate_instance(GenConfig(seed=7, vehicles=3, n_customer_pool=250))


def test_capacity_bound_fixture():
    cfg = GenConfig(seed=0, vehicles=3, n_customer_pool=0)
    pool = tuple(Order(k, Location(10000, 10000), 10, 60, DAY) for k in range(1, 101))
    inst = Instance(cfg, DEPOT, WindowSet([DAY]), (), pool, EuclideanTravel())
    traj = fill_schedule(inst, "non-optimized")
    # weights of 10 on capacity 200: twenty per vehicle, time never binds
    assert traj.p_hat == 3 * (200 // 10)


@pytest.mark.parametrize("scenario", ["non-optimized", "optimized"])
def test_trajectory_snapshots_feasible(small, scenario):
    traj = fill_schedule(small, scenario, check=True)
    assert traj.p_hat > 0
    assert traj.marks == sorted(traj.marks)
    for f in (0.1, 0.5, 0.85, 0.99, 1.0):
        s = snapshot_at_fill(traj, f)
        assert s.n_orders == math.ceil(f * traj.p_hat)
        assert is_schedule_feasible(s)
    accepts = [e for e in traj.events if isinstance(e, Accept)]
    assert len(accepts) == traj.p_hat


def test_fill_level_arithmetic():
    assert math.ceil(round(0.85 * 400, 9)) == 340


def test_snapshot_bounds(small):
    traj = fill_schedule(small, "non-optimized")
    with pytest.raises(ValueError):
        snapshot_at_fill(traj, 0)
    with pytest.raises(ValueError):
        snapshot_at_fill(traj, 1.01)
    with pytest.raises(ValueError):
        fill_schedule(small, "greedy")


def test_deterministic(small):
    a = fill_schedule(small, "optimized")
    b = fill_schedule(small, "optimized")
    assert a.events == b.events and a.marks == b.marks


def test_optimized_is_locally_optimal(small):
    traj = fill_schedule(small, "optimized")
    for p in (10, traj.p_hat // 2, traj.p_hat):
        assert _best_relocation(traj.replay(traj.marks[p - 1])) is None


def test_more_vehicles_never_fewer_orders():
    inst = generate_instance(GenConfig(seed=11, vehicles=2, n_customer_pool=300))
    hats = [fill_schedule(inst, "non-optimized", vehicles=m).p_hat for m in (1, 2, 3, 4)]
    assert hats == sorted(hats)


def two_tour_misplaced():
    travel = EuclideanTravel()
    east = [Order(k, Location(18000, 10000 + 100 * k), 5, 300, DAY) for k in (1, 2, 3)]
    west = [Order(k, Location(2000, 10000 + 100 * k), 5, 300, DAY) for k in (4, 5)]
    stray = Order(6, Location(18050, 10050), 5, 300, DAY)
    a = Tour(1, 27000, 66600, 200, DEPOT, tuple(east))
    b = Tour(2, 27000, 66600, 200, DEPOT, (west[0], stray, west[1]))
    return Schedule((a, b), WindowSet([DAY]), travel, DEPOT)


def exhaustive_best_gain(s):
    base = schedule_travel_time(s)
    best = 0
    for si, src in enumerate(s.tours):
        for p in range(1, len(src) + 1):
            reduced = src.without(p)
            for ti, dst in enumerate(s.tours):
                if ti == si:
                    continue
                for q in range(len(dst) + 1):
                    new = insert_at(dst, q, src.visits[p - 1])
                    if is_tour_feasible(new, s.travel) and is_tour_feasible(reduced, s.travel):
                        tours = list(s.tours)
                        tours[si], tours[ti] = reduced, new
                        best = max(best, base - schedule_travel_time(s.with_tours(tours)))
    return best


def test_misplaced_customer_is_moved():
    s = two_tour_misplaced()
    expected = exhaustive_best_gain(s)
    assert expected > 0
    gain, move = _best_relocation(s)
    assert move.order == 6 and move.target == 1
    assert gain == schedule_travel_time(s) - schedule_travel_time(apply_move(s, move))
    assert gain == expected
    moves = []
    out = optimize_travel_time(s, moves)
    assert moves[0] == move
    assert schedule_travel_time(out) < schedule_travel_time(s)
    assert optimize_travel_time(out).fingerprint() == out.fingerprint()
