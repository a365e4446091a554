"""Filling schedules by simulated bookings, with optional travel-time descent.

Customers from the pool are offered only their preferred window; Simple
Insertion decides.  The trajectory is kept as a replay log so any fill level
can be reconstructed without storing full schedule copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ans import Move, apply_move
from .instances import Instance
from .model import (
    Order, Schedule, StructureError, WindowSet, insert_at, insertion_range,
    is_schedule_feasible, is_tour_feasible,
)
from .simple import SlotQuery, commit_simple, solve_sop_simple

SCENARIOS = ("non-optimized", "optimized")


@dataclass(frozen=True)
class Accept:
    order: int
    vehicle: int
    position: int


@dataclass
class FillTrajectory:
    """Replay log of one booking simulation.

    ``marks[p - 1]`` is the number of events that make up the schedule state
    right after the p-th acceptance (including the re-optimization that
    followed it).
    """

    scenario: str
    initial: Schedule
    pool: dict[int, Order]
    events: list = field(default_factory=list)
    marks: list[int] = field(default_factory=list)

    @property
    def p_hat(self) -> int:
        return len(self.marks)

    def replay(self, n_events: int) -> Schedule:
        schedule = self.initial
        for event in self.events[:n_events]:
            if isinstance(event, Accept):
                k = schedule.tour_index(event.vehicle)
                tour = insert_at(schedule.tours[k], event.position, self.pool[event.order])
                schedule = schedule.replace_tour(k, tour)
            else:
                schedule = apply_move(schedule, event)
        return schedule


def fill_schedule(instance: Instance, scenario: str = "non-optimized",
                  vehicles: int | None = None, check: bool = False) -> FillTrajectory:
    """Offer every pool customer its preferred window, in pool order."""
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    schedule = instance.empty_schedule(vehicles)
    traj = FillTrajectory(scenario, schedule, {o.id: o for o in instance.pool})
    single = {w.id: WindowSet([w]) for w in instance.windows}
    for order in instance.pool:
        result = solve_sop_simple(SlotQuery(schedule, order, single[order.window.id]))
        verdict = result.verdicts[order.window.id]
        if not verdict.feasible:
            continue
        schedule = commit_simple(schedule, verdict, order)
        traj.events.append(Accept(order.id, verdict.vehicle, verdict.position))
        if scenario == "optimized":
            moves: list[Move] = []
            schedule = optimize_travel_time(schedule, moves)
            traj.events.extend(moves)
        if check and not is_schedule_feasible(schedule):
            raise AssertionError(f"infeasible schedule after accepting order {order.id}")
        traj.marks.append(len(traj.events))
    return traj


def snapshot_at_fill(traj: FillTrajectory, fill: float) -> Schedule:
    """Schedule holding ``ceil(fill * p_hat)`` orders."""
    if not 0 < fill <= 1:
        raise ValueError(f"fill level {fill} outside (0, 1]")
    p = math.ceil(round(fill * traj.p_hat, 9))
    if p == 0:
        return traj.initial
    return traj.replay(traj.marks[p - 1])


def _best_relocation(schedule: Schedule) -> tuple[int, Move] | None:
    travel = schedule.travel
    tours = schedule.tours
    ranked = []
    for s, tour in enumerate(tours):
        n = len(tour.visits)
        for p in range(1, n + 1):
            a = tour.visits[p - 1]
            prev, nxt = tour.node(p - 1), tour.node(p + 1)
            saving = travel(prev, a) + travel(a, nxt) - travel(prev, nxt)
            best = None
            for j, target in enumerate(tours):
                if j == s or target.profile(travel).load + a.weight > target.capacity:
                    continue
                prof = target.profile(travel)
                for i in insertion_range(target, a, a.window, travel):
                    u, v = target.node(i), target.node(i + 1)
                    svc = u.service if i else 0
                    earliest = max(a.window.start, prof.alpha[i] + svc + travel(u, a))
                    latest = min(a.window.end, prof.beta[i + 1] - a.service - travel(a, v))
                    if earliest > latest:
                        continue
                    gain = saving - (travel(u, a) + travel(a, v) - travel(u, v))
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, j, i)
            if best is not None:
                ranked.append((-best[0], s, p, best[1], best[2]))
    ranked.sort()
    for neg_gain, s, p, j, i in ranked:
        if is_tour_feasible(tours[s].without(p), travel):
            a = tours[s].visits[p - 1]
            return -neg_gain, Move("move", a.id, tours[s].vehicle, tours[j].vehicle, p, i)
    return None


def optimize_travel_time(schedule: Schedule, moves: list | None = None) -> Schedule:
    """Apply best travel-time-reducing 1-moves until none improves.

    Orders keep their assigned window.  Applied moves are appended to
    ``moves`` when given.
    """
    while True:
        found = _best_relocation(schedule)
        if found is None:
            return schedule
        _, move = found
        schedule = apply_move(schedule, move)
        if moves is not None:
            moves.append(move)


def trajectory_from_events(scenario: str, initial: Schedule, pool: dict[int, Order],
                           events: list, marks: list[int]) -> FillTrajectory:
    if any(b < a for a, b in zip(marks, marks[1:])) or (marks and marks[-1] > len(events)):
        raise StructureError("trajectory marks must be non-decreasing and within the event log")
    return FillTrajectory(scenario, initial, pool, list(events), list(marks))
