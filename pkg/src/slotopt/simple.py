"""Simple Insertion: slot availability without touching the existing visit order."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .model import (
    Order, Schedule, StructureError, TimeWindow, Tour, TravelTime, WindowSet,
    check_insertion_feasible, insert_at, insertion_range,
)


@dataclass(frozen=True)
class SlotQuery:
    schedule: Schedule
    candidate: Order
    windows: WindowSet | None = None

    def __post_init__(self):
        if self.candidate.id in self.schedule.orders:
            raise StructureError(f"candidate {self.candidate.id} is already scheduled")
        if self.windows is None:
            object.__setattr__(self, "windows", self.schedule.windows)


@dataclass
class WindowVerdict:
    """Outcome of one method for one window.

    ``moves`` is the script of relocations ANS applied before inserting;
    ``sequence`` is the resequenced tour (order ids) the TSPTW oracle found.
    """

    window: int
    feasible: bool
    method: str
    seconds: float = 0.0
    vehicle: int | None = None
    position: int | None = None
    moves: tuple = ()
    sequence: tuple[int, ...] | None = None
    note: str = ""


@dataclass
class SlotResult:
    method: str
    candidate: int
    verdicts: dict[int, WindowVerdict] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def available(self) -> frozenset[int]:
        return frozenset(w for w, v in self.verdicts.items() if v.feasible)

    def __len__(self):
        return len(self.available)


def simple_insert(tour: Tour, candidate: Order, window: TimeWindow,
                  travel: TravelTime) -> int | None:
    """Smallest feasible insertion index for ``candidate`` in ``window``, or None."""
    if tour.profile(travel).load + candidate.weight > tour.capacity:
        return None
    for i in insertion_range(tour, candidate, window, travel):
        if check_insertion_feasible(tour, i, candidate, window, travel):
            return i
    return None


def solve_sop_simple(query: SlotQuery) -> SlotResult:
    schedule = query.schedule
    travel = schedule.travel
    result = SlotResult("simple", query.candidate.id)
    t_query = time.perf_counter()
    for window in query.windows:
        t0 = time.perf_counter()
        cand = query.candidate.in_window(window)
        verdict = WindowVerdict(window.id, False, "simple")
        for tour in schedule.tours:
            pos = simple_insert(tour, cand, window, travel)
            if pos is not None:
                verdict = WindowVerdict(window.id, True, "simple", vehicle=tour.vehicle, position=pos)
                break
        verdict.seconds = time.perf_counter() - t0
        result.verdicts[window.id] = verdict
    result.seconds = time.perf_counter() - t_query
    return result


def commit_simple(schedule: Schedule, verdict: WindowVerdict, candidate: Order) -> Schedule:
    window = schedule.windows.by_id(verdict.window)
    k = schedule.tour_index(verdict.vehicle)
    tour = insert_at(schedule.tours[k], verdict.position, candidate.in_window(window))
    return schedule.replace_tour(k, tour)
