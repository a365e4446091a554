"""Window occupancy measures: first/last index, inside/outside, loss and free time.

These quantify how much of a delivery window a tour already uses and are what
the neighborhood search steers by.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    InsertionRange, Order, TimeWindow, Tour, TravelTime, WindowSet,
    candidate_arrivals, insertion_range,
)


class OverlapError(ValueError):
    """The feasibility condition only holds for non-overlapping window sets."""


@dataclass(frozen=True)
class WindowSpan:
    window: int
    first: int | None
    last: int | None

    @property
    def empty(self) -> bool:
        return self.first is None


@dataclass(frozen=True)
class InsideOutside:
    inside: tuple[int, ...]
    outside: tuple[int, ...]


@dataclass(frozen=True)
class SlotMetrics:
    """Entrance/exit/loss/free time of a window for a prospective insertion.

    ``entrance`` and ``exit`` are None when the window has no inside customers
    (loss then comes from the empty-window formula).  When the insertion range
    is empty, ``range_empty`` is set and ``loss`` is None.
    """

    entrance: int | None
    exit: int | None
    loss: int | None
    free: int
    range_empty: bool = False


def window_span(tour: Tour, window: TimeWindow) -> WindowSpan:
    first = last = None
    for k, o in enumerate(tour.visits, 1):
        if window.contains(o.window):
            if first is None:
                first = k
            last = k
    return WindowSpan(window.id, first, last)


def partition_inside_outside(tour: Tour, window: TimeWindow) -> InsideOutside:
    span = window_span(tour, window)
    positions = range(1, len(tour.visits) + 1)
    if span.empty:
        return InsideOutside((), tuple(positions))
    inside = tuple(range(span.first, span.last + 1))
    outside = tuple(k for k in positions if not span.first <= k <= span.last)
    return InsideOutside(inside, outside)


def _span_load(visits, first: int, last: int, travel: TravelTime) -> int:
    # service plus onward travel for positions first..last-1 (1-based)
    total = 0
    for k in range(first, last):
        a = visits[k - 1]
        total += a.service + travel(a, visits[k])
    return total


def free_time(tour: Tour, window: TimeWindow, travel: TravelTime) -> int:
    span = window_span(tour, window)
    if span.empty:
        return window.length
    return window.length - _span_load(tour.visits, span.first, span.last, travel)


def free_time_after_insertion(tour: Tour, i: int, candidate: Order, window: TimeWindow,
                              travel: TravelTime) -> int:
    """Free time of ``window`` on the tour with ``candidate`` placed after position ``i``."""
    visits = tour.visits[:i] + (candidate.in_window(window),) + tour.visits[i:]
    first = last = i + 1
    for k, o in enumerate(visits, 1):
        if window.contains(o.window):
            if k < first:
                first = k
            if k > last:
                last = k
    return window.length - _span_load(visits, first, last, travel)


def slot_metrics(tour: Tour, candidate: Order, window: TimeWindow, travel: TravelTime,
                 theta: InsertionRange | None = None) -> SlotMetrics:
    free = free_time(tour, window, travel)
    if theta is None:
        theta = insertion_range(tour, candidate, window, travel)
    if theta.empty:
        return SlotMetrics(None, None, None, free, range_empty=True)

    arrivals = {i: candidate_arrivals(tour, i, candidate, window, travel) for i in theta}
    span = window_span(tour, window)
    if span.empty:
        loss = max((a - window.start) + (window.end - b) for a, b in arrivals.values())
        return SlotMetrics(None, None, loss, free)

    prof = tour.profile(travel)
    entry = prof.alpha[span.first]
    for i, (a, _) in arrivals.items():
        if i <= span.first and a > entry:
            entry = a
    leave = prof.beta[span.last]
    for i, (_, b) in arrivals.items():
        if i >= span.last and b < leave:
            leave = b
    entrance = entry - window.start
    exit_ = window.end - leave
    return SlotMetrics(entrance, exit_, entrance + exit_, free)


def max_free_time_after_insertion(tour: Tour, candidate: Order, window: TimeWindow,
                                  travel: TravelTime,
                                  theta: InsertionRange | None = None) -> int | None:
    """Largest free time over the insertion range, or None if the range is empty."""
    if theta is None:
        theta = insertion_range(tour, candidate, window, travel)
    if theta.empty:
        return None
    return max(free_time_after_insertion(tour, i, candidate, window, travel) for i in theta)


def infeasibility_condition(tour: Tour, candidate: Order, window: TimeWindow,
                            travel: TravelTime) -> bool:
    """True when inserting ``candidate`` into ``window`` on ``tour`` is provably impossible."""
    best = max_free_time_after_insertion(tour, candidate, window, travel)
    return best is None or best < 0


def feasibility_condition(tour: Tour, candidate: Order, window: TimeWindow,
                          windows: WindowSet, travel: TravelTime) -> bool:
    """Sufficient condition for some insertion position to be feasible.

    Only valid for non-overlapping window sets; raises OverlapError otherwise.
    """
    if windows.overlapping:
        raise OverlapError("feasibility condition requires non-overlapping windows")
    theta = insertion_range(tour, candidate, window, travel)
    best = max_free_time_after_insertion(tour, candidate, window, travel, theta)
    if best is None:
        return False
    loss = slot_metrics(tour, candidate, window, travel, theta).loss
    return best - loss >= 0
