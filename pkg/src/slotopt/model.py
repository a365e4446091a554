"""Domain types, arrival-time propagation and the insertion primitives.

All times are integer seconds since midnight of the delivery day.  Tours are
immutable values; every edit produces a new tour, so what-if evaluation is
just a matter of keeping the old value around.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Protocol, Sequence


class StructureError(ValueError):
    """Raised when a tour or schedule is structurally malformed."""


@dataclass(frozen=True)
class TimeWindow:
    id: int
    start: int
    end: int

    def __post_init__(self):
        if self.start >= self.end:
            raise StructureError(f"window {self.id}: start {self.start} >= end {self.end}")

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlaps(self, other: TimeWindow) -> bool:
        return other.start < self.end and self.start < other.end

    def contains(self, other: TimeWindow) -> bool:
        return self.start <= other.start and other.end <= self.end

    def __str__(self):
        return f"{hhmm(self.start)}-{hhmm(self.end)}"


def hhmm(t: int) -> str:
    return f"{t // 3600:02d}:{t % 3600 // 60:02d}"


class WindowSet(Sequence[TimeWindow]):
    """Ordered collection of distinct delivery windows."""

    def __init__(self, windows: Iterable[TimeWindow]):
        self._windows = tuple(windows)
        self._by_id = {w.id: w for w in self._windows}
        if len(self._by_id) != len(self._windows):
            raise StructureError("duplicate window id")
        if len({(w.start, w.end) for w in self._windows}) != len(self._windows):
            raise StructureError("windows must be pairwise distinct")
        self.overlapping = any(
            u.overlaps(v)
            for k, u in enumerate(self._windows)
            for v in self._windows[k + 1:]
        )

    def __getitem__(self, k):
        return self._windows[k]

    def __len__(self):
        return len(self._windows)

    def __eq__(self, other):
        return isinstance(other, WindowSet) and self._windows == other._windows

    def __hash__(self):
        return hash(self._windows)

    def __repr__(self):
        return f"WindowSet({list(self._windows)!r})"

    def by_id(self, window_id: int) -> TimeWindow:
        try:
            return self._by_id[window_id]
        except KeyError:
            raise StructureError(f"unknown window id {window_id}") from None

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(w.id for w in self._windows)


@dataclass(frozen=True)
class Location:
    x: int
    y: int


@dataclass(frozen=True)
class Depot:
    location: Location
    id: int = 0


DEPOT_ID = 0


@dataclass(frozen=True)
class Order:
    """A customer order.  ``window`` is the assigned delivery slot."""

    id: int
    location: Location
    weight: int
    service: int
    window: TimeWindow

    def __post_init__(self):
        if self.id == DEPOT_ID:
            raise StructureError("order id 0 is reserved for the depot")
        if self.weight < 1:
            raise StructureError(f"order {self.id}: weight must be >= 1")
        if self.service <= 0:
            raise StructureError(f"order {self.id}: service must be > 0")

    def __hash__(self):
        return hash(self.id)

    def in_window(self, window: TimeWindow) -> Order:
        return self if window == self.window else replace(self, window=window)


class TravelTime(Protocol):
    """Travel time in seconds between two nodes (orders or the depot).

    Consumers must not assume symmetry or the triangle inequality.
    """

    def __call__(self, u, v) -> int: ...


class MatrixTravel:
    """Explicit travel matrix indexed by node id (depot is id 0)."""

    def __init__(self, matrix: dict[int, dict[int, int]] | Sequence[Sequence[int]]):
        if isinstance(matrix, dict):
            self.matrix = {u: dict(row) for u, row in matrix.items()}
        else:
            self.matrix = {u: {v: int(t) for v, t in enumerate(row)} for u, row in enumerate(matrix)}
        for u, row in self.matrix.items():
            if row.get(u, 0) != 0:
                raise StructureError(f"travel time from node {u} to itself must be 0")
            if any(t < 0 for t in row.values()):
                raise StructureError("travel times must be non-negative")

    def __call__(self, u, v) -> int:
        return self.matrix[u.id][v.id]

    @property
    def node_ids(self) -> list[int]:
        return sorted(self.matrix)


class EuclideanTravel:
    """Travel time proportional to the corrected Euclidean distance.

    ``t = round(correction * dist / speed)`` with halves rounded up.
    """

    def __init__(self, correction: float = 1.5, speed_kmh: float = 20.0):
        self.correction = correction
        self.speed_kmh = speed_kmh
        self._scale = correction * 3600.0 / (speed_kmh * 1000.0)

    def seconds(self, a: Location, b: Location) -> int:
        if a == b:
            return 0
        return math.floor(math.hypot(a.x - b.x, a.y - b.y) * self._scale + 0.5)

    def __call__(self, u, v) -> int:
        return self.seconds(u.location, v.location)

    def __eq__(self, other):
        return (
            isinstance(other, EuclideanTravel)
            and (self.correction, self.speed_kmh) == (other.correction, other.speed_kmh)
        )

    def __hash__(self):
        return hash((self.correction, self.speed_kmh))


@dataclass(frozen=True)
class ArrivalProfile:
    """Earliest/latest arrival per position 0..n+1 plus the tour load.

    ``depart[i]`` is ``alpha[i]`` plus the service time at position ``i``.
    """

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    load: int
    depart: tuple[int, ...] = ()


@dataclass(frozen=True)
class InsertionRange:
    lo: int
    hi: int

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, i) -> bool:
        return self.lo <= i <= self.hi


@dataclass(frozen=True, eq=False)
class Tour:
    vehicle: int
    shift_start: int
    shift_end: int
    capacity: int
    depot: Depot
    visits: tuple[Order, ...] = ()
    _cache: list = field(default_factory=lambda: [None, None], repr=False, compare=False)

    def __post_init__(self):
        if self.shift_start >= self.shift_end:
            raise StructureError(f"tour {self.vehicle}: shift start must precede shift end")
        if self.capacity < 1:
            raise StructureError(f"tour {self.vehicle}: capacity must be positive")
        if not isinstance(self.visits, tuple):
            object.__setattr__(self, "visits", tuple(self.visits))

    def __eq__(self, other):
        if not isinstance(other, Tour):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def key(self) -> tuple:
        return (
            self.vehicle, self.shift_start, self.shift_end, self.capacity,
            self.depot, tuple(o.id for o in self.visits),
        )

    def __len__(self):
        return len(self.visits)

    @property
    def load(self) -> int:
        return sum(o.weight for o in self.visits)

    def node(self, i: int):
        """Node at position ``i`` in 0..n+1 (positions 0 and n+1 are the depot)."""
        if i == 0 or i == len(self.visits) + 1:
            return self.depot
        return self.visits[i - 1]

    def profile(self, travel: TravelTime) -> ArrivalProfile:
        """Arrival profile, memoized on this tour value for ``travel``."""
        cached_travel, prof = self._cache
        if prof is None or cached_travel is not travel:
            prof = compute_arrival_profile(self, travel)
            self._cache[0], self._cache[1] = travel, prof
        return prof

    def with_visits(self, visits: Sequence[Order]) -> Tour:
        return Tour(self.vehicle, self.shift_start, self.shift_end, self.capacity,
                    self.depot, tuple(visits))

    def without(self, position: int) -> Tour:
        """Remove the visit at 1-based ``position``."""
        if not 1 <= position <= len(self.visits):
            raise StructureError(f"position {position} out of range for tour of length {len(self.visits)}")
        v = self.visits
        return self.with_visits(v[:position - 1] + v[position:])

    def position_of(self, order_id: int) -> int:
        for k, o in enumerate(self.visits, 1):
            if o.id == order_id:
                return k
        raise StructureError(f"order {order_id} not on tour {self.vehicle}")


def compute_arrival_profile(tour: Tour, travel: TravelTime) -> ArrivalProfile:
    """Forward earliest and backward latest arrival recursions.

    The profile is total: an infeasible tour still gets one, with some
    ``alpha[i] > beta[i]``.
    """
    visits = tour.visits
    depot = tour.depot
    n = len(visits)
    alpha = [0] * (n + 2)
    beta = [0] * (n + 2)

    alpha[0] = tour.shift_start
    prev, t_prev, svc = depot, tour.shift_start, 0
    for k, o in enumerate(visits, 1):
        t_prev = max(o.window.start, t_prev + svc + travel(prev, o))
        alpha[k] = t_prev
        prev, svc = o, o.service
    alpha[n + 1] = t_prev + svc + travel(prev, depot)

    beta[n + 1] = tour.shift_end
    nxt, t_next = depot, tour.shift_end
    for k in range(n, 0, -1):
        o = visits[k - 1]
        t_next = min(o.window.end, t_next - o.service - travel(o, nxt))
        beta[k] = t_next
        nxt = o
    beta[0] = beta[1] - travel(depot, tour.node(1))
    depart = [alpha[0]] + [alpha[k] + o.service for k, o in enumerate(visits, 1)]
    return ArrivalProfile(tuple(alpha), tuple(beta), sum(o.weight for o in visits), tuple(depart))


def is_tour_feasible(tour: Tour, travel: TravelTime) -> bool:
    prof = tour.profile(travel)
    if prof.load > tour.capacity:
        return False
    alpha = prof.alpha
    for k, o in enumerate(tour.visits, 1):
        if not o.window.start <= alpha[k] <= o.window.end:
            return False
    return alpha[-1] <= tour.shift_end


def insert_at(tour: Tour, i: int, order: Order) -> Tour:
    """Return ``tour`` with ``order`` placed after position ``i`` (0 = after the depot)."""
    n = len(tour.visits)
    if not 0 <= i <= n:
        raise StructureError(f"insertion index {i} outside [0, {n}]")
    v = tour.visits
    return tour.with_visits(v[:i] + (order,) + v[i:])


def insertion_range(tour: Tour, candidate: Order, window: TimeWindow,
                    travel: TravelTime) -> InsertionRange:
    """Positions after which inserting ``candidate`` into ``window`` may work."""
    n = len(tour.visits)
    if n == 0:
        return InsertionRange(0, 0)
    prof = tour.profile(travel)
    # beta[1..n+1] and depart[0..n] are both non-decreasing in the position
    lo = bisect_left(prof.beta, window.start + candidate.service, 1) - 1
    hi = bisect_right(prof.depart, window.end) - 1
    return InsertionRange(lo, hi)


def candidate_arrivals(tour: Tour, i: int, candidate: Order, window: TimeWindow,
                       travel: TravelTime) -> tuple[int, int]:
    """Earliest and latest arrival of ``candidate`` if inserted after position ``i``."""
    prof = tour.profile(travel)
    prev = tour.node(i)
    nxt = tour.node(i + 1)
    svc = prev.service if i else 0
    earliest = max(window.start, prof.alpha[i] + svc + travel(prev, candidate))
    latest = min(window.end, prof.beta[i + 1] - candidate.service - travel(candidate, nxt))
    return earliest, latest


def check_insertion_feasible(tour: Tour, i: int, candidate: Order, window: TimeWindow,
                             travel: TravelTime) -> bool:
    """O(1) time and capacity check for inserting ``candidate`` after position ``i``.

    Exact for feasible tours: agrees with recomputing the inserted tour from scratch.
    """
    n = len(tour.visits)
    if not 0 <= i <= n:
        raise StructureError(f"insertion index {i} outside [0, {n}]")
    if tour.profile(travel).load + candidate.weight > tour.capacity:
        return False
    earliest, latest = candidate_arrivals(tour, i, candidate, window, travel)
    return earliest <= latest


@dataclass(frozen=True, eq=False)
class Schedule:
    tours: tuple[Tour, ...]
    windows: WindowSet
    travel: TravelTime
    depot: Depot

    def __post_init__(self):
        if not isinstance(self.tours, tuple):
            object.__setattr__(self, "tours", tuple(self.tours))
        seen = set()
        for tour in self.tours:
            for o in tour.visits:
                if o.id in seen:
                    raise StructureError(f"order {o.id} appears more than once")
                seen.add(o.id)

    @property
    def orders(self) -> dict[int, Order]:
        return {o.id: o for tour in self.tours for o in tour.visits}

    @property
    def n_orders(self) -> int:
        return sum(len(t.visits) for t in self.tours)

    def fingerprint(self) -> tuple:
        return tuple(t.key() for t in self.tours)

    def with_tours(self, tours: Sequence[Tour]) -> Schedule:
        return Schedule(tuple(tours), self.windows, self.travel, self.depot)

    def replace_tour(self, index: int, tour: Tour) -> Schedule:
        tours = list(self.tours)
        tours[index] = tour
        return self.with_tours(tours)

    def tour_index(self, vehicle: int) -> int:
        for k, t in enumerate(self.tours):
            if t.vehicle == vehicle:
                return k
        raise StructureError(f"no tour for vehicle {vehicle}")


def is_schedule_feasible(schedule: Schedule) -> bool:
    return all(is_tour_feasible(t, schedule.travel) for t in schedule.tours)


def empty_schedule(n_vehicles: int, windows: WindowSet, travel: TravelTime, depot: Depot,
                   shift: tuple[int, int], capacity: int) -> Schedule:
    tours = tuple(Tour(v, shift[0], shift[1], capacity, depot) for v in range(1, n_vehicles + 1))
    return Schedule(tours, windows, travel, depot)


def tour_travel_time(tour: Tour, travel: TravelTime) -> int:
    nodes = (tour.depot, *tour.visits, tour.depot)
    return sum(travel(a, b) for a, b in zip(nodes, nodes[1:]))


def schedule_travel_time(schedule: Schedule) -> int:
    return sum(tour_travel_time(t, schedule.travel) for t in schedule.tours)

