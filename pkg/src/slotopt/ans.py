"""Adaptive Neighborhood Search for slot availability.

For a target tour and window, frees capacity and window time by relocating
(or exchanging) orders to other tours, then inserts the candidate.  The search
runs in four steps:

1. shed weight until the candidate fits capacity-wise,
2. raise the window's free time until the infeasibility condition is gone,
3. cut the loss time at the window borders using orders outside the window,
4. raise free time further until the candidate can be inserted.

Every step does best-improvement local search and stops at a local optimum.
Orders never change their assigned window.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable

from .metrics import (
    free_time, infeasibility_condition, partition_inside_outside, slot_metrics,
    feasibility_condition,
)
from .model import (
    Order, Schedule, StructureError, TimeWindow, Tour, TravelTime,
    insert_at, is_schedule_feasible, is_tour_feasible,
)
from .simple import SlotQuery, SlotResult, WindowVerdict, simple_insert

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Move:
    """A committed relocation.  Positions refer to the schedule state just before it.

    For a swap, ``partner`` left the target tour from ``partner_position`` and
    was inserted into the source tour (after removing ``order``) at
    ``partner_insert``.
    """

    kind: str
    order: int
    source: int
    target: int
    source_position: int
    target_position: int
    partner: int | None = None
    partner_position: int | None = None
    partner_insert: int | None = None


@dataclass(frozen=True)
class AnsConfig:
    enable_swap: bool = False
    max_moves_per_step: int | None = None
    target_order: str = "vehicle"  # or "spare-capacity"
    validate: bool = False

    def __post_init__(self):
        if self.target_order not in ("vehicle", "spare-capacity"):
            raise ValueError(f"unknown target order policy {self.target_order!r}")


@dataclass(frozen=True)
class AnsOutcome:
    schedule: Schedule
    vehicle: int
    position: int
    moves: tuple[Move, ...]


def one_move(order: Order, source: Tour, target: Tour,
             travel: TravelTime) -> tuple[Tour, Tour, int] | None:
    """Relocate ``order`` from ``source`` to ``target`` within its own window.

    Returns the new source, the new target and the insertion index, or None if
    either resulting tour would be infeasible.
    """
    if source.vehicle == target.vehicle:
        raise StructureError("1-move needs two distinct tours")
    reduced = source.without(source.position_of(order.id))
    if not is_tour_feasible(reduced, travel):
        return None
    pos = simple_insert(target, order, order.window, travel)
    if pos is None:
        return None
    return reduced, insert_at(target, pos, order), pos


def one_swap(order: Order, source: Tour, target: Tour,
             travel: TravelTime) -> tuple[Tour, Tour, Move] | None:
    """Exchange ``order`` with the first partner on ``target`` that keeps both tours feasible."""
    if source.vehicle == target.vehicle:
        raise StructureError("1-swap needs two distinct tours")
    for swap in _swaps(order, source.position_of(order.id), source, target, travel):
        return swap
    return None


def _swaps(order, p, source, target, travel):
    reduced = source.without(p)
    for q, partner in enumerate(target.visits, 1):
        target_reduced = target.without(q)
        if not is_tour_feasible(target_reduced, travel):
            continue
        ia = simple_insert(target_reduced, order, order.window, travel)
        if ia is None:
            continue
        ib = simple_insert(reduced, partner, partner.window, travel)
        if ib is None:
            continue
        new_source = insert_at(reduced, ib, partner)
        new_target = insert_at(target_reduced, ia, order)
        if not (is_tour_feasible(new_source, travel) and is_tour_feasible(new_target, travel)):
            continue
        move = Move("swap", order.id, source.vehicle, target.vehicle, p, ia,
                    partner=partner.id, partner_position=q, partner_insert=ib)
        yield new_source, new_target, move


class _Search:
    def __init__(self, schedule: Schedule, index: int, candidate: Order, window: TimeWindow,
                 config: AnsConfig, on_commit: Callable[[Schedule], None] | None):
        self.base = schedule
        self.tours = list(schedule.tours)
        self.k = index
        self.cand = candidate.in_window(window)
        self.window = window
        self.travel = schedule.travel
        self.config = config
        self.on_commit = on_commit
        self.moves: list[Move] = []
        n_orders = sum(len(t) for t in self.tours)
        self.step_bound = max(1, n_orders * len(self.tours))

    @property
    def tour(self) -> Tour:
        return self.tours[self.k]

    def capacity_ok(self, tour: Tour) -> bool:
        return tour.load + self.cand.weight <= tour.capacity

    def insertable(self) -> bool:
        return simple_insert(self.tour, self.cand, self.window, self.travel) is not None

    def blocked(self, tour: Tour) -> bool:
        return infeasibility_condition(tour, self.cand, self.window, self.travel)

    def free(self, tour: Tour) -> int:
        return free_time(tour, self.window, self.travel)

    def loss(self, tour: Tour) -> int | None:
        return slot_metrics(tour, self.cand, self.window, self.travel).loss

    def targets(self) -> list[int]:
        idx = [j for j in range(len(self.tours)) if j != self.k]
        if self.config.target_order == "spare-capacity":
            idx.sort(key=lambda j: (self.tours[j].load - self.tours[j].capacity, self.tours[j].vehicle))
        else:
            idx.sort(key=lambda j: self.tours[j].vehicle)
        return idx

    def best_move(self, positions, cost: Callable[[Tour], int | None],
                  accept: Callable[[Tour], bool]):
        """Best-improvement move over ``positions`` of the target tour.

        ``cost`` is minimized; None marks an unusable state.  Returns
        (new target tour, new other tour, other tour index, Move) or None at a
        local optimum.
        """
        tour = self.tour
        base = cost(tour)
        travel = self.travel
        ranked = []
        for p in positions:
            reduced = tour.without(p)
            if not is_tour_feasible(reduced, travel):
                continue
            c = cost(reduced)
            if c is None or (base is not None and c >= base) or not accept(reduced):
                continue
            ranked.append((c, p, reduced))
        ranked.sort(key=lambda r: (r[0], r[1]))
        targets = self.targets()
        for _, p, reduced in ranked:
            order = tour.visits[p - 1]
            for j in targets:
                pos = simple_insert(self.tours[j], order, order.window, travel)
                if pos is not None:
                    move = Move("move", order.id, tour.vehicle, self.tours[j].vehicle, p, pos)
                    return reduced, insert_at(self.tours[j], pos, order), j, move
        if not self.config.enable_swap:
            return None

        best = None
        for p in positions:
            order = tour.visits[p - 1]
            for j in targets:
                for new_source, new_target, move in _swaps(order, p, tour, self.tours[j], travel):
                    c = cost(new_source)
                    if c is None or (base is not None and c >= base) or not accept(new_source):
                        continue
                    if best is None or c < best[0]:
                        best = (c, new_source, new_target, j, move)
                    break
        if best is None:
            return None
        return best[1:]

    def commit(self, found) -> None:
        new_source, new_target, j, move = found
        self.tours[self.k] = new_source
        self.tours[j] = new_target
        self.moves.append(move)
        if self.config.validate or self.on_commit is not None:
            snapshot = self.base.with_tours(self.tours)
            if self.config.validate and not is_schedule_feasible(snapshot):
                raise AssertionError(f"infeasible schedule after {move}")
            if self.on_commit is not None:
                self.on_commit(snapshot)

    def descend(self, keep_going: Callable[[], bool], positions: Callable[[], object],
                cost, accept, step: str) -> None:
        cap = self.config.max_moves_per_step
        count = 0
        while keep_going():
            if cap is not None and count >= cap:
                break
            found = self.best_move(positions(), cost, accept)
            if found is None:
                break
            self.commit(found)
            count += 1
            if count > self.step_bound:
                raise AssertionError(f"{step}: move bound {self.step_bound} exceeded")

    def inside(self):
        return partition_inside_outside(self.tour, self.window).inside

    def outside(self):
        return partition_inside_outside(self.tour, self.window).outside

    def run(self) -> AnsOutcome | None:
        cand = self.cand
        # Step 1: capacity
        self.descend(
            lambda: not self.capacity_ok(self.tour),
            lambda: range(1, len(self.tour) + 1),
            lambda t: t.load, lambda t: True, "capacity")
        if not self.capacity_ok(self.tour):
            return None

        # Step 2: free time until the infeasibility condition no longer holds
        neg_free = lambda t: -self.free(t)  # noqa: E731
        self.descend(
            lambda: self.blocked(self.tour), self.inside,
            neg_free, self.capacity_ok, "free time")
        if self.blocked(self.tour):
            return None

        # Step 3: loss time via orders outside the window
        def loss_positive():
            if self.insertable():
                return False
            loss = self.loss(self.tour)
            return loss is not None and loss > 0
        self.descend(
            loss_positive, self.outside, self.loss,
            lambda t: self.capacity_ok(t) and not self.blocked(t), "loss time")

        # Step 4: more free time
        self.descend(
            lambda: not self.insertable(), self.inside,
            neg_free, self.capacity_ok, "free time (final)")

        pos = simple_insert(self.tour, cand, self.window, self.travel)
        if pos is None:
            return None
        self.tours[self.k] = insert_at(self.tour, pos, cand)
        schedule = self.base.with_tours(self.tours)
        if self.config.validate and not is_schedule_feasible(schedule):
            raise AssertionError("infeasible schedule after inserting the candidate")
        return AnsOutcome(schedule, self.tour.vehicle, pos, tuple(self.moves))


def ans_insert(schedule: Schedule, index: int, candidate: Order, window: TimeWindow,
               config: AnsConfig = AnsConfig(),
               on_commit: Callable[[Schedule], None] | None = None) -> AnsOutcome | None:
    """Try to make room for ``candidate`` in ``window`` on tour ``schedule.tours[index]``.

    Works on a private copy; the input schedule is never modified.  Returns the
    modified schedule with the candidate inserted, or None.
    """
    return _Search(schedule, index, candidate, window, config, on_commit).run()


def solve_sop_ans(query: SlotQuery, config: AnsConfig = AnsConfig(),
                  on_commit: Callable[[Schedule], None] | None = None) -> SlotResult:
    schedule = query.schedule
    result = SlotResult("ans", query.candidate.id)
    t_query = time.perf_counter()
    for window in query.windows:
        t0 = time.perf_counter()
        verdict = WindowVerdict(window.id, False, "ans")
        for k in range(len(schedule.tours)):
            outcome = ans_insert(schedule, k, query.candidate, window, config, on_commit)
            if outcome is not None:
                verdict = WindowVerdict(window.id, True, "ans", vehicle=outcome.vehicle,
                                        position=outcome.position, moves=outcome.moves)
                break
        if log.isEnabledFor(logging.DEBUG) and not schedule.windows.overlapping:
            cand = query.candidate.in_window(window)
            flags = [feasibility_condition(t, cand, window, schedule.windows, schedule.travel)
                     for t in schedule.tours]
            log.debug("window %s: feasibility condition holds on %d tours", window.id, sum(flags))
        verdict.seconds = time.perf_counter() - t0
        result.verdicts[window.id] = verdict
    result.seconds = time.perf_counter() - t_query
    return result


def apply_move(schedule: Schedule, move: Move) -> Schedule:
    """Replay one recorded move on ``schedule``."""
    s = schedule.tour_index(move.source)
    t = schedule.tour_index(move.target)
    source, target = schedule.tours[s], schedule.tours[t]
    order = source.visits[move.source_position - 1]
    if order.id != move.order:
        raise StructureError(f"move expects order {move.order} at position {move.source_position}")
    reduced = source.without(move.source_position)
    if move.kind == "move":
        new_source, new_target = reduced, insert_at(target, move.target_position, order)
    elif move.kind == "swap":
        partner = target.visits[move.partner_position - 1]
        if partner.id != move.partner:
            raise StructureError(f"swap expects partner {move.partner}")
        new_target = insert_at(target.without(move.partner_position), move.target_position, order)
        new_source = insert_at(reduced, move.partner_insert, partner)
    else:
        raise StructureError(f"unknown move kind {move.kind!r}")
    tours = list(schedule.tours)
    tours[s], tours[t] = new_source, new_target
    return schedule.with_tours(tours)


def commit_ans(schedule: Schedule, verdict: WindowVerdict, candidate: Order) -> Schedule:
    for move in verdict.moves:
        schedule = apply_move(schedule, move)
    window = schedule.windows.by_id(verdict.window)
    k = schedule.tour_index(verdict.vehicle)
    tour = insert_at(schedule.tours[k], verdict.position, candidate.in_window(window))
    return schedule.replace_tour(k, tour)
