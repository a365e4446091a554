"""Exact single-tour feasibility oracle (TSPTW feasibility by depth-first search).

The search is complete: it either returns a feasible visit order for the tour's
orders plus the candidate, proves none exists, or raises because it ran out of
budget.  Pruning only uses bounds that stay valid without the triangle
inequality (shortest-path lower bounds over the instance's own nodes).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .model import Depot, Order, Tour, TravelTime
from .simple import SlotQuery, SlotResult, WindowVerdict

DEFAULT_MAX_ORDERS = 64
DEFAULT_NODE_BUDGET = 10_000_000


class TsptwError(RuntimeError):
    pass


class InstanceTooLarge(TsptwError):
    """The instance exceeds the configured order cap for the exact search."""


class BudgetExhausted(TsptwError):
    """The node budget ran out before the search could decide."""


@dataclass(frozen=True)
class TsptwInstance:
    orders: tuple[Order, ...]
    depot: Depot
    shift_start: int
    shift_end: int
    capacity: int
    travel: TravelTime

    @classmethod
    def from_tour(cls, tour: Tour, candidate: Order, travel: TravelTime) -> TsptwInstance:
        return cls(tour.visits + (candidate,), tour.depot, tour.shift_start,
                   tour.shift_end, tour.capacity, travel)


def _lower_bounds(nodes, travel) -> list[list[int]]:
    # shortest travel-plus-intermediate-service between nodes, depot never intermediate
    n = len(nodes)
    d = [[travel(u, v) for v in nodes] for u in nodes]
    for x in range(1, n):
        sx = nodes[x].service
        dx = d[x]
        for u in range(n):
            via = d[u][x] + sx
            du = d[u]
            for v in range(n):
                if via + dx[v] < du[v]:
                    du[v] = via + dx[v]
    return d


def tsptw_feasible(instance: TsptwInstance, *, max_orders: int = DEFAULT_MAX_ORDERS,
                   node_budget: int = DEFAULT_NODE_BUDGET,
                   prune: bool = True) -> tuple[Order, ...] | None:
    """Return a feasible visit sequence for all orders, or None if none exists.

    ``prune=False`` disables every bound and the dominance memo; verdicts must
    not change, only the run time.
    """
    orders = sorted(instance.orders, key=lambda o: (o.window.start, o.id))
    n = len(orders)
    if n > max_orders:
        raise InstanceTooLarge(f"{n} orders exceeds the cap of {max_orders}")
    if sum(o.weight for o in orders) > instance.capacity:
        return None

    travel = instance.travel
    nodes = [instance.depot] + orders
    t = [[travel(u, v) for v in nodes] for u in nodes]
    lb = _lower_bounds(nodes, travel) if prune else t
    svc = [0] + [o.service for o in orders]
    ws = [0] + [o.window.start for o in orders]
    we = [0] + [o.window.end for o in orders]
    end = instance.shift_end
    full = (1 << n) - 1
    seen: dict[tuple[int, int], int] = {}
    expansions = 0
    path: list[int] = []

    def doomed(mask: int, last: int, dep: int) -> bool:
        row = lb[last]
        if dep + row[0] > end:
            return True
        rest = full & ~mask
        while rest:
            bit = rest & -rest
            r = bit.bit_length()
            rest ^= bit
            arr = dep + row[r]
            if arr > we[r]:
                return True
            if max(arr, ws[r]) + svc[r] + lb[r][0] > end:
                return True
        return False

    def search(mask: int, last: int, arrival: int) -> bool:
        nonlocal expansions
        expansions += 1
        if expansions > node_budget:
            raise BudgetExhausted(f"node budget {node_budget} exhausted")
        dep = arrival + svc[last]
        if mask == full:
            return dep + t[last][0] <= end
        if prune:
            key = (mask, last)
            best = seen.get(key)
            if best is not None and best <= arrival:
                return False
            seen[key] = arrival
            if doomed(mask, last, dep):
                return False
        row = t[last]
        for r in range(1, n + 1):
            bit = 1 << (r - 1)
            if mask & bit:
                continue
            arr = dep + row[r]
            if arr > we[r]:
                continue
            if arr < ws[r]:
                arr = ws[r]
            path.append(r)
            if search(mask | bit, r, arr):
                return True
            path.pop()
        return False

    if search(0, 0, instance.shift_start):
        return tuple(orders[r - 1] for r in path)
    return None


def solve_sop_tsptw(query: SlotQuery, *, max_orders: int = DEFAULT_MAX_ORDERS,
                    node_budget: int = DEFAULT_NODE_BUDGET) -> SlotResult:
    schedule = query.schedule
    result = SlotResult("tsptw", query.candidate.id)
    t_query = time.perf_counter()
    for window in query.windows:
        t0 = time.perf_counter()
        cand = query.candidate.in_window(window)
        verdict = WindowVerdict(window.id, False, "tsptw")
        notes = []
        for tour in schedule.tours:
            instance = TsptwInstance.from_tour(tour, cand, schedule.travel)
            try:
                seq = tsptw_feasible(instance, max_orders=max_orders, node_budget=node_budget)
            except TsptwError as exc:
                notes.append(f"vehicle {tour.vehicle}: {exc}")
                continue
            if seq is not None:
                verdict = WindowVerdict(window.id, True, "tsptw", vehicle=tour.vehicle,
                                        sequence=tuple(o.id for o in seq))
                break
        verdict.note = "; ".join(notes)
        verdict.seconds = time.perf_counter() - t0
        result.verdicts[window.id] = verdict
    result.seconds = time.perf_counter() - t_query
    return result


def commit_tsptw(schedule, verdict: WindowVerdict, candidate: Order):
    window = schedule.windows.by_id(verdict.window)
    k = schedule.tour_index(verdict.vehicle)
    tour = schedule.tours[k]
    by_id = {o.id: o for o in tour.visits}
    by_id[candidate.id] = candidate.in_window(window)
    return schedule.replace_tour(k, tour.with_visits([by_id[i] for i in verdict.sequence]))

