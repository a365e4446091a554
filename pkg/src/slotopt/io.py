"""Plain-text file formats for instances, schedules and fill trajectories.

Every file starts with ``format slotopt-<kind> <version>`` and a ``units``
line; all quantities are integers in meters, seconds and weight units.  Travel
times are either derived (``travel euclidean ...``) or embedded as a matrix
(``travel matrix`` followed by ``row`` lines keyed by node id, depot = 0).

Example schedule::

    format slotopt-schedule 1
    units length=m time=s weight=unit
    depot 10000 10000
    travel euclidean correction=1.5 speed_kmh=20
    window 1 28800 32400
    order 7 1200 5400 6 300 1
    tour 1 27000 66600 200 : 7
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

from .ans import Move
from .booking import Accept, FillTrajectory, trajectory_from_events
from .instances import Cluster, GenConfig, Instance
from .model import (
    Depot, EuclideanTravel, Location, MatrixTravel, Order, Schedule, StructureError,
    TimeWindow, Tour, WindowSet,
)

VERSION = 1
UNITS = "units length=m time=s weight=unit"


class DataError(ValueError):
    """Malformed or inconsistent input file."""


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _travel_lines(travel, node_ids: Iterable[int]) -> list[str]:
    if isinstance(travel, EuclideanTravel):
        return [f"travel euclidean correction={_fmt_float(travel.correction)} "
                f"speed_kmh={_fmt_float(travel.speed_kmh)}"]
    if isinstance(travel, MatrixTravel):
        ids = sorted(set(node_ids) | set(travel.matrix))
        lines = ["travel matrix", "nodes " + " ".join(map(str, ids))]
        for u in ids:
            lines.append(f"row {u} " + " ".join(str(travel.matrix[u][v]) for v in ids))
        return lines
    raise DataError(f"cannot serialize travel provider {type(travel).__name__}")


def _common_lines(kind: str, depot: Depot, travel, windows: WindowSet, orders) -> list[str]:
    lines = [f"format slotopt-{kind} {VERSION}", UNITS,
             f"depot {depot.location.x} {depot.location.y}"]
    lines += _travel_lines(travel, [0, *(o.id for o in orders)])
    lines += [f"window {w.id} {w.start} {w.end}" for w in windows]
    lines += [f"order {o.id} {o.location.x} {o.location.y} {o.weight} {o.service} {o.window.id}"
              for o in orders]
    return lines


def _tour_line(t: Tour) -> str:
    ids = " ".join(str(o.id) for o in t.visits)
    return f"tour {t.vehicle} {t.shift_start} {t.shift_end} {t.capacity} : {ids}".rstrip()


class _Doc:
    """Parsed file: keyword-tagged lines with their line numbers."""

    def __init__(self, text: str, source: str):
        self.source = source
        self.lines: list[tuple[int, list[str]]] = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.lines.append((no, line.split()))
        if not self.lines or self.lines[0][1][0] != "format":
            raise DataError(f"{source}: missing 'format' header")

    def fail(self, no: int, msg: str):
        raise DataError(f"{self.source}:{no}: {msg}")

    def kind(self) -> tuple[str, int]:
        no, tok = self.lines[0]
        if len(tok) != 3 or not tok[1].startswith("slotopt-"):
            self.fail(no, "expected 'format slotopt-<kind> <version>'")
        try:
            version = int(tok[2])
        except ValueError:
            self.fail(no, "bad format version")
        if version != VERSION:
            self.fail(no, f"unsupported format version {version}")
        return tok[1][len("slotopt-"):], version

    def tagged(self, tag: str):
        return [(no, tok[1:]) for no, tok in self.lines if tok[0] == tag]

    def one(self, tag: str):
        found = self.tagged(tag)
        if len(found) != 1:
            raise DataError(f"{self.source}: expected exactly one '{tag}' line, found {len(found)}")
        return found[0]

    def ints(self, no: int, tokens: list[str], count: int | None = None) -> list[int]:
        if count is not None and len(tokens) != count:
            self.fail(no, f"expected {count} fields, got {len(tokens)}")
        try:
            return [int(t) for t in tokens]
        except ValueError:
            self.fail(no, "expected integers")


def _parse_kv(doc: _Doc, no: int, tokens: list[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            doc.fail(no, f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _parse_common(doc: _Doc):
    no, tok = doc.one("depot")
    x, y = doc.ints(no, tok, 2)
    depot = Depot(Location(x, y))

    windows = []
    for no, tok in doc.tagged("window"):
        wid, start, end = doc.ints(no, tok, 3)
        try:
            windows.append(TimeWindow(wid, start, end))
        except StructureError as exc:
            doc.fail(no, str(exc))
    try:
        wset = WindowSet(windows)
    except StructureError as exc:
        raise DataError(f"{doc.source}: {exc}") from None

    orders: dict[int, Order] = {}
    for no, tok in doc.tagged("order"):
        oid, ox, oy, weight, service, wid = doc.ints(no, tok, 6)
        if oid in orders:
            doc.fail(no, f"duplicate order id {oid}")
        try:
            orders[oid] = Order(oid, Location(ox, oy), weight, service, wset.by_id(wid))
        except StructureError as exc:
            doc.fail(no, str(exc))

    no, tok = doc.one("travel")
    if not tok:
        doc.fail(no, "travel mode missing")
    if tok[0] == "euclidean":
        kv = _parse_kv(doc, no, tok[1:])
        try:
            travel = EuclideanTravel(float(kv.get("correction", 1.5)), float(kv.get("speed_kmh", 20)))
        except ValueError:
            doc.fail(no, "bad euclidean parameters")
    elif tok[0] == "matrix":
        nno, ntok = doc.one("nodes")
        ids = doc.ints(nno, ntok)
        rows = {}
        for rno, rtok in doc.tagged("row"):
            vals = doc.ints(rno, rtok, len(ids) + 1)
            rows[vals[0]] = dict(zip(ids, vals[1:]))
        if set(rows) != set(ids):
            doc.fail(nno, "matrix rows do not cover the node list")
        missing = ({0} | set(orders)) - set(ids)
        if missing:
            doc.fail(nno, f"matrix lacks nodes {sorted(missing)}")
        try:
            travel = MatrixTravel(rows)
        except StructureError as exc:
            doc.fail(nno, str(exc))
    else:
        doc.fail(no, f"unknown travel mode {tok[0]!r}")
    return depot, wset, orders, travel


def _parse_tours(doc: _Doc, depot: Depot, orders: dict[int, Order]) -> list[Tour]:
    tours = []
    for no, tok in doc.tagged("tour"):
        if ":" not in tok:
            doc.fail(no, "tour line needs ':' before the visit list")
        k = tok.index(":")
        vehicle, start, end, cap = doc.ints(no, tok[:k], 4)
        ids = doc.ints(no, tok[k + 1:])
        try:
            visits = tuple(orders[i] for i in ids)
        except KeyError as exc:
            doc.fail(no, f"unknown order id {exc.args[0]}")
        try:
            tours.append(Tour(vehicle, start, end, cap, depot, visits))
        except StructureError as exc:
            doc.fail(no, str(exc))
    return tours


def _read(path) -> _Doc:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    return _Doc(text, str(path))


def _expect(doc: _Doc, kind: str):
    found, _ = doc.kind()
    if found != kind:
        raise DataError(f"{doc.source}: expected a {kind} file, found {found}")


# -- schedules ---------------------------------------------------------------

def schedule_text(schedule: Schedule) -> str:
    orders = [o for t in schedule.tours for o in t.visits]
    lines = _common_lines("schedule", schedule.depot, schedule.travel, schedule.windows, orders)
    lines += [_tour_line(t) for t in schedule.tours]
    return "\n".join(lines) + "\n"


def write_schedule(schedule: Schedule, path) -> None:
    Path(path).write_text(schedule_text(schedule))


def parse_schedule(doc: _Doc) -> Schedule:
    depot, windows, orders, travel = _parse_common(doc)
    tours = _parse_tours(doc, depot, orders)
    try:
        schedule = Schedule(tuple(tours), windows, travel, depot)
    except StructureError as exc:
        raise DataError(f"{doc.source}: {exc}") from None
    if set(schedule.orders) != set(orders):
        raise DataError(f"{doc.source}: orders {sorted(set(orders) - set(schedule.orders))} are on no tour")
    return schedule


def read_schedule(path) -> Schedule:
    doc = _read(path)
    _expect(doc, "schedule")
    return parse_schedule(doc)


# -- instances ---------------------------------------------------------------

def instance_text(instance: Instance) -> str:
    cfg = asdict(instance.config)
    lines = _common_lines("instance", instance.depot, instance.travel, instance.windows, instance.pool)
    lines.insert(2, "config " + json.dumps(cfg, sort_keys=True))
    lines += [
        "cluster " + " ".join(_fmt_float(v) for v in (*c.center, *c.var, c.angle))
        for c in instance.clusters
    ]
    return "\n".join(lines) + "\n"


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(instance_text(instance))


def parse_instance(doc: _Doc) -> Instance:
    depot, windows, orders, travel = _parse_common(doc)
    no, _ = doc.one("config")
    raw = next(line for n, line in doc.lines if n == no)
    try:
        cfg = json.loads(" ".join(raw[1:]))
        cfg["cluster_var_range"] = tuple(cfg["cluster_var_range"])
        config = GenConfig(**cfg)
    except (ValueError, TypeError, KeyError) as exc:
        doc.fail(no, f"bad config: {exc}")
    clusters = []
    for cno, tok in doc.tagged("cluster"):
        try:
            cx, cy, vx, vy, ang = (float(t) for t in tok)
        except ValueError:
            doc.fail(cno, "cluster needs 5 numbers")
        clusters.append(Cluster((cx, cy), (vx, vy), ang))
    if not isinstance(travel, EuclideanTravel):
        raise DataError(f"{doc.source}: instances must use euclidean travel")
    return Instance(config, depot, windows, tuple(clusters), tuple(orders.values()), travel)


def read_instance(path) -> Instance:
    doc = _read(path)
    _expect(doc, "instance")
    return parse_instance(doc)


# -- trajectories ------------------------------------------------------------

def trajectory_text(traj: FillTrajectory) -> str:
    initial = traj.initial
    pool = sorted(traj.pool.values(), key=lambda o: o.id)
    lines = _common_lines("trajectory", initial.depot, initial.travel, initial.windows, pool)
    lines.insert(2, f"scenario {traj.scenario}")
    lines += [_tour_line(t) for t in initial.tours]
    for ev in traj.events:
        if isinstance(ev, Accept):
            lines.append(f"accept {ev.order} {ev.vehicle} {ev.position}")
        elif ev.kind == "move":
            lines.append(f"move {ev.order} {ev.source} {ev.target} {ev.source_position} {ev.target_position}")
        else:
            lines.append(f"swap {ev.order} {ev.source} {ev.target} {ev.source_position} "
                         f"{ev.target_position} {ev.partner} {ev.partner_position} {ev.partner_insert}")
    lines.append("marks " + " ".join(map(str, traj.marks)))
    return "\n".join(lines) + "\n"


def write_trajectory(traj: FillTrajectory, path) -> None:
    Path(path).write_text(trajectory_text(traj))


def parse_trajectory(doc: _Doc) -> FillTrajectory:
    depot, windows, orders, travel = _parse_common(doc)
    no, tok = doc.one("scenario")
    if len(tok) != 1:
        doc.fail(no, "scenario takes one value")
    scenario = tok[0]
    initial = Schedule(tuple(_parse_tours(doc, depot, orders)), windows, travel, depot)
    if initial.n_orders:
        raise DataError(f"{doc.source}: trajectories start from empty tours")
    events: list = []
    for no, tok in doc.lines:
        tag, rest = tok[0], tok[1:]
        if tag == "accept":
            order, vehicle, pos = doc.ints(no, rest, 3)
            if order not in orders:
                doc.fail(no, f"unknown order {order}")
            events.append(Accept(order, vehicle, pos))
        elif tag == "move":
            events.append(Move("move", *doc.ints(no, rest, 5)))
        elif tag == "swap":
            v = doc.ints(no, rest, 8)
            events.append(Move("swap", *v[:5], partner=v[5], partner_position=v[6],
                               partner_insert=v[7]))
    mno, mtok = doc.one("marks")
    marks = doc.ints(mno, mtok)
    try:
        return trajectory_from_events(scenario, initial, orders, events, marks)
    except StructureError as exc:
        doc.fail(mno, str(exc))


def read_trajectory(path) -> FillTrajectory:
    doc = _read(path)
    _expect(doc, "trajectory")
    return parse_trajectory(doc)


def read_any(path):
    """Read a schedule, instance or trajectory file, dispatching on its header."""
    doc = _read(path)
    kind, _ = doc.kind()
    parsers = {"schedule": parse_schedule, "instance": parse_instance, "trajectory": parse_trajectory}
    if kind not in parsers:
        raise DataError(f"{path}: unknown file kind {kind!r}")
    return parsers[kind](doc)
