"""Experiment grid over setups, scenarios, fleet sizes, fill levels and methods."""

from __future__ import annotations

import csv
import io as _io
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from statistics import fmean
from typing import Iterable

from .ans import solve_sop_ans
from .booking import SCENARIOS, fill_schedule, snapshot_at_fill
from .instances import ConfigError, GenConfig, generate_instance, probe_customers
from .simple import SlotQuery, solve_sop_simple
from .tsptw import solve_sop_tsptw

log = logging.getLogger(__name__)

METHODS = ("simple", "tsptw", "ans")
SOLVERS = {"simple": solve_sop_simple, "tsptw": solve_sop_tsptw, "ans": solve_sop_ans}
DEFAULT_FILLS = (0.85, 0.90, 0.95, 0.99)


@dataclass(frozen=True)
class ExperimentConfig:
    setups: tuple[str, ...] = ("I", "II", "III")
    scenarios: tuple[str, ...] = SCENARIOS
    vehicles: tuple[int, ...] = (5, 10)
    fills: tuple[float, ...] = DEFAULT_FILLS
    methods: tuple[str, ...] = METHODS
    instances: int = 10
    probes: int = 1
    pool: int = 1000
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        for name in ("setups", "scenarios", "vehicles", "fills", "methods"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.setups or set(self.setups) - {"I", "II", "III"}:
            raise ConfigError(f"setups must be drawn from I, II, III: {self.setups}")
        if not self.scenarios or set(self.scenarios) - set(SCENARIOS):
            raise ConfigError(f"unknown scenario in {self.scenarios}")
        if not self.methods or set(self.methods) - set(METHODS):
            raise ConfigError(f"unknown method in {self.methods}")
        if not self.vehicles or min(self.vehicles) < 1:
            raise ConfigError("vehicle counts must be positive")
        if not self.fills or any(not 0 < f <= 1 for f in self.fills):
            raise ConfigError("fill levels must lie in (0, 1]")
        if self.instances < 1 or self.probes < 1 or self.jobs < 1 or self.pool < 1:
            raise ConfigError("instances, probes, pool and jobs must be positive")

    @classmethod
    def full(cls, **overrides) -> ExperimentConfig:
        """The large grid: 100 instances per cell, 20/40/60 vehicles, pool 5000."""
        base = dict(instances=100, vehicles=(20, 40, 60), pool=5000)
        base.update(overrides)
        return cls(**base)

    def cells(self):
        for setup in self.setups:
            for scenario in self.scenarios:
                for v in self.vehicles:
                    for f in self.fills:
                        yield setup, scenario, v, f


@dataclass(frozen=True)
class QueryRecord:
    """Outcome of every method for one probe customer in one cell."""

    setup: str
    scenario: str
    vehicles: int
    fill: float
    instance: int
    probe: int
    p_hat: int
    slots: dict[str, int]
    seconds: dict[str, float]
    combined: int
    n_windows: int


@dataclass(frozen=True)
class ResultRow:
    setup: str
    scenario: str
    vehicles: int
    fill: float
    queries: int
    p_hat: float
    slots: dict[str, float] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)
    combined: float = 0.0


def instance_config(config: ExperimentConfig, setup: str, vehicles: int, index: int) -> GenConfig:
    return GenConfig(
        seed=config.seed + index,
        vehicles=vehicles,
        n_customer_pool=config.pool,
        window_setup=setup,
        depot_placement="center" if index % 2 == 0 else "top-left",
    )


def run_instance(config: ExperimentConfig, setup: str, vehicles: int,
                 index: int) -> list[QueryRecord]:
    gen = instance_config(config, setup, vehicles, index)
    instance = generate_instance(gen)
    records = []
    for scenario in config.scenarios:
        traj = fill_schedule(instance, scenario)
        for fill in config.fills:
            schedule = snapshot_at_fill(traj, fill)
            probes = probe_customers(instance, schedule, config.probes, seed=gen.seed)
            for j, cand in enumerate(probes):
                query = SlotQuery(schedule, cand)
                slots, secs, union = {}, {}, set()
                for method in config.methods:
                    t0 = time.perf_counter()
                    result = SOLVERS[method](query)
                    secs[method] = time.perf_counter() - t0
                    slots[method] = len(result.available)
                    union |= result.available
                records.append(QueryRecord(setup, scenario, vehicles, fill, index, j,
                                           traj.p_hat, slots, secs, len(union),
                                           len(instance.windows)))
        log.info("setup %s vehicles %d instance %d %s: p_hat %d",
                 setup, vehicles, index, scenario, traj.p_hat)
    return records


def _run_task(args):
    return run_instance(*args)


def run_queries(config: ExperimentConfig) -> list[QueryRecord]:
    tasks = [(config, s, v, k) for s in config.setups for v in config.vehicles
             for k in range(config.instances)]
    if config.jobs == 1:
        chunks = map(_run_task, tasks)
        records = [r for chunk in chunks for r in chunk]
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = [r for chunk in pool.map(_run_task, tasks) for r in chunk]
    return records


def aggregate(config: ExperimentConfig, records: Iterable[QueryRecord]) -> list[ResultRow]:
    groups = defaultdict(list)
    for r in records:
        groups[(r.setup, r.scenario, r.vehicles, r.fill)].append(r)
    rows = []
    for cell in config.cells():
        group = groups.get(cell)
        if not group:
            continue
        p_hats = {(r.instance): r.p_hat for r in group}
        rows.append(ResultRow(
            *cell,
            queries=len(group),
            p_hat=fmean(p_hats.values()),
            slots={m: fmean(r.slots[m] for r in group) for m in config.methods},
            seconds={m: fmean(r.seconds[m] for r in group) for m in config.methods},
            combined=fmean(r.combined for r in group),
        ))
    return rows


def run_bench(config: ExperimentConfig) -> list[ResultRow]:
    return aggregate(config, run_queries(config))


# -- output ------------------------------------------------------------------

def csv_columns(methods: Iterable[str] = METHODS) -> list[str]:
    methods = [m for m in METHODS if m in set(methods)]
    return (["setup", "scenario", "vehicles", "fill", "queries", "avg_p_hat"]
            + [f"time_{m}" for m in methods]
            + [f"slots_{m}" for m in methods]
            + ["slots_combined"])


def rows_to_csv(rows: list[ResultRow], methods: Iterable[str] = METHODS,
                timings: bool = True) -> str:
    cols = csv_columns(methods)
    if not timings:
        cols = [c for c in cols if not c.startswith("time_")]
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        out = {
            "setup": row.setup, "scenario": row.scenario, "vehicles": row.vehicles,
            "fill": f"{row.fill:.2f}", "queries": row.queries,
            "avg_p_hat": f"{row.p_hat:.1f}", "slots_combined": f"{row.combined:.2f}",
        }
        for m, v in row.slots.items():
            out[f"slots_{m}"] = f"{v:.2f}"
        if timings:
            for m, v in row.seconds.items():
                out[f"time_{m}"] = f"{v:.6f}"
        writer.writerow({c: out.get(c, "") for c in cols})
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ResultRow]:
    reader = csv.DictReader(_io.StringIO(text))
    missing = {"setup", "scenario", "vehicles", "fill", "avg_p_hat", "slots_combined"} - set(
        reader.fieldnames or ())
    if missing:
        raise ValueError(f"result table lacks columns {sorted(missing)}")
    rows = []
    for rec in reader:
        slots = {m: float(rec[f"slots_{m}"]) for m in METHODS if rec.get(f"slots_{m}")}
        secs = {m: float(rec[f"time_{m}"]) for m in METHODS if rec.get(f"time_{m}")}
        rows.append(ResultRow(rec["setup"], rec["scenario"], int(rec["vehicles"]),
                              float(rec["fill"]), int(rec.get("queries") or 0),
                              float(rec["avg_p_hat"]), slots, secs,
                              float(rec["slots_combined"])))
    return rows


def format_duration(seconds: float) -> str:
    """Seconds as ``m:ss.mmm``; minutes and a leading zero are dropped when absent."""
    ms = int(round(seconds * 1000))
    minutes, ms = divmod(ms, 60_000)
    if minutes:
        return f"{minutes}:{ms // 1000:02d}.{ms % 1000:03d}"
    text = f"{ms // 1000}.{ms % 1000:03d}"
    return text[1:] if text.startswith("0.") else text


def render_tables(rows: list[ResultRow]) -> str:
    """Aligned text tables, one block per setup and scenario."""
    blocks = defaultdict(list)
    for row in rows:
        blocks[(row.setup, row.scenario)].append(row)
    out = []
    for (setup, scenario), group in blocks.items():
        group.sort(key=lambda r: (r.vehicles, r.fill))
        methods = [m for m in METHODS if any(m in r.slots for r in group)]
        header = ["Vehicles / fill"] + [f"{r.vehicles} / {r.fill:.0%}" for r in group]
        body = [["Avg. p-hat"] + [f"{r.p_hat:.1f}" for r in group]]
        for m in methods:
            body.append([f"Run time {m}"] + [
                format_duration(r.seconds[m]) if m in r.seconds else "-" for r in group])
        for m in methods:
            body.append([f"Slots {m}"] + [
                f"{r.slots[m]:.2f}" if m in r.slots else "-" for r in group])
        body.append(["Slots combined"] + [f"{r.combined:.2f}" for r in group])
        table = [header] + body
        widths = [max(len(line[k]) for line in table) for k in range(len(header))]
        lines = [f"Setup {setup}, {scenario}"]
        for k, line in enumerate(table):
            cells = [line[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(line[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
            if k == 0:
                lines.append("-" * len(lines[-1]))
        out.append("\n".join(lines))
    return "\n\n".join(out) + "\n"


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
