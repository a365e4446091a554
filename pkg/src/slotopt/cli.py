"""Command-line front end: ``slotopt generate|fill|solve|bench|report``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .bench import METHODS, SOLVERS, ExperimentConfig, render_tables, rows_from_csv, rows_to_csv, run_bench, format_duration
from .booking import SCENARIOS, FillTrajectory, fill_schedule, snapshot_at_fill
from .instances import ConfigError, GenConfig, Instance, generate_instance, probe_customers
from .model import Location, Order, StructureError, hhmm
from .simple import SlotQuery

EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fill_level(text: str) -> float:
    value = float(text.rstrip("%")) / (100 if text.endswith("%") else 1)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"fill level {text} outside (0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slotopt", description="Delivery slot availability for attended home delivery.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a seeded benchmark instance")
    g.add_argument("-o", "--output", required=True, type=Path)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--setup", choices=["I", "II", "III"], default="I")
    g.add_argument("--vehicles", type=int, default=20)
    g.add_argument("--pool", type=int, default=5000)
    g.add_argument("--depot", choices=["center", "top-left"], default="center")

    f = sub.add_parser("fill", help="simulate bookings on an instance")
    f.add_argument("instance", type=Path)
    f.add_argument("-o", "--output", required=True, type=Path, help="trajectory file")
    f.add_argument("--scenario", choices=SCENARIOS, default="non-optimized")
    f.add_argument("--vehicles", type=int)
    f.add_argument("--snapshot", type=_fill_level, help="also write the schedule at this fill level")
    f.add_argument("--schedule-out", type=Path)

    s = sub.add_parser("solve", help="answer one slot query against a schedule")
    s.add_argument("schedule", type=Path, help="schedule or trajectory file")
    s.add_argument("--fill", type=_fill_level, help="fill level when reading a trajectory")
    s.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    s.add_argument("--at", nargs=2, type=int, metavar=("X", "Y"), help="candidate location in meters")
    s.add_argument("--weight", type=int, default=7)
    s.add_argument("--service", type=int, default=300)
    s.add_argument("--instance", type=Path, help="instance to draw a probe customer from")
    s.add_argument("--probe-seed", type=int, default=0)

    b = sub.add_parser("bench", help="run the experiment grid")
    b.add_argument("-o", "--output", type=Path, help="CSV destination (default stdout)")
    b.add_argument("--full", action="store_true", help="100 instances, 20/40/60 vehicles, pool 5000")
    b.add_argument("--setups", nargs="+", choices=["I", "II", "III"])
    b.add_argument("--scenarios", nargs="+", choices=SCENARIOS)
    b.add_argument("--vehicles", nargs="+", type=int)
    b.add_argument("--fills", nargs="+", type=_fill_level)
    b.add_argument("--methods", nargs="+", choices=METHODS)
    b.add_argument("--instances", type=int)
    b.add_argument("--probes", type=int)
    b.add_argument("--pool", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--jobs", type=int)
    b.add_argument("--no-timings", action="store_true", help="omit timing columns")
    b.add_argument("--text", action="store_true", help="also print aligned tables")

    r = sub.add_parser("report", help="render a bench CSV")
    r.add_argument("results", type=Path)
    r.add_argument("--format", choices=["text", "csv"], default="text")
    return p


def _cmd_generate(args) -> int:
    config = GenConfig(seed=args.seed, vehicles=args.vehicles, n_customer_pool=args.pool,
                       window_setup=args.setup, depot_placement=args.depot)
    io.write_instance(generate_instance(config), args.output)
    return 0


def _cmd_fill(args) -> int:
    instance = io.read_instance(args.instance)
    traj = fill_schedule(instance, args.scenario, args.vehicles)
    io.write_trajectory(traj, args.output)
    print(f"p_hat {traj.p_hat}  events {len(traj.events)}")
    if args.snapshot is not None:
        if args.schedule_out is None:
            raise _Usage("--snapshot needs --schedule-out")
        io.write_schedule(snapshot_at_fill(traj, args.snapshot), args.schedule_out)
    return 0


class _Usage(Exception):
    pass


def _load_schedule(args):
    loaded = io.read_any(args.schedule)
    if isinstance(loaded, FillTrajectory):
        if args.fill is None:
            raise _Usage("a trajectory needs --fill")
        return snapshot_at_fill(loaded, args.fill)
    if isinstance(loaded, Instance):
        raise _Usage("solve needs a schedule or trajectory, not an instance")
    return loaded


def _cmd_solve(args) -> int:
    schedule = _load_schedule(args)
    next_id = max(schedule.orders, default=0) + 1
    if args.instance is not None:
        instance = io.read_instance(args.instance)
        cand = probe_customers(instance, schedule, 1, args.probe_seed)[0]
    elif args.at is not None:
        cand = Order(next_id, Location(*args.at), args.weight, args.service, schedule.windows[0])
    else:
        raise _Usage("give --at X Y or --instance")
    query = SlotQuery(schedule, cand)
    results = {m: SOLVERS[m](query) for m in args.methods}

    print(f"candidate {cand.id} at ({cand.location.x}, {cand.location.y}) weight {cand.weight}; "
          f"{schedule.n_orders} orders on {len(schedule.tours)} tours")
    head = f"{'window':<14}" + "".join(f"{m:>10}" for m in args.methods) + "  details"
    print(head)
    print("-" * len(head))
    for w in schedule.windows:
        cells, details = [], []
        for m in args.methods:
            v = results[m].verdicts[w.id]
            cells.append(f"{'yes' if v.feasible else 'no':>10}")
            if v.feasible and m == "ans" and v.moves:
                details.append(f"ans: {len(v.moves)} moves, vehicle {v.vehicle}")
            elif v.feasible and m != "ans":
                details.append(f"{m}: vehicle {v.vehicle}")
            if v.note:
                details.append(f"{m}: {v.note}")
        label = f"{hhmm(w.start)}-{hhmm(w.end)}"
        print(f"{label:<14}" + "".join(cells) + ("  " + "; ".join(details) if details else ""))
    print("-" * len(head))
    union = set().union(*(r.available for r in results.values()))
    print(f"{'available':<14}" + "".join(f"{len(results[m]):>10}" for m in args.methods)
          + f"  combined {len(union)}")
    print(f"{'time':<14}" + "".join(f"{format_duration(results[m].seconds):>10}" for m in args.methods))
    return 0


def _cmd_bench(args) -> int:
    overrides = {k: getattr(args, k) for k in
                 ("setups", "scenarios", "vehicles", "fills", "methods", "instances",
                  "probes", "pool", "seed", "jobs")
                 if getattr(args, k) is not None}
    config = ExperimentConfig.full(**overrides) if args.full else ExperimentConfig(**overrides)
    rows = run_bench(config)
    text = rows_to_csv(rows, config.methods, timings=not args.no_timings)
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
    if args.text:
        sys.stdout.write(render_tables(rows))
    return 0


def _cmd_report(args) -> int:
    try:
        rows = rows_from_csv(args.results.read_text())
    except OSError as exc:
        raise io.DataError(f"{args.results}: {exc.strerror}") from None
    except (ValueError, KeyError) as exc:
        raise io.DataError(f"{args.results}: {exc}") from None
    if args.format == "csv":
        methods = [m for m in METHODS if any(m in r.slots for r in rows)]
        timings = any(r.seconds for r in rows)
        sys.stdout.write(rows_to_csv(rows, methods, timings=timings))
    else:
        sys.stdout.write(render_tables(rows))
    return 0


COMMANDS = {"generate": _cmd_generate, "fill": _cmd_fill, "solve": _cmd_solve,
            "bench": _cmd_bench, "report": _cmd_report}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        print(f"slotopt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"slotopt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.DataError, StructureError) as exc:
        print(f"slotopt {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
