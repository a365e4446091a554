"""Seeded benchmark instances: clustered customer pools and window setups."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    Depot, EuclideanTravel, Location, Order, Schedule, TimeWindow, WindowSet,
    empty_schedule,
)

HOUR = 3600


class ConfigError(ValueError):
    pass


def window_setup(kind: str) -> WindowSet:
    """The three benchmark window sets: ``I``, ``II`` or ``III``."""
    kind = kind.upper()
    if kind == "I":
        spans = [(h, h + 1) for h in range(8, 18)]
    elif kind == "II":
        spans = [(h, h + 1.5) for h in range(8, 17)] + [(17, 18)]
    elif kind == "III":
        spans = [(h, h + 1) for h in range(8, 17)] + [(8, 11), (11, 14), (14, 17)]
    else:
        raise ConfigError(f"unknown window setup {kind!r}")
    return WindowSet(
        TimeWindow(k, int(a * HOUR), int(b * HOUR)) for k, (a, b) in enumerate(spans, 1)
    )


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    grid_size_m: int = 20_000
    n_clusters: int = 15
    clustered_fraction: float = 0.8
    n_customer_pool: int = 5000
    vehicles: int = 20
    depot_placement: str = "center"  # or "top-left"
    speed_kmh: float = 20.0
    distance_correction: float = 1.5
    service_s: int = 300
    weight_mean: float = 7.0
    weight_sd: float = 2.0
    weight_min: int = 1
    weight_max: int = 15
    capacity: int = 200
    window_setup: str = "I"
    shift_start: int = 7 * HOUR + 1800
    shift_end: int = 18 * HOUR + 1800
    cluster_var_range: tuple[float, float] = (100.0 ** 2, 2000.0 ** 2)

    def __post_init__(self):
        if not 0.0 <= self.clustered_fraction <= 1.0:
            raise ConfigError("clustered_fraction must lie in [0, 1]")
        if self.n_customer_pool < 0 or self.vehicles < 1 or self.grid_size_m < 1:
            raise ConfigError("pool size, vehicle count and grid size must be positive")
        if self.n_clusters < 1 and self.clustered_fraction > 0:
            raise ConfigError("clustered customers need at least one cluster")
        if self.depot_placement not in ("center", "top-left"):
            raise ConfigError(f"unknown depot placement {self.depot_placement!r}")
        if not self.weight_min <= self.weight_max:
            raise ConfigError("weight bounds are inverted")
        if self.capacity < 1 or self.service_s < 1 or self.shift_start >= self.shift_end:
            raise ConfigError("capacity, service time and shift must be positive")
        lo, hi = self.cluster_var_range
        if not 0 <= lo <= hi:
            raise ConfigError("cluster variance range is inverted")
        window_setup(self.window_setup)


@dataclass(frozen=True)
class Cluster:
    center: tuple[float, float]
    var: tuple[float, float]
    angle: float

    def covariance(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        rot = np.array([[c, -s], [s, c]])
        return rot @ np.diag(self.var) @ rot.T


@dataclass(frozen=True)
class Instance:
    config: GenConfig
    depot: Depot
    windows: WindowSet
    clusters: tuple[Cluster, ...]
    pool: tuple[Order, ...]
    travel: EuclideanTravel = field(default_factory=EuclideanTravel)

    def empty_schedule(self, vehicles: int | None = None) -> Schedule:
        cfg = self.config
        return empty_schedule(vehicles or cfg.vehicles, self.windows, self.travel, self.depot,
                              (cfg.shift_start, cfg.shift_end), cfg.capacity)

    def sample_locations(self, rng: np.random.Generator, k: int) -> list[Location]:
        """``k`` independent draws from the instance's cluster/uniform mixture."""
        return _sample_locations(rng, k, self.config, self.clusters, exact=False)

    def sample_weights(self, rng: np.random.Generator, k: int) -> list[int]:
        return _sample_weights(rng, k, self.config)


def depot_location(config: GenConfig) -> Location:
    g = config.grid_size_m
    if config.depot_placement == "center":
        return Location(g // 2, g // 2)
    return Location(g // 4, 3 * g // 4)


def _sample_locations(rng, k, config: GenConfig, clusters, exact=True) -> list[Location]:
    # exact: the clustered share is fixed at round(fraction * k) rather than binomial
    g = config.grid_size_m
    if exact:
        n_clustered = int(round(config.clustered_fraction * k))
    else:
        n_clustered = int(rng.binomial(k, config.clustered_fraction))
    pts = np.empty((k, 2))
    if n_clustered:
        which = rng.integers(0, len(clusters), size=n_clustered)
        z = rng.standard_normal((n_clustered, 2))
        for idx, cl in enumerate(clusters):
            sel = which == idx
            c, s = math.cos(cl.angle), math.sin(cl.angle)
            sx, sy = math.sqrt(cl.var[0]), math.sqrt(cl.var[1])
            u = z[sel, 0] * sx
            v = z[sel, 1] * sy
            pts[:n_clustered][sel, 0] = cl.center[0] + c * u - s * v
            pts[:n_clustered][sel, 1] = cl.center[1] + s * u + c * v
    pts[n_clustered:] = rng.uniform(0, g, size=(k - n_clustered, 2))
    pts = np.clip(np.rint(pts), 0, g).astype(np.int64)
    order = rng.permutation(k)
    return [Location(int(x), int(y)) for x, y in pts[order]]


def _sample_weights(rng, k, config: GenConfig) -> list[int]:
    out: list[int] = []
    while len(out) < k:
        draw = rng.normal(config.weight_mean, config.weight_sd, size=max(16, 2 * (k - len(out))))
        draw = draw[(draw >= config.weight_min) & (draw <= config.weight_max)]
        out.extend(int(w) for w in np.rint(draw[:k - len(out)]))
    return out


def generate_instance(config: GenConfig) -> Instance:
    rng = np.random.default_rng(config.seed)
    g = config.grid_size_m
    lo, hi = config.cluster_var_range
    clusters = tuple(
        Cluster(
            center=(float(rng.uniform(0, g)), float(rng.uniform(0, g))),
            var=(float(rng.uniform(lo, hi)), float(rng.uniform(lo, hi))),
            angle=float(rng.uniform(0, 2 * math.pi)),
        )
        for _ in range(config.n_clusters)
    )
    windows = window_setup(config.window_setup)
    n = config.n_customer_pool
    locations = _sample_locations(rng, n, config, clusters)
    weights = _sample_weights(rng, n, config)
    prefs = rng.integers(0, len(windows), size=n)
    pool = tuple(
        Order(k + 1, loc, w, config.service_s, windows[int(p)])
        for k, (loc, w, p) in enumerate(zip(locations, weights, prefs))
    )
    travel = EuclideanTravel(config.distance_correction, config.speed_kmh)
    return Instance(config, Depot(depot_location(config)), windows, clusters, pool, travel)


def probe_customers(instance: Instance, schedule: Schedule | None, k: int,
                    seed: int) -> list[Order]:
    """``k`` fresh prospective customers drawn like the instance pool.

    Ids start above every pool and scheduled id, so probes never collide.
    """
    rng = np.random.default_rng([seed, 0x5107])
    taken = max((o.id for o in instance.pool), default=0)
    if schedule is not None:
        taken = max([taken, *schedule.orders])
    locations = instance.sample_locations(rng, k)
    weights = instance.sample_weights(rng, k)
    prefs = rng.integers(0, len(instance.windows), size=k)
    return [
        Order(taken + 1 + j, loc, w, instance.config.service_s, instance.windows[int(p)])
        for j, (loc, w, p) in enumerate(zip(locations, weights, prefs))
    ]


def with_seed(config: GenConfig, seed: int) -> GenConfig:
    return replace(config, seed=seed)
