"""2D world model, forward path geometry and seeded scenario generation.

All bearings are global: radians counterclockwise from +x, normalized to
(-pi, pi]. The vehicle heading is assumed known, so angles measured on the
vehicle are already rotated into this frame.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, PackingError

C = 3e8  # m/s, rounded so hand-worked examples come out exact


class Point2D(NamedTuple):
    x: float
    y: float

    def __add__(self, other):
        return Point2D(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2D(self.x - other[0], self.y - other[1])


Segment = tuple[Point2D, Point2D]


def as_point(p) -> Point2D:
    x, y = (float(v) for v in p)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ConfigError(f"non-finite coordinate {p!r}")
    return Point2D(x, y)


def wrap_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.remainder(a, 2 * math.pi)
    return math.pi if a <= -math.pi else a


def bearing(src, dst) -> float:
    return wrap_angle(math.atan2(dst[1] - src[1], dst[0] - src[0]))


def unit(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


@dataclass(frozen=True)
class Scenario:
    anchor: Point2D
    vehicle: Point2D
    scatterers: tuple[Point2D, ...] = ()
    obstacles: tuple[Segment, ...] = ()
    c: float = C

    def __post_init__(self):
        object.__setattr__(self, "anchor", as_point(self.anchor))
        object.__setattr__(self, "vehicle", as_point(self.vehicle))
        object.__setattr__(self, "scatterers", tuple(as_point(s) for s in self.scatterers))
        object.__setattr__(
            self, "obstacles", tuple((as_point(a), as_point(b)) for a, b in self.obstacles)
        )
        if self.anchor == self.vehicle:
            raise ConfigError("anchor and vehicle coincide")
        if len(set(self.scatterers)) != len(self.scatterers):
            raise ConfigError("scatterers must be pairwise distinct")
        if not self.c > 0:
            raise ConfigError("propagation speed must be positive")


@dataclass(frozen=True)
class PathObservation:
    """One detected path: departure/arrival bearings and delay relative to path 1.

    ``flight_dist_m`` and ``bounce_count`` are ground truth, only filled in by
    the forward oracle.
    """

    aod_rad: float
    aoa_rad: float
    rel_delay_s: float
    flight_dist_m: float | None = None
    bounce_count: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "aod_rad", wrap_angle(float(self.aod_rad)))
        object.__setattr__(self, "aoa_rad", wrap_angle(float(self.aoa_rad)))


@dataclass(frozen=True)
class EpochObservation:
    """Paths seen at one instant plus the vehicle's displacement since then."""

    paths: tuple[PathObservation, ...]
    ego_displacement_m: Point2D = field(default=Point2D(0.0, 0.0))

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(self, "ego_displacement_m", as_point(self.ego_displacement_m))


def trace_path(anchor, vehicle, via: Sequence, c: float = C) -> PathObservation | None:
    """Exact path elements for the polyline anchor -> via[0] -> ... -> vehicle.

    Returns None when a bearing is undefined (a bounce point sits on the anchor
    or on the vehicle). ``rel_delay_s`` is left at 0; callers reference it.
    """
    pts = [as_point(anchor), *(as_point(v) for v in via), as_point(vehicle)]
    legs = [math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    if legs[0] == 0.0 or legs[-1] == 0.0:
        return None
    return PathObservation(
        aod_rad=bearing(pts[0], pts[1]),
        aoa_rad=bearing(pts[-1], pts[-2]),
        rel_delay_s=0.0,
        flight_dist_m=math.fsum(legs),
        bounce_count=len(via),
    )


def reference_delays(paths: Sequence[PathObservation], c: float = C) -> list[PathObservation]:
    """Re-reference oracle paths so that the first one has zero relative delay."""
    if not paths:
        return []
    d0 = paths[0].flight_dist_m
    return [replace(p, rel_delay_s=(p.flight_dist_m - d0) / c) for p in paths]


def enumerate_paths(scenario: Scenario, max_bounces: int = 1) -> list[PathObservation]:
    """Forward oracle: every single-bounce path, plus ordered scatterer pairs
    when ``max_bounces`` is 2.

    Paths are sorted by flight distance, so path 1 is the earliest arrival and
    every relative delay is non-negative.
    """
    if max_bounces not in (1, 2):
        raise ConfigError("max_bounces must be 1 or 2")
    routes = [(s,) for s in scenario.scatterers]
    if max_bounces == 2:
        routes += list(itertools.permutations(scenario.scatterers, 2))
    paths = []
    for via in routes:
        p = trace_path(scenario.anchor, scenario.vehicle, via, scenario.c)
        if p is None:
            warnings.warn(f"skipping path via {via}: bounce point on an endpoint", stacklevel=2)
            continue
        paths.append(p)
    paths.sort(key=lambda p: p.flight_dist_m)
    return reference_delays(paths, scenario.c)


def ego_translate(obs: EpochObservation, displacement) -> EpochObservation:
    # path bearings/delays belong to the epoch they were measured in; only the
    # bookkeeping of how far the vehicle moved since then changes
    return replace(obs, ego_displacement_m=obs.ego_displacement_m + as_point(displacement))


@dataclass(frozen=True)
class RandomScenarioParams:
    n_scatterers: int = 5
    bounds: tuple[float, float, float, float] = (-200.0, 200.0, -200.0, 200.0)
    min_separation_m: float = 5.0
    anchor: Point2D | None = None
    vehicle: Point2D | None = None
    wall_length_m: float = 0.0
    max_tries: int = 1000
    c: float = C


def random_scenario(seed: int, params: RandomScenarioParams = RandomScenarioParams()) -> Scenario:
    """Draw anchor, vehicle and scatterers uniformly in ``bounds`` by rejection.

    Every pair of points (anchor and vehicle included) ends up at least
    ``min_separation_m`` apart. With ``wall_length_m > 0`` each scatterer also
    gets a wall segment of that length through it, randomly oriented; these
    walls are the obstacle map.
    """
    xmin, xmax, ymin, ymax = params.bounds
    if not (xmax > xmin and ymax > ymin):
        raise ConfigError("empty region")
    if not params.min_separation_m > 0:
        raise ConfigError("min separation must be positive")
    if params.n_scatterers < 0:
        raise ConfigError("negative scatterer count")
    rng = np.random.default_rng(seed)
    placed: list[Point2D] = []

    def draw(fixed=None):
        if fixed is not None:
            p = as_point(fixed)
            placed.append(p)
            return p
        for _ in range(params.max_tries):
            p = Point2D(float(rng.uniform(xmin, xmax)), float(rng.uniform(ymin, ymax)))
            if all(math.dist(p, q) >= params.min_separation_m for q in placed):
                placed.append(p)
                return p
        raise PackingError(
            f"could not place point {len(placed) + 1} after {params.max_tries} tries"
        )

    anchor = draw(params.anchor)
    vehicle = draw(params.vehicle)
    scatterers = tuple(draw() for _ in range(params.n_scatterers))
    walls = []
    if params.wall_length_m > 0:
        half = 0.5 * params.wall_length_m
        for s in scatterers:
            d = unit(float(rng.uniform(0.0, math.pi)))
            walls.append((as_point(s - half * d), as_point(s + half * d)))
    return Scenario(anchor, vehicle, scatterers, tuple(walls), params.c)


def segment_distance(p, seg: Segment) -> float:
    a = np.asarray(seg[0], float)
    ab = np.asarray(seg[1], float) - a
    ap = np.asarray(p, float) - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else min(1.0, max(0.0, float(ap @ ab) / denom))
    return float(np.hypot(*(ap - t * ab)))
