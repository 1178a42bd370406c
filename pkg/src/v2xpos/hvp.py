"""Hidden-vehicle positioning from single-bounce multipath geometry.

A single-bounce path leaves the anchor along its AoD, hits one scatterer and
reaches the vehicle, whose AoA points back at that scatterer. Writing
``a_i`` for the anchor-to-scatterer leg and ``d_i = d_1 + c * tdoa_i`` for
the full flight distance, the vehicle position ``p`` obeys

    p = anchor + a_i * u(aod_i) - (d_i - a_i) * u(aoa_i)

for every path. Two equations per path, unknowns ``p``, ``d_1`` and one
``a_i`` per path: three paths pin the vehicle down.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    ClassificationError,
    ConfigError,
    DegenerateLocusError,
    IllConditionedError,
    InconsistentPathsError,
    InfeasibleError,
    NoCrossingError,
    NoIntersectionError,
    UnderDeterminedError,
)
from .scenario import C, EpochObservation, PathObservation, Point2D, Segment, as_point, segment_distance, unit

SINGLE = "single_bounce"
MULTI = "multi_bounce"
UNUSED = "unused"

COND_MAX = 1e8


@dataclass(frozen=True)
class PositionFix:
    position: Point2D
    d1_m: float
    residual_m: float
    condition: float
    labels: tuple[str, ...] = ()
    feasible: bool = True
    leg_lengths_m: tuple[float, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {
            "x": self.position.x,
            "y": self.position.y,
            "d1": self.d1_m,
            "residual": self.residual_m,
            "condition": self.condition,
            "labels": list(self.labels),
        }


@dataclass(frozen=True)
class LocusLine:
    """Vehicle positions allowed by one path at flight distance ``d_m``.

    ``point_at(a)`` is the position when the anchor-to-scatterer leg is ``a``;
    ``a`` runs over [0, d_m].
    """

    origin: Point2D
    direction: np.ndarray
    scale: float
    d_m: float

    def point_at(self, a: float) -> Point2D:
        return as_point(np.asarray(self.origin) + a * self.scale * self.direction)

    @property
    def end(self) -> Point2D:
        return self.point_at(self.d_m)


def locus_line(obs: PathObservation, anchor, d_i: float) -> LocusLine:
    if not d_i > 0:
        raise ConfigError("flight distance must be positive")
    u_aod, u_aoa = unit(obs.aod_rad), unit(obs.aoa_rad)
    w = u_aod + u_aoa
    scale = float(np.hypot(*w))
    if scale < 1e-12:
        raise DegenerateLocusError("anchor, scatterer and vehicle are collinear")
    origin = as_point(np.asarray(anchor, float) - d_i * u_aoa)
    return LocusLine(origin, w / scale, scale, float(d_i))


def _path_rows(obs: PathObservation, c: float):
    u_aod, u_aoa = unit(obs.aod_rad), unit(obs.aoa_rad)
    return u_aod + u_aoa, u_aoa, c * obs.rel_delay_s


def _finish(x, m, b, paths, ref_cols, offsets, cond, n_fixed):
    """Package a solved system into a PositionFix with feasibility checks."""
    res = m @ x - b
    residual = float(np.sqrt(np.mean(res**2)))
    legs = x[n_fixed:]
    flights = np.array([x[2 + ref_cols[i]] + offsets[i] for i in range(len(paths))])
    d_refs = x[2:n_fixed]
    feasible = bool(np.all(d_refs > 0) and np.all(legs > 0) and np.all(legs < flights))
    return PositionFix(
        position=as_point(x[:2]),
        d1_m=float(x[2]),
        residual_m=residual,
        condition=cond,
        labels=(SINGLE,) * len(paths),
        feasible=feasible,
        leg_lengths_m=tuple(float(v) for v in legs),
    )


def _solve_system(groups, anchor, c, cond_max):
    """Least-squares solve over path groups that each share a reference distance.

    ``groups`` is a list of (paths, displacement). Unknowns are ordered
    [x, y, d_ref per group, a per path].
    """
    paths = [p for g, _ in groups for p in g]
    n, e = len(paths), len(groups)
    if 2 * n < 2 + e + n:
        raise UnderDeterminedError(
            f"{2 * n} equations for {2 + e + n} unknowns ({n} paths, {e} epochs)"
        )
    a0 = np.asarray(anchor, float)
    m = np.zeros((2 * n, 2 + e + n))
    b = np.zeros(2 * n)
    ref_cols, offsets = [], []
    i = 0
    for gi, (group, disp) in enumerate(groups):
        for obs in group:
            w, u_aoa, offset = _path_rows(obs, c)
            r = slice(2 * i, 2 * i + 2)
            m[r, 0:2] = np.eye(2)
            m[r, 2 + gi] = u_aoa
            m[r, 2 + e + i] = -w
            b[r] = a0 - offset * u_aoa + np.asarray(disp, float)
            ref_cols.append(gi)
            offsets.append(offset)
            i += 1
    cond = float(np.linalg.cond(m))
    if not cond <= cond_max:
        raise IllConditionedError(f"condition number {cond:.3g} exceeds {cond_max:.3g}")
    x = np.linalg.lstsq(m, b, rcond=None)[0]
    return _finish(x, m, b, paths, ref_cols, offsets, cond, 2 + e)


def solve_linear(obs: Sequence[PathObservation], anchor, c: float = C,
                 cond_max: float = COND_MAX, require_feasible: bool = False) -> PositionFix:
    """Position, path-1 flight distance and every scatterer leg in one linear solve.

    Exactly determined at three paths, least squares beyond. Solutions with a
    leg outside (0, d_i) or a non-positive d_1 come back with
    ``feasible=False`` (or raise when ``require_feasible``).
    """
    if len(obs) < 3:
        raise UnderDeterminedError(f"need at least 3 paths, got {len(obs)}")
    fix = _solve_system([(list(obs), (0.0, 0.0))], anchor, c, cond_max)
    if require_feasible and not fix.feasible:
        raise InfeasibleError("solution puts a scatterer outside its path")
    return fix


def solve_multi_epoch(epochs: Sequence[EpochObservation], anchor, c: float = C,
                      cond_max: float = COND_MAX) -> PositionFix:
    """Pool paths from several instants into one solve for the current position.

    An epoch whose vehicle has since moved by ``dp`` saw the vehicle at
    ``p - dp``; each epoch keeps its own unknown reference distance because
    its delays are relative to its own first path.
    """
    groups = [(list(ep.paths), ep.ego_displacement_m) for ep in epochs if ep.paths]
    if not groups:
        raise UnderDeterminedError("no paths")
    return _solve_system(groups, anchor, c, cond_max)


def _crossing(l1: LocusLine, l2: LocusLine):
    m = np.column_stack([l1.direction, -l2.direction])
    det = float(np.linalg.det(m))
    if abs(det) < 1e-12:
        return None
    s = np.linalg.solve(m, np.asarray(l2.origin) - np.asarray(l1.origin))
    return np.asarray(l1.origin) + s[0] * l1.direction


@dataclass(frozen=True)
class TrajectorySearch:
    d1_bracket: tuple[float, float] | None = None
    tolerance_m: float = 1e-6
    xatol: float = 1e-10


def _parallel(o1: PathObservation, o2: PathObservation) -> bool:
    w1 = unit(o1.aod_rad) + unit(o1.aoa_rad)
    w2 = unit(o2.aod_rad) + unit(o2.aoa_rad)
    n1, n2 = np.hypot(*w1), np.hypot(*w2)
    if n1 < 1e-12 or n2 < 1e-12:
        return True
    return abs(w1[0] * w2[1] - w1[1] * w2[0]) / (n1 * n2) < 1e-9


def solve_trajectory(obs: Sequence[PathObservation], anchor, c: float = C,
                     search: TrajectorySearch = TrajectorySearch()) -> PositionFix:
    """Graphical method: slide path 1's flight distance d_1 and follow where a
    pivot path's locus crosses the other two; the vehicle is where the two
    crossing points meet.

    The pivot is path 1 unless its locus is parallel to another one (then no
    crossing exists for any d_1), in which case the next path with two
    proper crossings is used. Loci are treated as full lines; a d_1 at which a
    crossing is missing scores +inf and is never selected. The default bracket
    runs from the smallest d_1 keeping every flight distance positive to 10 km
    beyond ten times the largest delay offset.
    """
    if len(obs) != 3:
        raise ConfigError("the trajectory method takes exactly 3 paths")
    obs = list(obs)
    order = next(
        ((i, *(j for j in range(3) if j != i)) for i in range(3)
         if not any(_parallel(obs[i], obs[j]) for j in range(3) if j != i)),
        None,
    )
    if order is None:
        raise NoCrossingError("no path's locus crosses both others")
    offsets = [c * p.rel_delay_s for p in obs]
    if search.d1_bracket is None:
        lo = max(0.0, *(-o for o in offsets)) + 1e-9
        hi = lo + 10 * max(abs(o) for o in offsets) + 1e4
    else:
        lo, hi = search.d1_bracket

    def crossings(d1):
        try:
            loci = [locus_line(obs[i], anchor, d1 + offsets[i]) for i in order]
        except (ConfigError, DegenerateLocusError):
            return None
        qa, qb = _crossing(loci[0], loci[1]), _crossing(loci[0], loci[2])
        if qa is None or qb is None:
            return None
        return qa, qb

    def gap2(d1):
        q = crossings(d1)
        return math.inf if q is None else float(np.sum((q[0] - q[1]) ** 2))

    probes = np.linspace(lo, hi, 5)
    if not any(math.isfinite(gap2(d)) for d in probes):
        raise NoCrossingError("no finite locus crossings inside the search bracket")
    best = minimize_scalar(gap2, bounds=(lo, hi), method="bounded",
                           options={"xatol": search.xatol, "maxiter": 500})
    d1 = float(best.x)
    q = crossings(d1)
    if q is None:
        raise NoCrossingError("locus crossings vanish at the optimum")
    gap = float(np.hypot(*(q[0] - q[1])))
    if gap > search.tolerance_m:
        raise InconsistentPathsError(f"closest crossings still {gap:.3g} m apart")
    return PositionFix(position=as_point(0.5 * (q[0] + q[1])), d1_m=d1, residual_m=gap,
                       condition=math.nan, labels=(SINGLE,) * 3)


class ImpliedScatterer(NamedTuple):
    point: Point2D
    residual_m: float
    obstacle_distance_m: float


def implied_scatterer(obs: PathObservation, anchor, hypothesis, d1_m: float, c: float = C,
                      obstacles: Sequence[Segment] = ()) -> ImpliedScatterer:
    """Meet the AoD ray from the anchor with the AoA ray from a hypothesised
    vehicle position and compare the implied path length with the measured one.

    A single-bounce path scores zero residual at the true position. When an
    obstacle map is given, the distance from the implied point to the nearest
    obstacle is returned as well (inf without a map).
    """
    a0 = np.asarray(anchor, float)
    h = np.asarray(hypothesis, float)
    u_aod, u_aoa = unit(obs.aod_rad), unit(obs.aoa_rad)
    m = np.column_stack([u_aod, -u_aoa])
    if abs(float(np.linalg.det(m))) < 1e-12:
        raise NoIntersectionError("AoD and AoA rays are parallel")
    t, s = np.linalg.solve(m, h - a0)
    if t <= 0 or s <= 0:
        raise InfeasibleError("rays meet behind the anchor or the vehicle")
    point = a0 + t * u_aod
    d_i = d1_m + c * obs.rel_delay_s
    residual = abs(float(t + s) - d_i)
    dist = min((segment_distance(point, seg) for seg in obstacles), default=math.inf)
    return ImpliedScatterer(as_point(point), residual, dist)


@dataclass(frozen=True)
class ClassifyConfig:
    cluster_radius_m: float = 0.5
    min_cluster_size: int = 1
    residual_tol_m: float = 1e-3
    obstacles: tuple[Segment, ...] = ()
    map_tol_m: float = 0.05
    cond_max: float = COND_MAX


def _path_check(obs, anchor, pos, d1, c, cfg):
    """Implied scatterer of one path at a hypothesis; None if the rays miss each
    other in front of both ends, "parallel" if they never meet."""
    try:
        return implied_scatterer(obs, anchor, pos, d1, c, cfg.obstacles)
    except NoIntersectionError:
        return "parallel"
    except InfeasibleError:
        return None


def _consistent(r, cfg) -> bool:
    if not isinstance(r, ImpliedScatterer) or r.residual_m > cfg.residual_tol_m:
        return False
    return not cfg.obstacles or r.obstacle_distance_m <= cfg.map_tol_m


def classify_and_solve(obs: Sequence[PathObservation], anchor, cfg: ClassifyConfig = ClassifyConfig(),
                       c: float = C) -> PositionFix:
    """Position a vehicle when some paths bounced more than once.

    Every three-path subset is solved; ill-conditioned or infeasible ones are
    dropped, and with an obstacle map so are subsets whose implied scatterers
    are not on the map. The surviving candidates are clustered within
    ``cluster_radius_m`` and the largest cluster's centroid is the fix
    (equal sizes: smaller mean implied-scatterer residual wins). Paths used by
    a majority of the winning subsets start as single-bounce; the residual
    (and map) test at the fix then settles each label.
    """
    obs = list(obs)
    if len(obs) < 3:
        raise UnderDeterminedError(f"need at least 3 paths, got {len(obs)}")
    # delays are all relative to the same path 1, so every subset solves for the same d_1
    cands = []
    for tri in itertools.combinations(range(len(obs)), 3):
        try:
            fix = solve_linear([obs[i] for i in tri], anchor, c, cfg.cond_max)
        except IllConditionedError:
            continue
        if not fix.feasible:
            continue
        if cfg.obstacles and not all(
            _consistent(_path_check(obs[i], anchor, fix.position, fix.d1_m, c, cfg), cfg)
            for i in tri
        ):
            continue
        cands.append((tri, fix))
    if not cands:
        raise ClassificationError("no feasible three-path subset")

    pts = np.array([f.position for _, f in cands])
    d1s = np.array([f.d1_m for _, f in cands])
    clusters = sorted({
        tuple(np.flatnonzero(np.hypot(*(pts - pts[i]).T) <= cfg.cluster_radius_m))
        for i in range(len(cands))
    })

    def mean_residual(members):
        centre = pts[list(members)].mean(axis=0)
        d1 = float(d1s[list(members)].mean())
        res = []
        for p in obs:
            r = _path_check(p, anchor, centre, d1, c, cfg)
            # a path whose rays cannot meet scores its whole flight distance
            res.append(r.residual_m if isinstance(r, ImpliedScatterer) else d1 + c * abs(p.rel_delay_s))
        return float(np.mean(res))

    win = min(clusters, key=lambda m: (-len(m), mean_residual(m)))
    if len(win) < cfg.min_cluster_size:
        raise ClassificationError(
            f"largest cluster has {len(win)} candidates, need {cfg.min_cluster_size}"
        )
    centre = pts[list(win)].mean(axis=0)
    d1 = float(d1s[list(win)].mean())

    votes = np.zeros(len(obs), int)
    for k in win:
        votes[list(cands[k][0])] += 1
    labels, residuals = [], []
    for i, p in enumerate(obs):
        label = SINGLE if 2 * votes[i] > len(win) else MULTI
        r = _path_check(p, anchor, centre, d1, c, cfg)
        if r == "parallel":
            label = UNUSED
        elif _consistent(r, cfg):
            label = SINGLE
            residuals.append(r.residual_m)
        elif label == SINGLE or r is None or r.residual_m > cfg.residual_tol_m:
            label = MULTI
        labels.append(label)
    return PositionFix(
        position=as_point(centre),
        d1_m=d1,
        residual_m=float(np.sqrt(np.mean(np.square(residuals)))) if residuals else 0.0,
        condition=max(cands[k][1].condition for k in win),
        labels=tuple(labels),
    )
