"""Monte Carlo campaigns: ToA vs PDoA ranging sweeps and hidden-vehicle runs.

Randomness is keyed, never sequential: trial ``t`` of cell ``k`` draws from
``SeedSequence(master_seed, spawn_key=(k, t))``. Results therefore do not
depend on evaluation order, and growing ``trials`` leaves earlier trials
untouched.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple, Sequence

import numpy as np

from .channel import ChannelTap, propagate
from .errors import AmbiguityError, ConfigError, PositioningError
from .hvp import COND_MAX, solve_linear, solve_trajectory
from .ranging import TonePair, pdoa_estimate, pdoa_hierarchical, toa_estimate
from .scenario import C, PathObservation, RandomScenarioParams, enumerate_paths, random_scenario
from .waveform import OfdmConfig, gen_ofdm_reference, gen_tones

ESTIMATORS = ("toa", "pdoa", "pdoa_hier")


class Summary(NamedTuple):
    mae: float
    rmse: float
    p95: float


def summarize(errors) -> Summary:
    """Mean absolute error, RMSE and nearest-rank 95th percentile."""
    e = np.abs(np.asarray(errors, dtype=float))
    if e.size == 0:
        raise ConfigError("no errors to summarize")
    rank = math.ceil(0.95 * e.size)
    top = e.max()
    # scale before squaring so tiny (noiseless) errors do not underflow
    rmse = float(top * np.sqrt(np.mean((e / top) ** 2))) if top > 0 else 0.0
    return Summary(float(e.mean()), rmse, float(np.sort(e)[rank - 1]))


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _snr(v) -> float:
    if v is None or (isinstance(v, str) and v.lower() in ("inf", "infinity", "noiseless")):
        return math.inf
    return float(v)


@dataclass(frozen=True)
class SweepConfig:
    estimators: tuple[str, ...] = ("toa", "pdoa")
    oversample: tuple[int, ...] = (1, 2, 4)
    snr_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0, 40.0)
    trials: int = 1000
    range_min_m: float = 50.0
    range_max_m: float = 500.0
    seed: int = 0
    n_subcarriers: int = 2048
    spacing_hz: float = 15e3
    pdoa_tones: tuple[int, int] = (1, 12)
    hier_tones: tuple[int, ...] = (1, 12, 111)
    c: float = C

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known - {"schema"}
        if extra:
            raise ConfigError(f"unknown sweep keys: {sorted(extra)}")
        kw = {k: v for k, v in d.items() if k in known}
        for k in ("estimators", "oversample", "pdoa_tones", "hier_tones"):
            if k in kw:
                kw[k] = tuple(kw[k])
        if "snr_db" in kw:
            kw["snr_db"] = tuple(_snr(v) for v in kw["snr_db"])
        return cls(**kw)

    def tone_pairs(self, estimator: str) -> list[TonePair]:
        if estimator == "pdoa":
            return [TonePair(*self.pdoa_tones, spacing_hz=self.spacing_hz)]
        if len(self.hier_tones) < 2:
            raise ConfigError("hierarchy needs at least two tones")
        k0, *rest = self.hier_tones
        return [TonePair(k0, k, spacing_hz=self.spacing_hz) for k in rest]

    def validate(self):
        if not self.estimators or set(self.estimators) - set(ESTIMATORS):
            raise ConfigError(f"estimators must be drawn from {ESTIMATORS}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.range_min_m <= self.range_max_m:
            raise ConfigError("bad range bounds")
        for L in self.oversample:
            cfg = OfdmConfig(self.n_subcarriers, self.spacing_hz, L)
            # correlation peaks past half the window would read as negative delays
            if "toa" in self.estimators and self.range_max_m / self.c * cfg.fs_hz >= cfg.n_samples / 2:
                raise ConfigError("range bound exceeds the correlation window")
        for est in ("pdoa", "pdoa_hier"):
            if est in self.estimators:
                pairs = self.tone_pairs(est)
                if self.range_max_m >= pairs[0].ambiguity_range_m(self.c):
                    raise ConfigError(
                        f"{est}: range bound {self.range_max_m} m reaches the "
                        f"{pairs[0].ambiguity_range_m(self.c):.2f} m ambiguity range"
                    )

    def cells(self):
        for est in self.estimators:
            for L in self.oversample:
                for snr in self.snr_db:
                    yield est, L, snr


@dataclass(frozen=True)
class ResultRow:
    estimator: str
    fs_hz: float
    snr_db: float
    trials: int
    mae_m: float
    rmse_m: float
    p95_m: float


RESULT_HEADER = ("estimator", "fs_hz", "snr_db", "trials", "mae_m", "rmse_m", "p95_m")


def ranging_errors(cfg: SweepConfig, estimator: str, oversample: int, snr_db: float,
                   cell: int = 0, trials: int | None = None) -> np.ndarray:
    """Absolute range errors of one sweep cell, trial by trial.

    The probing waveform (OFDM reference or tone comb) is fixed per cell and
    known to the receiver; each trial draws its own range and noise.
    """
    ofdm = OfdmConfig(cfg.n_subcarriers, cfg.spacing_hz, oversample)
    if estimator == "toa":
        tx = gen_ofdm_reference(ofdm, cfg.seed)
    else:
        pairs = cfg.tone_pairs(estimator)
        tones = sorted({k for p in pairs for k in (p.k1, p.k2)})
        tx = gen_tones(ofdm, tones)
    n = cfg.trials if trials is None else trials
    errs = np.empty(n)
    for t in range(n):
        rng = trial_rng(cfg.seed, cell, t)
        d = float(rng.uniform(cfg.range_min_m, cfg.range_max_m))
        rx = propagate(tx, [ChannelTap(d / cfg.c)], snr_db, rng)
        if estimator == "toa":
            est = toa_estimate(rx, tx, cfg.c).range_m
        elif estimator == "pdoa":
            est = pdoa_estimate(rx, pairs[0], cfg.c).range_m
        else:
            try:
                est = pdoa_hierarchical(rx, pairs, cfg.c).range_m
            except AmbiguityError as exc:
                est = exc.estimate_m
        errs[t] = abs(est - d)
    return errs


def run_ranging_sweep(cfg: SweepConfig) -> list[ResultRow]:
    cfg.validate()
    rows = []
    for cell, (est, L, snr) in enumerate(cfg.cells()):
        errs = ranging_errors(cfg, est, L, snr, cell)
        s = summarize(errs)
        fs = OfdmConfig(cfg.n_subcarriers, cfg.spacing_hz, L).fs_hz
        rows.append(ResultRow(est, fs, snr, cfg.trials, s.mae, s.rmse, s.p95))
    return rows


def rows_to_csv(rows, header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(getattr(r, h)) if isinstance(getattr(r, h), float) else getattr(r, h)
                    for h in header])
    return buf.getvalue()


@dataclass(frozen=True)
class HvpMcConfig:
    scenario: RandomScenarioParams = RandomScenarioParams(n_scatterers=3)
    min_paths: int = 3
    max_paths: int = 6
    angle_sigma_rad: tuple[float, ...] = (0.0,)
    delay_sigma_s: tuple[float, ...] = (0.0,)
    trials: int = 1000
    seed: int = 0
    solver: str = "linear"
    cond_max: float = COND_MAX

    @classmethod
    def from_dict(cls, d: dict) -> "HvpMcConfig":
        d = dict(d)
        d.pop("schema", None)
        scen = d.pop("scenario", {})
        if "bounds" in scen:
            scen = {**scen, "bounds": tuple(scen["bounds"])}
        for k in ("angle_sigma_rad", "delay_sigma_s"):
            if k in d:
                v = d[k]
                d[k] = tuple(v) if isinstance(v, (list, tuple)) else (float(v),)
        known = {f.name for f in fields(cls)}
        if set(d) - known:
            raise ConfigError(f"unknown hvp-mc keys: {sorted(set(d) - known)}")
        return cls(scenario=RandomScenarioParams(**scen), **d)

    def noise_grid(self):
        a, s = self.angle_sigma_rad, self.delay_sigma_s
        if len(a) == 1:
            a = a * len(s)
        if len(s) == 1:
            s = s * len(a)
        if len(a) != len(s):
            raise ConfigError("noise grids must have equal length (or length 1)")
        return list(zip(a, s))


@dataclass(frozen=True)
class HvpRow:
    solver: str
    angle_sigma_rad: float
    delay_sigma_s: float
    trials: int
    degenerate: int
    degenerate_rate: float
    mae_m: float
    rmse_m: float
    p95_m: float
    errors_m: tuple[float, ...] = field(default=(), repr=False, compare=False)


HVP_HEADER = ("solver", "angle_sigma_rad", "delay_sigma_s", "trials", "degenerate",
              "degenerate_rate", "mae_m", "rmse_m", "p95_m")


def _perturb(paths: list[PathObservation], rng, sa: float, sd: float) -> list[PathObservation]:
    # one standard-normal draw per trial, scaled by sigma: every noise level
    # sees the same noise shape, which keeps campaign curves smooth
    za = rng.standard_normal((len(paths), 2))
    zd = rng.standard_normal(len(paths))
    zd[0] = 0.0  # path 1 is the delay reference
    return [replace(p, aod_rad=p.aod_rad + sa * za[i, 0], aoa_rad=p.aoa_rad + sa * za[i, 1],
                    rel_delay_s=p.rel_delay_s + sd * zd[i]) for i, p in enumerate(paths)]


def hvp_trial(cfg: HvpMcConfig, t: int):
    """Scenario and oracle paths of trial ``t`` (shared by every noise level)."""
    rng = trial_rng(cfg.seed, 0, t)
    n = int(rng.integers(cfg.min_paths, cfg.max_paths + 1))
    scen_seed = int(rng.integers(2**63))
    scen = random_scenario(scen_seed, replace(cfg.scenario, n_scatterers=n))
    return scen, enumerate_paths(scen, 1)


def run_hvp_mc(cfg: HvpMcConfig) -> list[HvpRow]:
    """Solve ``trials`` random single-bounce scenarios per noise level.

    Trials whose system is ill-conditioned (or whose paths are too few after
    degenerate ones are dropped) count as degenerate: excluded from the error
    metrics, reported as a rate.
    """
    if cfg.solver not in ("linear", "trajectory"):
        raise ConfigError("solver must be 'linear' or 'trajectory'")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    trials = [hvp_trial(cfg, t) for t in range(cfg.trials)]
    rows = []
    for sa, sd in cfg.noise_grid():
        errs, degenerate = [], 0
        for t, (scen, paths) in enumerate(trials):
            noisy = _perturb(paths, trial_rng(cfg.seed, 1, t), sa, sd)
            try:
                if cfg.solver == "linear":
                    fix = solve_linear(noisy, scen.anchor, scen.c, cfg.cond_max)
                else:
                    fix = solve_trajectory(noisy[:3], scen.anchor, scen.c)
            except PositioningError:
                degenerate += 1
                continue
            errs.append(math.dist(fix.position, scen.vehicle))
        s = summarize(errs) if errs else Summary(math.nan, math.nan, math.nan)
        rows.append(HvpRow(cfg.solver, sa, sd, cfg.trials, degenerate, degenerate / cfg.trials,
                           s.mae, s.rmse, s.p95, tuple(errs)))
    return rows
