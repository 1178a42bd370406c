"""Command-line entry point.

    v2xpos ranging-sweep --config sweep.json --out sweep.csv [--plot sweep.svg]
    v2xpos hvp-solve --obs paths.json --anchor 0,0
    v2xpos hvp-mc --config mc.json
    v2xpos classify --obs paths.json --anchor 0,0 [--map scenario.json]
    v2xpos rss-scan --config rss.json
    v2xpos scenario-gen --config params.json --seed 7

Exit status: 0 success, 1 domain error (its name goes to stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import replace

import numpy as np

from . import files
from .channel import ArrayConfig, ChannelTap, LinkBudget, pathloss_db, pathloss_model, rss_scan
from .errors import ConfigError, PositioningError
from .harness import (
    HVP_HEADER,
    RESULT_HEADER,
    HvpMcConfig,
    SweepConfig,
    rows_to_csv,
    run_hvp_mc,
    run_ranging_sweep,
)
from .hvp import ClassifyConfig, TrajectorySearch, classify_and_solve, solve_linear, solve_multi_epoch, solve_trajectory
from .scenario import C, RandomScenarioParams, random_scenario


def _point(text: str):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    return (x, y)


def _config(path) -> dict:
    if path is None:
        return {}
    doc = files.load_json(path)
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if doc.get("schema", 1) != 1:
        raise ConfigError(f"unsupported schema version {doc.get('schema')!r}")
    return doc


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(args, default: str) -> str:
    return args.format or default


def _fix_csv(fix) -> str:
    d = fix.to_dict()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "d1", "residual", "condition", "labels"])
    w.writerow([repr(d["x"]), repr(d["y"]), repr(d["d1"]), repr(d["residual"]),
                repr(d["condition"]), ";".join(d["labels"])])
    return buf.getvalue()


def cmd_ranging_sweep(args) -> int:
    doc = _config(args.config)
    cfg = SweepConfig.from_dict(doc)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    rows = run_ranging_sweep(cfg)
    if _fmt(args, "csv") == "json":
        _write(args, files.dumps({"schema": 1, "rows": [r.__dict__ for r in rows]}))
    else:
        _write(args, rows_to_csv(rows, RESULT_HEADER))
    if args.plot:
        from .plotting import line_plot
        series = {}
        for r in rows:
            xs, ys = series.setdefault(f"{r.estimator} @ {r.fs_hz / 1e6:g} MHz", ([], []))
            xs.append(r.snr_db)
            ys.append(r.rmse_m)
        line_plot(args.plot, series, "SNR [dB]", "RMSE [m]", logy=True)
    return 0


def _anchor(args, from_file):
    if args.anchor is not None:
        return args.anchor
    if from_file is not None:
        return tuple(from_file)
    raise ConfigError("anchor position missing (use --anchor x,y)")


def cmd_hvp_solve(args) -> int:
    epochs, file_anchor = files.load_observations(files.load_json(args.obs))
    anchor = _anchor(args, file_anchor)
    c = args.c
    multi = len(epochs) > 1 or any(ep.ego_displacement_m != (0.0, 0.0) for ep in epochs)
    if multi:
        fix = solve_multi_epoch(epochs, anchor, c, args.cond_max)
    elif args.method == "trajectory":
        fix = solve_trajectory(epochs[0].paths, anchor, c, TrajectorySearch())
    else:
        fix = solve_linear(epochs[0].paths, anchor, c, args.cond_max)
    _emit_fix(args, fix, anchor)
    return 0


def _emit_fix(args, fix, anchor, segments=()):
    if _fmt(args, "json") == "csv":
        _write(args, _fix_csv(fix))
    else:
        _write(args, files.dumps(files.fix_to_dict(fix)))
    if args.plot:
        from .plotting import scatter_plot
        scatter_plot(args.plot, {"anchor": [anchor], "fix": [fix.position]}, segments)


def cmd_classify(args) -> int:
    epochs, file_anchor = files.load_observations(files.load_json(args.obs))
    anchor = _anchor(args, file_anchor)
    doc = _config(args.config)
    obstacles = ()
    if args.map:
        obstacles = files.scenario_from_dict(files.load_json(args.map)).obstacles
    elif "obstacles" in doc:
        obstacles = tuple(tuple(tuple(p) for p in seg) for seg in doc["obstacles"])
    keys = ("cluster_radius_m", "min_cluster_size", "residual_tol_m", "map_tol_m", "cond_max")
    cfg = ClassifyConfig(obstacles=obstacles, **{k: doc[k] for k in keys if k in doc})
    paths = [p for ep in epochs for p in ep.paths]
    fix = classify_and_solve(paths, anchor, cfg, args.c)
    _emit_fix(args, fix, anchor, obstacles)
    return 0


def cmd_hvp_mc(args) -> int:
    cfg = HvpMcConfig.from_dict(_config(args.config))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    rows = run_hvp_mc(cfg)
    if _fmt(args, "csv") == "json":
        _write(args, files.dumps({"schema": 1, "rows": [
            {h: getattr(r, h) for h in HVP_HEADER} for r in rows]}))
    else:
        _write(args, rows_to_csv(rows, HVP_HEADER))
    if args.plot:
        from .plotting import line_plot
        xs = list(range(len(rows)))
        line_plot(args.plot, {"RMSE": (xs, [r.rmse_m for r in rows]),
                              "MAE": (xs, [r.mae_m for r in rows])},
                  "noise level index", "position error [m]", logy=True)
    return 0


def cmd_rss_scan(args) -> int:
    doc = _config(args.config)
    freq = float(doc.get("freq_hz", 5.9e9))
    c = float(doc.get("c", C))
    model = pathloss_model(doc.get("pathloss", {"model": "free_space"}))
    array = ArrayConfig(**doc.get("array", {}))
    budget = LinkBudget(**doc.get("budget", {}))
    taps = []
    for p in doc.get("paths", []):
        amp_db = -pathloss_db(model, freq, float(p["dist_m"]), c) + float(p.get("gain_db", 0.0))
        gain = 10 ** (amp_db / 20) * np.exp(1j * math.radians(float(p.get("phase_deg", 0.0))))
        taps.append(ChannelTap(0.0, complex(gain), math.radians(float(p["aoa_deg"]))))
    scan = doc.get("scan_deg", {})
    start, stop, step = (float(scan.get(k, v)) for k, v in (("start", -90), ("stop", 90), ("step", 1)))
    deg = np.arange(round((stop - start) / step) + 1) * step + start
    result = rss_scan(taps, array, budget, np.radians(deg))
    if _fmt(args, "csv") == "json":
        _write(args, files.dumps({"schema": 1, "noise_floor_dbm": result.noise_floor_dbm,
                                  "scan": [{"angle_deg": float(a), "rss_db": float(r)}
                                           for a, r in zip(deg, result.rss_db)]}))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["angle_deg", "rss_db"])
        for a, r in zip(deg, result.rss_db):
            w.writerow([repr(float(a)), repr(float(r))])
        _write(args, buf.getvalue())
    if args.plot:
        from .plotting import line_plot
        line_plot(args.plot, {"RSS": (deg.tolist(), result.rss_db.tolist()),
                              "noise floor": (deg.tolist(), [result.noise_floor_dbm] * len(deg))},
                  "arrival direction [deg]", "RSS [dBm]")
    return 0


def cmd_scenario_gen(args) -> int:
    doc = _config(args.config)
    seed = args.seed if args.seed is not None else int(doc.pop("seed", 0))
    doc.pop("seed", None)
    doc.pop("schema", None)
    if "bounds" in doc:
        doc["bounds"] = tuple(doc["bounds"])
    for k in ("anchor", "vehicle"):
        if doc.get(k) is not None:
            doc[k] = tuple(doc[k])
    try:
        params = RandomScenarioParams(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    scen = random_scenario(seed, params)
    if _fmt(args, "json") == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "x", "y"])
        w.writerow(["anchor", repr(scen.anchor.x), repr(scen.anchor.y)])
        w.writerow(["vehicle", repr(scen.vehicle.x), repr(scen.vehicle.y)])
        for s in scen.scatterers:
            w.writerow(["scatterer", repr(s.x), repr(s.y)])
        _write(args, buf.getvalue())
    else:
        _write(args, files.dumps(files.scenario_to_dict(scen)))
    if args.plot:
        from .plotting import scatter_plot
        scatter_plot(args.plot, {"anchor": [scen.anchor], "vehicle": [scen.vehicle],
                                 "scatterers": list(scen.scatterers)}, scen.obstacles)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="v2xpos", description="V2X positioning toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--plot", metavar="SVG", help="also write an SVG figure")
        p.add_argument("--seed", type=int)
        return p

    p = common(sub.add_parser("ranging-sweep", help="ToA / PDoA ranging Monte Carlo"))
    p.add_argument("--config")
    p.set_defaults(func=cmd_ranging_sweep)

    for name, func in (("hvp-solve", cmd_hvp_solve), ("classify", cmd_classify)):
        p = common(sub.add_parser(name))
        p.add_argument("--obs", required=True, help="observation JSON")
        p.add_argument("--anchor", type=_point, help="anchor position x,y [m]")
        p.add_argument("--c", type=float, default=C)
        p.add_argument("--cond-max", type=float, default=1e8)
        if name == "hvp-solve":
            p.add_argument("--method", choices=("linear", "trajectory"), default="linear")
        else:
            p.add_argument("--config")
            p.add_argument("--map", help="scenario JSON whose obstacles form the map")
        p.set_defaults(func=func)

    p = common(sub.add_parser("hvp-mc", help="hidden-vehicle Monte Carlo"))
    p.add_argument("--config")
    p.set_defaults(func=cmd_hvp_mc)

    p = common(sub.add_parser("rss-scan", help="beam-scanned RSS versus direction"))
    p.add_argument("--config")
    p.set_defaults(func=cmd_rss_scan)

    p = common(sub.add_parser("scenario-gen", help="seeded random scenario"))
    p.add_argument("--config")
    p.set_defaults(func=cmd_scenario_gen)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PositioningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
