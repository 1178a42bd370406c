"""JSON file formats: scenarios, path observations and position fixes.

Every document carries ``"schema": 1``. Units are meters and seconds, except
in observation files, which use degrees and nanoseconds (``aod_deg``,
``aoa_deg``, ``rel_delay_ns``) because that is how such logs are usually
written by hand.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import ConfigError
from .hvp import PositionFix
from .scenario import C, EpochObservation, PathObservation, Scenario

SCHEMA = 1


def _check_schema(doc: dict):
    v = doc.get("schema", SCHEMA)
    if v != SCHEMA:
        raise ConfigError(f"unsupported schema version {v!r}")


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from None


def dumps(doc) -> str:
    return json.dumps(_finite(doc), indent=2) + "\n"


def _finite(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _finite(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_finite(x) for x in v]
    return v


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "schema": SCHEMA,
        "anchor": list(s.anchor),
        "vehicle": list(s.vehicle),
        "scatterers": [list(p) for p in s.scatterers],
        "obstacles": [[list(a), list(b)] for a, b in s.obstacles],
        "c": s.c,
    }


def scenario_from_dict(d: dict) -> Scenario:
    _check_schema(d)
    try:
        return Scenario(
            anchor=d["anchor"],
            vehicle=d["vehicle"],
            scatterers=d.get("scatterers", []),
            obstacles=d.get("obstacles", []),
            c=float(d.get("c", C)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed scenario: {exc}") from None


def path_to_dict(p: PathObservation) -> dict:
    return {
        "aod_deg": math.degrees(p.aod_rad),
        "aoa_deg": math.degrees(p.aoa_rad),
        "rel_delay_ns": p.rel_delay_s * 1e9,
    }


def path_from_dict(d: dict) -> PathObservation:
    try:
        return PathObservation(
            aod_rad=math.radians(float(d["aod_deg"])),
            aoa_rad=math.radians(float(d["aoa_deg"])),
            rel_delay_s=float(d["rel_delay_ns"]) * 1e-9,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed path entry {d!r}: {exc}") from None


def observations_to_dict(paths, anchor=None) -> dict:
    doc = {"schema": SCHEMA}
    if anchor is not None:
        doc["anchor"] = list(anchor)
    doc["paths"] = [path_to_dict(p) for p in paths]
    return doc


def load_observations(doc) -> tuple[list[EpochObservation], object]:
    """Parse an observation document into epochs (and the anchor, if present).

    Accepted forms: a bare list of paths, ``{"paths": [...]}``, or
    ``{"epochs": [{"displacement": [dx, dy], "paths": [...]}, ...]}``.
    """
    if isinstance(doc, list):
        return [EpochObservation(tuple(path_from_dict(p) for p in doc))], None
    if not isinstance(doc, dict):
        raise ConfigError("observation file must be a list or an object")
    _check_schema(doc)
    anchor = doc.get("anchor")
    if "epochs" in doc:
        epochs = [
            EpochObservation(tuple(path_from_dict(p) for p in ep.get("paths", [])),
                             tuple(ep.get("displacement", (0.0, 0.0))))
            for ep in doc["epochs"]
        ]
    else:
        epochs = [EpochObservation(tuple(path_from_dict(p) for p in doc.get("paths", [])))]
    return epochs, anchor


def fix_to_dict(fix: PositionFix) -> dict:
    return {"schema": SCHEMA, **fix.to_dict()}
