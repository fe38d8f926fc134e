"""Versioned JSON files of disc points.

Format::

    {"version": 1,
     "points": [{"t": 0.25, "theta": 1.5}, {"t": 1e-40, "theta": 0.0, "theta_lo": 3e-50}],
     "meta": {...}}

``theta_lo`` is optional and only written when nonzero.  Floats are written
with ``repr`` so a parse/serialize round trip is bit-exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ValidationError
from .geometry import TWO_PI, DiscPoint

FORMAT_VERSION = 1


@dataclass
class SequenceFile:
    points: list[DiscPoint]
    meta: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION


def _point_record(p: DiscPoint) -> dict:
    rec = {"t": p.t, "theta": p.theta}
    if p.theta_lo != 0.0:
        rec["theta_lo"] = p.theta_lo
    return rec


def dumps_sequence(points: Sequence[DiscPoint], meta: dict | None = None) -> str:
    doc = {"version": FORMAT_VERSION, "points": [_point_record(p) for p in points], "meta": meta or {}}
    return json.dumps(doc, indent=1, sort_keys=False, allow_nan=False) + "\n"


def serialize_sequence(points: Sequence[DiscPoint], path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps_sequence(points, meta))


def _as_real(value, what: str, index: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"point {index}: {what} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"point {index}: {what} must be finite")
    return value


def loads_sequence(text: str) -> SequenceFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed sequence file at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError("sequence file must hold a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise ValidationError(f"unsupported sequence file version {doc.get('version')!r}")
    raw = doc.get("points")
    if not isinstance(raw, list):
        raise ValidationError("sequence file has no 'points' list")
    points = []
    for i, rec in enumerate(raw):
        if not isinstance(rec, dict) or "t" not in rec or "theta" not in rec:
            raise ValidationError(f"point {i}: expected an object with 't' and 'theta'")
        t = _as_real(rec["t"], "t", i)
        theta = _as_real(rec["theta"], "theta", i)
        lo = _as_real(rec.get("theta_lo", 0.0), "theta_lo", i)
        if not (0.0 < t <= 1.0):
            raise ValidationError(f"point {i}: depth t = {t!r} outside (0, 1]")
        if not (0.0 <= theta < TWO_PI):
            raise ValidationError(f"point {i}: theta = {theta!r} outside [0, 2*pi)")
        points.append(DiscPoint(t, theta, lo))
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise ValidationError("'meta' must be an object")
    return SequenceFile(points, meta, FORMAT_VERSION)


def parse_sequence(path) -> SequenceFile:
    return loads_sequence(Path(path).read_text())
