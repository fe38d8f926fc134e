"""Condition reports and the parameter sweeps over the two block schedules."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .conditions import DEFAULT_DELTA_GRID, SequenceMeasure, ob_constant_exact, rob_profile
from .constructions import (
    assemble_example1,
    assemble_example2,
    block_points,
    example1_params,
    example2_params,
)
from .errors import InfeasibleConstructionError, ValidationError
from .geometry import DiscPoint
from .kernel import require_distinct, cb_norm, gram_matrix, weak_separation_geometric, weak_separation_kernel

SWEEP_COLUMNS = ("R", "n_points", "ob", "cb", "rob_delta", "rob", "ws_kernel", "ws_geometric", "total_mass")


@dataclass(frozen=True)
class ConditionReport:
    ob_constant: float
    cb_norm: float
    rob: dict[float, float]
    rob_best: tuple[float, float]
    ws_kernel: float
    ws_geometric: float
    total_mass: float
    n_points: int
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rob"] = {repr(k): v for k, v in self.rob.items()}
        d["rob_best"] = {"delta": self.rob_best[0], "value": self.rob_best[1]}
        d["warnings"] = list(self.warnings)
        return d


def report(points: Sequence[DiscPoint], delta_grid: Sequence[float] = DEFAULT_DELTA_GRID) -> ConditionReport:
    """Every condition constant of a finite sequence."""
    points = tuple(points)
    if not points:
        return ConditionReport(0.0, 0.0, {float(d): 0.0 for d in delta_grid}, (float(min(delta_grid)), 0.0),
                               0.0, 0.0, 0.0, 0)
    require_distinct(points)
    origin = [i for i, p in enumerate(points) if p.is_origin]
    if origin:
        raise ValidationError(f"point {origin[0]} is the origin; restricted boxes are undefined there")
    notes = []
    shallow = [i for i, p in enumerate(points) if p.t > 0.5]
    if shallow:
        notes.append(f"{len(shallow)} point(s) with |z| < 1/2, first at index {shallow[0]}")
    mu = SequenceMeasure.from_points(points)
    G = gram_matrix(points)
    profile = rob_profile(mu, delta_grid)
    best = min(profile, key=lambda d: (profile[d], d))
    return ConditionReport(
        ob_constant=ob_constant_exact(mu)[0],
        cb_norm=cb_norm(G),
        rob=profile,
        rob_best=(best, profile[best]),
        ws_kernel=weak_separation_kernel(G),
        ws_geometric=weak_separation_geometric(points),
        total_mass=mu.total_mass,
        n_points=len(points),
        warnings=tuple(notes),
    )


@dataclass(frozen=True)
class SweepRow:
    R: float
    n_points: int
    ob: float
    cb: float
    rob_delta: float
    rob: float
    ws_kernel: float
    ws_geometric: float
    total_mass: float

    @classmethod
    def from_report(cls, R: float, rep: ConditionReport) -> "SweepRow":
        return cls(R, rep.n_points, rep.ob_constant, rep.cb_norm, rep.rob_best[0], rep.rob_best[1],
                   rep.ws_kernel, rep.ws_geometric, rep.total_mass)

    @classmethod
    def infeasible(cls, R: float) -> "SweepRow":
        nan = math.nan
        return cls(R, 0, nan, nan, nan, nan, nan, nan, nan)

    @property
    def feasible(self) -> bool:
        return not math.isnan(self.ob)


def _sweep(R_grid, build_block, build_union, union: bool, delta_grid) -> list[SweepRow]:
    rows = []
    for k, R in enumerate(R_grid):
        try:
            pts = build_union(R_grid[: k + 1]) if union else build_block(R)
        except InfeasibleConstructionError:
            rows.append(SweepRow.infeasible(R))
            continue
        rows.append(SweepRow.from_report(R, report(pts, delta_grid)))
    return rows


def sweep_example1(R_grid: Sequence[float], union: bool = False,
                   delta_grid: Sequence[float] = DEFAULT_DELTA_GRID) -> list[SweepRow]:
    """One row per ``R``: a single schedule-1 block, or the union of blocks up to ``R``."""
    R_grid = [float(R) for R in R_grid]
    return _sweep(
        R_grid,
        lambda R: block_points(example1_params(R)),
        lambda Rs: assemble_example1(Rs).points,
        union,
        delta_grid,
    )


def sweep_example2(R_grid: Sequence[float], delta: float = 0.5, union: bool = False,
                   delta_grid: Sequence[float] = DEFAULT_DELTA_GRID) -> list[SweepRow]:
    """As :func:`sweep_example1` for schedule 2 with boxes disjoint at exponent ``delta``."""
    R_grid = [float(R) for R in R_grid]
    return _sweep(
        R_grid,
        lambda R: block_points(example2_params(R)),
        lambda Rs: assemble_example2(Rs, delta).points,
        union,
        delta_grid,
    )


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else str(v) for v in astuple_row(row)])
    return buf.getvalue()


def astuple_row(row: SweepRow) -> tuple:
    return tuple(getattr(row, c) for c in SWEEP_COLUMNS)


def rows_from_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SWEEP_COLUMNS:
        raise ValidationError(f"unexpected sweep header {header!r}")
    rows = []
    for rec in reader:
        vals = [int(v) if c == "n_points" else float(v) for c, v in zip(SWEEP_COLUMNS, rec)]
        rows.append(SweepRow(*vals))
    return rows
