"""The measure ``mu_Z`` and the box conditions built on it.

``mu_Z`` puts mass ``1/K(z_n, z_n)`` at every point.  The one-box constant is
``sup_I mu(S(I)) log(1/|I|)`` over all arcs, the restricted constant tests only
the dilated boxes ``S(I_n^delta)`` of the points themselves.  The two lemma
diagnostics measure point counts in large hyperbolic balls and the hyperbolic
size of Stolz-angle slices between consecutive dilated boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import ValidationError
from .geometry import (
    TWO_PI,
    Arc,
    DiscPoint,
    angle_diff_arrays,
    box_mask,
    canonical_angle,
    dist_from_origin,
    dist_from_origin_arrays,
    hyperbolic_dist_arrays,
    sequence_arrays,
)
from .kernel import kernel_diag_arrays

DEFAULT_DELTA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
_ROW_CHUNK = 256


@dataclass(frozen=True)
class SequenceMeasure:
    points: tuple[DiscPoint, ...]
    weights: np.ndarray

    @classmethod
    def from_points(cls, points: Iterable[DiscPoint]) -> "SequenceMeasure":
        points = tuple(points)
        t, _, _ = sequence_arrays(points)
        return cls(points, 1.0 / kernel_diag_arrays(t))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def __len__(self) -> int:
        return len(self.points)


def mu_box(mu: SequenceMeasure, arc: Arc) -> float:
    """``mu(S(I))`` with the closed-box convention."""
    if len(mu) == 0:
        return 0.0
    t, hi, lo = sequence_arrays(mu.points)
    mask = box_mask(arc.theta_mid, arc.theta_mid_lo, arc.length, t, hi, lo)
    return float(mu.weights[mask].sum())


def _ccw_span(hi_from, lo_from, hi_to, lo_to):
    """Normalized counter-clockwise span from one angle to another, in ``[0, 1)``."""
    d = angle_diff_arrays(hi_to, lo_to, hi_from, lo_from)
    return np.where(d >= 0.0, d / TWO_PI, 1.0 + d / TWO_PI)


def ob_constant_exact(mu: SequenceMeasure) -> tuple[float, Arc | None]:
    """Exact ``sup_I mu(S(I)) log(1/|I|)`` over all arcs of a finite sequence.

    Any box can slide clockwise until its left edge meets the projection of a
    point it contains without losing mass, so it suffices to anchor arcs at the
    projections ``theta_i``.  For a fixed anchor, point ``j`` enters the box once
    the length reaches ``max(span(i -> j), t_j)``; sorting these entry lengths
    gives the box mass as a step function whose value times ``log(1/length)`` is
    maximised at a step.
    """
    if len(mu) == 0:
        return 0.0, None
    t, hi, lo = sequence_arrays(mu.points)
    w = mu.weights
    anchors = np.flatnonzero(t < 1.0)
    best, best_i, best_len = 0.0, -1, 1.0
    for start in range(0, len(anchors), _ROW_CHUNK):
        rows = anchors[start:start + _ROW_CHUNK]
        span = _ccw_span(hi[rows, None], lo[rows, None], hi[None, :], lo[None, :])
        enter = np.maximum(span, t[None, :])
        enter[:, t >= 1.0] = np.inf
        order = np.argsort(enter, axis=1, kind="stable")
        lengths = np.take_along_axis(enter, order, axis=1)
        mass = np.cumsum(w[order], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(lengths < 1.0, mass * -np.log(lengths), 0.0)
        flat = int(np.argmax(vals))
        r, c = divmod(flat, vals.shape[1])
        if vals[r, c] > best:
            best, best_i, best_len = float(vals[r, c]), int(rows[r]), float(lengths[r, c])
    if best_i < 0:
        return 0.0, None
    mid_hi, mid_lo = canonical_angle(hi[best_i], lo[best_i] + math.pi * best_len)
    return best, Arc(mid_hi, best_len, mid_lo)


def _turn_fraction_bits(points: Sequence[DiscPoint], bits: int) -> list[int]:
    """``floor(2**bits * arg/(2 pi))`` per point, computed at 40 digits."""
    out = []
    with mpmath.workdps(40):
        two_pi = 2 * mpmath.pi
        scale = mpmath.mpf(2) ** bits
        for p in points:
            u = (mpmath.mpf(p.theta) + mpmath.mpf(p.theta_lo)) / two_pi
            u -= mpmath.floor(u)
            out.append(int(mpmath.floor(u * scale)))
    return out


def ob_constant_dyadic(mu: SequenceMeasure, max_level: int = 60) -> float:
    """Max of ``mu(S(I)) log(1/|I|)`` over dyadic arcs of length ``2^-k``, ``k <= max_level``."""
    if max_level < 1:
        raise ValidationError("max_level must be at least 1")
    if len(mu) == 0:
        return 0.0
    t, _, _ = sequence_arrays(mu.points)
    cells = _turn_fraction_bits(mu.points, max_level)
    best = 0.0
    for k in range(1, max_level + 1):
        shift = max_level - k
        length = 2.0 ** -k
        sums: dict[int, float] = {}
        for idx, (tk, cell) in enumerate(zip(t, cells)):
            if tk <= length:
                key = cell >> shift
                sums[key] = sums.get(key, 0.0) + float(mu.weights[idx])
        if sums:
            best = max(best, max(sums.values()) * k * math.log(2.0))
    return best


def rob_values(mu: SequenceMeasure, delta: float) -> np.ndarray:
    """``mu(S(I_n^delta)) log(1/(1-|z_n|))`` for every ``n``."""
    if not (0.0 < delta < 1.0):
        raise ValidationError(f"delta must lie in (0, 1), got {delta!r}")
    t, hi, lo = sequence_arrays(mu.points)
    origin = np.flatnonzero(t >= 1.0)
    if origin.size:
        raise ValidationError(f"restricted boxes undefined for the origin (index {int(origin[0])})")
    out = np.empty(len(t))
    lengths = t ** delta
    for start in range(0, len(t), _ROW_CHUNK):
        rows = slice(start, start + _ROW_CHUNK)
        mask = box_mask(hi[rows, None], lo[rows, None], lengths[rows, None], t[None, :], hi[None, :], lo[None, :])
        out[rows] = (mask * mu.weights[None, :]).sum(axis=1) * -np.log(t[rows])
    return out


def rob_constant(mu: SequenceMeasure, delta: float) -> tuple[float, int | None]:
    """``sup_n mu(S(I_n^delta)) log(1/(1-|z_n|))`` and the maximizing index."""
    if len(mu) == 0:
        return 0.0, None
    vals = rob_values(mu, delta)
    i = int(np.argmax(vals))
    return float(vals[i]), i


def rob_profile(mu: SequenceMeasure, grid: Sequence[float] = DEFAULT_DELTA_GRID) -> dict[float, float]:
    return {float(d): rob_constant(mu, d)[0] for d in grid}


def rob_best(mu: SequenceMeasure, grid: Sequence[float] = DEFAULT_DELTA_GRID) -> tuple[float, float]:
    """The ``delta`` on the grid with the smallest restricted constant (first on ties)."""
    if len(grid) == 0:
        raise ValidationError("delta grid is empty")
    profile = rob_profile(mu, grid)
    delta = min(profile, key=lambda d: (profile[d], d))
    return delta, profile[delta]


# ---------------------------------------------------------------------------
# lemma diagnostics
# ---------------------------------------------------------------------------

def default_ball_centers(points: Sequence[DiscPoint]) -> list[DiscPoint]:
    """The points themselves, radial ladders above them and angular midpoints of neighbours."""
    if not points:
        return []
    centers = list(points)
    for p in points:
        if p.t < 1.0:
            for s in (0.75, 0.5, 0.25):
                centers.append(DiscPoint(p.t ** s, p.theta, p.theta_lo))
    t, hi, lo = sequence_arrays(points)
    live = np.flatnonzero(t < 1.0)
    if len(live) >= 2:
        ang = hi[live] + lo[live]
        order = live[np.argsort(ang, kind="stable")]
        for a, b in zip(order, np.roll(order, -1)):
            half = 0.5 * float(_ccw_span(hi[a], lo[a], hi[b], lo[b])) * TWO_PI
            mid_hi, mid_lo = canonical_angle(hi[a], lo[a] + half)
            centers.append(DiscPoint(float(max(t[a], t[b])), mid_hi, mid_lo))
    return centers


def ball_count_profile(
    points: Sequence[DiscPoint], c: float, centers: Sequence[DiscPoint] | None = None
) -> int:
    """Max over centers ``z`` of ``#{n : d(z_n, z) <= c (d(0, z) + 1)}``."""
    if c <= 0:
        raise ValidationError("c must be positive")
    if not points:
        return 0
    if centers is None:
        centers = default_ball_centers(points)
    t, hi, lo = sequence_arrays(points)
    ct, chi, clo = sequence_arrays(centers)
    radius = c * (dist_from_origin_arrays(ct) + 1.0)
    d = hyperbolic_dist_arrays(ct[:, None], chi[:, None], clo[:, None], t[None, :], hi[None, :], lo[None, :])
    return int((d <= radius[:, None] * (1.0 + 1e-12)).sum(axis=1).max())


def _stolz_half_angle(s):
    """Largest ``|phi|`` with ``(1-s) e^{i phi}`` in the Stolz angle at 1."""
    s = np.asarray(s, dtype=float)
    arg = np.sqrt(3.0) * s / (2.0 * np.sqrt(np.maximum(1.0 - s, 1e-300)))
    return np.where(arg >= 1.0, math.pi, 2.0 * np.arcsin(np.minimum(arg, 1.0)))


def annulus_diameter(
    z: DiscPoint, inner_exp: float, outer_exp: float, probes: int = 4096, seed: int = 0
) -> float:
    """Hyperbolic diameter of ``Gamma(z) ∩ (S(I(z)^outer_exp) \\ S(I(z)^inner_exp))``.

    Estimated from a boundary grid plus uniform interior samples (log-uniform
    in depth); the region is rotated so that ``z* = 1``.
    """
    if z.is_origin:
        raise ValidationError("z must be nonzero")
    big = z.t ** outer_exp
    small = z.t ** inner_exp
    if big <= small:
        return 0.0
    s_lo = small / 4.0
    n_edge = max(probes // 4, 8)
    n_mc = max(probes - 4 * n_edge, 0)
    rng = np.random.default_rng(seed)

    edge_s = np.exp(np.linspace(math.log(s_lo), math.log(big), n_edge))
    s_all = [edge_s, edge_s, np.full(n_edge, big), np.full(n_edge, min(small * (1 + 1e-9), big))]
    half_big = math.pi * big
    phi_edge = np.minimum(_stolz_half_angle(edge_s), half_big)
    u = np.linspace(-1.0, 1.0, n_edge)
    phi_all = [phi_edge, -phi_edge]
    for s_row in s_all[2:]:
        phi_all.append(u * np.minimum(_stolz_half_angle(s_row), half_big))
    s_mc = np.exp(rng.uniform(math.log(s_lo), math.log(big), n_mc))
    phi_mc = rng.uniform(-1.0, 1.0, n_mc) * np.minimum(_stolz_half_angle(s_mc), half_big)
    s = np.concatenate(s_all + [s_mc])
    phi = np.concatenate(phi_all + [phi_mc])

    in_cone = np.abs(phi) <= _stolz_half_angle(s)
    in_big = (s <= big) & (np.abs(phi) <= half_big)
    in_small = (s <= small) & (np.abs(phi) <= math.pi * small)
    keep = in_cone & in_big & ~in_small
    s, phi = s[keep], phi[keep]
    if s.size < 2:
        return 0.0
    zeros = np.zeros_like(s)
    best = 0.0
    for start in range(0, s.size, 512):
        blk = slice(start, start + 512)
        d = hyperbolic_dist_arrays(s[blk, None], zeros[blk, None], phi[blk, None], s[None, :], zeros[None, :], phi[None, :])
        best = max(best, float(d.max()))
    return best


def lemma2_diameter(
    z: DiscPoint, delta: float, k: int, probes: int = 4096, seed: int = 0, ladder: str = "power"
) -> float:
    """Diameter of the ``k``-th Stolz slice ``E_k`` between consecutive dilated boxes of ``z``.

    ``ladder="power"`` uses exponents ``delta**k`` and ``delta**(k+1)``;
    ``ladder="dyadic"`` uses ``2**-k`` and ``2**-(k+1)`` regardless of ``delta``.
    """
    if not (0.0 < delta < 1.0):
        raise ValidationError("delta must lie in (0, 1)")
    if k < 0:
        raise ValidationError("k must be nonnegative")
    if ladder == "power":
        inner, outer = delta ** k, delta ** (k + 1)
    elif ladder == "dyadic":
        inner, outer = 2.0 ** -k, 2.0 ** -(k + 1)
    else:
        raise ValidationError(f"unknown ladder {ladder!r}")
    return annulus_diameter(z, inner, outer, probes=probes, seed=seed)


def lemma2_ratio(z: DiscPoint, delta: float, k: int, **kwargs) -> float:
    """``diameter(E_k) / (1 + d(0, z))``."""
    return lemma2_diameter(z, delta, k, **kwargs) / (1.0 + dist_from_origin(z))


def stolz_tangential_distance(s: float) -> float:
    """``d(w, |w|)`` for ``w`` on the edge of the Stolz angle at 1 with ``1 - |w| = s``."""
    phi = float(_stolz_half_angle(s))
    return float(hyperbolic_dist_arrays(s, 0.0, 0.0, s, 0.0, phi))
