"""Dirichlet-space kernel, Gram matrices and column diagnostics.

The kernel is ``K(z, w) = log(1/(1 - z conj(w))) / (z conj(w))`` with the
principal logarithm.  Evaluation never forms ``z conj(w)`` as a complex
double: its modulus ``a = (1-s)(1-t)`` and argument come from the stored
depths and angles, and ``log|1 - z conj(w)|`` is taken in log form near the
circle and through ``log1p`` near the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .geometry import (
    DiscPoint,
    angle_diff_arrays,
    box_mask,
    dist_from_origin_arrays,
    hyperbolic_dist_arrays,
    log_one_minus_product_sq,
    sequence_arrays,
    stolz_mask,
)

# below this |z conj(w)| the power series is used
SERIES_CUTOFF = 1e-8


def _log_inv_one_minus(s, t, alpha):
    """Principal ``log(1/(1 - x))`` for ``x = (1-s)(1-t) e^{i alpha}``."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    a = (1.0 - s) * (1.0 - t)
    one_minus_a = s + t - s * t
    sin_half = np.sin(0.5 * alpha)
    # |1-x|^2 - 1 = a^2 - 2 a cos(alpha)
    u = a * a - 2.0 * a * np.cos(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        real = np.where(
            np.abs(u) < 0.5,
            -0.5 * np.log1p(np.where(np.abs(u) < 0.5, u, 0.0)),
            -0.5 * log_one_minus_product_sq(s, t, alpha),
        )
    imag = -np.arctan2(-a * np.sin(alpha), one_minus_a + 2.0 * a * sin_half * sin_half)
    return real + 1j * imag


def _kernel_closed(s, t, alpha):
    a = (1.0 - np.asarray(s, dtype=float)) * (1.0 - np.asarray(t, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        return _log_inv_one_minus(s, t, alpha) * np.exp(-1j * np.asarray(alpha, dtype=float)) / a


def _kernel_series(s, t, alpha):
    a = (1.0 - np.asarray(s, dtype=float)) * (1.0 - np.asarray(t, dtype=float))
    x = a * np.exp(1j * np.asarray(alpha, dtype=float))
    return 1.0 + x * (1.0 / 2.0 + x * (1.0 / 3.0 + x * (1.0 / 4.0 + x / 5.0)))


def kernel_arrays(s, hs, ls, t, ht, lt):
    """Broadcasting ``K(z, w)`` for ``z = (s, hs, ls)`` and ``w = (t, ht, lt)``."""
    alpha = angle_diff_arrays(hs, ls, ht, lt)
    a = (1.0 - np.asarray(s, dtype=float)) * (1.0 - np.asarray(t, dtype=float))
    small = a < SERIES_CUTOFF
    closed = _kernel_closed(np.where(small, 0.5, s), np.where(small, 0.5, t), alpha)
    return np.where(small, _kernel_series(s, t, alpha), closed)


def kernel_eval(z: DiscPoint, w: DiscPoint) -> complex:
    """Reproducing kernel ``K(z, w)`` of the Dirichlet space."""
    return complex(kernel_arrays(z.t, z.theta, z.theta_lo, w.t, w.theta, w.theta_lo))


def kernel_diag_arrays(t):
    """``K(z, z) = log(1/(1-|z|^2)) / |z|^2`` from the depth ``t``."""
    t = np.asarray(t, dtype=float)
    m2 = (1.0 - t) ** 2
    deep = t < 0.5
    tt = np.where(deep, t, 0.25)
    mm = np.where(deep, 0.5, m2)
    with np.errstate(divide="ignore", invalid="ignore"):
        v_deep = -(np.log(tt) + np.log(2.0 - tt)) / (1.0 - tt) ** 2
        v_mid = -np.log1p(-mm) / mm
    v_series = 1.0 + m2 * (1.0 / 2.0 + m2 * (1.0 / 3.0 + m2 / 4.0))
    return np.where(deep, v_deep, np.where(m2 < SERIES_CUTOFF, v_series, v_mid))


def kernel_diag(z: DiscPoint) -> float:
    """Squared norm ``||K_z||^2 = K(z, z)``; equals 1 at the origin."""
    return float(kernel_diag_arrays(z.t))


def find_duplicates(points: Sequence[DiscPoint]) -> list[tuple[int, int]]:
    """Pairs ``(first, later)`` of indices holding the same point."""
    seen: dict[tuple, int] = {}
    dups = []
    for i, p in enumerate(points):
        key = ("origin",) if p.is_origin else (p.t, p.theta, p.theta_lo)
        if key in seen:
            dups.append((seen[key], i))
        else:
            seen[key] = i
    return dups


def require_distinct(points: Sequence[DiscPoint]) -> None:
    dups = find_duplicates(points)
    if dups:
        shown = ", ".join(f"{i}={j}" for i, j in dups[:10])
        raise ValidationError(f"duplicate points at indices {shown}")


@dataclass(frozen=True)
class GramMatrix:
    """Normalized Gram matrix ``g_nm = K(z_n, z_m) / sqrt(K(z_n,z_n) K(z_m,z_m))``."""

    points: tuple[DiscPoint, ...]
    g: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)


def normalized_kernel_block(points_a: Sequence[DiscPoint], points_b: Sequence[DiscPoint]) -> np.ndarray:
    """Rectangular block of normalized kernel values between two point lists."""
    sa, ha, la = sequence_arrays(points_a)
    sb, hb, lb = sequence_arrays(points_b)
    k = kernel_arrays(sa[:, None], ha[:, None], la[:, None], sb[None, :], hb[None, :], lb[None, :])
    da = np.sqrt(kernel_diag_arrays(sa))
    db = np.sqrt(kernel_diag_arrays(sb))
    return k / (da[:, None] * db[None, :])


def gram_matrix(points: Sequence[DiscPoint]) -> GramMatrix:
    """Gram matrix of a finite sequence; duplicate points are rejected."""
    points = tuple(points)
    require_distinct(points)
    n = len(points)
    if n == 0:
        return GramMatrix(points, np.zeros((0, 0), dtype=complex))
    g = np.triu(normalized_kernel_block(points, points), 1)
    # mirror the upper triangle so symmetry is exact
    g = g + g.conj().T
    np.fill_diagonal(g, 1.0)
    return GramMatrix(points, g)


def weak_separation_kernel(G: GramMatrix) -> float:
    """``sup_{n != m} |g_nm|``; 0 for fewer than two points."""
    if G.size < 2:
        return 0.0
    a = np.abs(G.g)
    np.fill_diagonal(a, 0.0)
    return float(a.max())


def hyperbolic_distance_matrix(points: Sequence[DiscPoint]) -> np.ndarray:
    t, hi, lo = sequence_arrays(points)
    return hyperbolic_dist_arrays(t[:, None], hi[:, None], lo[:, None], t[None, :], hi[None, :], lo[None, :])


def weak_separation_geometric(points: Sequence[DiscPoint]) -> float:
    """Smallest ``K`` with ``d(z_n, 0) + 1 <= K d(z_n, z_m)`` for all ``n != m``."""
    points = tuple(points)
    if len(points) < 2:
        return 0.0
    require_distinct(points)
    d = hyperbolic_distance_matrix(points)
    t, _, _ = sequence_arrays(points)
    num = dist_from_origin_arrays(t) + 1.0
    with np.errstate(divide="ignore"):
        ratio = num[:, None] / d
    np.fill_diagonal(ratio, 0.0)
    worst = float(ratio.max())
    if not math.isfinite(worst):
        raise ValidationError("coincident points give an infinite separation ratio")
    return worst


def column_norms(G: GramMatrix) -> np.ndarray:
    """ℓ² norm of every column of ``G``."""
    return np.sqrt(np.sum(np.abs(G.g) ** 2, axis=0))


def cb_norm(G: GramMatrix) -> float:
    """Largest column norm, i.e. the ℓ² → ℓ∞ norm of ``G``."""
    if G.size == 0:
        return 0.0
    return float(column_norms(G).max())


def operator_norm(G: GramMatrix, iters: int = 500, tol: float = 1e-12, seed: int = 0) -> float:
    """ℓ² operator norm of ``G`` by power iteration (diagnostic only)."""
    if G.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(G.size) + 0j
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = G.g @ v
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - lam) <= tol * new:
            return new
        lam = new
    return lam


@dataclass(frozen=True)
class ColumnDecomposition:
    """Split of one Gram column into the box / off-cone / cone classes."""

    A: float
    B: float
    C: float
    in_box: np.ndarray
    outside: np.ndarray
    in_cone: np.ndarray

    @property
    def total(self) -> float:
        return self.A + self.B + self.C


def column_terms(G: GramMatrix, n: int, surrogate: bool = False) -> np.ndarray:
    """Per-entry terms ``|g_nm|^2``, or ``(log 1/|1 - z_n conj z_m|)^2 / (K_nn K_mm)``."""
    if not surrogate:
        return np.abs(G.g[:, n]) ** 2
    t, hi, lo = sequence_arrays(G.points)
    alpha = angle_diff_arrays(hi[n], lo[n], hi, lo)
    log_abs = 0.5 * log_one_minus_product_sq(t[n], t, alpha)
    kd = kernel_diag_arrays(t)
    return log_abs ** 2 / (kd[n] * kd)


def column_decomposition(G: GramMatrix, n: int, surrogate: bool = False) -> ColumnDecomposition:
    """Partition column ``n`` into ``S(z_n)``, outside ``Gamma(z_n) ∪ S(z_n)``, and ``Gamma(z_n) \\ S(z_n)``."""
    if not 0 <= n < G.size:
        raise IndexError(f"column {n} out of range for {G.size} points")
    z = G.points[n]
    if z.is_origin:
        raise ValidationError("column decomposition needs z_n != 0")
    t, hi, lo = sequence_arrays(G.points)
    in_box = box_mask(z.theta, z.theta_lo, z.t, t, hi, lo)
    in_box[n] = True
    cone = stolz_mask(z.theta, z.theta_lo, t, hi, lo)
    in_cone = cone & ~in_box
    outside = ~cone & ~in_box
    terms = column_terms(G, n, surrogate)
    return ColumnDecomposition(
        A=float(terms[in_box].sum()),
        B=float(terms[outside].sum()),
        C=float(terms[in_cone].sum()),
        in_box=np.flatnonzero(in_box),
        outside=np.flatnonzero(outside),
        in_cone=np.flatnonzero(in_cone),
    )
