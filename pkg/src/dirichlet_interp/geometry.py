"""Points, arcs, Carleson boxes, Stolz angles and the hyperbolic metric of the unit disc.

Points are stored as ``(t, theta, theta_lo)`` with ``t = 1 - |z|`` and the
argument split into a canonical base ``theta`` in ``[0, 2*pi)`` plus a small
offset ``theta_lo``.  The constructions in :mod:`dirichlet_interp.constructions`
put hundreds of points on arcs of length ``e^-100`` and at depth ``e^-600``;
neither the depth nor the angular spacing survives a round trip through a
complex double, so every formula below works from the stored fields directly
and in the log domain where products would underflow.

The array helpers (``*_arrays`` / ``*_mask``) broadcast over numpy arrays and
are what the rest of the package uses; the scalar functions are thin wrappers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi
# relative slack for closed-boundary comparisons (box / Stolz edges)
EDGE_RTOL = 1e-12
# offsets larger than this are folded into the base angle
_MAX_OFFSET = 1.0


def wrap_angle(d):
    """Map angle(s) into ``(-pi, pi]``."""
    d = np.asarray(d, dtype=float)
    out = np.where(d > math.pi, d - TWO_PI, d)
    out = np.where(out <= -math.pi, out + TWO_PI, out)
    if out.ndim == 0:
        return float(out)
    return out


def angle_diff_arrays(hi1, lo1, hi2, lo2):
    """Signed angular difference ``theta1 - theta2`` wrapped to ``(-pi, pi]``.

    The bases are subtracted first (exact when they are equal or close), then
    the offsets, so points sharing a base keep their full offset precision.
    """
    d = wrap_angle(np.subtract(hi1, hi2)) + (np.subtract(lo1, lo2))
    return wrap_angle(d)


def canonical_angle(theta: float, theta_lo: float = 0.0) -> tuple[float, float]:
    if not (math.isfinite(theta) and math.isfinite(theta_lo)):
        raise ValidationError(f"angle must be finite, got {theta!r} + {theta_lo!r}")
    if abs(theta_lo) >= _MAX_OFFSET:
        theta, theta_lo = theta + theta_lo, 0.0
    hi = math.fmod(theta, TWO_PI)
    if hi < 0.0:
        shifted = hi + TWO_PI
        if shifted >= TWO_PI:
            # |hi| below half an ulp of 2*pi: keep it as offset from 0
            theta_lo += hi
            shifted = 0.0
        hi = shifted
    return hi, float(theta_lo)


@dataclass(frozen=True)
class DiscPoint:
    """Point ``(1 - t) * exp(i * (theta + theta_lo))`` of the open unit disc."""

    t: float
    theta: float = 0.0
    theta_lo: float = 0.0

    def __post_init__(self):
        t = self.t
        if not (isinstance(t, (int, float, np.floating)) and math.isfinite(t)):
            raise ValidationError(f"depth t must be a finite real, got {t!r}")
        if not (0.0 < t <= 1.0):
            raise ValidationError(f"depth t must lie in (0, 1], got {t!r}")
        if not (0.0 <= self.theta < TWO_PI) or not math.isfinite(self.theta_lo):
            raise ValidationError(
                f"angle not canonical: theta={self.theta!r}, theta_lo={self.theta_lo!r}"
            )

    @property
    def modulus(self) -> float:
        return 1.0 - self.t

    @property
    def is_origin(self) -> bool:
        return self.t == 1.0

    @property
    def angle(self) -> float:
        """Total argument as a single float (loses sub-ulp offsets)."""
        return (self.theta + self.theta_lo) % TWO_PI

    @property
    def z(self) -> complex:
        return complex(self.modulus * np.exp(1j * (self.theta + self.theta_lo)))

    @property
    def boundary_point(self) -> complex:
        if self.is_origin:
            raise ValidationError("the origin has no boundary projection")
        return complex(np.exp(1j * (self.theta + self.theta_lo)))


@dataclass(frozen=True)
class Arc:
    """Closed boundary arc; ``length`` is normalized so the whole circle is 1."""

    theta_mid: float
    length: float
    theta_mid_lo: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.length) and 0.0 < self.length <= 1.0):
            raise ValidationError(f"arc length must lie in (0, 1], got {self.length!r}")
        if not (0.0 <= self.theta_mid < TWO_PI) or not math.isfinite(self.theta_mid_lo):
            raise ValidationError(f"arc midpoint not canonical: {self.theta_mid!r}")

    @property
    def half_width(self) -> float:
        """Angular half-width in radians."""
        return math.pi * self.length

    @property
    def log_inv_length(self) -> float:
        return -math.log(self.length)


def make_arc(theta_mid: float, length: float, theta_mid_lo: float = 0.0) -> Arc:
    hi, lo = canonical_angle(theta_mid, theta_mid_lo)
    return Arc(hi, float(length), lo)


def point_from_polar_depth(t: float, theta: float, theta_lo: float = 0.0) -> DiscPoint:
    """Build a point from its boundary depth ``t = 1 - |z|`` and argument."""
    t = float(t)
    if not math.isfinite(t) or not (0.0 < t <= 1.0):
        raise ValidationError(f"depth t must lie in (0, 1], got {t!r}")
    hi, lo = canonical_angle(float(theta), float(theta_lo))
    return DiscPoint(t, hi, lo)


def point_from_complex(z: complex) -> DiscPoint:
    """Convenience constructor; only accurate for points not too close to the circle."""
    r = abs(z)
    if not r < 1.0:
        raise ValidationError(f"|z| must be < 1, got {r!r}")
    return point_from_polar_depth(1.0 - r, math.atan2(z.imag, z.real) if r > 0 else 0.0)


def sequence_arrays(points: Sequence[DiscPoint]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Columns ``(t, theta, theta_lo)`` of a point list as float arrays."""
    n = len(points)
    t = np.fromiter((p.t for p in points), dtype=float, count=n)
    hi = np.fromiter((p.theta for p in points), dtype=float, count=n)
    lo = np.fromiter((p.theta_lo for p in points), dtype=float, count=n)
    return t, hi, lo


# ---------------------------------------------------------------------------
# cancellation-free building blocks
# ---------------------------------------------------------------------------

def _log_sin_half_sq(alpha):
    """``log(4 sin^2(alpha/2))``; -inf at alpha = 0."""
    with np.errstate(divide="ignore"):
        return np.log(4.0) + 2.0 * np.log(np.abs(np.sin(0.5 * np.asarray(alpha, dtype=float))))


def log_one_minus_product_sq(s, t, alpha):
    """``log |1 - z conj(w)|^2`` for ``|z| = 1-s``, ``|w| = 1-t``, ``arg z - arg w = alpha``.

    Uses ``|1 - a e^{i alpha}|^2 = (1-a)^2 + 4 a sin^2(alpha/2)`` with
    ``1 - a = s + t - s t`` so nothing cancels as both points approach the circle.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    a = (1.0 - s) * (1.0 - t)
    one_minus_a = s + t - s * t
    with np.errstate(divide="ignore"):
        return np.logaddexp(2.0 * np.log(one_minus_a), np.log(a) + _log_sin_half_sq(alpha))


def log_chord_sq(s, t, alpha):
    """``log |z - w|^2`` in the same parametrization; -inf when z = w."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    a = (1.0 - s) * (1.0 - t)
    with np.errstate(divide="ignore"):
        return np.logaddexp(2.0 * np.log(np.abs(t - s)), np.log(a) + _log_sin_half_sq(alpha))


def log_one_minus_modulus_sq(t):
    """``log(1 - |z|^2) = log(t (2 - t))``."""
    t = np.asarray(t, dtype=float)
    return np.log(t) + np.log(2.0 - t)


def hyperbolic_dist_arrays(s, hs, ls, t, ht, lt):
    """Broadcasting hyperbolic distance ``artanh |phi_z(w)|``."""
    alpha = angle_diff_arrays(hs, ls, ht, lt)
    log_den = log_one_minus_product_sq(s, t, alpha)
    log_phi_sq = np.minimum(log_chord_sq(s, t, alpha) - log_den, 0.0)
    # 1 - |phi|^2 = (1-|z|^2)(1-|w|^2) / |1 - conj(z) w|^2
    log_p = np.minimum(log_one_minus_modulus_sq(s) + log_one_minus_modulus_sq(t) - log_den, 0.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        near = np.arctanh(np.sqrt(np.exp(log_phi_sq)))
        far = np.log1p(np.sqrt(-np.expm1(log_p))) - 0.5 * log_p
    return np.where(log_phi_sq < math.log(0.5), near, far)


def hyperbolic_dist(z: DiscPoint, w: DiscPoint) -> float:
    """Hyperbolic distance ``0.5 * log((1+|phi|)/(1-|phi|))``, ``phi = (z-w)/(1-conj(z) w)``."""
    return float(hyperbolic_dist_arrays(z.t, z.theta, z.theta_lo, w.t, w.theta, w.theta_lo))


def dist_from_origin_arrays(t):
    t = np.asarray(t, dtype=float)
    return 0.5 * (np.log(2.0 - t) - np.log(t))


def dist_from_origin(z: DiscPoint) -> float:
    """``d(0, z) = 0.5 * log((2 - t) / t)``."""
    return float(dist_from_origin_arrays(z.t))


# ---------------------------------------------------------------------------
# arcs and boxes
# ---------------------------------------------------------------------------

def arc_of_point(z: DiscPoint) -> Arc:
    """The arc ``I(z)`` centred at ``z/|z|`` with normalized length ``1 - |z|``."""
    if z.is_origin:
        raise ValidationError("arc_of_point is undefined at the origin")
    return Arc(z.theta, z.t, z.theta_lo)


def dilate_arc(arc: Arc, delta: float) -> Arc:
    """Same midpoint, length ``|I| ** delta``.  The full circle is returned unchanged."""
    if not (0.0 < delta < 1.0):
        raise ValidationError(f"dilation exponent must lie in (0, 1), got {delta!r}")
    if arc.length >= 1.0:
        warnings.warn("dilating the full circle leaves it unchanged", RuntimeWarning, stacklevel=2)
        return arc
    return Arc(arc.theta_mid, arc.length ** delta, arc.theta_mid_lo)


def dilated_arc_of_point(z: DiscPoint, delta: float) -> Arc:
    return dilate_arc(arc_of_point(z), delta)


def box_mask(arc_hi, arc_lo, arc_len, t, hi, lo):
    """Broadcasting membership test for the closed Carleson box over an arc."""
    arc_len = np.asarray(arc_len, dtype=float)
    t = np.asarray(t, dtype=float)
    ang = np.abs(angle_diff_arrays(hi, lo, arc_hi, arc_lo))
    slack = 1.0 + EDGE_RTOL
    return (t < 1.0) & (t <= arc_len * slack) & (ang <= math.pi * arc_len * slack)


def box_contains(arc: Arc, w: DiscPoint) -> bool:
    """Membership of ``w`` in ``S(I) = {z != 0 : z/|z| in I, 1 - |z| <= |I|}``."""
    return bool(box_mask(arc.theta_mid, arc.theta_mid_lo, arc.length, w.t, w.theta, w.theta_lo))


def stolz_mask(z_hi, z_lo, t, hi, lo):
    """Broadcasting test ``|z* - w| <= 2 (1 - |w|)`` for the Stolz angle at ``z*``."""
    t = np.asarray(t, dtype=float)
    alpha = angle_diff_arrays(hi, lo, z_hi, z_lo)
    # |z* - w|^2 = t^2 + 4(1-t) sin^2(alpha/2) <= 4 t^2  <=>  2|sin(alpha/2)| sqrt(1-t) <= sqrt(3) t
    lhs = 2.0 * np.abs(np.sin(0.5 * alpha)) * np.sqrt(1.0 - t)
    return lhs <= math.sqrt(3.0) * t * (1.0 + EDGE_RTOL)


def stolz_contains(z: DiscPoint, w: DiscPoint) -> bool:
    """Whether ``w`` lies in the Stolz angle ``Gamma(z)`` at ``z/|z|``."""
    if z.is_origin:
        raise ValidationError("the Stolz angle is undefined for z = 0")
    return bool(stolz_mask(z.theta, z.theta_lo, w.t, w.theta, w.theta_lo))


def arcs_disjoint(a: Arc, b: Arc) -> bool:
    """Closed arcs are disjoint iff their midpoints are farther apart than the half-widths."""
    if a.length + b.length >= 1.0:
        return False
    gap = abs(float(angle_diff_arrays(a.theta_mid, a.theta_mid_lo, b.theta_mid, b.theta_mid_lo)))
    return gap > math.pi * (a.length + b.length)


def shallow_points(points: Iterable[DiscPoint]) -> list[int]:
    """Indices of points with ``|z| < 1/2`` (outside the standing assumption ``|z_n| >= 1/2``)."""
    return [i for i, p in enumerate(points) if p.t > 0.5]
