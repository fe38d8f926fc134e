"""Equispaced arc blocks and the two counterexample unions.

A block ``E(r, l, N)`` is ``N`` equispaced points on the arc ``r I`` with
``|I| = l``.  Parameters are carried through ``R = log(1/(1 - r^2))`` because
the interesting regime is ``1 - r ~ e^-R`` with ``R`` in the hundreds.

Schedule 1 (``N = floor((log R)^2)``, ``log(1/l) = R / log R``) gives blocks
whose one-box constant grows like ``log R`` while the Gram columns stay
bounded; its union is certified block by block against the cross-block
threshold ``1 / (2^n N_n sum_{i<n} N_i)``.  Schedule 2 (``N = floor((log R)^3)``)
makes the columns grow while the dilated boxes of different blocks are kept
disjoint, so the restricted constant stays put.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import InfeasibleConstructionError, ValidationError
from .geometry import (
    TWO_PI,
    DiscPoint,
    angle_diff_arrays,
    canonical_angle,
    sequence_arrays,
)
from .kernel import normalized_kernel_block

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
MIN_R = math.log(4.0 / 3.0)


@dataclass(frozen=True)
class BlockParams:
    R: float
    ell: float
    N: int
    theta_mid: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.R) and self.R > MIN_R):
            raise ValidationError(f"R must exceed log(4/3) so that r > 1/2, got {self.R!r}")
        if not (0.0 < self.ell < 1.0):
            raise ValidationError(f"arc length must lie in (0, 1), got {self.ell!r}")
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        if not math.isfinite(self.theta_mid):
            raise ValidationError("theta_mid must be finite")

    @property
    def r(self) -> float:
        return math.sqrt(-math.expm1(-self.R))

    @property
    def depth(self) -> float:
        """``1 - r``, computed as ``e^-R / (1 + r)``."""
        return math.exp(-self.R) / (1.0 + self.r)

    @property
    def log_inv_ell(self) -> float:
        return -math.log(self.ell)


@dataclass(frozen=True)
class AssumptionCheck:
    """Both block assumptions with their slack (``>= 0`` means satisfied)."""

    separation_ok: bool
    count_ok: bool
    separation_margin: float  # log(l^2/(1-r^2)) - log(N^2)
    count_margin: float  # log(1/l) - N

    @property
    def ok(self) -> bool:
        return self.separation_ok and self.count_ok

    def __bool__(self) -> bool:
        return self.ok


def _assumption_margins(R: float, log_inv_ell: float, N: int) -> AssumptionCheck:
    sep = R - 2.0 * log_inv_ell - 2.0 * math.log(N)
    cnt = log_inv_ell - N
    return AssumptionCheck(sep >= 0.0, cnt >= 0.0, sep, cnt)


def check_assumptions(p: BlockParams) -> AssumptionCheck:
    """``N^2 <= l^2 / (1 - r^2)`` and ``N <= log(1/l)``, both closed."""
    return _assumption_margins(p.R, p.log_inv_ell, p.N)


def block_points(p: BlockParams) -> list[DiscPoint]:
    """Cell centres of an ``N``-partition of the arc, all at depth ``1 - r``."""
    t = p.depth
    if not t > 0.0:
        raise InfeasibleConstructionError(f"depth 1 - r underflows at R = {p.R!r}")
    hi, lo = canonical_angle(p.theta_mid)
    pts = []
    for j in range(p.N):
        off = (2 * j + 1 - p.N) / (2.0 * p.N) * TWO_PI * p.ell
        pts.append(DiscPoint(t, hi, lo + off))
    return pts


def _schedule_params(R: float, power: int, theta_mid: float) -> BlockParams:
    if not (math.isfinite(R) and R > math.e):
        raise ValidationError(f"schedule needs R > e, got {R!r}")
    logR = math.log(R)
    N = int(math.floor(logR ** power))
    return BlockParams(R=R, ell=math.exp(-R / logR), N=N, theta_mid=theta_mid)


def example1_threshold(r_max: float = 1e4, ratio: float = 1.0005) -> float:
    """Smallest scanned ``R`` beyond which schedule 1 satisfies both assumptions up to ``r_max``."""
    grid = []
    R = math.e * 1.0001
    while R <= r_max:
        grid.append(R)
        R *= ratio
    ok = [
        _assumption_margins(R, R / math.log(R), int(math.floor(math.log(R) ** 2))).ok for R in grid
    ]
    if not ok[-1]:
        raise InfeasibleConstructionError(f"schedule 1 still infeasible at R = {grid[-1]!r}")
    i = len(ok) - 1
    while i > 0 and ok[i - 1]:
        i -= 1
    return grid[i]


def example1_params(R: float, theta_mid: float = 0.0) -> BlockParams:
    """``N = floor((log R)^2)``, ``log(1/l) = R / log R``; infeasible ``R`` is an error."""
    p = _schedule_params(R, 2, theta_mid)
    chk = check_assumptions(p)
    if not chk.ok:
        raise InfeasibleConstructionError(
            f"schedule 1 violates the block assumptions at R = {R:.6g} "
            f"(margins {chk.separation_margin:.4g}, {chk.count_margin:.4g}); "
            f"feasible from about R = {example1_threshold():.6g}"
        )
    return p


def example2_params(R: float, theta_mid: float = 0.0) -> BlockParams:
    """``N = floor((log R)^3)``, ``log(1/l) = R / log R``; assumptions are not enforced."""
    return _schedule_params(R, 3, theta_mid)


def mass_proxy(R: float) -> float:
    """``(log R)^3 / R``, the block mass scale of schedule 2."""
    return math.log(R) ** 3 / R


def mass_proxy_partial_sums(R_list: Sequence[float]) -> list[float]:
    return list(np.cumsum([mass_proxy(R) for R in R_list]))


@dataclass(frozen=True)
class CertificateEntry:
    block: int  # 1-based
    R: float
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.value < self.threshold


@dataclass(frozen=True)
class UnionSpec:
    schedule: str
    blocks: tuple[BlockParams, ...]
    delta: float | None = None

    @property
    def R_sequence(self) -> tuple[float, ...]:
        return tuple(b.R for b in self.blocks)

    @property
    def mass_partial_sums(self) -> list[float]:
        return mass_proxy_partial_sums(self.R_sequence)


@dataclass
class AssembledUnion:
    spec: UnionSpec
    points: list[DiscPoint]
    block_of: np.ndarray
    certificate: list[CertificateEntry] = field(default_factory=list)

    def block(self, n: int) -> list[DiscPoint]:
        """Points of block ``n`` (0-based)."""
        return [p for p, b in zip(self.points, self.block_of) if b == n]

    @property
    def certified(self) -> bool:
        return all(c.passed for c in self.certificate)


def _check_increasing(R_list: Sequence[float]) -> list[float]:
    R_list = [float(R) for R in R_list]
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValidationError("R values must be strictly increasing")
    return R_list


def assemble_example1(R_list: Sequence[float], max_retries: int = 3) -> AssembledUnion:
    """Union of schedule-1 blocks on golden-angle midpoints, certified pair by pair.

    Block ``n`` (1-based) must satisfy ``|g(z, w)|^2 < 1/(2^n N_n sum_{i<n} N_i)``
    against every earlier point; on failure its ``R`` is doubled and the block
    rebuilt, up to ``max_retries`` times.
    """
    R_list = _check_increasing(R_list)
    blocks: list[BlockParams] = []
    points: list[DiscPoint] = []
    owner: list[int] = []
    cert: list[CertificateEntry] = []
    prev_R = 0.0
    for n, R in enumerate(R_list, start=1):
        R = max(R, prev_R * (1.0 + 1e-12))
        theta = ((n - 1) * GOLDEN_ANGLE) % TWO_PI
        for attempt in range(max_retries + 1):
            p = example1_params(R, theta)
            pts = block_points(p)
            if not points:
                entry = CertificateEntry(n, R, 0.0, math.inf)
                break
            g2 = np.abs(normalized_kernel_block(pts, points)) ** 2
            threshold = 1.0 / (2.0 ** n * p.N * sum(b.N for b in blocks))
            entry = CertificateEntry(n, R, float(g2.max()), threshold)
            if entry.passed:
                break
            if attempt == max_retries:
                i, j = np.unravel_index(int(np.argmax(g2)), g2.shape)
                raise InfeasibleConstructionError(
                    f"block {n}: cross-block |g|^2 = {entry.value:.3e} >= {threshold:.3e} "
                    f"(new point {int(i)} vs earlier point {int(j)}) after {max_retries} retries"
                )
            R *= 2.0
        blocks.append(p)
        points.extend(pts)
        owner.extend([n - 1] * len(pts))
        cert.append(entry)
        prev_R = R
    return AssembledUnion(UnionSpec("example1", tuple(blocks)), points, np.array(owner, dtype=int), cert)


def claimed_length(p: BlockParams, delta: float, margin: float) -> float:
    """Normalized arc reserved for a block so that its dilated boxes stay inside."""
    return max(p.ell ** delta, p.ell + p.depth ** delta) * (1.0 + margin)


def dilated_boxes_disjoint(points_a: Sequence[DiscPoint], points_b: Sequence[DiscPoint], delta: float) -> tuple[bool, float]:
    """Whether every ``S^delta(z)``, ``z`` in a, misses every ``S^delta(w)``, ``w`` in b.

    Returns the verdict and the smallest normalized gap between dilated arcs
    (negative when some pair overlaps).
    """
    ta, ha, la = sequence_arrays(points_a)
    tb, hb, lb = sequence_arrays(points_b)
    gap = np.abs(angle_diff_arrays(ha[:, None], la[:, None], hb[None, :], lb[None, :])) / TWO_PI
    need = 0.5 * (ta[:, None] ** delta + tb[None, :] ** delta)
    slack = gap - need
    worst = float(slack.min()) if slack.size else math.inf
    return worst > 0.0, worst


def intra_block_disjoint_delta(points: Sequence[DiscPoint], grid: Sequence[float]) -> float | None:
    """Smallest grid ``delta`` for which the dilated boxes of distinct block points are disjoint."""
    t, hi, lo = sequence_arrays(points)
    if len(points) < 2:
        return min(grid) if grid else None
    gap = np.abs(angle_diff_arrays(hi[:, None], lo[:, None], hi[None, :], lo[None, :])) / TWO_PI
    np.fill_diagonal(gap, np.inf)
    for d in sorted(grid):
        need = 0.5 * (t[:, None] ** d + t[None, :] ** d)
        if np.all(gap > need):
            return float(d)
    return None


def assemble_example2(R_list: Sequence[float], delta: float = 0.5, margin: float = 0.1) -> AssembledUnion:
    """Schedule-2 blocks packed around the circle with pairwise disjoint dilated boxes."""
    if not (0.0 < delta < 1.0):
        raise ValidationError(f"delta must lie in (0, 1), got {delta!r}")
    R_list = _check_increasing(R_list)
    blocks: list[BlockParams] = []
    points: list[DiscPoint] = []
    owner: list[int] = []
    cursor = 0.0
    for n, R in enumerate(R_list):
        p = example2_params(R)
        claim = claimed_length(p, delta, margin)
        if cursor + claim > 1.0:
            raise InfeasibleConstructionError(
                f"block {n + 1}: circle capacity exceeded (needs {claim:.3e}, {1.0 - cursor:.3e} left)"
            )
        p = replace(p, theta_mid=(cursor + 0.5 * claim) * TWO_PI)
        cursor += claim
        pts = block_points(p)
        if points:
            ok, worst = dilated_boxes_disjoint(pts, points, delta)
            if not ok:
                raise InfeasibleConstructionError(
                    f"block {n + 1}: dilated boxes meet an earlier block (gap {worst:.3e})"
                )
        blocks.append(p)
        points.extend(pts)
        owner.extend([n] * len(pts))
    return AssembledUnion(UnionSpec("example2", tuple(blocks), delta), points, np.array(owner, dtype=int))
