import math
import time
from contextlib import contextmanager

import mpmath
import numpy as np
import pytest

from dirichlet_interp.geometry import TWO_PI, angle_diff_arrays, box_mask, point_from_polar_depth, sequence_arrays
from dirichlet_interp.kernel import kernel_diag_arrays

T_MIN = math.exp(-40.0)

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(label, budget=None):
    """Record PASS/FAIL for ``label``; a runtime ``budget`` in seconds is part of the check.

    Yields a list; strings appended to it are shown after the verdict.
    """
    start = time.perf_counter()
    ok = False
    notes: list[str] = []
    try:
        yield notes
        elapsed = time.perf_counter() - start
        assert budget is None or elapsed < budget, f"{label}: {elapsed:.1f}s exceeds {budget}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        line = f"{'PASS' if ok else 'FAIL'}  {label}  [{elapsed:.1f}s]"
        if notes:
            line += "  " + "; ".join(notes)
        ACCEPTANCE_LINES.append(line)
        print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_points(rng, n, t_min=T_MIN, t_max=0.5):
    """``n`` distinct points, depth log-uniform in ``[t_min, t_max]``, angle uniform."""
    ts = np.exp(rng.uniform(math.log(t_min), math.log(t_max), n))
    th = rng.uniform(0.0, TWO_PI, n)
    return [point_from_polar_depth(t, a) for t, a in zip(ts, th)]


def mp_point(p):
    return (1 - mpmath.mpf(p.t)) * mpmath.expj(mpmath.mpf(p.theta) + mpmath.mpf(p.theta_lo))


def mp_kernel(z, w, dps=60):
    """Closed-form kernel at high precision (independent of the float code path)."""
    with mpmath.workdps(dps):
        x = mp_point(z) * mpmath.conj(mp_point(w))
        if x == 0:
            return mpmath.mpf(1)
        return mpmath.log(1 / (1 - x)) / x


def mp_hyp_dist(z, w, dps=60):
    with mpmath.workdps(dps):
        a, b = mp_point(z), mp_point(w)
        return mpmath.atanh(abs((a - b) / (1 - mpmath.conj(a) * b)))


def ob_grid_oracle(points, n_arcs=10**6, seed=0, chunk=40):
    """Brute-force ``max mu(S(I)) log(1/|I|)`` over a large explicit family of arcs.

    Arcs are anchored with their left or right edge on every boundary projection
    and take every length from the depths, the pairwise projection gaps and a
    log-spaced grid; random arcs fill the family up to ``n_arcs``.  Each arc's
    mass is summed from direct box membership, so this never reaches a value
    the true supremum does not.
    """
    if not points:
        return 0.0, 0
    t, hi, lo = sequence_arrays(points)
    w = 1.0 / kernel_diag_arrays(t)
    d = angle_diff_arrays(hi[None, :], lo[None, :], hi[:, None], lo[:, None])
    spans = np.where(d >= 0, d / TWO_PI, 1.0 + d / TWO_PI).ravel()
    grid = np.exp(np.linspace(math.log(T_MIN) - 5, 0.0, 400))
    lengths = np.unique(np.concatenate([t, spans, grid]))
    lengths = lengths[(lengths > 0) & (lengths < 1)]

    best, count = 0.0, 0
    for sign in (+1.0, -1.0):
        for start in range(0, lengths.size, chunk):
            L = lengths[start:start + chunk]
            mid_lo = lo[None, :] + sign * math.pi * L[:, None]
            mask = box_mask(hi[None, :, None], mid_lo[:, :, None], L[:, None, None],
                            t[None, None, :], hi[None, None, :], lo[None, None, :])
            mass = mask @ w
            best = max(best, float((mass * -np.log(L)[:, None]).max()))
            count += mass.size

    rng = np.random.default_rng(seed)
    remaining = max(n_arcs - count, 0)
    while remaining > 0:
        m = min(remaining, 20000)
        L = np.exp(rng.uniform(math.log(T_MIN) - 5, 0.0, m))
        mids = rng.uniform(0.0, TWO_PI, m)
        mask = box_mask(mids[:, None], 0.0, L[:, None], t[None, :], hi[None, :], lo[None, :])
        best = max(best, float(((mask @ w) * -np.log(L)).max()))
        count += m
        remaining -= m
    return best, count


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
