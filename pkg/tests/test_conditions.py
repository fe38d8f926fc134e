import math

import numpy as np
import pytest

from conftest import ob_grid_oracle, random_points
from dirichlet_interp.conditions import (
    SequenceMeasure,
    ball_count_profile,
    lemma2_diameter,
    lemma2_ratio,
    mu_box,
    ob_constant_dyadic,
    ob_constant_exact,
    rob_best,
    rob_constant,
    rob_profile,
    stolz_tangential_distance,
)
from dirichlet_interp.errors import ValidationError
from dirichlet_interp.geometry import Arc, arc_of_point, point_from_polar_depth
from dirichlet_interp.kernel import kernel_diag


def measure(points):
    return SequenceMeasure.from_points(points)


class TestMeasure:
    def test_weights(self):
        z = point_from_polar_depth(0.1, 1.0)
        mu = measure([z])
        assert mu.total_mass == pytest.approx(1.0 / kernel_diag(z), rel=1e-15)

    def test_full_circle_box_holds_everything(self, rng):
        mu = measure(random_points(rng, 50))
        assert mu_box(mu, Arc(0.0, 1.0)) == pytest.approx(mu.total_mass, rel=1e-14)

    def test_single_point_box(self):
        z = point_from_polar_depth(0.1, 1.0)
        mu = measure([z])
        assert mu_box(mu, arc_of_point(z)) == pytest.approx(1.0 / kernel_diag(z))
        assert mu_box(mu, Arc(1.0, 0.05)) == 0.0

    def test_empty(self):
        mu = measure([])
        assert mu.total_mass == 0.0
        assert ob_constant_exact(mu) == (0.0, None)
        assert ob_constant_dyadic(mu) == 0.0
        assert rob_constant(mu, 0.5) == (0.0, None)


class TestOneBox:
    def test_single_point_closed_form(self):
        t = math.exp(-10.0)
        z = point_from_polar_depth(t, 2.0)
        value, witness = ob_constant_exact(measure([z]))
        assert value == pytest.approx(math.log(1.0 / t) / kernel_diag(z), rel=1e-14)
        assert witness.length == pytest.approx(t)
        assert box_value(witness, [z]) == pytest.approx(value, rel=1e-14)

    def test_single_point_matches_grid(self):
        z = point_from_polar_depth(math.exp(-5.0), 0.3)
        exact, _ = ob_constant_exact(measure([z]))
        grid, _ = ob_grid_oracle([z], n_arcs=10**5)
        assert exact * (1 - 1e-6) <= grid <= exact * (1 + 1e-12)

    def test_two_opposite_points(self):
        pts = [point_from_polar_depth(0.01, 0.0), point_from_polar_depth(0.01, math.pi)]
        exact, _ = ob_constant_exact(measure(pts))
        # a box containing both needs a near-full arc, so the best box holds one point
        assert exact == pytest.approx(math.log(100.0) / kernel_diag(pts[0]), rel=1e-12)

    def test_witness_attains_value(self, rng):
        for _ in range(10):
            pts = random_points(rng, int(rng.integers(2, 60)))
            value, witness = ob_constant_exact(measure(pts))
            assert box_value(witness, pts) == pytest.approx(value, rel=1e-12)

    def test_dominates_point_boxes(self, rng):
        pts = random_points(rng, 60)
        mu = measure(pts)
        exact, _ = ob_constant_exact(mu)
        for z in pts:
            assert mu_box(mu, arc_of_point(z)) * math.log(1 / z.t) <= exact * (1 + 1e-12)

    def test_monotone_under_adding_points(self, rng):
        pts = random_points(rng, 40)
        vals = [ob_constant_exact(measure(pts[:k]))[0] for k in range(1, 41)]
        assert all(b >= a * (1 - 1e-14) for a, b in zip(vals, vals[1:]))

    def test_half_box_lower_bound(self, rng):
        pts = [point_from_polar_depth(t, a) for t, a in
               zip(rng.uniform(0.01, 0.5, 30), rng.uniform(0.0, math.pi, 30))]
        mu = measure(pts)
        # every point lies in the box over the upper half circle
        assert ob_constant_exact(mu)[0] >= mu.total_mass * math.log(2.0) * (1 - 1e-12)

    def test_matches_grid_oracle(self, rng):
        for n in (3, 25):
            pts = random_points(rng, n)
            exact, _ = ob_constant_exact(measure(pts))
            grid, count = ob_grid_oracle(pts, n_arcs=2 * 10**5)
            assert count >= 2 * 10**5
            assert exact * (1 - 1e-6) <= grid <= exact * (1 + 1e-12)


def box_value(arc, pts):
    return mu_box(measure(pts), arc) * arc.log_inv_length


class TestDyadic:
    def test_bad_level(self):
        with pytest.raises(ValidationError):
            ob_constant_dyadic(measure([point_from_polar_depth(0.1, 0.0)]), 0)

    def test_within_factor_four(self, rng):
        for _ in range(10):
            mu = measure(random_points(rng, int(rng.integers(1, 80))))
            exact, _ = ob_constant_exact(mu)
            dy = ob_constant_dyadic(mu, 60)
            assert exact / 4 <= dy <= exact * (1 + 1e-12)

    def test_monotone_in_level(self, rng):
        mu = measure(random_points(rng, 40))
        vals = [ob_constant_dyadic(mu, k) for k in (5, 10, 20, 40, 60)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_single_dyadic_point(self):
        # a point at depth 2^-10 on a dyadic cell boundary: best dyadic box is exactly its own
        z = point_from_polar_depth(2.0 ** -10, 0.0)
        dy = ob_constant_dyadic(measure([z]), 60)
        assert dy == pytest.approx(10 * math.log(2.0) / kernel_diag(z), rel=1e-14)


class TestRestricted:
    def test_single_point(self):
        z = point_from_polar_depth(math.exp(-8.0), 1.0)
        value, idx = rob_constant(measure([z]), 0.5)
        assert idx == 0
        assert value == pytest.approx(8.0 / kernel_diag(z), rel=1e-12)

    def test_monotone_in_delta(self, rng):
        mu = measure(random_points(rng, 60))
        prof = rob_profile(mu)
        vals = [prof[d] for d in sorted(prof)]
        # smaller delta => larger box
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_best_is_grid_minimum(self, rng):
        mu = measure(random_points(rng, 60))
        delta, value = rob_best(mu, (0.2, 0.5, 0.8))
        assert value == min(rob_profile(mu, (0.2, 0.5, 0.8)).values())
        assert delta in (0.2, 0.5, 0.8)

    def test_ties_pick_smallest_delta(self):
        z = point_from_polar_depth(math.exp(-8.0), 1.0)
        assert rob_best(measure([z]), (0.7, 0.3, 0.5))[0] == 0.3

    def test_origin_rejected(self):
        with pytest.raises(ValidationError):
            rob_constant(measure([point_from_polar_depth(1.0, 0.0)]), 0.5)

    @pytest.mark.parametrize("delta", [0.0, 1.0])
    def test_bad_delta(self, delta):
        with pytest.raises(ValidationError):
            rob_constant(measure([point_from_polar_depth(0.1, 0.0)]), delta)

    def test_empty_grid(self):
        with pytest.raises(ValidationError):
            rob_best(measure([point_from_polar_depth(0.1, 0.0)]), ())


class TestLemmaDiagnostics:
    def test_ball_count_trivial(self):
        assert ball_count_profile([], 1.0) == 0
        assert ball_count_profile([point_from_polar_depth(0.1, 0.0)], 1.0) == 1

    def test_ball_count_cluster(self):
        pts = [point_from_polar_depth(1e-6, 1.0 + 1e-9 * j) for j in range(5)]
        assert ball_count_profile(pts, 1.0) == 5

    def test_ball_count_bad_c(self):
        with pytest.raises(ValidationError):
            ball_count_profile([point_from_polar_depth(0.1, 0.0)], 0.0)

    def test_diameter_nonnegative_and_seeded(self):
        z = point_from_polar_depth(math.exp(-8.0), 0.0)
        a = lemma2_diameter(z, 0.5, 2, probes=1024, seed=3)
        assert a >= 0.0
        assert a == lemma2_diameter(z, 0.5, 2, probes=1024, seed=3)

    def test_dyadic_ladder(self):
        z = point_from_polar_depth(math.exp(-8.0), 0.0)
        assert lemma2_diameter(z, 0.3, 1, probes=512, ladder="dyadic") == \
            lemma2_diameter(z, 0.5, 1, probes=512, ladder="power")

    def test_ratio_bounded(self):
        for t in (math.exp(-8.0), math.exp(-16.0)):
            z = point_from_polar_depth(t, 0.0)
            assert 0.0 < lemma2_ratio(z, 0.5, 0, probes=1024) <= 1.0

    def test_bad_inputs(self):
        z = point_from_polar_depth(0.1, 0.0)
        with pytest.raises(ValidationError):
            lemma2_diameter(z, 1.0, 0)
        with pytest.raises(ValidationError):
            lemma2_diameter(z, 0.5, -1)
        with pytest.raises(ValidationError):
            lemma2_diameter(z, 0.5, 0, ladder="other")

    def test_tangential_bound(self):
        vals = [stolz_tangential_distance(s) for s in np.geomspace(1e-300, 0.9, 200)]
        assert max(vals) <= 2 * 2.0
