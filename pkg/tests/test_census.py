import math
from fractions import Fraction

import numpy as np
import pytest

from weylsums import (
    BoxGrid,
    BudgetError,
    InvariantViolation,
    ProjectionSpec,
    WeightSeq,
    census,
    classical_family,
    counting_bound,
    grid_sides,
    markov_check,
    per_box_projection_bound,
    project_union,
)

UNIT = WeightSeq.unit()


def small_grid():
    return grid_sides(classical_family(2), 8, Fraction(3, 4), Fraction(1, 4))


class TestGridSides:
    def test_reference_grid(self):
        g = grid_sides(classical_family(2), 16, Fraction(3, 4), Fraction(1, 4))
        assert g.sides == (Fraction(1, 64), Fraction(1, 1024))
        assert g.U == 65536

    def test_one_dimensional(self):
        g = grid_sides(classical_family(1), 4, Fraction(1, 2), Fraction(1, 2))
        assert g.sides == (Fraction(1, 16),)

    def test_alpha_one_eps_zero_limit(self):
        # as alpha -> 1 and eps -> 0 the exponent tends to e_j
        g = grid_sides(classical_family(2), 16, Fraction(999, 1000), Fraction(1, 1000))
        assert g.counts[0] == 17  # ceil(16^(1 + 2/1000)) barely above 16
        g2 = grid_sides(classical_family(2), 16, Fraction(1, 2), Fraction(1, 2))
        assert g2.counts == (256, 4096)

    def test_exact_integer_powers(self):
        # 16^(3/2) = 64 exactly: the ceiling must not round up through floats
        g = grid_sides(classical_family(2), 16, Fraction(3, 4), Fraction(1, 4))
        assert g.counts[0] == 64

    def test_parameter_validation(self):
        fam = classical_family(2)
        with pytest.raises(ValueError):
            grid_sides(fam, 16, Fraction(0), Fraction(1, 4))
        with pytest.raises(ValueError):
            grid_sides(fam, 16, Fraction(3, 4), Fraction(0))

    def test_budget(self):
        with pytest.raises(BudgetError):
            grid_sides(classical_family(3), 64, Fraction(3, 5), Fraction(3, 10))


class TestCensus:
    def test_box_at_origin_marked(self):
        g = small_grid()
        res = census(classical_family(2), UNIT, g, samples_per_box=1, seed=0)
        assert (0, 0) in res.marked_boxes  # W near 0 is about N + 2N/(N+1) > N^alpha
        assert 0 <= res.marked <= res.U
        assert res.threshold == pytest.approx(8 ** 0.75)

    def test_threshold_above_all_samples_marks_nothing(self):
        # tiny weights push every |W| far below the threshold N^alpha
        g = small_grid()
        tiny = WeightSeq.explicit([0.001] * 8, C=0.001, c=0.0)
        res = census(classical_family(2), tiny, g, samples_per_box=2, seed=1)
        assert res.box_peaks.max() < g.threshold
        assert res.marked == 0
        assert res.marked_boxes == ()

    def test_marked_monotone_in_alpha(self):
        g = small_grid()
        res = census(classical_family(2), UNIT, g, samples_per_box=2, seed=3,
                     alphas=["0.6", "0.7", "0.8", "0.9", "0.99"])
        counts = list(res.marked_by_alpha.values())
        assert counts == sorted(counts, reverse=True)

    def test_determinism(self):
        g = small_grid()
        r1 = census(classical_family(2), UNIT, g, samples_per_box=3, seed=9)
        r2 = census(classical_family(2), UNIT, g, samples_per_box=3, seed=9)
        assert np.array_equal(r1.box_peaks, r2.box_peaks)
        assert r1.marked_boxes == r2.marked_boxes

    def test_moment_accumulates(self):
        g = small_grid()
        res = census(classical_family(2), UNIT, g, samples_per_box=2, seed=5)
        assert res.empirical_moment == pytest.approx(res.moment_sum / res.n_samples)
        assert res.two_s == 6


class TestMarkov:
    def test_always_passes_on_random_data(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            vals = rng.random(200) * 50
            assert markov_check(vals, threshold=10.0, two_s=6)

    def test_equality_case(self):
        assert markov_check([7.0], threshold=7.0, two_s=4)

    def test_empty_vacuous(self):
        assert markov_check([], threshold=3.0, two_s=2)

    def test_violation_raises(self):
        # an impossible aggregate triggers the guard
        from weylsums.census import _markov_holds

        with pytest.raises(InvariantViolation):
            _markov_holds(count=10, moment_sum=1.0, threshold=2.0, two_s=2)


class TestCountingBound:
    def test_alpha_half_returns_U(self):
        g = small_grid()
        assert counting_bound(g, 0.5) == pytest.approx(g.U)

    def test_reference_value(self):
        g = grid_sides(classical_family(2), 16, Fraction(3, 4), Fraction(1, 4))
        assert counting_bound(g, 0.75) == pytest.approx(g.U / 64)

    def test_projection_reference_scale(self):
        from weylsums import projection_reference

        g = grid_sides(classical_family(2), 16, Fraction(3, 4), Fraction(1, 4))
        # d=2, k=1: s(2)(1-2a) + sigma~_1 + (d-k)(1-a) = -1.5 + 2 + 0.25
        assert projection_reference(g, 2, 1, 0.75) == pytest.approx(16.0**0.75)


def unit_box_grid(sides):
    counts = tuple(int(1 / s) for s in sides)
    return BoxGrid(
        d=len(sides), N=16, alpha=Fraction(3, 4), eps=Fraction(1, 4),
        sides=tuple(Fraction(s).limit_denominator() for s in sides),
        counts=counts, U=math.prod(counts), degrees=tuple(range(1, len(sides) + 1)),
    )


class TestProjections:
    def test_axis_projection_single_box(self):
        g = unit_box_grid([Fraction(1, 10), Fraction(1, 5)])
        res = project_union(g, [(0, 0)], ProjectionSpec([[1.0, 0.0]]))
        assert res.measure == pytest.approx(0.1)
        assert res.method == "exact_1d"

    def test_diagonal_projection_single_box(self):
        g = unit_box_grid([Fraction(1, 10), Fraction(1, 5)])
        spec = ProjectionSpec(np.array([[1.0, 1.0]]) / math.sqrt(2))
        res = project_union(g, [(0, 0)], spec)
        assert res.measure == pytest.approx((0.1 + 0.2) / math.sqrt(2))

    def test_overlapping_projections_merge(self):
        g = unit_box_grid([Fraction(1, 10), Fraction(1, 5)])
        spec = ProjectionSpec([[1.0, 0.0]])
        # same column: the two boxes project onto the same interval
        res = project_union(g, [(0, 0), (0, 1)], spec)
        assert res.measure == pytest.approx(0.1)
        res2 = project_union(g, [(0, 0), (2, 0)], spec)
        assert res2.measure == pytest.approx(0.2)

    def test_coordinate_prefix_crosscheck(self):
        # interval merge must reproduce the distinct-prefix count exactly
        g = small_grid()
        res = census(classical_family(2), UNIT, g, samples_per_box=2, seed=7)
        spec = ProjectionSpec.coordinate(2, 1)
        merged = project_union(g, res.marked_boxes, spec)
        prefixes = {b[0] for b in res.marked_boxes}
        assert merged.measure == pytest.approx(len(prefixes) * float(g.sides[0]), rel=1e-12)

    def test_per_box_bound_dominates_support(self):
        g = small_grid()
        rng = np.random.default_rng(10)
        zeta = np.array([float(z) for z in g.sides])
        for _ in range(1000):
            e = rng.normal(size=2)
            e /= np.linalg.norm(e)
            support = float(np.abs(e) @ zeta)
            assert support <= per_box_projection_bound(g, ProjectionSpec(e)) + 1e-15

    def test_union_bounded_by_marked_times_per_box(self):
        g = small_grid()
        res = census(classical_family(2), UNIT, g, samples_per_box=2, seed=2)
        rng = np.random.default_rng(0)
        for _ in range(50):
            e = rng.normal(size=2)
            e /= np.linalg.norm(e)
            spec = ProjectionSpec(e)
            measure = project_union(g, res.marked_boxes, spec).measure
            assert measure <= res.marked * per_box_projection_bound(g, spec) + 1e-9

    def test_full_rank_projection_is_volume(self):
        g = unit_box_grid([Fraction(1, 10), Fraction(1, 5)])
        spec = ProjectionSpec(np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2))
        res = project_union(g, [(0, 0), (3, 2)], spec)
        assert res.measure == pytest.approx(2 * 0.1 * 0.2)
        assert res.method == "exact_full"

    def test_monte_carlo_matches_axis_exact(self):
        # span the first two axes with a rotated basis: same subspace, so the
        # Monte Carlo estimate must agree with the exact prefix count
        g = grid_sides(classical_family(3), 4, Fraction(3, 4), Fraction(1, 4))
        res = census(classical_family(3), UNIT, g, samples_per_box=1, seed=1)
        axis = project_union(g, res.marked_boxes, ProjectionSpec.coordinate(3, 2))
        assert axis.method == "exact_axis"
        rot = ProjectionSpec(np.array([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]]) / math.sqrt(2))
        mc = project_union(g, res.marked_boxes, rot, samples=20000, seed=3)
        assert mc.method == "monte_carlo"
        assert mc.std_error is not None
        assert abs(mc.measure - axis.measure) <= max(5 * mc.std_error, 0.02)

    def test_orthonormality_enforced(self):
        with pytest.raises(ValueError):
            ProjectionSpec([[1.0, 1.0]])

    def test_per_box_bound_needs_line(self):
        g = small_grid()
        with pytest.raises(ValueError):
            per_box_projection_bound(g, ProjectionSpec.coordinate(2, 2))

    def test_empty_marked_set(self):
        g = small_grid()
        res = project_union(g, [], ProjectionSpec.coordinate(2, 1))
        assert res.measure == 0.0
