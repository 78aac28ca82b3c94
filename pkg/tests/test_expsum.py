import cmath
import math

import numpy as np
import pytest

from weylsums import (
    BudgetError,
    TorusPoint,
    WeightSeq,
    classical_family,
    completion_fft,
    completion_naive,
    exact_moment_grid,
    moment_integral,
    parse_family,
    phase_table,
    reconstruct_prefix,
    short_interval_sum,
    sup_linear_coeff,
    vinogradov_count,
    weyl_sum,
)
from weylsums.expsum import reconstruct_all_prefixes, _twisted_coeffs

UNIT = WeightSeq.unit()
MASK = (1 << 64) - 1

RNG = np.random.default_rng(20260810)


def random_point(d, rng=RNG):
    return TorusPoint.from_reals(rng.random(d))


class TestTorusPoint:
    def test_quantize_round_trip_dyadic(self):
        pt = TorusPoint.from_reals([0.5, 0.25, 0.0])
        assert pt.floats() == (0.5, 0.25, 0.0)

    def test_wraps_mod_one(self):
        pt = TorusPoint.from_reals([1.25, -0.25])
        assert pt.floats() == (0.25, 0.75)

    def test_scaled_exact(self):
        pt = TorusPoint.from_reals([1 / 3])
        tripled = pt.scaled(3)
        # 3 * round(2^64/3) mod 2^64 = 2^64 - ... tiny but nonzero residue
        assert tripled.raw[0] == (3 * pt.raw[0]) & MASK

    def test_rejects_bad_raw(self):
        with pytest.raises(ValueError):
            TorusPoint([1 << 64])


class TestWeights:
    def test_unit(self):
        assert np.all(UNIT.array(5) == 1)

    def test_envelope_enforced(self):
        WeightSeq.explicit([1, 2, 3], C=1.0, c=1.0)
        with pytest.raises(ValueError):
            WeightSeq.explicit([1, 5], C=1.0, c=1.0)
        with pytest.raises(ValueError):
            WeightSeq.explicit([np.inf], C=10.0, c=0.0)

    def test_short_list_rejected(self):
        w = WeightSeq.explicit([1, 1], C=1.0, c=0.0)
        with pytest.raises(ValueError):
            w.array(3)


class TestPhaseTable:
    def test_zero_point(self):
        table = phase_table(classical_family(2), TorusPoint.from_reals([0, 0]))
        assert all(r == 0 for r in table.registers)

    def test_half_registers(self):
        table = phase_table(classical_family(1), TorusPoint.from_reals([0.5]))
        assert table.registers == (0, 1 << 63)

    def test_quarter_quarter_values(self):
        fam = classical_family(2)
        table = phase_table(fam, TorusPoint.from_reals([0.25, 0.25]))
        phases = list(table.raw_phases(2))
        # (n + n^2)/4 mod 1 at n = 1, 2 is 1/2 both times
        assert phases == [1 << 63, 1 << 63]

    def test_recurrence_bit_identical_to_direct(self):
        # the difference table must not drift, even over 10^5 steps
        fam = parse_family([[0, 1], [0, 0, 3], [0, 5, 0, 0, 1]])
        u = random_point(3)
        table = phase_table(fam, u)
        N = 100_000
        raws = list(table.raw_phases(N))
        rng = np.random.default_rng(7)
        for n in np.sort(rng.integers(1, N + 1, size=100)):
            direct = table.raw_at(fam.polys, u.raw, int(n))
            assert raws[int(n) - 1] == direct

    def test_mismatched_point_rejected(self):
        with pytest.raises(ValueError):
            phase_table(classical_family(2), TorusPoint.from_reals([0.1]))


class TestWeylSum:
    def test_zero_point_gives_N(self):
        trace = weyl_sum(classical_family(2), TorusPoint.from_reals([0, 0]), UNIT, 17)
        assert trace.value == pytest.approx(17)
        assert trace.prefix_max == pytest.approx(17)

    def test_integer_phase(self):
        # n(n+1)/2 is an integer, so the phase (n + n^2)/2 vanishes mod 1
        trace = weyl_sum(classical_family(2), TorusPoint.from_reals([0.5, 0.5]), UNIT, 23)
        assert trace.value == pytest.approx(23)

    def test_full_geometric_sum(self):
        trace = weyl_sum(classical_family(1), TorusPoint.from_reals([1 / 3]), UNIT, 3)
        assert abs(trace.value) < 1e-12

    def test_prefix_max_dominates_value(self):
        for _ in range(10):
            trace = weyl_sum(classical_family(3), random_point(3), UNIT, 200)
            assert trace.prefix_max >= abs(trace.value) - 1e-12

    def test_dyadic_prefixes(self):
        u = random_point(2)
        fam = classical_family(2)
        trace = weyl_sum(fam, u, UNIT, 64)
        for i, mag in enumerate(trace.dyadic_prefixes):
            sub = weyl_sum(fam, u, UNIT, 1 << i)
            assert mag == pytest.approx(abs(sub.value), abs=1e-12)
        assert trace.dyadic_prefix_max[-1] == trace.prefix_max

    def test_perturbation_bound(self):
        # |T(v) - T(u)| <= 2 pi sum_n sum_j |v_j - u_j| |phi_j(n)|
        # (two-sided elementary form; the sharper one-sided refinement that
        # restricts the perturbation orthant is reported in docs, not tested)
        fam = classical_family(2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            base = rng.random(2)
            delta = rng.random(2) * 1e-6
            u = TorusPoint.from_reals(base)
            v = TorusPoint.from_reals(base + delta)
            N = 128
            tu = weyl_sum(fam, u, UNIT, N).value
            tv = weyl_sum(fam, v, UNIT, N).value
            df = np.array(v.floats()) - np.array(u.floats())
            budget = 2 * math.pi * sum(
                abs(df[j]) * sum(abs(p(n)) for n in range(1, N + 1))
                for j, p in enumerate(fam.polys)
            )
            assert abs(tv - tu) <= budget + 1e-9

    def test_json_fields(self):
        trace = weyl_sum(classical_family(1), TorusPoint.from_reals([0.1]), UNIT, 4)
        js = trace.to_json()
        assert set(js) == {"value_re", "value_im", "prefix_max", "N"}


class TestShortIntervalSum:
    def test_window_at_zero(self):
        u = [0.37, 0.21]
        direct = weyl_sum(classical_family(2), TorusPoint.from_reals(u), UNIT, 9).value
        assert short_interval_sum(u, 0, 9) == pytest.approx(direct, abs=1e-10)

    def test_zero_coefficients(self):
        assert short_interval_sum([0.0, 0.0], 11, 7) == pytest.approx(7)

    def test_against_direct_sum(self):
        u = [0.0, 0.25]
        direct = sum(cmath.exp(2j * cmath.pi * (n * n / 4)) for n in (2, 3))
        assert short_interval_sum(u, 1, 2) == pytest.approx(direct, abs=1e-12)

    def test_random_windows(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            d = int(rng.integers(1, 4))
            u = rng.random(d)
            M = int(rng.integers(-20, 50))
            N = int(rng.integers(1, 60))
            qu = TorusPoint.from_reals(u).floats()
            direct = sum(
                cmath.exp(2j * cmath.pi * sum(qu[j] * n ** (j + 1) for j in range(d)))
                for n in range(M + 1, M + N + 1)
            )
            assert short_interval_sum(u, M, N) == pytest.approx(direct, abs=1e-9 * N)


class TestCompletion:
    def test_closed_form_at_zero(self):
        fam = classical_family(2)
        for N in (1, 2, 8, 33):
            res = completion_naive(fam, TorusPoint.from_reals([0, 0]), UNIT, N)
            assert res.W == pytest.approx(N + 2 * N / (N + 1), rel=1e-12)

    def test_single_term(self):
        res = completion_naive(classical_family(1), random_point(1), UNIT, 1)
        assert res.W == pytest.approx(2.0, rel=1e-12)

    def test_majorizes_plain_sum(self):
        fam = classical_family(3)
        for _ in range(10):
            u = random_point(3)
            trace = weyl_sum(fam, u, UNIT, 50)
            res = completion_fft(fam, u, UNIT, 50)
            assert res.W >= abs(trace.value) - 1e-9

    def test_fft_matches_naive(self):
        rng = np.random.default_rng(5)
        for _ in range(12):
            d = int(rng.integers(1, 4))
            N = int(rng.integers(1, 130))
            u = TorusPoint.from_reals(rng.random(d))
            fam = classical_family(d)
            a = UNIT
            naive = completion_naive(fam, u, a, N).W
            fast = completion_fft(fam, u, a, N).W
            assert fast == pytest.approx(naive, rel=1e-9)

    def test_weighted(self):
        vals = np.exp(1j * np.arange(1, 9))
        a = WeightSeq.explicit(vals, C=1.0, c=0.0)
        fam = classical_family(2)
        u = random_point(2)
        assert completion_fft(fam, u, a, 8).W == pytest.approx(
            completion_naive(fam, u, a, 8).W, rel=1e-9
        )


class TestReconstruction:
    def test_full_prefix_at_zero(self):
        fam = classical_family(1)
        val = reconstruct_prefix(fam, TorusPoint.from_reals([0]), UNIT, 16, 16)
        assert val == pytest.approx(16, abs=1e-9)

    def test_first_term(self):
        fam = classical_family(2)
        u = random_point(2)
        val = reconstruct_prefix(fam, u, UNIT, 32, 1)
        direct = _twisted_coeffs(fam, u, UNIT, 32)[0]
        assert val == pytest.approx(direct, abs=1e-9)

    def test_every_prefix(self):
        fam = classical_family(2)
        u = random_point(2)
        N = 64
        rec = reconstruct_all_prefixes(fam, u, UNIT, N)
        direct = np.cumsum(_twisted_coeffs(fam, u, UNIT, N))
        assert np.abs(rec - direct).max() < 1e-8

    def test_range_checked(self):
        fam = classical_family(1)
        with pytest.raises(ValueError):
            reconstruct_prefix(fam, TorusPoint.from_reals([0]), UNIT, 8, 9)


class TestSupLinear:
    def test_constant_coefficients(self):
        res = sup_linear_coeff(np.ones(32), oversample=4)
        assert res.grid_max == pytest.approx(32, rel=1e-12)
        assert res.argmax_y == 0.0
        assert res.certified_upper >= 32

    def test_on_grid_modulation(self):
        N, L = 16, 64
        y0 = 5 / L
        c = np.exp(-2j * np.pi * y0 * np.arange(1, N + 1))
        res = sup_linear_coeff(c, oversample=4)
        assert res.grid_max == pytest.approx(N, rel=1e-12)
        assert res.argmax_y == pytest.approx(y0)

    def test_certified_dominates_fine_grid(self):
        rng = np.random.default_rng(2)
        c = rng.normal(size=128) + 1j * rng.normal(size=128)
        res = sup_linear_coeff(c, oversample=4)
        ys = np.arange(0, 1, 1 / (100 * 128))
        fine = np.abs(np.exp(2j * np.pi * np.outer(ys, np.arange(1, 129))) @ c)
        assert res.certified_upper >= fine.max()
        assert res.grid_max <= fine.max() + 1e-9

    def test_oversample_validated(self):
        with pytest.raises(ValueError):
            sup_linear_coeff(np.ones(4), oversample=1)


class TestVinogradov:
    def test_diagonal_case(self):
        for N in (1, 2, 7):
            assert vinogradov_count(3, 1, N) == N

    def test_hand_count(self):
        assert vinogradov_count(1, 2, 2) == 6

    def test_frozen_regressions(self):
        # enumerated independently and cross-checked by quadrature
        assert vinogradov_count(2, 3, 4) == 256
        assert vinogradov_count(2, 3, 8) == 2744
        assert vinogradov_count(2, 3, 16) == 27304
        assert vinogradov_count(3, 2, 6) == 66

    def test_chunked_route_matches_convolution(self):
        # N^s > 2^22 takes the memory-bounded path; for d = 1 the count is
        # the sum of squared coefficients of (x + ... + x^N)^s
        ones = np.ones(200)
        r = np.convolve(np.convolve(ones, ones), ones).astype(np.int64)
        assert vinogradov_count(1, 3, 200) == int(np.sum(r**2))

    def test_budget(self):
        with pytest.raises(BudgetError):
            vinogradov_count(2, 5, 10_000)


class TestMoments:
    def test_parseval_unit(self):
        fam = classical_family(2)
        grid = exact_moment_grid(fam, 8, 2)
        assert moment_integral(fam, UNIT, 8, 2, grid) == pytest.approx(8, rel=1e-9)

    def test_parseval_weighted(self):
        fam = classical_family(2)
        vals = np.array([1.0, 0.5j, -2.0, 1 + 1j])
        a = WeightSeq.explicit(vals, C=4.0, c=0.0)
        grid = exact_moment_grid(fam, 4, 2)
        expect = float(np.sum(np.abs(vals) ** 2))
        assert moment_integral(fam, a, 4, 2, grid) == pytest.approx(expect, rel=1e-9)

    def test_single_term(self):
        fam = classical_family(1)
        assert moment_integral(fam, UNIT, 1, 4, [5]) == pytest.approx(1.0)

    def test_matches_enumeration(self):
        fam = classical_family(2)
        grid = exact_moment_grid(fam, 8, 6)
        assert moment_integral(fam, UNIT, 8, 6, grid) == pytest.approx(2744, rel=1e-9)

    def test_coarse_grid_flagged(self):
        fam = classical_family(2)
        grid = exact_moment_grid(fam, 8, 6)
        with pytest.raises(ValueError):
            moment_integral(fam, UNIT, 8, 6, [grid[0] - 1, grid[1]])

    def test_nonclassical_family(self):
        fam = parse_family([[0, 2], [0, 0, 1]])
        grid = exact_moment_grid(fam, 6, 2)
        assert moment_integral(fam, UNIT, 6, 2, grid) == pytest.approx(6, rel=1e-9)
