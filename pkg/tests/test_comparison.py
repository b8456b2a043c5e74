import math

import numpy as np
import pytest

from binotail.binomial import BinomialSpec
from binotail.comparison import (
    comparison_constants,
    dominance_all_x,
    h_function,
    j_double_star,
    lemma36_constants,
    ratio_r,
    u_double_star,
    u_star,
)
from binotail.majorant import build_knot_lattice

# Frozen from the bisection solves at xtol 1e-14 / 1e-12; these are the
# package's own converged values, pinned so refactors cannot drift.
U_STAR = 0.0050577863263872387863
U_DOUBLE_STAR = 0.0050834975708915166422
INV_U_DOUBLE_STAR = 196.71495580642627181
ALPHA_STAR = 0.31331769114916295788
R_ALPHA_STAR = 5.3566939800333213068
EXP_R_MINUS_ONE = 211.02283476628877933


def h_vec(u):
    # independent numpy transcription of the defining expression
    u = np.asarray(u, dtype=float)
    return np.log((1.0 - u) / (-np.log(u))) - 1.0 - 0.5 * (1.0 + u) * np.log(u) / (1.0 - u)


class TestHFunction:
    def test_frozen_values(self):
        assert h_function(1e-12) == pytest.approx(9.496571463, abs=1e-6)
        assert h_function(1e-14) > 10.0
        assert h_function(1.0 - 1e-6) == pytest.approx(-5.00000125e-7, rel=1e-6)

    def test_root_residual(self):
        assert abs(h_function(u_star())) < 1e-12

    def test_domain(self):
        for u in (0.0, 1.0, -0.5, 2.0, float("nan")):
            with pytest.raises(ValueError):
                h_function(u)

    def test_matches_vectorized_transcription(self):
        for u in (1e-8, 1e-3, 0.0050577, 0.05, 0.5, 0.99):
            assert h_function(u) == pytest.approx(float(h_vec(u)), rel=1e-12, abs=1e-12)

    def test_single_sign_change_on_fine_grid(self):
        u = np.arange(1e-6, 1.0, 1e-6)
        h = h_vec(u)
        pos = h > 0.0
        flips = np.nonzero(np.diff(pos.astype(np.int8)))[0]
        assert len(flips) == 1
        lo, hi = u[flips[0]], u[flips[0] + 1]
        assert lo < u_star() < hi
        assert hi - lo == pytest.approx(1e-6, rel=1e-6)

    def test_root_against_windowed_scan(self):
        u0 = u_star()
        u = np.arange(u0 - 5e-7, u0 + 5e-7, 1e-9)
        h = h_vec(u)
        pos = h > 0.0
        flips = np.nonzero(np.diff(pos.astype(np.int8)))[0]
        assert len(flips) == 1
        assert abs(u[flips[0]] - u0) <= 2e-9


class TestConstants:
    def test_frozen(self):
        c = comparison_constants()
        assert c.u_star == pytest.approx(U_STAR, abs=1e-13)
        assert c.u_double_star == pytest.approx(U_DOUBLE_STAR, abs=1e-13)
        assert 1.0 / c.u_double_star == pytest.approx(INV_U_DOUBLE_STAR, rel=1e-12)
        assert c.alpha_star == pytest.approx(ALPHA_STAR, abs=1e-11)
        assert c.r_alpha_star == pytest.approx(R_ALPHA_STAR, rel=1e-11)
        assert c.exp_r_minus_one == pytest.approx(EXP_R_MINUS_ONE, rel=1e-11)

    def test_accessors_agree(self):
        c = comparison_constants()
        assert u_star() == c.u_star
        assert u_double_star() == c.u_double_star
        assert lemma36_constants() == (c.alpha_star, c.r_alpha_star, c.exp_r_minus_one)

    def test_u_relation(self):
        c = comparison_constants()
        assert c.u_double_star == pytest.approx(c.u_star / (1.0 - c.u_star), rel=1e-14)

    def test_inverse_bracket(self):
        assert 196.71 < INV_U_DOUBLE_STAR < 196.72

    def test_cached(self):
        assert comparison_constants() is comparison_constants()

    def test_alpha_star_defining_equation(self):
        # alpha/(1/2 - alpha) + ln(1/2 - alpha) = 0 at the solution
        a = comparison_constants().alpha_star
        assert abs(a / (0.5 - a) + math.log(0.5 - a)) < 1e-10

    def test_r_alpha_consistency(self):
        c = comparison_constants()
        r = math.log(0.5 - c.alpha_star) / (-c.alpha_star)
        assert c.r_alpha_star == pytest.approx(r, rel=1e-12)
        assert c.exp_r_minus_one == pytest.approx(math.expm1(c.r_alpha_star), rel=1e-12)


class TestJDoubleStar:
    def test_examples(self):
        assert j_double_star(30, 0.03) == 25
        assert j_double_star(196, 0.5) == 195
        assert j_double_star(197, 0.5) == 195
        assert j_double_star(10, 1.0 - 1e-12) == 9

    def test_near_integer_guard(self):
        # p chosen so the defining threshold lands exactly on an
        # integer; nudging the odds ratio by 5e-10 either way must move
        # the answer by one
        r0 = 1.0 / (11.0 * u_double_star())
        for scale, want in ((1.0, 10), (1.0 - 5e-10, 10), (1.0 + 5e-10, 9)):
            p = 1.0 / (1.0 + r0 * scale)
            assert j_double_star(11, p) == want, scale

    def test_monotone_in_n(self):
        vals = [j_double_star(n, 0.3) for n in range(5, 60)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


class TestDominance:
    def test_all_x_threshold(self):
        assert dominance_all_x(196, 0.5)
        assert not dominance_all_x(197, 0.5)
        assert dominance_all_x(1, 0.5)

    def test_small_n_dominates_everywhere(self):
        # when the dominance test passes, r <= 1 must hold right up to n
        from binotail.binomial import build_tail_table

        s = BinomialSpec(5, 0.5)
        assert dominance_all_x(s.n, s.p)
        t = build_tail_table(s)
        lat = build_knot_lattice(t)
        for x in np.linspace(-0.4, 5.0, 101):
            assert ratio_r(t, lat, float(x)) <= 1.0 + 1e-12


class TestRatioR:
    def test_frozen_value(self):
        from binotail.binomial import build_tail_table

        t = build_tail_table(BinomialSpec(30, 0.03))
        lat = build_knot_lattice(t)
        assert ratio_r(t, lat, 4.0) == pytest.approx(0.58316597987425219, rel=1e-12)

    def test_left_region_is_one(self):
        from binotail.binomial import build_tail_table

        t = build_tail_table(BinomialSpec(30, 0.03))
        lat = build_knot_lattice(t)
        assert ratio_r(t, lat, -1.0) == 1.0
        assert ratio_r(t, lat, -0.5) == 1.0

    def test_beyond_n_rejected(self):
        from binotail.binomial import build_tail_table

        t = build_tail_table(BinomialSpec(30, 0.03))
        lat = build_knot_lattice(t)
        with pytest.raises(ValueError):
            ratio_r(t, lat, 30.0001)

    def test_dominance_up_to_j_double_star(self):
        from binotail.binomial import build_tail_table

        s = BinomialSpec(30, 0.03)
        t = build_tail_table(s)
        lat = build_knot_lattice(t)
        jds = j_double_star(s.n, s.p)
        for x in np.linspace(-0.4, float(jds), 211):
            assert ratio_r(t, lat, float(x)) <= 1.0 + 1e-12
        # and it genuinely exceeds 1 somewhere past j**
        xs = np.linspace(jds + 0.5, 30.0, 41)
        assert max(ratio_r(t, lat, float(x)) for x in xs) > 1.0
