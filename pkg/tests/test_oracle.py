import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binotail.binomial import LOG_ZERO, BinomialSpec, build_tail_table
from binotail.majorant import build_knot_lattice, grid_log_majorant, q_lc
from binotail.oracle import (
    DiscreteDistribution,
    concave_hull_majorant,
    convolve,
    exact_log_tail,
    exact_tail,
    extremal_two_point,
    lc_majorant_on_integers,
    lemma32_check,
    majorant_samples,
)

NEG_INF = float("-inf")


class TestExactTails:
    def test_examples(self):
        s = BinomialSpec.from_ratio(5, 3, 10)
        assert exact_tail(s, 0) == 1.0
        assert exact_tail(s, 3) == 0.16308
        assert exact_tail(s, 6) == 0.0
        assert exact_log_tail(s, 6) == LOG_ZERO
        assert exact_log_tail(s, 0) == 0.0

    def test_float_p_uses_high_precision(self):
        s = BinomialSpec(30, 0.03)
        # complement identity holds to quadrature accuracy
        lhs = exact_tail(s, 1)
        rhs = 1.0 - 0.97**30
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_matches_log_domain_tables(self):
        for n, p in ((1, 0.5), (12, 0.37), (60, 0.03), (60, 0.97)):
            s = BinomialSpec(n, p)
            t = build_tail_table(s)
            for j in range(n + 2):
                want = exact_log_tail(s, j)
                got = float(t.log_tail[j])
                if want == LOG_ZERO:
                    assert got == LOG_ZERO
                else:
                    assert got == pytest.approx(want, abs=1e-12, rel=1e-12)

    def test_large_n_refused(self):
        with pytest.raises(ValueError):
            exact_tail(BinomialSpec(1001, 0.5), 0)

    def test_domain(self):
        s = BinomialSpec(5, 0.5)
        with pytest.raises(ValueError):
            exact_tail(s, -1)
        with pytest.raises(ValueError):
            exact_tail(s, 7)


class TestConcaveHull:
    def test_two_points(self):
        h = concave_hull_majorant([0.0, 1.0], [0.0, -2.0])
        assert h(0.5) == -1.0
        assert h.vertices == [(0.0, 0.0), (1.0, -2.0)]

    def test_concave_input_is_identity(self):
        xs = np.array([0.0, 1.0, 2.0, 3.0])
        ys = np.array([0.0, -1.0, -3.0, -6.0])
        h = concave_hull_majorant(xs, ys)
        assert h.vertices == list(zip(xs.tolist(), ys.tolist()))

    def test_interior_dip_removed(self):
        h = concave_hull_majorant([0.0, 1.0, 2.0], [0.0, -5.0, -2.0])
        assert h.vertices == [(0.0, 0.0), (2.0, -2.0)]
        assert h(1.0) == -1.0

    def test_collinear_points_dropped(self):
        h = concave_hull_majorant([0.0, 1.0, 2.0], [0.0, -1.0, -2.0])
        assert h.vertices == [(0.0, 0.0), (2.0, -2.0)]

    def test_vertex_slopes_strictly_decrease(self):
        rng = np.random.default_rng(7)
        xs = np.sort(rng.uniform(0.0, 10.0, size=200))
        xs = np.unique(xs)
        ys = -np.abs(rng.normal(size=xs.size)) - 0.05 * xs**2
        h = concave_hull_majorant(xs, ys)
        v = h.vertices
        slopes = [
            (y2 - y1) / (x2 - x1) for (x1, y1), (x2, y2) in zip(v, v[1:])
        ]
        assert all(s2 < s1 for s1, s2 in zip(slopes, slopes[1:]))
        # hull dominates every sample
        assert np.all(h(xs) >= ys - 1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(11)
        xs = np.unique(np.sort(rng.uniform(0.0, 5.0, size=50)))
        ys = rng.normal(size=xs.size)
        h = concave_hull_majorant(xs, ys)
        h2 = concave_hull_majorant(h.xs, h.ys)
        assert h2.vertices == [(x, y) for x, y in zip(h.xs, h.ys)]

    def test_trailing_neg_inf_becomes_terminal(self):
        h = concave_hull_majorant(
            [0.0, 1.0, 2.0, 3.0], [0.0, -0.5, NEG_INF, NEG_INF]
        )
        assert h.terminal == (2.0, NEG_INF)
        assert h(1.0) == -0.5
        assert h(2.0) == NEG_INF
        assert h(2.5) == NEG_INF

    def test_validation(self):
        with pytest.raises(ValueError):
            concave_hull_majorant([0.0], [1.0])
        with pytest.raises(ValueError):
            concave_hull_majorant([0.0, 0.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            concave_hull_majorant([1.0, 0.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            concave_hull_majorant([0.0, 1.0], [float("nan"), 0.0])
        with pytest.raises(ValueError):
            concave_hull_majorant([0.0, 1.0], [float("inf"), 0.0])
        with pytest.raises(ValueError):
            # -inf only allowed as a trailing run
            concave_hull_majorant([0.0, 1.0, 2.0], [0.0, NEG_INF, -1.0])


class TestIntegerHull:
    def test_n4_half(self):
        t = build_tail_table(BinomialSpec(4, 0.5))
        h = lc_majorant_on_integers(t)
        # tail logs are already concave on the lattice: every point is a
        # vertex, plus the terminal zero
        assert len(h.vertices) == 6
        for j in range(5):
            assert h(float(j)) == pytest.approx(float(t.log_tail[j]), abs=1e-13)
        assert h(5.0) == LOG_ZERO

    def test_matches_q_lc_everywhere(self):
        t = build_tail_table(BinomialSpec(17, 0.42))
        h = lc_majorant_on_integers(t)
        rng = np.random.default_rng(3)
        for x in rng.uniform(0.0, 17.0, size=1000):
            assert h(float(x)) == pytest.approx(q_lc(t, float(x)), abs=1e-12)


class TestMajorantAgainstHull:
    def test_30_003_dense_grid(self):
        # hull of dense shifted-interpolant samples reproduces the
        # closed-form majorant
        s = BinomialSpec(30, 0.03)
        t = build_tail_table(s)
        lat = build_knot_lattice(t)
        xs, lin = majorant_samples(t, lat)
        h = concave_hull_majorant(xs, lin)
        maj = grid_log_majorant(t, lat, xs)
        hull_vals = h(xs)
        finite = maj > LOG_ZERO
        assert np.max(np.abs(hull_vals[finite] - maj[finite])) <= 1e-9
        assert np.all(hull_vals[~finite] == LOG_ZERO)

    def test_sample_grid_includes_knots(self):
        s = BinomialSpec(30, 0.03)
        t = build_tail_table(s)
        lat = build_knot_lattice(t)
        xs, lin = majorant_samples(t, lat)
        for k in lat.knots[:-1]:
            assert np.any(xs == k.y)
            assert np.any(xs == k.x)
        assert np.any(xs == 30.5)
        assert np.all(np.diff(xs) > 0)
        assert lin[-1] == LOG_ZERO and lin.shape == xs.shape


class TestDiscreteDistribution:
    def test_validation(self):
        with pytest.raises(ValueError):
            DiscreteDistribution(atoms=())
        with pytest.raises(ValueError):
            DiscreteDistribution(atoms=((0.0, 0.5), (0.0, 0.5)))
        with pytest.raises(ValueError):
            DiscreteDistribution(atoms=((1.0, 0.5), (0.0, 0.5)))
        with pytest.raises(ValueError):
            DiscreteDistribution(atoms=((0.0, -0.1), (1.0, 1.1)))
        with pytest.raises(ValueError):
            DiscreteDistribution(atoms=((0.0, 0.6), (1.0, 0.6)))
        with pytest.raises(ValueError):
            DiscreteDistribution(atoms=((float("inf"), 1.0),))

    def test_moments(self):
        d = DiscreteDistribution(atoms=((-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)))
        assert d.mean() == 0.0
        assert d.variance() == 0.5
        assert d.max_value() == 1.0

    def test_convolve_tri_tri(self):
        tri = DiscreteDistribution(atoms=((-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)))
        c = convolve(tri, tri)
        assert [v for v, _ in c.atoms] == [-2.0, -1.0, 0.0, 1.0, 2.0]
        want = [1 / 16, 4 / 16, 6 / 16, 4 / 16, 1 / 16]
        for (_, w), expect in zip(c.atoms, want):
            assert w == pytest.approx(expect, rel=1e-14)

    def test_convolve_merges_coincident_sums(self):
        pm = DiscreteDistribution(atoms=((-1.0, 0.5), (1.0, 0.5)))
        c = convolve(pm, pm)
        assert [v for v, _ in c.atoms] == [-2.0, 0.0, 2.0]
        assert c.atoms[1][1] == pytest.approx(0.5, rel=1e-14)


class TestLemma32:
    def test_frozen_triple(self):
        tri = DiscreteDistribution(atoms=((-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)))
        lhs, rhs, ok = lemma32_check(tri, 1.0, math.sqrt(0.5), 0.2)
        assert lhs == pytest.approx(0.16, rel=1e-14)
        assert rhs == pytest.approx(16.0 / 75.0, rel=1e-12)
        assert ok

    def test_extremal_equality(self):
        for d, sigma, t in ((1.0, 0.5, 0.1), (2.0, 1.5, -0.3), (0.7, 0.7, 0.0)):
            ext = extremal_two_point(d, sigma)
            lhs, rhs, ok = lemma32_check(ext, d, sigma, t)
            assert ok
            assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_t_at_or_above_d_is_trivial(self):
        ext = extremal_two_point(1.0, 0.5)
        lhs, rhs, ok = lemma32_check(ext, 1.0, 0.5, 1.0)
        assert (lhs, rhs, ok) == (0.0, 0.0, True)

    def test_domain_errors(self):
        tri = DiscreteDistribution(atoms=((-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)))
        with pytest.raises(ValueError):
            lemma32_check(tri, 0.5, 1.0, 0.0)  # support exceeds d
        with pytest.raises(ValueError):
            lemma32_check(tri, 1.0, 0.1, 0.0)  # variance above cap
        shifted = DiscreteDistribution(atoms=((-0.5, 0.5), (1.0, 0.5)))
        with pytest.raises(ValueError):
            lemma32_check(shifted, 1.0, 1.0, 0.0)  # mean nonzero
        with pytest.raises(ValueError):
            lemma32_check(tri, 1.0, 1.0, float("nan"))

    @given(st.integers(0, 10_000), st.floats(0.3, 3.0), st.floats(0.1, 1.5))
    @settings(max_examples=200, deadline=None)
    def test_random_admissible(self, seed, d, ratio):
        sigma = ratio * d
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 7))
        vals = np.sort(rng.uniform(-3.0 * d, d, size=m))
        vals = np.unique(vals)
        probs = rng.dirichlet(np.ones(vals.size))
        vals = vals - float(np.dot(vals, probs))
        hi = float(vals.max())
        if hi > d:
            vals = vals * (d / hi)
        var = float(np.dot(probs, vals**2))
        cap = sigma * sigma
        if var > cap:
            vals = vals * math.sqrt(cap / var) * (1.0 - 1e-12)
        probs = probs / math.fsum(probs.tolist())
        dist = DiscreteDistribution(atoms=tuple(zip(vals.tolist(), probs.tolist())))
        for t in (-d, -0.3 * d, 0.0, 0.2 * d, 0.8 * d):
            lhs, rhs, ok = lemma32_check(dist, d, sigma, t)
            assert ok, (lhs, rhs, t)
