import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from scipy.stats import norm

import oracles
from simplexlearn.errors import OutOfRegimeError, ParameterError, UnsupportedExactError
from simplexlearn.geometry import Simplex, contains, random_simplex, standard_simplex
from simplexlearn.geometry import IsoperimetryParams
from simplexlearn.metrics import (GuaranteeRecord, TvEstimate, complexity_report,
                                  intersection_volume, lemma3_bound, radius_cap_ratio,
                                  sample_complexity_thm2, sample_complexity_thm2_exact,
                                  sample_complexity_thm3, thm3_terms, tv_noisy_vs_clean_mc,
                                  tv_uniform)
from simplexlearn.rng import RngStream
from simplexlearn.select import min_samples_selection

TRI = Simplex([[0, 0], [1, 0], [0, 1]])


def interval(a, b):
    return Simplex([[a], [b]])


def quad_tv_1d(s1, s2):
    a1, b1 = sorted(s1.vertices[:, 0])
    a2, b2 = sorted(s2.vertices[:, 0])
    f = lambda x: 0.5 * abs((a1 <= x <= b1) / (b1 - a1) - (a2 <= x <= b2) / (b2 - a2))
    pts = sorted({a1, b1, a2, b2})
    return sum(integrate.quad(f, lo, hi, epsabs=1e-13, epsrel=1e-13)[0]
               for lo, hi in zip(pts[:-1], pts[1:]))


# -- intersection ------------------------------------------------------------------

def test_intersection_examples():
    assert intersection_volume(interval(0, 1), interval(0.5, 2))[0] == pytest.approx(0.5)
    assert intersection_volume(TRI, TRI)[0] == pytest.approx(0.5)
    other = Simplex([[0, 0], [1, 0], [1, 1]])
    assert intersection_volume(TRI, other)[0] == pytest.approx(0.25)
    assert intersection_volume(interval(0, 1), interval(2, 3))[0] == 0.0


def test_intersection_mc_cross_check():
    other = Simplex([[0, 0], [1, 0], [1, 1]])
    est, se = intersection_volume(TRI, other, "mc", 100_000, RngStream(1))
    assert abs(est - 0.25) <= 4 * se
    t3 = standard_simplex(3)
    est, se = intersection_volume(t3, t3.translated([0.1, 0, 0]), "mc", 50_000, RngStream(2))
    assert abs(est - t3.volume * 0.9 ** 3) <= 4 * se


def test_intersection_errors():
    with pytest.raises(UnsupportedExactError):
        intersection_volume(standard_simplex(3), standard_simplex(3))
    with pytest.raises(ParameterError):
        intersection_volume(TRI, interval(0, 1))
    with pytest.raises(ParameterError):
        intersection_volume(TRI, TRI, mode="grid")


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=12, max_size=12))
def test_triangle_clipping_matches_grid_count(coords):
    v = np.array(coords).reshape(2, 3, 2)
    try:
        a, b = Simplex(v[0]), Simplex(v[1])
    except ValueError:
        return
    if min(a.volume, b.volume) < 1e-2:
        return
    exact = intersection_volume(a, b)[0]
    assert exact == pytest.approx(intersection_volume(b, a)[0], abs=1e-9)
    assert -1e-12 <= exact <= min(a.volume, b.volume) + 1e-9
    # midpoint grid over the bounding box of a
    lo, hi = a.vertices.min(axis=0), a.vertices.max(axis=0)
    g = 400
    xs = lo[0] + (np.arange(g) + 0.5) * (hi[0] - lo[0]) / g
    ys = lo[1] + (np.arange(g) + 0.5) * (hi[1] - lo[1]) / g
    pts = np.stack(np.meshgrid(xs, ys), -1).reshape(-1, 2)
    cell = (hi[0] - lo[0]) * (hi[1] - lo[1]) / g ** 2
    grid = np.count_nonzero(contains(a, pts, 0) & contains(b, pts, 0)) * cell
    perim = 3 * (a.diameter + b.diameter)
    assert abs(exact - grid) <= 2 * perim * max(hi - lo) / g


# -- TV --------------------------------------------------------------------------

def test_tv_examples():
    assert tv_uniform(TRI, TRI).value == 0.0
    assert tv_uniform(interval(0, 1), interval(2, 3)).value == 1.0
    assert tv_uniform(interval(0, 1), interval(0, 2)).value == pytest.approx(0.5)
    assert quad_tv_1d(interval(0, 1), interval(0, 2)) == pytest.approx(0.5, abs=1e-9)
    assert isinstance(tv_uniform(TRI, TRI).value, float)


def test_tv_1d_matches_quadrature():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a, b = np.sort(rng.uniform(-2, 2, 2)), np.sort(rng.uniform(-2, 2, 2))
        s1, s2 = interval(*a), interval(*b)
        assert tv_uniform(s1, s2).value == pytest.approx(quad_tv_1d(s1, s2), abs=1e-6)


def test_tv_2d_matches_fine_grid():
    rng = np.random.default_rng(4)
    g = 1000
    for _ in range(3):
        a = Simplex(rng.uniform(0, 1, (3, 2)))
        b = Simplex(rng.uniform(0, 1, (3, 2)))
        xs = (np.arange(g) + 0.5) / g
        pts = np.stack(np.meshgrid(xs, xs), -1).reshape(-1, 2)
        diff = np.abs(contains(a, pts, 0) / a.volume - contains(b, pts, 0) / b.volume)
        assert tv_uniform(a, b).value == pytest.approx(0.5 * diff.sum() / g ** 2, abs=1e-2)


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=6, max_size=6))
def test_tv_pseudometric_k1(xs):
    pairs = [sorted(xs[i:i + 2]) for i in (0, 2, 4)]
    if any(b - a < 1e-3 for a, b in pairs):
        return
    s = [interval(*p) for p in pairs]
    d = lambda i, j: tv_uniform(s[i], s[j]).value
    assert d(0, 1) == d(1, 0)
    assert 0 <= d(0, 1) <= 1
    assert d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9


def test_tv_triangle_inequality_k2_mc():
    rng = np.random.default_rng(5)
    for t in range(20):
        a, b, c = (random_simplex(2, IsoperimetryParams(3, 6), rng=rng) for _ in range(3))
        ab = tv_uniform(a, b, "mc", 20_000, RngStream(t, 0))
        bc = tv_uniform(b, c, "mc", 20_000, RngStream(t, 1))
        ac = tv_uniform(a, c, "mc", 20_000, RngStream(t, 2))
        se = math.sqrt(ab.standard_error ** 2 + bc.standard_error ** 2 + ac.standard_error ** 2)
        assert ac.value <= ab.value + bc.value + 3 * se


def test_tv_estimate_invariants():
    with pytest.raises(ParameterError):
        TvEstimate(0.1, 0.01, "exact")
    est = tv_uniform(TRI, TRI.translated([0.2, 0]), "mc", 5000, RngStream(6))
    assert est.method == "mc" and est.standard_error > 0 and est.budgets == {"budget": 5000}


# -- noise gap -----------------------------------------------------------------------

def quad_noise_tv_1d(sigma):
    f = lambda x: 1 - (norm.cdf((1 - x) / sigma) - norm.cdf(-x / sigma))
    return integrate.quad(f, 0, 1, points=[sigma, 1 - sigma], epsabs=1e-12)[0]


def test_noise_tv_zero_and_tiny_sigma():
    assert tv_noisy_vs_clean_mc(TRI, 0.0).value == 0.0
    est = tv_noisy_vs_clean_mc(TRI, 1e-8 * TRI.diameter, 2000, 2000, RngStream(7))
    assert est.value <= 0.01
    with pytest.raises(ParameterError):
        tv_noisy_vs_clean_mc(TRI, 0.1, 100, 100)


def test_noise_tv_k1_example():
    est = tv_noisy_vs_clean_mc(interval(0, 1), 0.05, 3000, 3000, RngStream(8))
    assert 0 < est.value < 1
    assert est.value <= lemma3_bound(1, 1.0, 20.0)
    assert abs(est.value - quad_noise_tv_1d(0.05)) <= 3 * est.standard_error


def test_noise_tv_monotone_in_sigma():
    ests = [tv_noisy_vs_clean_mc(interval(0, 1), s, 2000, 2000, RngStream(9)) for s in (0.01, 0.05, 0.2)]
    for lo, hi in zip(ests, ests[1:]):
        assert hi.value >= lo.value - 3 * math.hypot(lo.standard_error, hi.standard_error)


# -- Lemma 3 bound -----------------------------------------------------------------

def test_lemma3_examples():
    assert lemma3_bound(1, 2.0, 100.0) == pytest.approx(0.3082, abs=1e-4)
    assert lemma3_bound(1, 2.0, 100.0) == pytest.approx(float(oracles.lemma3(1, 2.0, 100.0)), rel=1e-14)
    assert lemma3_bound(1, 2.0, 1e8) < 1e-6
    with pytest.raises(OutOfRegimeError):
        lemma3_bound(1, 2.0, 2.0)
    with pytest.raises(ParameterError):
        lemma3_bound(1, 0.0, 10.0)


@given(st.integers(1, 4), st.floats(0.5, 5), st.floats(6, 1e6))
def test_lemma3_matches_oracle(k, t, snr):
    assert lemma3_bound(k, t, snr) == pytest.approx(float(oracles.lemma3(k, t, snr)), rel=1e-12)


# -- calculators -----------------------------------------------------------------

def test_thm1_worked_example():
    assert min_samples_selection(10, 0.1, 0.1) == oracles.ceil(oracles.thm1(10, 0.1, 0.1)) == 401


def test_thm2_worked_example():
    exact = oracles.thm2(1, 2, 2, 0.5, 0.1)
    assert float(exact) == pytest.approx(94.907, abs=1e-3)
    assert sample_complexity_thm2(1, 2.0, ratio=2.0, eps2=0.5, delta=0.1) == oracles.ceil(exact) == 95
    assert sample_complexity_thm2(1, 2.0, radius=4.0, vol_root=2.0, eps2=0.5, delta=0.1) == 95


@given(st.integers(1, 4), st.floats(0.5, 4), st.floats(0.1, 50), st.floats(0.01, 0.9),
       st.floats(0.01, 0.9))
def test_thm2_matches_oracle(k, t, q, e, d):
    assert sample_complexity_thm2(k, t, ratio=q, eps2=e, delta=d) == oracles.ceil(oracles.thm2(k, t, q, e, d))


def test_thm2_monotonicity():
    n = sample_complexity_thm2(2, 2.0, ratio=3.0, eps2=0.2, delta=0.1)
    assert sample_complexity_thm2(2, 2.0, ratio=6.0, eps2=0.2, delta=0.1) > n
    assert sample_complexity_thm2_exact(2, 2.0, ratio=3.0, eps2=0.1, delta=0.1) > 4 * \
        sample_complexity_thm2_exact(2, 2.0, ratio=3.0, eps2=0.2, delta=0.1)


def test_thm3_second_summand():
    _, second = thm3_terms(1, 1.0, 1.0, ratio=1.0, eps2=0.5, delta=0.5)
    want = oracles.thm3_terms(1, 1.0, 1.0, 1.0, 0.5, 0.5)[1]
    assert float(second) == pytest.approx(float(want), rel=1e-40)
    assert float(second) == pytest.approx(2 * float(oracles.lemma1(1, 1.0, 0.5)), rel=1e-40)
    assert float(second) == pytest.approx(899506.2174, abs=1e-3)


@given(st.integers(1, 3), st.floats(0.5, 2), st.floats(1, 4), st.floats(0.5, 20),
       st.floats(0.05, 0.9), st.floats(0.01, 0.9))
def test_thm3_matches_oracle(k, tl, tu, q, e, d):
    first, second = oracles.thm3_terms(k, tl, tu, q, e, d)
    n = sample_complexity_thm3(k, tl, tu, ratio=q, eps2=e, delta=d)
    assert n == oracles.ceil(first + second)
    assert n >= second


def test_thm3_decreasing_in_delta():
    vals = [sample_complexity_thm3(2, 1.0, 2.0, ratio=5.0, eps2=0.2, delta=d) for d in (0.01, 0.1, 0.5)]
    assert vals == sorted(vals, reverse=True)


def test_thm3_radius_cap():
    q = radius_cap_ratio(1, 1.0, 50.0)
    assert sample_complexity_thm3(1, 1.0, 1.0, eps2=0.2, delta=0.1, snr=50.0) == \
        sample_complexity_thm3(1, 1.0, 1.0, ratio=q, eps2=0.2, delta=0.1)
    with pytest.raises(OutOfRegimeError):
        radius_cap_ratio(1, 1.0, 1.0)
    with pytest.raises(ParameterError):
        sample_complexity_thm3(1, 1.0, 1.0, eps2=0.2, delta=0.1)


@pytest.mark.parametrize("bad", [dict(eps2=0.0), dict(eps2=1.5), dict(delta=1.0), dict(ratio=-1.0)])
def test_calculator_ranges(bad):
    kw = dict(ratio=2.0, eps2=0.5, delta=0.1)
    kw.update(bad)
    with pytest.raises(ParameterError):
        sample_complexity_thm2(1, 2.0, **kw)


def test_complexity_report():
    rep = complexity_report("thm2", dim=1, theta_upper=2.0, ratio=2.0, eps=0.5, delta=0.1)
    assert rep["n"] == 95 and rep["formula"] == "thm2" and "natural-log" in rep["flags"]
    assert complexity_report("thm1", M=10, eps=0.1, delta=0.1)["n"] == 401
    assert complexity_report("lemma1", dim=1, theta_lower=1.0, delta=0.5)["n"] == 449754
    with pytest.raises(ParameterError):
        complexity_report("thm9")


def test_guarantee_record():
    g = GuaranteeRecord(0.1, 0.2, 0.05)
    assert (g.c1, g.c2) == (4, 7)
    assert g.bound == pytest.approx(1.8)
    assert GuaranteeRecord(None, 0.2, 0.05).bound is None
