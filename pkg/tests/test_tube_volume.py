from fractions import Fraction
from math import factorial, pi

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from fstube.fs_core import ProjectivePoint, fs_distance, projective_volume, uniform_sample_batch
from fstube.polynomial import HomogeneousPolynomial, linear_form
from fstube.submanifold import Hypersurface, RationalCurve, curve_volume, model
from fstube.tube_volume import (
    ChernIntegrals,
    DistanceSolverError,
    arbitrate_variant,
    ball_volume,
    distance_to_submanifold,
    distances,
    gray_polynomial,
    gray_tube_volume_general,
    hypersurface_polynomial,
    mc_tube_volume,
    sample_distances,
    tube_volume_curve,
    tube_volume_hypersurface,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small = st.integers(min_value=1, max_value=5)


def sympy_gray(chern, degree, k, n):
    """Independent symbolic tube volume: integrate over X in cohomology.

    Vol = (1/n!) int_X sum_j c_j (1 - h)^{k-j} (pi s + (1 - s) pi h)^n, with
    c(TX) = sum c_j h^j and int_X h^k = degree.
    """
    h, s = sp.symbols("h s")
    c = sp.series(chern(h), h, 0, k + 1).removeO()
    total = sum(c.coeff(h, j) * h**j * (1 - h) ** (k - j) for j in range(k + 1))
    integrand = sp.expand(total * (sp.pi * s + (1 - s) * sp.pi * h) ** n)
    return sp.expand(degree * integrand.coeff(h, k) / sp.factorial(n)), s


def as_sympy(polys, s):
    return sum(
        sp.Rational(str(Fraction(p.coeff_scale))) * sp.pi**p.pi_power * sum(sp.Rational(c.numerator, c.denominator) * s**i for i, c in enumerate(p.coeffs))
        for p in polys
    )


@pytest.mark.parametrize("n, d", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 2), (5, 4)])
def test_hypersurface_gray_matches_sympy_and_corrected_variant(n, d):
    k = n - 1
    expr, s = sympy_gray(lambda h: (1 + h) ** (n + 1) / (1 + d * h), d, k, n)
    ours = as_sympy(gray_polynomial(ChernIntegrals.hypersurface(n, d), n), s)
    assert sp.simplify(expr - ours) == 0
    corrected = sp.pi**n / sp.factorial(n) * (1 - (1 - d * s) ** n)
    assert sp.simplify(sp.expand(corrected) - expr) == 0
    printed = as_sympy([hypersurface_polynomial(n, d, "as-printed")], s)
    assert sp.simplify(printed - expr) != 0


@pytest.mark.parametrize("n, k", [(2, 0), (3, 1), (4, 2), (5, 1)])
def test_linear_gray_matches_sympy(n, k):
    expr, s = sympy_gray(lambda h: (1 + h) ** (k + 1), 1, k, n)
    ci = ChernIntegrals.point() if k == 0 else ChernIntegrals.linear(k)
    assert sp.simplify(expr - as_sympy(gray_polynomial(ci, n), s)) == 0


def test_derived_values():
    # corrected n = 2, d = 1 at r = pi/4: (pi^2 / 2)(1 - (1/2)^2)
    assert tube_volume_hypersurface(2, 1, pi / 4) == pytest.approx(3 * pi**2 / 8, rel=1e-14)
    assert tube_volume_hypersurface(2, 1, 0.0) == 0.0
    assert tube_volume_hypersurface(2, 1, 0.3, "as-printed") == pytest.approx(
        pi**2 / 2 * (1 - (1 - np.sin(0.6) ** 2) ** 2)
    )
    with pytest.raises(ValueError):
        tube_volume_hypersurface(2, 1, 0.3, "other")
    with pytest.raises(ValueError):
        tube_volume_hypersurface(2, 0, 0.3)


@given(st.integers(min_value=2, max_value=6), st.floats(min_value=0.0, max_value=pi / 2))
def test_hyperplane_tube_is_complement_of_a_ball(n, r):
    # the points farther than r from a hyperplane form a ball of radius pi/2 - r
    total = projective_volume(n)
    assert tube_volume_hypersurface(n, 1, r) == pytest.approx(total - ball_volume(n, pi / 2 - r), abs=1e-12)


@given(st.integers(min_value=2, max_value=6), st.data(), st.floats(min_value=0.0, max_value=pi / 2))
def test_linear_tubes_are_complementary(n, data, r):
    # CP^n minus the r-tube of CP^k is the (pi/2 - r)-tube of the dual CP^{n-k-1}
    k = data.draw(st.integers(min_value=0, max_value=n - 1))

    def V(kk, rad):
        ci = ChernIntegrals.point() if kk == 0 else ChernIntegrals.linear(kk)
        return gray_tube_volume_general(ci, n, rad)

    assert V(k, r) + V(n - k - 1, pi / 2 - r) == pytest.approx(projective_volume(n), abs=1e-10)


@given(st.integers(min_value=2, max_value=6), st.floats(min_value=0.0, max_value=pi / 2))
def test_gray_specializations(n, r):
    assert gray_tube_volume_general(ChernIntegrals.point(), n, r) == pytest.approx(ball_volume(n, r), abs=1e-12)
    assert gray_tube_volume_general(ChernIntegrals.curve(degree=2), n, r) == pytest.approx(
        tube_volume_curve(n, 2 * pi, r), abs=1e-12
    )
    assert gray_tube_volume_general(ChernIntegrals.curve(volume=3 * pi), n, r) == pytest.approx(
        gray_tube_volume_general(ChernIntegrals.curve(degree=3), n, r), abs=1e-12
    )
    assert gray_tube_volume_general(ChernIntegrals.hypersurface(n, 3), n, r) == pytest.approx(
        tube_volume_hypersurface(n, 3, r), abs=1e-10
    )


@given(st.integers(min_value=2, max_value=6), small, st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_corrected_volume_is_monotone_and_bounded_below_focal_bound(n, d, a, b):
    # below arcsin(1/sqrt d) the formula increases from 0 to Vol(CP^n)
    bound = np.arcsin(1 / np.sqrt(d))
    r1, r2 = sorted((a * bound, b * bound))
    v1, v2 = tube_volume_hypersurface(n, d, r1), tube_volume_hypersurface(n, d, r2)
    assert -1e-12 <= v1 <= v2 + 1e-12 <= projective_volume(n) + 2e-12


def test_chern_tables():
    assert ChernIntegrals.hypersurface(3, 2).table[0][0] == 2
    assert ChernIntegrals.hypersurface(2, 3).value(1) == pytest.approx(3 * (3 - 3))  # cubic curve: genus one
    with pytest.raises(ValueError):
        ChernIntegrals(1, {0: (Fraction(1), 1)})
    with pytest.raises(ValueError):
        ChernIntegrals.curve()
    with pytest.raises(ValueError):
        ChernIntegrals.curve(degree=0)
    with pytest.raises(ValueError):
        gray_polynomial(ChernIntegrals.linear(2), 2)
    assert "table" in ChernIntegrals.linear(2).to_dict()


def test_symbolic_arbitration_picks_corrected():
    arb = arbitrate_variant()
    assert arb.canonical == "corrected"
    assert all(arb.symbolic["corrected"]) and not any(arb.symbolic["as-printed"])


# -- distances --------------------------------------------------------------------

def test_distance_to_point_and_linear(rng):
    X = model("point", n=3)
    P = uniform_sample_batch(3, 20, rng)
    d, ok, _ = distances(P, X)
    e0 = ProjectivePoint.basis(3, 0)
    assert ok.all()
    assert np.allclose(d, [fs_distance(ProjectivePoint(p), e0) for p in P])


def test_hyperplane_generic_matches_closed_form(rng):
    X = Hypersurface(linear_form([1.0, 2.0 - 1j, 0.5j]))
    P = uniform_sample_batch(2, 200, rng)
    a, _, _ = distances(P, X)
    b, ok, res = distances(P, X, method="generic")
    assert ok.all() and np.max(res) < 1e-8
    assert np.allclose(a, b, atol=1e-10)


def test_quadric_generic_matches_closed_form(rng):
    X = model("quadric", n=3)
    P = uniform_sample_batch(3, 200, rng)
    a, _, _ = distances(P, X)
    b, ok, _ = distances(P, X, method="generic")
    assert ok.all()
    assert np.allclose(a, b, atol=1e-8)


def test_segre_closed_form_matches_quadric_solver(rng):
    # P^1 x P^1 in P^3 is the quadric z0 z3 - z1 z2 = 0
    Q = Hypersurface(HomogeneousPolynomial(3, 2, [1.0, -1.0], [[1, 0, 0, 1], [0, 1, 1, 0]]))
    P = uniform_sample_batch(3, 100, rng)
    a, _, _ = distances(P, model("segre", k=1))
    b, ok, _ = distances(P, Q)
    assert ok.all()
    assert np.allclose(a, b, atol=1e-8)


def test_curve_solver_on_a_line_matches_subspace(rng):
    P = uniform_sample_batch(3, 100, rng)
    a, ok, _ = distances(P, RationalCurve.line(3))
    b, _, _ = distances(P, model("linear", n=3, k=1))
    assert ok.all()
    assert np.allclose(a, b, atol=1e-8)


def test_curve_solver_beats_a_parameter_grid(rng):
    curve = RationalCurve.quadric_conic()
    P = uniform_sample_batch(3, 30, rng)
    d, ok, _ = distances(P, curve)
    assert ok.all()
    t = np.linspace(-4, 4, 161)
    T = (t[:, None] + 1j * t[None, :]).ravel()
    pts = curve(np.stack([np.ones_like(T), T], axis=-1))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    grid = np.arccos(np.clip(np.abs(pts.conj() @ P.T), 0, 1)).min(axis=0)
    assert np.all(d <= grid + 1e-9)
    assert np.all(grid - d < 0.05)


@given(seeds)
def test_points_on_the_variety_have_zero_distance(seed):
    rng = np.random.default_rng(seed)
    for X in (model("fermat", n=2, d=3), model("conic")):
        p = X.sample_point(rng)
        assert distance_to_submanifold(p, X) < 1e-6


def test_distance_errors(rng):
    with pytest.raises(ValueError):
        distances(uniform_sample_batch(2, 3, rng), model("quadric", n=3))
    with pytest.raises(ValueError):
        distances(uniform_sample_batch(3, 3, rng), model("quadric", n=3), method="fast")


# -- Monte Carlo -----------------------------------------------------------------------

def test_mc_is_worker_independent():
    X = model("quadric", n=2)
    a = sample_distances(X, 70_000, seed=5, workers=1)
    b = sample_distances(X, 70_000, seed=5, workers=2)
    assert np.array_equal(a.distances, b.distances)


def test_mc_requires_enough_samples():
    with pytest.raises(ValueError):
        sample_distances(model("quadric", n=2), 10, seed=0)


@pytest.mark.parametrize("n, d", [(2, 2), (3, 1)])
def test_mc_agrees_with_corrected_formula(n, d):
    X = model("hypersurface", n=n, d=d)
    radii = [0.1, 0.3, 0.5]
    reports = mc_tube_volume(X, radii, 200_000, seed=11)
    for rep in reports:
        assert abs(rep.value - tube_volume_hypersurface(n, d, rep.r)) <= 4 * rep.stderr
    single = mc_tube_volume(X, 0.3, 200_000, seed=11)
    assert single.value == reports[1].value
    assert single.to_dict()["method"] == "monte-carlo"


def test_mc_curve_matches_curve_formula():
    curve = RationalCurve.quadric_conic()
    vol = curve_volume(curve).volume
    for rep in mc_tube_volume(curve, [0.2, 0.4], 50_000, seed=3):
        assert abs(rep.value - tube_volume_curve(3, vol, rep.r)) <= 4 * rep.stderr


def test_failure_rate_guard(monkeypatch):
    import fstube.tube_volume as tv

    def broken(P, X, tol, method):
        d = np.zeros(len(P))
        return d, np.zeros(len(P), dtype=bool), d

    monkeypatch.setattr(tv, "distances", broken)
    with pytest.raises(DistanceSolverError):
        tv.sample_distances(model("quadric", n=2), 2000, seed=0)


def test_volume_constants():
    for n in range(1, 6):
        assert projective_volume(n) == pytest.approx(pi**n / factorial(n))
        assert ball_volume(n, pi / 2) == pytest.approx(projective_volume(n))
