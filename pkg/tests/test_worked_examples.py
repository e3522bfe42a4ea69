"""Small worked examples with known answers, grouped by module."""

from math import pi, sqrt

import numpy as np
import pytest
from scipy import integrate

from fstube.fs_core import (
    ProjectivePoint,
    TangentVector,
    curvature_operator,
    fs_distance,
    geodesic,
    parallel_transport,
    projective_volume,
    random_tangent,
    uniform_sample,
    uniform_sample_batch,
)
from fstube.polynomial import fermat, linear_form
from fstube.riccati import (
    JacobiState,
    RiccatiBranch,
    focal_distance_along,
    jacobi_integrate,
    riccati_closed_form,
)
from fstube.submanifold import (
    Hypersurface,
    RationalCurve,
    curvature_adapted_defect,
    local_geometry,
    model,
    random_unit_normal,
    tangent_normal_frame,
)
from fstube.tube_volume import (
    ChernIntegrals,
    distance_to_submanifold,
    distances,
    gray_tube_volume_general,
    mc_tube_volume,
    tube_volume_curve,
    tube_volume_hypersurface,
)
from fstube.verify import theorem2_monotonicity, theorem4_limit, theorem4_ratio

E0, E1 = ProjectivePoint.basis(1, 0), ProjectivePoint.basis(1, 1)


# -- fs-core ---------------------------------------------------------------------

def test_distance_examples():
    assert fs_distance(E0, E0) == 0.0
    assert fs_distance(E0, E1) == pytest.approx(pi / 2)
    assert fs_distance(E0, ProjectivePoint([1 / sqrt(2), 1 / sqrt(2)])) == pytest.approx(pi / 4)


def test_distance_equals_integrated_arc_length():
    # the chart segment s -> [1 : s], s in [0, 1], is a minimizing geodesic ending at (e0 + e1)/sqrt2
    def speed(s):
        z = np.array([1.0, s])
        dz = np.array([0.0, 1.0])
        horiz = dz - (dz @ z) / (z @ z) * z
        return np.linalg.norm(horiz) / np.linalg.norm(z)

    length, _ = integrate.quad(speed, 0.0, 1.0, epsabs=1e-13)
    assert length == pytest.approx(fs_distance(E0, ProjectivePoint([1.0, 1.0])), abs=1e-10)


def test_geodesic_examples(rng):
    v = TangentVector(E0, [0.0, 1.0])
    assert geodesic(E0, v, 0.0) == E0
    assert geodesic(E0, v, pi / 2) == E1
    p = uniform_sample(3, rng)
    w = random_tangent(p, rng)
    assert fs_distance(p, geodesic(p, w, 0.3)) == pytest.approx(0.3, abs=1e-10)


def test_jacobi_operator_examples(rng):
    p = uniform_sample(3, rng)
    xi = random_tangent(p, rng)
    assert np.allclose(curvature_operator(xi, xi.J()).vec, 4 * xi.J().vec, atol=1e-12)
    assert np.allclose(curvature_operator(xi, xi).vec, 0.0, atol=1e-12)
    x = random_tangent(p, rng).vec
    x = x - np.vdot(xi.vec, x) * xi.vec
    X = TangentVector(p, x / np.linalg.norm(x))
    assert np.allclose(curvature_operator(xi, X).vec, X.vec, atol=1e-12)


def test_parallel_transport_examples(rng):
    p = uniform_sample(3, rng)
    u = random_tangent(p, rng)
    v = random_tangent(p, rng)
    assert np.allclose(parallel_transport(v, p, u, 0.0).vec, v.vec)
    a = parallel_transport(v.J(), p, u, 0.7)
    b = parallel_transport(v, p, u, 0.7).J()
    assert np.allclose(a.vec, b.vec, atol=1e-10)


def test_parallel_transport_against_numeric_ode(rng):
    # a horizontal field is parallel when V' is vertical: V' = -<V, c'> c along the unit lift c(t)
    p = uniform_sample(2, rng)
    u = random_tangent(p, rng)
    v = random_tangent(p, rng)
    T, steps = 0.9, 4000
    h = T / steps

    def c(t):
        return np.cos(t) * p.rep + np.sin(t) * u.vec

    def dc(t):
        return -np.sin(t) * p.rep + np.cos(t) * u.vec

    def f(t, V):
        return -np.vdot(dc(t), V) * c(t)

    V = v.vec.astype(complex)
    for i in range(steps):
        t = i * h
        k1 = f(t, V)
        k2 = f(t + h / 2, V + h / 2 * k1)
        k3 = f(t + h / 2, V + h / 2 * k2)
        k4 = f(t + h, V + h * k3)
        V = V + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.allclose(parallel_transport(v, p, u, T).vec, V, atol=1e-10)


def test_sampler_examples():
    reps = uniform_sample_batch(2, 1_000_000, np.random.default_rng(0))
    x = np.abs(reps[:, 0]) ** 2
    assert abs(x.mean() - 1 / 3) < 3 * x.std() / np.sqrt(x.size)
    a = uniform_sample(2, np.random.default_rng(9))
    b = uniform_sample(2, np.random.default_rng(9))
    assert np.array_equal(a.rep, b.rep)


def test_pairwise_distance_law_on_the_line():
    # on CP^1 the distance between independent uniform points has CDF sin^2 t
    rng = np.random.default_rng(1)
    A = uniform_sample_batch(1, 200_000, rng)
    B = uniform_sample_batch(1, 200_000, rng)
    d = np.arccos(np.clip(np.abs(np.sum(A * B.conj(), axis=1)), 0, 1))
    for t in (0.2, 0.5, 0.9, 1.3):
        cdf = np.sin(t) ** 2
        assert abs(np.mean(d <= t) - cdf) < 4 * np.sqrt(cdf * (1 - cdf) / d.size)


# -- submanifold --------------------------------------------------------------------

def test_sampling_examples():
    X = Hypersurface(linear_form([0.0, 0.0, 1.0]))
    p = X.sample_point(np.random.default_rng(2))
    assert abs(p.rep[2]) < 1e-12
    Q = Hypersurface(fermat(2, 2))
    q = Q.sample_point(np.random.default_rng(2))
    assert abs(fermat(2, 2)(q.rep)) < 1e-10
    assert np.array_equal(q.rep, Q.sample_point(np.random.default_rng(2)).rep)


def test_frame_examples(rng):
    L = model("linear", n=3, k=1)
    p = L.sample_point(rng)
    frame = tangent_normal_frame(L, p)
    # tangent span is the complex line spanned by e0, e1 (horizontal at p)
    assert np.allclose(frame.tangent[:, 2:], 0.0, atol=1e-12)
    Q = model("quadric", n=2)
    assert tangent_normal_frame(Q, Q.sample_point(rng)).complex_defect < 1e-10
    cubic = model("fermat", n=2, d=3)
    fr = tangent_normal_frame(cubic, cubic.sample_point(rng))
    assert np.max(np.abs(np.real(fr.tangent.conj() @ fr.normal.T))) < 1e-10


def test_shape_operator_examples(rng):
    for X in (model("fermat", n=2, d=3), model("fermat", n=3, d=3), model("conic")):
        geo = local_geometry(X, X.sample_point(rng))
        A = geo.shape_operator(random_unit_normal(geo.frame, rng))
        assert abs(np.trace(A)) < 1e-6
    for n in (2, 3):
        geo = local_geometry(model("quadric", n=n), model("quadric", n=n).sample_point(rng))
        eig = geo.principal_curvatures(random_unit_normal(geo.frame, rng))
        assert np.allclose(eig, [-1] * (n - 1) + [1] * (n - 1), atol=1e-5)


def test_curvature_adapted_examples(rng):
    for X, bound in ((model("quadric", n=3), 1e-6), (model("linear", n=3, k=2), 1e-10), (model("fermat", n=3, d=3), 1e-5)):
        geo = local_geometry(X, X.sample_point(rng))
        assert curvature_adapted_defect(geo, random_unit_normal(geo.frame, rng)) < bound


def test_mobius_reparametrized_line():
    A = np.array([[2.0, 1.0 + 1j], [0.5j, 1.0]])
    from fstube.submanifold import curve_volume

    assert curve_volume(RationalCurve.line(2).reparametrize(A)).volume == pytest.approx(pi, abs=1e-8)
    assert curve_volume(RationalCurve.rational_normal(2)).ratio_to_line == pytest.approx(2.0, abs=1e-6)


# -- jacobi-riccati ------------------------------------------------------------------

def test_jacobi_examples():
    r = np.linspace(0.05, 1.5, 30)
    normal = JacobiState.basis_field(0, [1.0], [False], [0.0])
    for t in r:
        y = jacobi_integrate(normal, t)
        assert y.shape_value() == pytest.approx(-1 / np.tan(t))
    assert jacobi_integrate(normal, pi).Y[0] == pytest.approx(0.0, abs=1e-15)
    tangent = JacobiState.basis_field(0, [1.0], [True], [1.0])
    assert jacobi_integrate(tangent, pi / 4).Y[0] == pytest.approx(0.0, abs=1e-15)
    jxi = JacobiState.basis_field(0, [2.0], [False], [0.0])
    assert jacobi_integrate(jxi, pi / 2).Y[0] == pytest.approx(0.0, abs=1e-15)
    assert jacobi_integrate(jxi, 0.3).shape_value() == pytest.approx(riccati_closed_form(RiccatiBranch(2.0, 0.0), 0.3))


def test_focal_examples(rng):
    H = model("linear", n=3)
    p = H.sample_point(rng)
    geo = local_geometry(H, p)
    rep = focal_distance_along(H, p, random_unit_normal(geo.frame, rng), geo=geo)
    assert np.allclose(rep.radii, pi / 2)
    P = model("point", n=1)
    p = P.sample_point(rng)
    geo = local_geometry(P, p)
    assert focal_distance_along(P, p, random_unit_normal(geo.frame, rng), geo=geo).minimum == pytest.approx(pi / 2)
    Q = model("quadric", n=3)
    p = Q.sample_point(rng)
    geo = local_geometry(Q, p)
    rep = focal_distance_along(Q, p, random_unit_normal(geo.frame, rng), geo=geo)
    jxi = [r for b, r in zip(rep.branches, rep.radii) if b.label == "J xi"]
    assert rep.minimum == pytest.approx(pi / 4, abs=1e-5) and jxi == pytest.approx([pi / 2])


# -- tube-volume -----------------------------------------------------------------------

def test_gray_examples(rng):
    for n in (1, 2, 4):
        assert gray_tube_volume_general(ChernIntegrals.point(), n, pi / 2) == pytest.approx(projective_volume(n))
    for r in rng.uniform(0, pi / 2, 20):
        assert gray_tube_volume_general(ChernIntegrals.linear(1), 2, r) == pytest.approx(tube_volume_curve(2, pi, r))
    for ci, n in ((ChernIntegrals.linear(1), 3), (ChernIntegrals.hypersurface(3, 3), 3), (ChernIntegrals.curve(degree=2), 4)):
        assert gray_tube_volume_general(ci, n, 0.0) == 0.0


def test_hypersurface_formula_examples():
    for n in range(2, 7):
        assert tube_volume_hypersurface(n, 2, pi / 4) == pytest.approx(projective_volume(n))
        for v in ("corrected", "as-printed"):
            assert tube_volume_hypersurface(n, 3, 0.0, v) == 0.0
    # d = 1, n = 2 at pi/4 is (pi^2/2)(3/4); the fill happens at r = pi/2
    assert tube_volume_hypersurface(2, 1, pi / 4) == pytest.approx(pi**2 / 2 * 0.75)
    assert tube_volume_hypersurface(2, 1, pi / 2) == pytest.approx(pi**2 / 2)


def test_curve_formula_examples():
    assert tube_volume_curve(3, pi, 0.0) == 0.0
    assert tube_volume_curve(2, pi, pi / 2) == pytest.approx(pi**2 / 2)
    rep = mc_tube_volume(model("linear", n=3, k=1), 0.3, 1_000_000, seed=4)
    assert abs(rep.value - tube_volume_curve(3, pi, 0.3)) <= 3 * rep.stderr


def test_distance_examples(rng):
    X = Hypersurface(linear_form([0.0, 0.0, 0.0, 1.0]))
    assert distance_to_submanifold(ProjectivePoint.basis(3, 3), X) == pytest.approx(pi / 2)
    P = uniform_sample_batch(3, 50, rng)
    d, _, _ = distances(P, X, method="generic")
    assert np.allclose(d, np.arcsin(np.abs(P[:, 3])), atol=1e-8)
    Q = model("quadric", n=2)
    assert distance_to_submanifold(Q.sample_point(rng), Q) < 1e-8


def test_monte_carlo_examples():
    rep = mc_tube_volume(model("point", n=1), pi / 4, 1_000_000, seed=0)
    assert abs(rep.value - pi / 2) <= 3 * rep.stderr
    full = mc_tube_volume(model("quadric", n=2), pi / 2, 2000, seed=0)
    assert full.value == projective_volume(2)
    line = mc_tube_volume(model("linear", n=2), 0.3, 1_000_000, seed=0)
    assert abs(line.value - tube_volume_hypersurface(2, 1, 0.3)) <= 3 * line.stderr


# -- verify ------------------------------------------------------------------------------

def test_cotangent_sum_examples():
    theta = np.array([pi / 4, 3 * pi / 4])
    sums = [float(np.sum(1 / np.tan(theta - t))) for t in (-0.1, 0.0, 0.1)]
    assert sums[0] < 0 and sums[1] == pytest.approx(0.0, abs=1e-12) and sums[2] > 0
    assert sums[0] == pytest.approx(-sums[2])
    rep = theorem2_monotonicity(1000, 4, seed=0)
    assert rep.values["monotone_fraction"] == 1.0
    tg = rep.values["totally_geodesic_sums"]
    assert tg["t=0"] == pytest.approx(0.0, abs=1e-12) and tg["t=0.1"] == pytest.approx(4 * np.tan(0.1))


def test_theorem4_examples():
    assert theorem4_limit(3) == pytest.approx(4 * pi) and theorem4_limit(2) == pytest.approx(4 * pi)
    for n in (2, 3):
        assert theorem4_ratio(n, pi / 4 - 1e-8) == pytest.approx(4 * pi, abs=1e-6)
