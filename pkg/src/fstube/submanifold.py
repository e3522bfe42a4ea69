"""Complex submanifolds of CP^n: sampling, frames, shape operators, curve area.

Second fundamental forms are computed in the affine chart centred at the
base point p, q = p + w with w horizontal at p.  In that chart the
Fubini-Study metric is the identity at w = 0 and its Christoffel symbols
vanish there, so the ambient covariant second derivative at p is the plain
second derivative of w along a local parametrisation of X.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, pi
from typing import Callable

import numpy as np
from scipy import integrate

from . import hyperdual as hd
from .config import DEFAULT, Tolerances
from .fs_core import ProjectivePoint, TangentVector, curvature_tensor, horizontal_projection
from .polynomial import HomogeneousPolynomial, PolynomialFormatError, companion_roots, fermat, parse_polynomial

__all__ = [
    "SubmanifoldError",
    "SingularPointError",
    "EmbeddedSubmanifold",
    "Hypersurface",
    "RationalCurve",
    "ProjectiveSubspace",
    "SegreModel",
    "SubmanifoldFrame",
    "LocalGeometry",
    "local_geometry",
    "sample_point",
    "tangent_normal_frame",
    "shape_operator",
    "curvature_adapted_defect",
    "curve_volume",
    "CurveVolume",
    "random_unit_normal",
    "model",
    "parse_curve",
]


class SubmanifoldError(RuntimeError):
    pass


class SingularPointError(SubmanifoldError):
    pass


def _complex_basis_orthogonal_to(vectors: np.ndarray, m: int) -> np.ndarray:
    """Orthonormal basis (columns) of the Hermitian complement of span(vectors)."""
    vectors = np.atleast_2d(vectors)
    q, _ = np.linalg.qr(np.concatenate([vectors.T, np.eye(m, dtype=complex)], axis=1))
    return q[:, vectors.shape[0]:]


def _unit_rng_complex(rng, size):
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return z / np.linalg.norm(z)


class EmbeddedSubmanifold:
    """Base class: a closed complex submanifold X of CP^n of complex dimension k."""

    n: int
    k: int
    name: str = "submanifold"

    def residual(self, p: ProjectivePoint) -> float:
        raise NotImplementedError

    def sample_point(self, rng: np.random.Generator, tol: Tolerances = DEFAULT) -> ProjectivePoint:
        raise NotImplementedError

    def local_parametrization(self, p: ProjectivePoint) -> Callable:
        """Map from real parameters s (length 2k) to homogeneous vectors near p.

        The map must accept a hyper-dual vector and satisfy phi(0) = p.rep.
        The first k parameters are real parts and the last k imaginary parts
        of holomorphic coordinates.
        """
        raise NotImplementedError

    def describe(self) -> dict:
        return {"name": self.name, "n": self.n, "k": self.k}


# -- hypersurfaces ----------------------------------------------------------

class Hypersurface(EmbeddedSubmanifold):
    def __init__(self, poly: HomogeneousPolynomial, name: str | None = None):
        self.poly = poly
        self.n = poly.n
        self.k = poly.n - 1
        self.d = poly.d
        self.name = name or f"hypersurface(n={poly.n}, d={poly.d})"

    def residual(self, p: ProjectivePoint) -> float:
        return float(abs(self.poly(p.rep)) / self.poly.scale())

    def scaled_gradient_norm(self, z) -> float:
        return float(np.linalg.norm(self.poly.gradient(z)) / (self.d * self.poly.scale()))

    def unit_normal(self, p: ProjectivePoint) -> np.ndarray:
        g = self.poly.gradient(p.rep)
        nu = horizontal_projection(np.conj(g), p.rep)
        norm = np.linalg.norm(nu)
        if norm / (self.d * self.poly.scale()) <= DEFAULT.smooth_gradient:
            raise SingularPointError(f"gradient vanishes at {p.rep}")
        return nu / norm

    def sample_point(self, rng, tol: Tolerances = DEFAULT) -> ProjectivePoint:
        m = self.n + 1
        for _ in range(tol.max_resample):
            a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            b = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            coeffs = self.poly.restrict_to_line(a, b)
            if abs(coeffs[-1]) < 1e-12 * self.poly.scale():
                continue
            roots = companion_roots(coeffs)
            t = roots[rng.integers(len(roots))]
            for _ in range(5):
                z = a + t * b
                val, grad = self.poly.value_and_gradient(z)
                slope = grad @ b
                if slope == 0:
                    break
                t = t - val / slope
            z = a + t * b
            z = z / np.linalg.norm(z)
            if abs(self.poly(z)) / self.poly.scale() > tol.sample_residual:
                continue
            if self.scaled_gradient_norm(z) <= tol.smooth_gradient:
                continue
            return ProjectivePoint(z)
        raise SingularPointError(
            f"no smooth point found on {self.name} after {tol.max_resample} attempts"
        )

    def local_parametrization(self, p):
        nu = self.unit_normal(p)
        T = _complex_basis_orthogonal_to(np.stack([p.rep, nu]), self.n + 1)
        k = self.k
        slope = complex(self.poly.gradient(p.rep) @ nu)
        poly = self.poly

        def phi(s):
            sc = s[..., :k] + s[..., k:] * 1j
            base = hd.matvec(T, sc) + p.rep
            y = hd.HyperDual(np.zeros(base.a.shape[:-1]))
            # Chord iteration; its contraction factor vanishes at s = 0.
            for _ in range(8):
                q = base + hd.outer_scale(y, nu)
                y = y - poly.evaluate_generic(list(q)) / slope
            return base + hd.outer_scale(y, nu)

        return phi


# -- rational curves ----------------------------------------------------------

class _ZeroForm:
    """A vanishing component; HomogeneousPolynomial cannot be zero."""

    n = 1

    def __init__(self, d):
        self.d = d

    def __call__(self, x):
        return np.zeros(np.asarray(x).shape[:-1], dtype=complex)

    def gradient(self, x):
        return np.zeros(np.asarray(x).shape, dtype=complex)

    def evaluate_generic(self, x):
        return 0.0 * x[0]

    def scale(self):
        return 0.0

    @property
    def terms(self):
        return []

    def to_document(self):
        return {"n": 1, "d": self.d, "terms": []}


class RationalCurve(EmbeddedSubmanifold):
    """Gamma: CP^1 -> CP^n given by n+1 binary forms of a common degree."""

    def __init__(self, components: list, name: str | None = None):
        if len(components) < 2:
            raise ValueError("a curve needs at least two components")
        degs = {c.d for c in components}
        if len(degs) != 1:
            raise ValueError("all components must share one degree")
        if any(c.n != 1 for c in components):
            raise ValueError("components must be binary forms (n = 1)")
        if all(isinstance(c, _ZeroForm) for c in components):
            raise ValueError("all components vanish")
        self.components = list(components)
        self.n = len(components) - 1
        self.k = 1
        self.d = degs.pop()
        self.name = name or f"rational curve(n={self.n}, d={self.d})"
        self._params: dict[bytes, np.ndarray] = {}
        bad = self.base_points()
        if bad:
            raise ValueError(f"components share a zero on CP^1: {bad}")

    @classmethod
    def from_coefficients(cls, coeff_rows, name=None):
        """Row r lists the coefficients of x^{d-j} y^j (j = 0..d) of component r."""
        d = len(coeff_rows[0]) - 1
        comps = []
        for row in coeff_rows:
            if len(row) != d + 1:
                raise ValueError("all rows need d+1 coefficients")
            pairs = [(c, [d - j, j]) for j, c in enumerate(row) if c != 0]
            if pairs:
                comps.append(HomogeneousPolynomial(1, d, [c for c, _ in pairs], [e for _, e in pairs]))
            else:
                comps.append(_ZeroForm(d))
        return cls(comps, name)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return np.stack([c(x) for c in self.components], axis=-1)

    def derivative(self, x, direction):
        x = np.asarray(x, dtype=complex)
        return np.stack([c.gradient(x) @ direction for c in self.components], axis=-1)

    def base_points(self) -> list:
        """Common zeros of all components on CP^1."""
        coeffs = np.zeros((len(self.components), self.d + 1), dtype=complex)
        for r, c in enumerate(self.components):
            for cf, e in c.terms:
                coeffs[r, e[1]] += cf  # coefficient of t^{e1} in c(1, t)
        ref = next(r for r in range(len(coeffs)) if np.any(coeffs[r] != 0))
        row = np.trim_zeros(coeffs[ref], "b")
        cands = []
        if len(row) > 1:
            cands += [np.array([1.0, t]) for t in companion_roots(row)]
        if len(row) - 1 < self.d:
            cands.append(np.array([0.0, 1.0]))  # root at t = infinity
        scale = max(c.scale() for c in self.components)
        found = []
        for x in cands:
            x = x / np.linalg.norm(x)
            if np.linalg.norm(self(x)) < 1e-9 * scale:
                found.append(x)
        return found

    def residual(self, p):
        return 0.0 if self.parameter_of(p) is not None else float("inf")

    def sample_parameter(self, rng):
        return _unit_rng_complex(rng, 2)

    def sample_point(self, rng, tol: Tolerances = DEFAULT):
        for _ in range(tol.max_resample):
            x = self.sample_parameter(rng)
            z = self(x)
            if np.linalg.norm(z) > 1e-8:
                point = ProjectivePoint(z)
                self._params[point.rep.tobytes()] = x
                return point
        raise SingularPointError("curve evaluated to zero at every sampled parameter")

    def parameter_of(self, p: ProjectivePoint, tol: float = 1e-8):
        """A parameter x with Gamma(x) ~ p, or None when p is off the curve.

        Candidates are the roots of the binary forms p_i Gamma_j - p_j Gamma_i
        for the largest coordinate i of p.
        """
        key = p.rep.tobytes()
        if key in self._params:
            return self._params[key]
        i = int(np.argmax(np.abs(p.rep)))
        cands = []
        for j in range(self.n + 1):
            if j == i:
                continue
            row = np.zeros(self.d + 1, dtype=complex)
            for cf, e in self.components[j].terms:
                row[e[1]] += p.rep[i] * cf
            for cf, e in self.components[i].terms:
                row[e[1]] -= p.rep[j] * cf
            if np.max(np.abs(row)) < 1e-12:
                continue
            top = np.nonzero(np.abs(row) > 1e-14 * np.max(np.abs(row)))[0][-1]
            if top > 0:
                cands += [np.array([1.0, t]) for t in companion_roots(row[: top + 1])]
            if top < self.d:
                cands.append(np.array([0.0, 1.0]))
            break
        else:
            cands = [np.array(x0) for x0 in ([1.0, 0.0], [0.0, 1.0])]
        best, best_gap = None, np.inf
        for x in cands:
            x = self._polish_parameter(x / np.linalg.norm(x), p)
            z = self(x)
            norm = np.linalg.norm(z)
            if norm == 0:
                continue
            gap = 1.0 - abs(np.vdot(p.rep, z)) / norm
            if gap < best_gap:
                best, best_gap = x, gap
        if best is None or best_gap > tol:
            return None
        return best

    def _polish_parameter(self, x, p):
        # Gauss-Newton on the affine parameter, driving the chart offset w to zero.
        big = 0 if abs(x[0]) >= abs(x[1]) else 1
        t = x[1 - big] / x[big]
        e = np.array([0.0, 1.0]) if big == 0 else np.array([1.0, 0.0])
        for _ in range(30):
            xx = np.array([1.0, t]) if big == 0 else np.array([t, 1.0])
            z = self(xx)
            dz = self.derivative(xx, e)
            lam = np.vdot(p.rep, z)
            w = z / lam - p.rep
            dw = (dz * lam - z * np.vdot(p.rep, dz)) / lam**2
            denom = np.vdot(dw, dw).real
            if lam == 0 or denom == 0:
                break
            step = np.vdot(dw, w) / denom
            t = t - step
            if abs(step) < 1e-15 * max(1.0, abs(t)):
                break
        xx = np.array([1.0, t]) if big == 0 else np.array([t, 1.0])
        return xx / np.linalg.norm(xx)

    def local_parametrization(self, p, x0=None):
        if x0 is None:
            x0 = self.parameter_of(p)
            if x0 is None:
                raise SubmanifoldError("point is not on the curve")
        z0 = self(x0)
        overlap = np.vdot(z0, p.rep)
        scale = overlap / abs(overlap) / np.linalg.norm(z0)
        v0 = np.array([-np.conj(x0[1]), np.conj(x0[0])])
        comps = self.components

        def phi(s):
            sc = s.entry(0) + s.entry(1) * 1j
            x = [sc * v0[0] + x0[0], sc * v0[1] + x0[1]]
            return hd.stack([c.evaluate_generic(x) * scale for c in comps])

        return phi

    def reparametrize(self, A) -> "RationalCurve":
        """Gamma o A for an invertible 2x2 complex matrix A."""
        A = np.asarray(A, dtype=complex)
        if abs(np.linalg.det(A)) < 1e-12:
            raise ValueError("Moebius matrix must be invertible")
        d = self.d
        nodes = np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
        xs = np.stack([np.ones_like(nodes), nodes], axis=-1) @ A.T
        rows = []
        for c in self.components:
            coeffs = np.fft.fft(c(xs)) / (d + 1)
            rows.append([complex(v) if abs(v) > 1e-14 else 0.0 for v in coeffs])
        return RationalCurve.from_coefficients(rows, name=self.name + " (reparametrized)")

    def to_document(self) -> dict:
        return {"n": self.n, "d": self.d, "components": [c.to_document()["terms"] for c in self.components]}

    def describe(self):
        return {**super().describe(), "d": self.d}

    @classmethod
    def rational_normal(cls, d: int) -> "RationalCurve":
        rows = []
        for j in range(d + 1):
            row = [0.0] * (d + 1)
            row[j] = float(np.sqrt(comb(d, j)))
            rows.append(row)
        return cls.from_coefficients(rows, name=f"rational normal curve(d={d})")

    @classmethod
    def line(cls, n: int) -> "RationalCurve":
        rows = [[1.0, 0.0], [0.0, 1.0]] + [[0.0, 0.0]] * (n - 1)
        return cls.from_coefficients(rows, name=f"line in CP^{n}")

    @classmethod
    def quadric_ruling(cls) -> "RationalCurve":
        """The line (s, i s, t, i t) on z0^2 + z1^2 + z2^2 + z3^2 = 0."""
        return cls.from_coefficients([[1.0, 0.0], [1j, 0.0], [0.0, 1.0], [0.0, 1j]], name="ruling of Q^2")

    @classmethod
    def quadric_conic(cls) -> "RationalCurve":
        """The plane section z3 = 0 of Q^2: (x^2 - y^2, i(x^2 + y^2), 2xy, 0)."""
        return cls.from_coefficients(
            [[1.0, 0.0, -1.0], [1j, 0.0, 1j], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]],
            name="conic on Q^2",
        )


# -- linear subspaces and Segre -------------------------------------------

class ProjectiveSubspace(EmbeddedSubmanifold):
    """Totally geodesic CP^k spanned by the columns of ``basis``."""

    def __init__(self, n: int, k: int, basis=None):
        if not 0 <= k < n:
            raise ValueError("need 0 <= k < n")
        self.n, self.k = n, k
        if basis is None:
            basis = np.eye(n + 1, k + 1, dtype=complex)
        q, _ = np.linalg.qr(np.asarray(basis, dtype=complex))
        self.basis = q[:, : k + 1]
        self.name = f"linear CP^{k} in CP^{n}"

    def residual(self, p):
        return float(np.linalg.norm(p.rep - self.basis @ (self.basis.conj().T @ p.rep)))

    def sample_point(self, rng, tol: Tolerances = DEFAULT):
        c = rng.standard_normal(self.k + 1) + 1j * rng.standard_normal(self.k + 1)
        return ProjectivePoint(self.basis @ c)

    def distance(self, reps):
        """Closed-form distance from unit representatives (rows) to the subspace."""
        proj = np.linalg.norm(np.asarray(reps) @ self.basis.conj(), axis=-1)
        return np.arccos(np.clip(proj, 0.0, 1.0))

    def local_parametrization(self, p):
        if self.residual(p) > DEFAULT.on_variety:
            raise SubmanifoldError("point is not on the subspace")
        # tangent directions: the part of the subspace orthogonal to p
        T = self.basis - np.outer(p.rep, p.rep.conj() @ self.basis)
        T = np.linalg.qr(T)[0][:, : self.k]
        k = self.k

        def phi(s):
            sc = s[..., :k] + s[..., k:] * 1j
            return hd.matvec(T, sc) + p.rep

        return phi

    def hyperplane_polynomial(self) -> HomogeneousPolynomial | None:
        if self.k != self.n - 1:
            return None
        normal = _complex_basis_orthogonal_to(self.basis.T, self.n + 1)[:, 0]
        from .polynomial import linear_form

        return linear_form(np.conj(normal))


class SegreModel(EmbeddedSubmanifold):
    """Segre embedding CP^1 x CP^k -> CP^{2k+1}, (x, y) -> x (x) y."""

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.seg_k = k
        self.n = 2 * k + 1
        self.k = k + 1
        self.name = f"Segre CP^1 x CP^{k}"

    def _factor(self, p):
        M = p.rep.reshape(2, self.seg_k + 1)
        U, S, Vh = np.linalg.svd(M)
        return U[:, 0] * S[0], Vh[0], S

    def residual(self, p):
        _, _, S = self._factor(p)
        return float(S[1] / S[0]) if len(S) > 1 else 0.0

    def sample_point(self, rng, tol: Tolerances = DEFAULT):
        x = _unit_rng_complex(rng, 2)
        y = _unit_rng_complex(rng, self.seg_k + 1)
        return ProjectivePoint(np.kron(x, y))

    def local_parametrization(self, p):
        if self.residual(p) > DEFAULT.on_variety:
            raise SubmanifoldError("point is not on the Segre variety")
        x0, y0, _ = self._factor(p)
        v = np.array([-np.conj(x0[1]), np.conj(x0[0])])
        W = _complex_basis_orthogonal_to(y0[None, :], self.seg_k + 1)
        kk = self.seg_k

        def phi(s):
            half = self.k
            sc = s[..., :half] + s[..., half:] * 1j
            t = sc.entry(0)
            x = [t * v[0] + x0[0], t * v[1] + x0[1]]
            y = hd.matvec(W, sc[..., 1:]) + y0
            return hd.stack([xi * y.entry(j) for xi in x for j in range(kk + 1)])

        return phi


def model(tag: str, n: int | None = None, k: int | None = None, d: int | None = None) -> EmbeddedSubmanifold:
    """Built-in models: linear, quadric, fermat, hypersurface, segre, rational-normal, ruling, conic, point."""
    tag = tag.lower()
    if tag == "linear":
        if n is None:
            raise ValueError("linear model needs n")
        return ProjectiveSubspace(n, n - 1 if k is None else k)
    if tag == "point":
        return ProjectiveSubspace(1 if n is None else n, 0)
    if tag == "quadric":
        if n is None:
            raise ValueError("quadric needs n")
        return Hypersurface(fermat(n, 2), name=f"quadric Q^{n - 1}")
    if tag in {"fermat", "hypersurface"} or tag.startswith("fermat-"):
        if tag.startswith("fermat-"):
            d = int(tag.split("-", 1)[1])
        if n is None or d is None:
            raise ValueError("fermat model needs n and d")
        return Hypersurface(fermat(n, d), name=f"Fermat hypersurface(n={n}, d={d})")
    if tag == "segre" or tag.startswith("segre-"):
        if tag.startswith("segre-"):
            k = int(tag.split("-", 1)[1])
        return SegreModel(1 if k is None else k)
    if tag == "rational-normal" or tag.startswith("rational-normal-"):
        if tag.startswith("rational-normal-"):
            d = int(tag.rsplit("-", 1)[1])
        if d is None:
            raise ValueError("rational normal curve needs d")
        return RationalCurve.rational_normal(d)
    if tag == "ruling":
        return RationalCurve.quadric_ruling()
    if tag == "conic":
        return RationalCurve.quadric_conic()
    raise ValueError(f"unknown model tag {tag!r}")


def parse_curve(doc: dict) -> RationalCurve:
    """Curve document: {n, d, components: [terms, ...]} with binary-form terms."""
    for key in ("n", "d", "components"):
        if key not in doc:
            raise PolynomialFormatError(f"missing field '{key}'", "curve")
    comps_doc = doc["components"]
    n, d = doc["n"], doc["d"]
    if not isinstance(comps_doc, list) or len(comps_doc) != n + 1:
        raise PolynomialFormatError(f"expected {n + 1} components", "components")
    comps = []
    for i, terms in enumerate(comps_doc):
        if terms == []:
            comps.append(_ZeroForm(d))
            continue
        comps.append(parse_polynomial({"n": 1, "d": d, "terms": terms}, where=f"components[{i}]"))
    try:
        return RationalCurve(comps)
    except ValueError as exc:
        raise PolynomialFormatError(str(exc), "components") from None


# -- frames and second fundamental form -----------------------------------

@dataclass(frozen=True)
class SubmanifoldFrame:
    point: ProjectivePoint
    tangent: np.ndarray  # (2k, n+1) real-orthonormal horizontal vectors
    normal: np.ndarray  # (2(n-k), n+1)
    complex_defect: float

    def check(self, tol: float = 1e-10) -> None:
        allv = np.concatenate([self.tangent, self.normal])
        gram = np.real(allv.conj() @ allv.T)
        if np.max(np.abs(gram - np.eye(len(allv)))) > tol:
            raise SubmanifoldError("frame is not orthonormal")
        if np.max(np.abs(allv @ self.point.rep.conj()), initial=0.0) > tol:
            raise SubmanifoldError("frame is not horizontal")


@dataclass(frozen=True)
class LocalGeometry:
    """Frame plus the normal-valued second fundamental form at a point."""

    frame: SubmanifoldFrame
    sff: np.ndarray  # (2k, 2k, n+1): sigma(E_a, E_b) in the orthonormal tangent frame
    asymmetry: float
    method: str

    def shape_operator(self, xi) -> np.ndarray:
        xi = np.asarray(xi.vec if isinstance(xi, TangentVector) else xi, dtype=complex)
        if self.frame.tangent.size:
            leak = np.max(np.abs(np.real(self.frame.tangent.conj() @ xi)))
            if leak > 1e-8:
                raise SubmanifoldError(f"xi is not normal (tangential component {leak:.2e})")
        if abs(np.linalg.norm(xi) - 1.0) > 1e-8:
            raise SubmanifoldError("xi must be a unit normal")
        A = np.real(np.sum(self.sff * np.conj(xi), axis=-1))
        return 0.5 * (A + A.T)

    def principal_curvatures(self, xi) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.shape_operator(xi)))


def _chart(phi, p):
    pc = np.conj(p.rep)

    def w(s):
        q = phi(s)
        lam = sum((q.entry(i) * pc[i] for i in range(len(pc))), start=hd.HyperDual(0.0))
        return q / hd.stack([lam] * len(pc)) - p.rep

    return w


def local_geometry(X: EmbeddedSubmanifold, p: ProjectivePoint, method: str = "hyperdual", h: float | None = None) -> LocalGeometry:
    phi = X.local_parametrization(p)
    w = _chart(phi, p)
    m2 = 2 * X.k
    zero = np.zeros(m2)
    if method == "hyperdual":
        first = np.zeros((m2, X.n + 1), dtype=complex)
        second = np.zeros((m2, m2, X.n + 1), dtype=complex)
        if m2:
            pairs = [(a, b) for a in range(m2) for b in range(m2)]
            out = w(hd.seed_pairs(zero, pairs))
            for row, (a, b) in enumerate(pairs):
                if a == b:
                    first[a] = out.b[row]
                second[a, b] = out.d[row]
    elif method == "fd":
        first, second = _fd_derivatives(w, m2, X.n + 1, h or DEFAULT.fd_step)
    else:
        raise ValueError(f"unknown differentiation method {method!r}")
    return _assemble(X, p, first, second, method)


def _eval_plain(w, s):
    return w(hd.HyperDual(np.asarray(s, dtype=complex)[None, :])).a[0]


def _fd_derivatives(w, m2, dim, h):
    def at(s):
        return _eval_plain(w, s)

    def first_h(a, step):
        e = np.zeros(m2)
        e[a] = step
        return (at(e) - at(-e)) / (2 * step)

    def second_h(a, b, step):
        ea = np.zeros(m2)
        eb = np.zeros(m2)
        ea[a] = step
        eb[b] = step
        if a == b:
            return (at(ea) - 2 * at(np.zeros(m2)) + at(-ea)) / step**2
        return (at(ea + eb) - at(ea - eb) - at(eb - ea) + at(-ea - eb)) / (4 * step**2)

    first = np.zeros((m2, dim), dtype=complex)
    second = np.zeros((m2, m2, dim), dtype=complex)
    for a in range(m2):
        first[a] = (4 * first_h(a, h / 2) - first_h(a, h)) / 3
        for b in range(m2):
            second[a, b] = (4 * second_h(a, b, h / 2) - second_h(a, b, h)) / 3
    return first, second


def _assemble(X, p, first, second, method):
    dim = X.n + 1
    k = X.k
    if k:
        Tc, _ = np.linalg.qr(first[:k].T)
        Tc = Tc[:, :k]
    else:
        Tc = np.zeros((dim, 0), dtype=complex)
    tangent = np.concatenate([Tc.T, 1j * Tc.T]) if k else np.zeros((0, dim), dtype=complex)
    Nc = _complex_basis_orthogonal_to(np.concatenate([p.rep[None, :], Tc.T]), dim)
    normal = np.concatenate([Nc.T, 1j * Nc.T])

    if k:
        # J-invariance of the real span of the parameter derivatives
        R = _realify(first)
        Jr = _realify(1j * first)
        coef, *_ = np.linalg.lstsq(R.T, Jr.T, rcond=None)
        defect = float(np.max(np.linalg.norm(Jr.T - R.T @ coef, axis=0)) / np.max(np.linalg.norm(R, axis=1)))
        # coordinates of parameter derivatives in the orthonormal real frame
        M = np.real(first.conj() @ tangent.T)  # M[a, i] = <t_a, E_i>
        Minv = np.linalg.inv(M)
        sec_n = second - (second @ Tc.conj()) @ Tc.T  # remove tangential part
        sec_n = sec_n - (sec_n @ p.rep.conj())[..., None] * p.rep
        sff = np.einsum("ai,bj,abm->ijm", Minv, Minv, sec_n)
        asym = float(np.max(np.abs(sff - np.swapaxes(sff, 0, 1))))
    else:
        defect = 0.0
        sff = np.zeros((0, 0, dim), dtype=complex)
        asym = 0.0
    frame = SubmanifoldFrame(p, tangent, normal, defect)
    return LocalGeometry(frame, sff, asym, method)


def _realify(v):
    return np.concatenate([v.real, v.imag], axis=-1)


def tangent_normal_frame(X: EmbeddedSubmanifold, p: ProjectivePoint) -> SubmanifoldFrame:
    geo = local_geometry(X, p)
    geo.frame.check()
    if geo.frame.complex_defect > DEFAULT.complex_frame:
        raise SubmanifoldError(f"tangent space is not J-invariant (defect {geo.frame.complex_defect:.2e})")
    return geo.frame


def shape_operator(X: EmbeddedSubmanifold, p: ProjectivePoint, xi, method: str = "hyperdual") -> np.ndarray:
    return local_geometry(X, p, method=method).shape_operator(xi)


def sample_point(X: EmbeddedSubmanifold, rng, tol: Tolerances = DEFAULT) -> ProjectivePoint:
    return X.sample_point(rng, tol)


def random_unit_normal(frame: SubmanifoldFrame, rng) -> np.ndarray:
    c = rng.standard_normal(len(frame.normal))
    v = c @ frame.normal
    return v / np.linalg.norm(v)


def curvature_adapted_defect(geo: LocalGeometry, xi) -> float:
    """Norm of [K_xi restricted to T_pX, A_xi], plus any leakage of K_xi(T_pX) out of T_pX."""
    xi = np.asarray(xi, dtype=complex)
    E = geo.frame.tangent
    if not len(E):
        return 0.0
    KE = np.stack([curvature_tensor(e, xi, xi) for e in E])
    K = np.real(KE @ E.conj().T).T  # K[i, j] = <K(E_j), E_i>
    leak = np.linalg.norm(KE - (np.real(KE @ E.conj().T)) @ E)
    A = geo.shape_operator(xi)
    return float(np.linalg.norm(K @ A - A @ K) + leak)


# -- area of rational curves ------------------------------------------------

@dataclass(frozen=True)
class CurveVolume:
    volume: float
    error: float
    ratio_to_line: float  # Vol / pi
    ratio_to_2pi: float  # Vol / (2 pi)


def _area_density(curve: RationalCurve, x, dx):
    z = curve(x)
    dz = curve.derivative(x, dx)
    nz = np.sum(np.abs(z) ** 2, axis=-1)
    ndz = np.sum(np.abs(dz) ** 2, axis=-1)
    cross = np.abs(np.sum(dz * np.conj(z), axis=-1)) ** 2
    return (nz * ndz - cross) / nz**2


def curve_volume(curve: RationalCurve, rtol: float = 1e-12) -> CurveVolume:
    """Area of Gamma(CP^1), integrating the pulled-back metric over two unit disks."""

    def ring(rho, chart):
        m = 32
        prev = None
        while True:
            ang = 2 * pi * np.arange(m) / m
            t = rho * np.exp(1j * ang)
            if chart == 0:
                x = np.stack([np.ones_like(t), t], axis=-1)
                dx = np.array([0.0, 1.0])
            else:
                x = np.stack([t, np.ones_like(t)], axis=-1)
                dx = np.array([1.0, 0.0])
            val = 2 * pi * np.mean(_area_density(curve, x, dx)) * rho
            if prev is not None and abs(val - prev) <= 1e-14 * max(1.0, abs(val)):
                return val
            if m > 1 << 16:
                raise SubmanifoldError("angular quadrature did not converge")
            prev, m = val, 2 * m

    total, err = 0.0, 0.0
    for chart in (0, 1):
        val, e = integrate.quad(ring, 0.0, 1.0, args=(chart,), epsabs=1e-13, epsrel=rtol, limit=200)
        total += val
        err += e
    if err > 1e-8 * max(1.0, total):
        raise SubmanifoldError(f"area quadrature did not converge (error {err:.2e})")
    return CurveVolume(total, err, total / pi, total / (2 * pi))
