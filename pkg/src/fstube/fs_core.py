"""Fubini-Study geometry of CP^n, holomorphic sectional curvature 4.

Points are unit representatives in C^{n+1}; tangent vectors are horizontal
lifts (Hermitian-orthogonal to the representative).  With this convention the
diameter is pi/2, Vol(CP^n) = pi^n / n!, and the real metric on horizontal
vectors is Re<v, w>.

Hermitian products are linear in the first slot: herm(a, b) = sum a_i conj(b_i).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi

import numpy as np

from .config import DEFAULT

__all__ = [
    "ProjectivePoint",
    "TangentVector",
    "herm",
    "real_inner",
    "horizontal_projection",
    "fs_distance",
    "geodesic",
    "curvature_tensor",
    "curvature_operator",
    "parallel_transport",
    "uniform_sample",
    "uniform_sample_batch",
    "projective_volume",
    "random_tangent",
]


def herm(a, b):
    """Hermitian product, linear in ``a``; broadcasts over leading axes."""
    return np.sum(np.asarray(a) * np.conj(b), axis=-1)


def real_inner(a, b):
    return np.real(herm(a, b))


def horizontal_projection(v, p):
    """Remove the complex component of ``v`` along the unit vector ``p``."""
    v = np.asarray(v, dtype=complex)
    return v - herm(v, p)[..., None] * p


def projective_volume(n: int) -> float:
    """Total volume of CP^n."""
    return pi**n / factorial(n)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    rep: np.ndarray

    def __post_init__(self):
        rep = np.array(self.rep, dtype=complex).reshape(-1)
        if rep.size < 2:
            raise ValueError("a point of CP^n needs at least two coordinates")
        norm = np.linalg.norm(rep)
        if norm == 0.0:
            raise ValueError("the zero vector does not represent a point")
        rep = rep / norm
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    @property
    def n(self) -> int:
        return self.rep.size - 1

    @classmethod
    def basis(cls, n: int, i: int) -> "ProjectivePoint":
        e = np.zeros(n + 1, dtype=complex)
        e[i] = 1.0
        return cls(e)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if other.n != self.n:
            return False
        overlap = abs(np.vdot(other.rep, self.rep))
        return abs(overlap - 1.0) <= DEFAULT.point_equality

    def __hash__(self):  # pragma: no cover - equality is tolerance based
        raise TypeError("ProjectivePoint is not hashable")


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: ProjectivePoint
    vec: np.ndarray

    def __post_init__(self):
        vec = np.array(self.vec, dtype=complex).reshape(-1)
        if vec.size != self.base.rep.size:
            raise ValueError("tangent vector and base point have different dimensions")
        scale = max(1.0, float(np.linalg.norm(vec)))
        if abs(np.vdot(self.base.rep, vec)) > 1e3 * DEFAULT.horizontal * scale:
            raise ValueError("tangent vector is not horizontal at its base point")
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)

    @classmethod
    def project(cls, base: ProjectivePoint, vec) -> "TangentVector":
        """Horizontal part of an arbitrary ambient vector."""
        return cls(base, horizontal_projection(vec, base.rep))

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def inner(self, other: "TangentVector") -> float:
        _check_same_base(self, other)
        return float(np.real(np.vdot(other.vec, self.vec)))

    def J(self) -> "TangentVector":
        return TangentVector(self.base, 1j * self.vec)

    def __add__(self, other):
        _check_same_base(self, other)
        return TangentVector(self.base, self.vec + other.vec)

    def __sub__(self, other):
        _check_same_base(self, other)
        return TangentVector(self.base, self.vec - other.vec)

    def __mul__(self, scalar):
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise TypeError("tangent vectors scale by reals; use J() for i")
        return TangentVector(self.base, float(np.real(scalar)) * self.vec)

    __rmul__ = __mul__

    def __neg__(self):
        return TangentVector(self.base, -self.vec)


def _check_same_base(a: TangentVector, b: TangentVector) -> None:
    if a.base.n != b.base.n:
        raise ValueError("dimension mismatch")
    # Bases must coincide as representatives, not merely as points: the
    # horizontal lift depends on the phase of the representative.
    if not np.allclose(a.base.rep, b.base.rep, atol=1e-12, rtol=0.0):
        raise ValueError("tangent vectors live at different base points")


def fs_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: CP^{p.n} vs CP^{q.n}")
    overlap = abs(np.vdot(q.rep, p.rep))
    return float(np.arccos(min(max(overlap, 0.0), 1.0)))


def _require_unit(v: TangentVector, what: str = "tangent vector") -> None:
    if abs(v.norm() - 1.0) > 1e-10:
        raise ValueError(f"{what} must have unit length, got {v.norm():.3e}")


def geodesic(p: ProjectivePoint, v: TangentVector, t: float) -> ProjectivePoint:
    """Point at arc length ``t`` along the geodesic with initial velocity ``v``."""
    _require_unit(v)
    if v.base.n != p.n:
        raise ValueError("dimension mismatch")
    return ProjectivePoint(np.cos(t) * p.rep + np.sin(t) * v.vec)


def geodesic_velocity(p: ProjectivePoint, v: TangentVector, t: float) -> TangentVector:
    """Velocity of :func:`geodesic` at ``t``, lifted horizontally at the returned point."""
    q = ProjectivePoint(np.cos(t) * p.rep + np.sin(t) * v.vec)
    return TangentVector(q, -np.sin(t) * p.rep + np.cos(t) * v.vec)


def curvature_tensor(X, Y, Z):
    """R(X, Y)Z on horizontal lifts at a common base point.

    Sign convention: sectional curvature K(X, Y) = <R(X, Y)Y, X> for an
    orthonormal pair, so K(X, JX) = 4 and K = 1 on totally real planes.
    """
    X, Y, Z = (np.asarray(a, dtype=complex) for a in (X, Y, Z))
    JX, JY, JZ = 1j * X, 1j * Y, 1j * Z
    return (
        real_inner(Y, Z) * X
        - real_inner(X, Z) * Y
        + real_inner(JY, Z) * JX
        - real_inner(JX, Z) * JY
        + 2.0 * real_inner(X, JY) * JZ
    )


def curvature_operator(xi: TangentVector, X: TangentVector) -> TangentVector:
    """Normal Jacobi operator K_xi(X) = R(X, xi)xi."""
    _check_same_base(xi, X)
    _require_unit(xi, "xi")
    return TangentVector(xi.base, curvature_tensor(X.vec, xi.vec, xi.vec))


def parallel_transport(
    v: TangentVector, p: ProjectivePoint, u: TangentVector, t: float
) -> TangentVector:
    """Transport ``v`` from ``p`` along the geodesic with unit velocity ``u`` for time ``t``.

    The component of ``v`` complex-parallel to ``u`` follows the velocity; the
    part orthogonal to span_C(p, u) is constant in the horizontal lift.
    """
    _require_unit(u)
    _check_same_base(v, u)
    coeff = np.vdot(u.vec, v.vec)
    rest = v.vec - coeff * u.vec
    q = ProjectivePoint(np.cos(t) * p.rep + np.sin(t) * u.vec)
    velocity = -np.sin(t) * p.rep + np.cos(t) * u.vec
    return TangentVector(q, coeff * velocity + rest)


def uniform_sample(n: int, rng: np.random.Generator) -> ProjectivePoint:
    """Unitarily invariant random point of CP^n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return ProjectivePoint(z)


def uniform_sample_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` unit representatives as rows of a complex array."""
    if n < 1:
        raise ValueError("n must be at least 1")
    z = rng.standard_normal((count, n + 1)) + 1j * rng.standard_normal((count, n + 1))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def random_tangent(p: ProjectivePoint, rng: np.random.Generator, unit: bool = True) -> TangentVector:
    z = rng.standard_normal(p.n + 1) + 1j * rng.standard_normal(p.n + 1)
    v = horizontal_projection(z, p.rep)
    if unit:
        v = v / np.linalg.norm(v)
    return TangentVector(p, v)
