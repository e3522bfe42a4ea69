"""Tube volumes in CP^n: Gray's formula, its specializations, and a Monte Carlo oracle.

Exact arithmetic is used wherever the data allow it.  A volume polynomial is
stored as rational coefficients of powers of s = sin^2 r times a power of pi,
so two normalizations of the same formula can be compared symbolically before
any floating point evaluation.
"""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, factorial, pi
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .fs_core import ProjectivePoint, projective_volume, uniform_sample_batch
from .polynomial import companion_roots
from .submanifold import (
    EmbeddedSubmanifold,
    Hypersurface,
    ProjectiveSubspace,
    RationalCurve,
    SegreModel,
)

__all__ = [
    "ChernIntegrals",
    "SPolynomial",
    "TubeSpec",
    "VolumeReport",
    "TubeVolumeError",
    "DistanceSolverError",
    "gray_polynomial",
    "gray_tube_volume_general",
    "hypersurface_polynomial",
    "tube_volume_hypersurface",
    "tube_volume_curve",
    "ball_volume",
    "distance_to_submanifold",
    "distances",
    "mc_tube_volume",
    "sample_distances",
    "DistanceSample",
    "VariantArbitration",
    "arbitrate_variant",
    "VARIANTS",
]

VARIANTS = ("as-printed", "corrected")


class TubeVolumeError(RuntimeError):
    pass


class DistanceSolverError(TubeVolumeError):
    pass


# -- exact polynomials in s = sin^2 r -------------------------------------------

def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _ppow(a, k):
    out = [Fraction(1)]
    for _ in range(k):
        out = _pmul(out, a)
    return out


def _padd(a, b):
    m = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (m - len(a))
    b = list(b) + [Fraction(0)] * (m - len(b))
    return [x + y for x, y in zip(a, b)]


def _ptrim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


@dataclass(frozen=True)
class SPolynomial:
    """``coeff_scale * pi**pi_power * sum_i coeffs[i] s**i`` with s = sin^2 r.

    ``coeffs`` are exact rationals; ``coeff_scale`` carries any floating factor
    (a numerically measured curve volume, say) and is 1 for exact data.
    """

    coeffs: tuple
    pi_power: int
    coeff_scale: float = 1.0

    def __call__(self, r) -> float | np.ndarray:
        s = np.sin(np.asarray(r, dtype=float)) ** 2
        acc = np.zeros_like(s)
        for c in reversed(self.coeffs):
            acc = acc * s + float(c)
        return self.coeff_scale * pi**self.pi_power * acc

    def is_exact(self) -> bool:
        return self.coeff_scale == 1.0

    def same_as(self, other: "SPolynomial") -> bool:
        """Exact equality of the two polynomials (both must be exact)."""
        if not (self.is_exact() and other.is_exact()):
            raise ValueError("symbolic comparison needs exact data")
        return self.pi_power == other.pi_power and _ptrim(self.coeffs) == _ptrim(other.coeffs)

    def __str__(self):
        terms = [f"{c}*s^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"pi^{self.pi_power} * (" + " + ".join(terms or ["0"]) + ")"


# -- Chern data ----------------------------------------------------------------

@dataclass(frozen=True)
class ChernIntegrals:
    """Mixed integrals I(j, k-j) = int_X e_j(x) F^{k-j}, stored as coeff * pi**power.

    F is the Kahler form (int over a line of F is pi) and e_j the j-th
    elementary symmetric function of the Chern roots of TX.  ``table[j]``
    holds (coeff, power); coeff is a Fraction for exact data or a float.
    """

    k: int
    table: dict
    label: str = "user"

    def __post_init__(self):
        if set(self.table) != set(range(self.k + 1)):
            missing = sorted(set(range(self.k + 1)) - set(self.table))
            extra = sorted(set(self.table) - set(range(self.k + 1)))
            raise ValueError(f"Chern table must cover j = 0..{self.k}; missing {missing}, unexpected {extra}")
        c0, _ = self.table[0]
        if not float(c0) > 0:
            raise ValueError("I(0, k) must be positive (it is k! Vol(X))")

    def value(self, j: int) -> float:
        c, p = self.table[j]
        return float(c) * pi**p

    @classmethod
    def point(cls) -> "ChernIntegrals":
        return cls(0, {0: (Fraction(1), 0)}, "point")

    @classmethod
    def linear(cls, k: int) -> "ChernIntegrals":
        """CP^k: c(TX) = (1 + h)^{k+1}, int h^k = 1, F restricts to pi h."""
        return cls(k, {j: (Fraction(comb(k + 1, j)), k - j) for j in range(k + 1)}, f"linear CP^{k}")

    @classmethod
    def hypersurface(cls, n: int, d: int) -> "ChernIntegrals":
        """Degree-d hypersurface: c(TX) = (1+h)^{n+1} / (1+dh), int h^{n-1} = d."""
        k = n - 1
        num = [Fraction(comb(n + 1, i)) for i in range(n + 2)]
        inv = [Fraction((-d) ** i) for i in range(k + 1)]
        c = _pmul(num, inv)
        return cls(k, {j: (d * c[j], k - j) for j in range(k + 1)}, f"hypersurface(n={n}, d={d})")

    @classmethod
    def curve(cls, degree: int | None = None, volume: float | None = None) -> "ChernIntegrals":
        """Smooth rational curve: int F = Vol = pi * degree, int c_1 = 2."""
        if (degree is None) == (volume is None):
            raise ValueError("give exactly one of degree and volume")
        if degree is not None:
            if degree < 1:
                raise ValueError("degree must be positive")
            entry = (Fraction(degree), 1)
        else:
            if volume <= 0:
                raise ValueError("volume must be positive")
            entry = (float(volume), 0)
        return cls(1, {0: entry, 1: (Fraction(2), 0)}, "rational curve")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "label": self.label,
            "table": {str(j): [str(c), p] for j, (c, p) in self.table.items()},
        }


@dataclass(frozen=True)
class TubeSpec:
    submanifold: EmbeddedSubmanifold
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radius must be non-negative")


@dataclass
class VolumeReport:
    value: float
    method: str
    r: float
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None
    variant: str | None = None
    failures: int | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


# -- Gray's formula -----------------------------------------------------------

def gray_polynomial(ci: ChernIntegrals, n: int) -> list[SPolynomial]:
    """Expand (1/n!) int prod(1 - F/pi + x_a) (pi s + c F)^n with c = 1 - s.

    prod(1 - F/pi + x_a) = sum_j e_j (1 - F/pi)^{k-j}; the degree-k part of
    e_j (1 - F/pi)^m (pi s + c F)^n with m = k - j is e_j times the F^m
    coefficient, pi^{n-m} sum_i C(m,i) (-1)^i C(n,m-i) c^{m-i} s^{n-m+i}.
    Terms are grouped by pi power; inexact table entries produce their own
    scaled terms.
    """
    k = ci.k
    if k >= n:
        raise ValueError("X must have complex dimension below n")
    one_minus_s = [Fraction(1), Fraction(-1)]
    groups: dict[tuple[int, float], list] = {}
    for j in range(k + 1):
        m = k - j
        poly = [Fraction(0)]
        for i in range(m + 1):
            coef = Fraction(comb(m, i) * (-1) ** i * comb(n, m - i))
            if coef == 0:
                continue
            term = _pmul(_ppow(one_minus_s, m - i), [Fraction(0)] * (n - m + i) + [Fraction(1)])
            poly = _padd(poly, [coef * t for t in term])
        c, p = ci.table[j]
        if isinstance(c, Fraction):
            key, scale = (p + n - m, 1.0), c
        else:
            key, scale = (p + n - m, float(c)), Fraction(1)
        poly = [scale * t / factorial(n) for t in poly]
        groups[key] = _padd(groups.get(key, [Fraction(0)]), poly)
    return [SPolynomial(tuple(_ptrim(v)), p, f) for (p, f), v in sorted(groups.items())]


def gray_tube_volume_general(ci: ChernIntegrals, n: int, r) -> float | np.ndarray:
    """Gray's tube volume for a complex k-fold with Chern data ``ci`` (valid for r below the focal distance)."""
    return sum(term(r) for term in gray_polynomial(ci, n))


def hypersurface_polynomial(n: int, d: int, variant: str) -> SPolynomial:
    """(pi^n/n!) (1 - (1 - d u)^n) with u = sin^2 r (corrected) or sin^2 2r = 4 s (1 - s) (as-printed)."""
    if variant == "corrected":
        u = [Fraction(0), Fraction(1)]
    elif variant == "as-printed":
        u = [Fraction(0), Fraction(4), Fraction(-4)]
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    inner = _padd([Fraction(1)], [-d * x for x in u])
    poly = _padd([Fraction(1)], [-x for x in _ppow(inner, n)])
    return SPolynomial(tuple(_ptrim([x / factorial(n) for x in poly])), n)


def tube_volume_hypersurface(n: int, d: int, r, variant: str = "corrected"):
    """Closed-form tube volume around a degree-d hypersurface (raw value, no clamping)."""
    if d < 1:
        raise ValueError("degree must be positive")
    if variant == "corrected":
        inner = 1.0 - d * np.sin(r) ** 2
    elif variant == "as-printed":
        inner = 1.0 - d * np.sin(2 * np.asarray(r)) ** 2
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    return projective_volume(n) * (1.0 - inner**n)


def tube_volume_curve(n: int, vol_curve: float, r):
    """Closed-form tube volume around an embedded rational curve of volume ``vol_curve``."""
    if vol_curve <= 0:
        raise ValueError("curve volume must be positive")
    s = np.sin(np.asarray(r, dtype=float)) ** 2
    lead = pi ** (n - 1) * s ** (n - 1) / factorial(n - 1)
    return lead * ((1.0 - (n + 1) / n * s) * vol_curve + 2.0 * pi * s / n)


def ball_volume(n: int, r):
    """Geodesic ball of radius r in CP^n."""
    return projective_volume(n) * np.sin(np.asarray(r, dtype=float)) ** (2 * n)


# -- variant arbitration ---------------------------------------------------------

@dataclass
class VariantArbitration:
    cases: list
    symbolic: dict  # variant -> list of bools per case
    monte_carlo: dict  # variant -> list of bools per (case, r); empty when no MC data
    canonical: str | None

    def to_dict(self) -> dict:
        return {
            "cases": [list(c) for c in self.cases],
            "symbolic_match": self.symbolic,
            "monte_carlo_within_3_sigma": self.monte_carlo,
            "canonical": self.canonical,
        }


def arbitrate_variant(cases: Sequence[tuple[int, int]] = ((2, 1), (2, 2), (3, 1), (3, 2)), mc_reports=None) -> VariantArbitration:
    """Decide which hypersurface normalization is canonical.

    A variant is consistent when Gray's general formula, specialized exactly
    to the hypersurface's Chern data, reproduces it for every case, and (when
    ``mc_reports`` maps (n, d) to Monte Carlo reports) it lies within three
    standard errors of every estimate.  The canonical variant is the unique
    consistent one, or None.
    """
    symbolic = {v: [] for v in VARIANTS}
    for n, d in cases:
        (g,) = gray_polynomial(ChernIntegrals.hypersurface(n, d), n)
        for v in VARIANTS:
            symbolic[v].append(g.same_as(hypersurface_polynomial(n, d, v)))
    mc: dict = {v: [] for v in VARIANTS} if mc_reports else {}
    if mc_reports:
        for (n, d), reports in mc_reports.items():
            for rep in reports:
                for v in VARIANTS:
                    mc[v].append(bool(abs(tube_volume_hypersurface(n, d, rep.r, v) - rep.value) <= 3 * rep.stderr))
    consistent = [v for v in VARIANTS if all(symbolic[v]) and (not mc or all(mc[v]))]
    return VariantArbitration([tuple(c) for c in cases], symbolic, mc, consistent[0] if len(consistent) == 1 else None)


# -- distance to a submanifold ---------------------------------------------------

_START_RNG_SEED = 0x5EED  # fixed: start directions are part of the algorithm, not of the experiment


def _perp_frames(P):
    """Orthonormal bases of p^perp (columns), one per row of P: shape (N, m, m-1)."""
    N, m = P.shape
    a0 = np.abs(P[:, 0])
    phase = np.where(a0 > 0, P[:, 0] / np.where(a0 > 0, a0, 1.0), 1.0)
    b = P * np.conj(phase)[:, None]  # b[:, 0] real and >= 0
    u = -b
    u[:, 0] += 1.0
    nu = np.sum(np.abs(u) ** 2, axis=1)
    safe = nu > 1e-28
    coef = np.where(safe, 2.0 / np.where(safe, nu, 1.0), 0.0)
    H = np.eye(m, dtype=complex)[None] - coef[:, None, None] * u[:, :, None] * np.conj(u)[:, None, :]
    return H[:, :, 1:]


def _start_directions(n: int, count: int) -> np.ndarray:
    rng = np.random.default_rng(_START_RNG_SEED + 97 * n)
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _hypersurface_distance(X: Hypersurface, P, tol: Tolerances):
    poly = X.poly
    N, m = P.shape
    n = m - 1
    d = poly.d
    starts = max(tol.distance_starts, 8)
    U = _perp_frames(P)  # (N, m, n)
    # start directions: the gradient direction plus fixed quasi-random ones
    _, g0 = poly.value_and_gradient(P)
    gc0 = np.einsum("ni,nij->nj", g0, U)
    gn = np.linalg.norm(gc0, axis=1, keepdims=True)
    v_grad = np.where(gn > 0, np.conj(gc0) / np.where(gn > 0, gn, 1.0), 0.0)
    fixed = _start_directions(n, starts - 1)
    V = np.concatenate([v_grad[:, None, :], np.broadcast_to(fixed, (N, starts - 1, n))], axis=1)  # (N, S, n)
    B = np.einsum("nij,nsj->nsi", U, V)  # ambient directions
    coeffs = poly.restrict_to_line(np.broadcast_to(P[:, None, :], B.shape), B)  # (N, S, d+1)
    lead = coeffs[..., d]
    scale = np.max(np.abs(coeffs), axis=-1)
    tiny = np.abs(lead) < 1e-13 * scale
    coeffs[..., d] = np.where(tiny, 1e-13 * scale, lead)
    roots = companion_roots(coeffs)  # (N, S, d)
    pick = np.argmin(np.abs(roots), axis=-1)
    t0 = np.take_along_axis(roots, pick[..., None], axis=-1)[..., 0]
    W = t0[..., None] * V  # (N, S, n)

    # Newton on the Lagrange system w = mu conj(grad f(w)), f(w) = 0
    M = N * starts
    W = W.reshape(M, n)
    Uf = np.repeat(U, starts, axis=0)
    Pf = np.repeat(P, starts, axis=0)
    converged = np.zeros(M, dtype=bool)
    mu = np.zeros(M, dtype=complex)
    resid = np.full(M, np.inf)
    live = np.arange(M)
    for it in range(tol.distance_max_iter):
        if live.size == 0:
            break
        w = W[live]
        Ul = Uf[live]
        q = Pf[live] + np.einsum("nij,nj->ni", Ul, w)
        f, g, H = poly.derivatives(q)
        gc = (g[:, None, :] @ Ul)[:, 0]
        Hc = np.swapaxes(Ul, 1, 2) @ H @ Ul
        g2 = np.sum(np.abs(gc) ** 2, axis=1)
        if it == 0:
            mu_l = np.sum(w * gc, axis=1) / np.where(g2 > 0, g2, 1.0)
        else:
            mu_l = mu[live]
        E1 = w - mu_l[:, None] * np.conj(gc)
        wn = np.linalg.norm(w, axis=1)
        gabs = np.sqrt(g2)
        res = np.sqrt(np.sum(np.abs(E1) ** 2, axis=1) + np.abs(f) ** 2 / np.where(g2 > 0, g2, 1e-300)) / (1.0 + wn)
        resid[live] = res
        ok = (res < tol.distance_residual) & (gabs > 0)
        converged[live[ok]] = True
        mu[live] = mu_l
        keep = ~ok & np.isfinite(res) & (wn < 1e8)
        live, w, Ul, gc, Hc, f, E1, mu_l = live[keep], w[keep], Ul[keep], gc[keep], Hc[keep], f[keep], E1[keep], mu_l[keep]
        if live.size == 0:
            break
        L = live.size
        J = np.zeros((L, 2 * n + 2, 2 * n + 2))
        K = mu_l[:, None, None] * np.conj(Hc)
        Kr, Ki = K.real, K.imag
        eye = np.eye(n)[None]
        # rows of E1: delta_w - delta_mu conj(g) - mu conj(H delta_w)
        J[:, :n, :n] = eye - Kr
        J[:, :n, n : 2 * n] = -Ki
        J[:, n : 2 * n, :n] = -Ki
        J[:, n : 2 * n, n : 2 * n] = eye + Kr
        gr, gi = gc.real, gc.imag
        J[:, :n, 2 * n] = -gr
        J[:, n : 2 * n, 2 * n] = gi
        J[:, :n, 2 * n + 1] = -gi
        J[:, n : 2 * n, 2 * n + 1] = -gr
        # rows of f: g . delta_w
        J[:, 2 * n, :n] = gr
        J[:, 2 * n, n : 2 * n] = -gi
        J[:, 2 * n + 1, :n] = gi
        J[:, 2 * n + 1, n : 2 * n] = gr
        rhs = -np.concatenate([E1.real, E1.imag, f.real[:, None], f.imag[:, None]], axis=1)
        try:
            step = np.linalg.solve(J, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.stack([np.linalg.lstsq(Ji, bi, rcond=None)[0] for Ji, bi in zip(J, rhs)])
        dw = step[:, :n] + 1j * step[:, n : 2 * n]
        dmu = step[:, 2 * n] + 1j * step[:, 2 * n + 1]
        size = np.linalg.norm(dw, axis=1)
        cap = 0.5 * (1.0 + np.linalg.norm(w, axis=1))
        damp = np.minimum(1.0, cap / np.where(size > 0, size, 1.0))
        W[live] = w + damp[:, None] * dw
        mu[live] = mu_l + damp * dmu
    dist = np.arctan(np.linalg.norm(W, axis=1))
    dist = np.where(converged, dist, np.inf).reshape(N, starts)
    best = dist.min(axis=1)
    return best, np.isfinite(best), resid.reshape(N, starts).min(axis=1)


def _curve_chart_polys(X: RationalCurve):
    """Coefficient arrays (n+1, d+1), ascending in t, of Gamma(1, t) and Gamma(t, 1)."""
    C = np.zeros((X.n + 1, X.d + 1), dtype=complex)
    for r, comp in enumerate(X.components):
        for coef, e in comp.terms:
            C[r, e[1]] += coef
    return C, C[:, ::-1].copy()


def _poly_eval(C, t, order):
    """Evaluate the rows of C (ascending) and their first ``order`` derivatives at t (N,)."""
    d = C.shape[1] - 1
    powers = t[:, None] ** np.arange(d + 1)[None, :]
    out = [powers @ C.T]
    coef = C.copy()
    for _ in range(order):
        coef = coef[:, 1:] * np.arange(1, coef.shape[1])[None, :]
        if coef.shape[1] == 0:
            out.append(np.zeros_like(out[0]))
            coef = np.zeros((C.shape[0], 1), dtype=complex)
        else:
            out.append(powers[:, : coef.shape[1]] @ coef.T)
    return out


def _curve_distance(X: RationalCurve, P, tol: Tolerances):
    """Maximize |<Gamma(t), p>|^2 / |Gamma(t)|^2 by Newton from fixed starts on CP^1."""
    N = P.shape[0]
    starts = max(tol.distance_starts, 8)
    charts = _curve_chart_polys(X)
    golden = (np.sqrt(5.0) - 1.0) / 2.0
    u = (np.arange(starts) + 0.5) / starts
    polar = np.arccos(np.sqrt(1.0 - u))
    az = 2 * pi * ((np.arange(starts) * golden) % 1.0)
    best_rho = np.full(N, -1.0)
    best_res = np.full(N, np.inf)
    for s in range(starts):
        c0, c1 = np.cos(polar[s]), np.sin(polar[s]) * np.exp(1j * az[s])
        chart = 0 if abs(c0) >= abs(c1) else 1
        t = np.full(N, c1 / c0 if chart == 0 else c0 / c1, dtype=complex)
        C = charts[chart]
        conv = np.zeros(N, dtype=bool)
        res = np.full(N, np.inf)
        live = np.arange(N)
        pc_all = np.conj(P)
        for _ in range(tol.distance_max_iter):
            if live.size == 0:
                break
            tl = t[live]
            G, G1, G2 = _poly_eval(C, tl, 2)
            pc = pc_all[live]
            A, A1, A2 = (np.sum(x * pc, axis=1) for x in (G, G1, G2))
            nG = np.sum(np.abs(G) ** 2, axis=1)
            S1 = np.sum(G1 * np.conj(G), axis=1)
            S2 = np.sum(G2 * np.conj(G), axis=1)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                ft = A1 / A - S1 / nG
                ftt = (A2 * A - A1**2) / A**2 - (S2 / nG - S1**2 / nG**2)
                e = -(np.sum(np.abs(G1) ** 2, axis=1) * nG - np.abs(S1) ** 2) / nG**2
                rl = np.abs(ft) * (1.0 + np.abs(tl) ** 2)
            res[live] = rl
            done = np.isfinite(rl) & (rl < tol.distance_residual)
            conv[live[done]] = True
            keep = ~done & np.isfinite(rl) & (np.abs(tl) < 1e8)
            live, tl, ft, ftt, e = live[keep], tl[keep], ft[keep], ftt[keep], e[keep]
            # Newton for grad f = 0 with f_t(t + delta) ~ f_t + f_tt delta + e conj(delta)
            a11 = ftt.real + e
            a12 = -ftt.imag
            a21 = ftt.imag
            a22 = ftt.real - e
            det = a11 * a22 - a12 * a21
            with np.errstate(divide="ignore", invalid="ignore"):
                da = (-ft.real * a22 + ft.imag * a12) / det
                db = (-ft.imag * a11 + ft.real * a21) / det
            delta = da + 1j * db
            size = np.abs(delta)
            cap = 0.5 * (1.0 + np.abs(tl))
            damp = np.minimum(1.0, cap / np.where(size > 0, size, 1.0))
            t[live] = tl + np.where(np.isfinite(delta), damp * delta, 0.0)
        G = _poly_eval(C, t, 0)[0]
        nG = np.sum(np.abs(G) ** 2, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = np.abs(np.sum(G * np.conj(P), axis=1)) ** 2 / nG
        good = conv & np.isfinite(rho)
        better = good & (rho > best_rho)
        best_rho = np.where(better, rho, best_rho)
        best_res = np.where(good, np.minimum(best_res, res), best_res)
    ok = best_rho >= 0
    dist = np.where(ok, np.arccos(np.sqrt(np.clip(best_rho, 0.0, 1.0))), np.inf)
    return dist, ok, best_res


def _is_fermat_quadric(X) -> bool:
    poly = X.poly
    if poly.d != 2 or len(poly.coeffs) != poly.n + 1:
        return False
    return bool(np.all(poly.exponents == 2 * np.eye(poly.n + 1, dtype=int)[np.argmax(poly.exponents, axis=1)])
                and np.allclose(poly.coeffs, poly.coeffs[0]))


def distances(reps, X: EmbeddedSubmanifold, tol: Tolerances = DEFAULT, method: str = "auto"):
    """Distances from unit representatives (rows) to X.

    Returns (dist, ok, residual).  With ``method="auto"`` closed forms are
    used where known: linear subspaces (arccos of the projection norm),
    hyperplanes a.z = 0 (arcsin(|a.p| / |a|)), the
    Segre variety (arccos of the top singular value of p as a 2 x (k+1)
    matrix) and the Fermat quadric (arcsin|sum p_i^2| / 2); residual 0.
    Everything else, and every hypersurface or curve with ``method="generic"``,
    goes through multistart Newton certified by the first-order residual.
    """
    if method not in ("auto", "generic"):
        raise ValueError("method must be 'auto' or 'generic'")
    P = np.atleast_2d(np.asarray(reps, dtype=complex))
    if P.shape[1] != X.n + 1:
        raise ValueError(f"points live in CP^{P.shape[1] - 1}, submanifold in CP^{X.n}")
    if method == "auto" and isinstance(X, Hypersurface) and X.poly.d == 1:
        a = np.zeros(X.n + 1, dtype=complex)
        a[np.argmax(X.poly.exponents, axis=1)] = X.poly.coeffs
        d = np.arcsin(np.clip(np.abs(P @ a) / np.linalg.norm(a), 0.0, 1.0))
        return d, np.ones(len(d), dtype=bool), np.zeros(len(d))
    if method == "auto" and isinstance(X, Hypersurface) and _is_fermat_quadric(X):
        d = 0.5 * np.arcsin(np.clip(np.abs(np.sum(P**2, axis=1)), 0.0, 1.0))
        return d, np.ones(len(d), dtype=bool), np.zeros(len(d))
    if isinstance(X, ProjectiveSubspace):
        d = X.distance(P)
        return d, np.ones(len(d), dtype=bool), np.zeros(len(d))
    if isinstance(X, SegreModel):
        S = np.linalg.svd(P.reshape(-1, 2, X.seg_k + 1), compute_uv=False)
        d = np.arccos(np.clip(S[:, 0], 0.0, 1.0))
        return d, np.ones(len(d), dtype=bool), np.zeros(len(d))
    if isinstance(X, Hypersurface):
        return _hypersurface_distance(X, P, tol)
    if isinstance(X, RationalCurve):
        return _curve_distance(X, P, tol)
    raise TypeError(f"no distance solver for {type(X).__name__}")


def distance_to_submanifold(p: ProjectivePoint, X: EmbeddedSubmanifold, tol: Tolerances = DEFAULT, method: str = "auto") -> float:
    d, ok, res = distances(p.rep[None, :], X, tol, method)
    if not ok[0]:
        raise DistanceSolverError(f"no start converged (best residual {res[0]:.2e})")
    return float(d[0])


# -- Monte Carlo -------------------------------------------------------------------

CHUNK = 1 << 15


def _chunk_distances(args):
    X, n, count, seed_seq, tol, method = args
    rng = np.random.default_rng(seed_seq)
    P = uniform_sample_batch(n, count, rng)
    d, ok, _ = distances(P, X, tol, method)
    return d, ok


@dataclass
class DistanceSample:
    distances: np.ndarray = field(repr=False)
    ok: np.ndarray = field(repr=False)
    samples: int
    seed: int
    failures: int

    def fraction_within(self, r: float) -> tuple[float, int]:
        good = self.samples - self.failures
        hits = int(np.count_nonzero(self.ok & (self.distances <= r)))
        return hits / good, good


def sample_distances(
    X: EmbeddedSubmanifold, N: int, seed: int, workers: int = 1, tol: Tolerances = DEFAULT, method: str = "auto"
) -> DistanceSample:
    """Distances of N uniform points of CP^n to X.

    Points are drawn in fixed chunks, each from its own stream spawned from
    ``seed``, so the result does not depend on ``workers``.
    """
    if N < 1000:
        raise ValueError("need at least 1000 samples")
    sizes = [CHUNK] * (N // CHUNK) + ([N % CHUNK] if N % CHUNK else [])
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(X, X.n, size, ss, tol, method) for size, ss in zip(sizes, streams)]
    if workers > 1:
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_distances, jobs))
    else:
        parts = [_chunk_distances(job) for job in jobs]
    d = np.concatenate([p[0] for p in parts])
    ok = np.concatenate([p[1] for p in parts])
    failures = int(np.count_nonzero(~ok))
    if failures > tol.mc_failure_rate * N:
        raise DistanceSolverError(
            f"distance solver failed on {failures} of {N} points ({failures / N:.2%}) for {X.name}"
        )
    return DistanceSample(d, ok, N, seed, failures)


def mc_tube_volume(
    X: EmbeddedSubmanifold,
    r,
    N: int,
    seed: int,
    workers: int = 1,
    tol: Tolerances = DEFAULT,
    sample: DistanceSample | None = None,
    method: str = "auto",
):
    """Rejection estimate of Vol(T_X(r)); ``r`` may be a scalar or a sequence of radii."""
    if sample is None:
        sample = sample_distances(X, N, seed, workers, tol, method)
    total = projective_volume(X.n)
    radii = np.atleast_1d(np.asarray(r, dtype=float))
    reports = []
    for rad in radii:
        frac, good = sample.fraction_within(float(rad))
        reports.append(
            VolumeReport(
                value=total * frac,
                method="monte-carlo",
                r=float(rad),
                stderr=total * float(np.sqrt(frac * (1.0 - frac) / good)),
                samples=sample.samples,
                seed=sample.seed,
                failures=sample.failures,
            )
        )
    return reports[0] if np.ndim(r) == 0 else reports
