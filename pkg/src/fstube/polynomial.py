"""Homogeneous polynomials on C^{n+1} and univariate root finding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = [
    "HomogeneousPolynomial",
    "PolynomialFormatError",
    "companion_roots",
    "fermat",
    "linear_form",
    "parse_polynomial",
    "load_document",
]


class PolynomialFormatError(ValueError):
    """Malformed polynomial or curve document; ``where`` locates the field."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True, eq=False)
class HomogeneousPolynomial:
    n: int
    d: int
    coeffs: np.ndarray
    exponents: np.ndarray
    _grad_tables: tuple = field(init=False, repr=False, compare=False)
    _hess_tables: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        exps = np.array(self.exponents, dtype=int).reshape(len(coeffs), -1)
        if exps.shape[1] != self.n + 1:
            raise ValueError(f"exponents need {self.n + 1} entries per term")
        if np.any(exps < 0):
            raise ValueError("negative exponent")
        if np.any(exps.sum(axis=1) != self.d):
            raise ValueError(f"every term must have total degree {self.d}")
        keep = coeffs != 0
        if not keep.any():
            raise ValueError("zero polynomial")
        coeffs, exps = _combine_like_terms(coeffs[keep], exps[keep])
        coeffs.setflags(write=False)
        exps.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "exponents", exps)
        tables = []
        for i in range(self.n + 1):
            mask = exps[:, i] > 0
            e = exps[mask].copy()
            e[:, i] -= 1
            tables.append((coeffs[mask] * exps[mask, i], e))
        object.__setattr__(self, "_grad_tables", tuple(tables))
        pairs = []
        for i in range(self.n + 1):
            gc, ge = tables[i]
            for j in range(i, self.n + 1):
                mask = ge[:, j] > 0 if len(gc) else np.zeros(0, dtype=bool)
                e = ge[mask].copy()
                if len(e):
                    e[:, j] -= 1
                pairs.append((i, j, gc[mask] * ge[mask, j], e))
        object.__setattr__(self, "_hess_tables", tuple(pairs))

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[complex, Sequence[int]]]):
        terms = list(terms)
        if not terms:
            raise ValueError("no terms")
        d = int(sum(terms[0][1]))
        return cls(n, d, [c for c, _ in terms], [e for _, e in terms])

    @property
    def terms(self) -> list[tuple[complex, tuple[int, ...]]]:
        return [(complex(c), tuple(int(x) for x in e)) for c, e in zip(self.coeffs, self.exponents)]

    def scale(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    # -- numeric evaluation on (..., n+1) complex arrays -------------------
    def _power_table(self, z):
        z = np.asarray(z, dtype=complex)
        table = np.empty(z.shape + (self.d + 1,), dtype=complex)
        table[..., 0] = 1.0
        for k in range(1, self.d + 1):
            table[..., k] = table[..., k - 1] * z
        return table

    def _monomials(self, table, exps):
        # table: (..., n+1, d+1); exps: (T, n+1) -> (..., T)
        cols = np.arange(self.n + 1)
        picked = table[..., cols, exps]  # (..., T, n+1)
        return np.prod(picked, axis=-1)

    def __call__(self, z):
        table = self._power_table(z)
        return self._monomials(table, self.exponents) @ self.coeffs

    def gradient(self, z):
        """Holomorphic gradient dP/dz_i, shape (..., n+1)."""
        table = self._power_table(z)
        out = []
        for c, e in self._grad_tables:
            if len(c) == 0:
                out.append(np.zeros(table.shape[:-2], dtype=complex))
            else:
                out.append(self._monomials(table, e) @ c)
        return np.stack(out, axis=-1)

    def value_and_gradient(self, z):
        table = self._power_table(z)
        value = self._monomials(table, self.exponents) @ self.coeffs
        grads = []
        for c, e in self._grad_tables:
            if len(c) == 0:
                grads.append(np.zeros(table.shape[:-2], dtype=complex))
            else:
                grads.append(self._monomials(table, e) @ c)
        return value, np.stack(grads, axis=-1)

    def hessian(self, z):
        """Holomorphic Hessian d^2P/dz_i dz_j, shape (..., n+1, n+1)."""
        return self.derivatives(z)[2]

    def derivatives(self, z):
        """Value, gradient and Hessian from one shared power table."""
        table = self._power_table(z)
        batch = table.shape[:-2]
        m = self.n + 1
        value = self._monomials(table, self.exponents) @ self.coeffs
        grad = np.zeros(batch + (m,), dtype=complex)
        for i, (c, e) in enumerate(self._grad_tables):
            if len(c):
                grad[..., i] = self._monomials(table, e) @ c
        hess = np.zeros(batch + (m, m), dtype=complex)
        for i, j, c, e in self._hess_tables:
            if len(c):
                hess[..., i, j] = hess[..., j, i] = self._monomials(table, e) @ c
        return value, grad, hess

    def evaluate_generic(self, z: Sequence[Any]):
        """Evaluate on a sequence of objects supporting + and * (e.g. hyper-duals)."""
        total = None
        for c, e in zip(self.coeffs, self.exponents):
            term = None
            for zi, k in zip(z, e):
                for _ in range(int(k)):
                    term = zi if term is None else term * zi
            term = c if term is None else term * c
            total = term if total is None else total + term
        return total

    # -- restriction to lines ---------------------------------------------
    def restrict_to_line(self, a, b):
        """Coefficients (ascending) of t -> P(a + t b), batched over leading axes."""
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        nodes = np.exp(2j * np.pi * np.arange(self.d + 1) / (self.d + 1))
        pts = a[..., None, :] + nodes[:, None] * b[..., None, :]
        vals = self(pts)
        # vals_j = sum_k c_k w^{jk}  ->  c_k = mean_j vals_j w^{-jk}
        return np.fft.fft(vals, axis=-1) / (self.d + 1)

    def to_document(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "terms": [
                {"coeff": [c.real, c.imag], "exp": list(e)} for c, e in self.terms
            ],
        }

    def __repr__(self):
        return f"HomogeneousPolynomial(n={self.n}, d={self.d}, terms={len(self.coeffs)})"


def _combine_like_terms(coeffs, exps):
    merged: dict[tuple[int, ...], complex] = {}
    for c, e in zip(coeffs, exps):
        key = tuple(int(x) for x in e)
        merged[key] = merged.get(key, 0.0) + c
    keys = [k for k, v in merged.items() if v != 0]
    if not keys:
        raise ValueError("zero polynomial")
    return (
        np.array([merged[k] for k in keys], dtype=complex),
        np.array(keys, dtype=int),
    )


def fermat(n: int, d: int) -> HomogeneousPolynomial:
    """sum_i z_i^d."""
    return HomogeneousPolynomial(n, d, np.ones(n + 1), d * np.eye(n + 1, dtype=int))


def linear_form(coeffs) -> HomogeneousPolynomial:
    coeffs = np.asarray(coeffs, dtype=complex)
    n = coeffs.size - 1
    return HomogeneousPolynomial(n, 1, coeffs, np.eye(n + 1, dtype=int))


def companion_roots(coeffs) -> np.ndarray:
    """Roots of ascending-coefficient polynomials via companion-matrix eigenvalues.

    ``coeffs`` has shape (..., d+1); the leading coefficient must be nonzero.
    Returns shape (..., d).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    d = coeffs.shape[-1] - 1
    if d < 1:
        raise ValueError("constant polynomial has no roots")
    lead = coeffs[..., d]
    if np.any(lead == 0):
        raise ValueError("leading coefficient vanishes")
    if d == 1:
        return (-coeffs[..., 0] / lead)[..., None]
    comp = np.zeros(coeffs.shape[:-1] + (d, d), dtype=complex)
    comp[..., np.arange(1, d), np.arange(d - 1)] = 1.0
    comp[..., :, d - 1] = -coeffs[..., :d] / lead[..., None]
    return np.linalg.eigvals(comp)


# -- document format -------------------------------------------------------

def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise PolynomialFormatError(f"expected a number, got {value!r}", where)
    return float(value)


def _parse_terms(doc, nvars, where):
    if not isinstance(doc, list) or not doc:
        raise PolynomialFormatError("'terms' must be a non-empty list", where)
    coeffs, exps = [], []
    for idx, term in enumerate(doc):
        at = f"{where}[{idx}]"
        if not isinstance(term, dict):
            raise PolynomialFormatError("term must be an object with 'coeff' and 'exp'", at)
        missing = {"coeff", "exp"} - set(term)
        if missing:
            raise PolynomialFormatError(f"missing field(s) {sorted(missing)}", at)
        c = term["coeff"]
        if isinstance(c, (int, float)) and not isinstance(c, bool):
            c = [c, 0.0]
        if not isinstance(c, list) or len(c) != 2:
            raise PolynomialFormatError("'coeff' must be [re, im]", at + ".coeff")
        e = term["exp"]
        if not isinstance(e, list) or len(e) != nvars:
            raise PolynomialFormatError(f"'exp' must list {nvars} integers", at + ".exp")
        if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in e):
            raise PolynomialFormatError("exponents must be non-negative integers", at + ".exp")
        coeffs.append(complex(_number(c[0], at + ".coeff[0]"), _number(c[1], at + ".coeff[1]")))
        exps.append(e)
    return coeffs, exps


def _int_field(doc, key, where, minimum):
    if key not in doc:
        raise PolynomialFormatError(f"missing field '{key}'", where)
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise PolynomialFormatError(f"'{key}' must be an integer >= {minimum}", f"{where}.{key}" if where else key)
    return v


def parse_polynomial(doc: dict, where: str = "") -> HomogeneousPolynomial:
    if not isinstance(doc, dict):
        raise PolynomialFormatError("polynomial document must be an object", where)
    n = _int_field(doc, "n", where, 1)
    d = _int_field(doc, "d", where, 1)
    tw = f"{where}.terms" if where else "terms"
    coeffs, exps = _parse_terms(doc.get("terms"), n + 1, tw)
    for idx, e in enumerate(exps):
        if sum(e) != d:
            raise PolynomialFormatError(f"exponents sum to {sum(e)}, expected d={d}", f"{tw}[{idx}].exp")
    try:
        return HomogeneousPolynomial(n, d, coeffs, exps)
    except ValueError as exc:
        raise PolynomialFormatError(str(exc), where) from None


def load_document(path: str | Path) -> dict:
    """Read a JSON document, turning decode errors into located diagnostics."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolynomialFormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise PolynomialFormatError("top-level value must be an object", "line 1")
    return doc
