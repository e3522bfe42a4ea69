"""Second-order forward differentiation with hyper-dual numbers.

A hyper-dual number is ``a + b e1 + c e2 + d e1 e2`` with e1^2 = e2^2 = 0.
Seeding one real input with e1 and another with e2 makes ``d`` the exact mixed
second derivative, free of the cancellation that limits finite differences.
Components may be complex scalars or numpy arrays.  For vectors of
hyper-duals the last axis indexes the vector; leading axes are a batch (one
entry per seeded pair of inputs).
"""

from __future__ import annotations

import numpy as np


class HyperDual:
    __slots__ = ("a", "b", "c", "d")
    __array_priority__ = 1000  # keep numpy from broadcasting over us

    def __init__(self, a, b=0.0, c=0.0, d=0.0):
        self.a = np.asarray(a, dtype=complex)
        self.b = np.asarray(b, dtype=complex) * np.ones_like(self.a)
        self.c = np.asarray(c, dtype=complex) * np.ones_like(self.a)
        self.d = np.asarray(d, dtype=complex) * np.ones_like(self.a)

    @classmethod
    def constant(cls, a):
        return cls(a)

    def parts(self):
        return self.a, self.b, self.c, self.d

    def __repr__(self):
        return f"HyperDual({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __getitem__(self, idx):
        return HyperDual(self.a[idx], self.b[idx], self.c[idx], self.d[idx])

    def entry(self, i: int) -> "HyperDual":
        """Vector component ``i`` (last axis), keeping the batch axes."""
        return self[..., i]

    def __len__(self):
        return self.a.shape[-1]

    def __iter__(self):
        for i in range(len(self)):
            yield self.entry(i)

    @staticmethod
    def _lift(x):
        return x if isinstance(x, HyperDual) else HyperDual(x)

    def __add__(self, other):
        if not isinstance(other, HyperDual):
            return HyperDual(self.a + other, self.b, self.c, self.d)
        return HyperDual(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __neg__(self):
        return HyperDual(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HyperDual):
            return HyperDual(self.a * other, self.b * other, self.c * other, self.d * other)
        return HyperDual(
            self.a * other.a,
            self.a * other.b + self.b * other.a,
            self.a * other.c + self.c * other.a,
            self.a * other.d + self.b * other.c + self.c * other.b + self.d * other.a,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.a
        return HyperDual(
            inv,
            -self.b * inv**2,
            -self.c * inv**2,
            (2.0 * self.b * self.c * inv - self.d) * inv**2,
        )

    def __truediv__(self, other):
        if not isinstance(other, HyperDual):
            return HyperDual(self.a / other, self.b / other, self.c / other, self.d / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = HyperDual(np.ones_like(self.a))
        for _ in range(int(k)):
            out = out * self
        return out

    def conj(self):
        return HyperDual(np.conj(self.a), np.conj(self.b), np.conj(self.c), np.conj(self.d))

    def sum(self):
        return HyperDual(self.a.sum(), self.b.sum(), self.c.sum(), self.d.sum())


def stack(items) -> HyperDual:
    """Vector (last axis) from a sequence of hyper-duals or constants."""
    items = [HyperDual._lift(x) for x in items]
    shape = np.broadcast_shapes(*(x.a.shape for x in items))

    def col(attr):
        return np.stack([np.broadcast_to(getattr(x, attr), shape) for x in items], axis=-1)

    return HyperDual(col("a"), col("b"), col("c"), col("d"))


def matvec(M, x: HyperDual) -> HyperDual:
    """Constant complex matrix times a hyper-dual vector (last axis)."""
    Mt = np.asarray(M).T
    return HyperDual(x.a @ Mt, x.b @ Mt, x.c @ Mt, x.d @ Mt)


def outer_scale(y: HyperDual, v) -> HyperDual:
    """Hyper-dual scalar (batched) times a constant complex vector."""
    v = np.asarray(v)
    return HyperDual(y.a[..., None] * v, y.b[..., None] * v, y.c[..., None] * v, y.d[..., None] * v)


def seed(base, i: int, j: int) -> HyperDual:
    """Real input vector ``base`` with e1 on coordinate i and e2 on coordinate j."""
    return seed_pairs(base, [(i, j)])[0]


def seed_pairs(base, pairs) -> HyperDual:
    """Batch of seeded inputs, one row per (i, j) pair."""
    base = np.asarray(base, dtype=float)
    m = len(pairs)
    a = np.tile(base.astype(complex), (m, 1))
    b = np.zeros((m, base.size))
    c = np.zeros((m, base.size))
    for row, (i, j) in enumerate(pairs):
        b[row, i] = 1.0
        c[row, j] = 1.0
    return HyperDual(a, b, c, 0.0)
