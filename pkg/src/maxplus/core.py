"""Core max-plus (tropical) arithmetic.

Scalars live in R united with -inf.  Semiring addition is max, semiring
multiplication is ordinary +, so the zero element is -inf and the unit is 0.
Matrices hold float64 entries that are finite or -inf; +inf and NaN are
rejected at construction, which keeps every downstream max/+ combination
NaN-free.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError

NEG_INF = float("-inf")
ZERO = NEG_INF      # semiring zero
UNITY = 0.0         # semiring unit

# Broadcasted products allocate an n^3 temporary; above this size fall back
# to a k-loop of rank-1 updates.
_BROADCAST_LIMIT = 64


def soplus(x: float, y: float) -> float:
    """Scalar semiring addition: max(x, y)."""
    return x if x >= y else y


def sotimes(x: float, y: float) -> float:
    """Scalar semiring multiplication: x + y, with -inf absorbing."""
    if x == NEG_INF or y == NEG_INF:
        return NEG_INF
    return x + y


def _as_entries(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError("dimension: matrix must be square, got shape %s" % (arr.shape,))
    if arr.shape[0] == 0:
        raise DimensionError("dimension: empty matrix")
    if np.isnan(arr).any() or (arr == np.inf).any():
        raise ValueError("entries must be finite or -inf")
    return arr


class TropicalMatrix:
    """Square matrix over the max-plus semiring.

    The wrapped array is marked read-only; all operations return new
    matrices, so instances can be shared and cached safely.
    """

    def __init__(self, entries, copy: bool = True):
        if isinstance(entries, TropicalMatrix):
            self.arr = entries.arr
            return
        if isinstance(entries, np.ndarray) and not copy:
            # internal fast path: caller hands over a fresh float array
            arr = entries
        else:
            arr = _as_entries(entries)
        arr.setflags(write=False)
        self.arr = arr

    @classmethod
    def identity(cls, n: int) -> "TropicalMatrix":
        arr = np.full((n, n), NEG_INF)
        np.fill_diagonal(arr, UNITY)
        return cls(arr, copy=False)

    @classmethod
    def zeros(cls, n: int) -> "TropicalMatrix":
        """All -inf matrix (the semiring zero matrix)."""
        return cls(np.full((n, n), NEG_INF), copy=False)

    @classmethod
    def from_rows(cls, rows) -> "TropicalMatrix":
        """Build from nested lists; None stands for -inf."""
        conv = [[NEG_INF if v is None else float(v) for v in row] for row in rows]
        return cls(conv)

    @property
    def n(self) -> int:
        return self.arr.shape[0]

    def finite_mask(self) -> np.ndarray:
        return self.arr != NEG_INF

    def __matmul__(self, other: "TropicalMatrix") -> "TropicalMatrix":
        return mat_mul(self, other)

    def oplus(self, other: "TropicalMatrix") -> "TropicalMatrix":
        return mat_oplus(self, other)

    def scale(self, lam: float) -> "TropicalMatrix":
        return mat_scalar_mul(lam, self)

    def power(self, t: int) -> "TropicalMatrix":
        return mat_power(self, t)

    def apply(self, y) -> np.ndarray:
        """Matrix-vector product A (x) y."""
        y = as_vector(y, self.n)
        return (self.arr + y[None, :]).max(axis=1)

    def restrict(self, nodes) -> "TropicalMatrix":
        """Keep entries with both indices in `nodes`, -inf elsewhere."""
        mask = np.zeros(self.n, dtype=bool)
        mask[list(nodes)] = True
        arr = np.where(mask[:, None] & mask[None, :], self.arr, NEG_INF)
        return TropicalMatrix(arr, copy=False)

    def eq(self, other: "TropicalMatrix", tol: float = 0.0) -> bool:
        return mat_eq(self, other, tol)

    def __eq__(self, other):
        if not isinstance(other, TropicalMatrix):
            return NotImplemented
        return self.eq(other)

    __hash__ = None

    def to_lists(self):
        """Nested lists with None for -inf (JSON-friendly)."""
        return [[None if v == NEG_INF else float(v) for v in row] for row in self.arr]

    def __repr__(self):
        rows = []
        for row in self.arr:
            rows.append(" ".join("-inf" if v == NEG_INF else "%g" % v for v in row))
        return "TropicalMatrix(%d)[%s]" % (self.n, "; ".join(rows))


def _check_same_n(a: TropicalMatrix, b: TropicalMatrix):
    if a.n != b.n:
        raise DimensionError("dimension: %d vs %d" % (a.n, b.n))


def _mp_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    if n <= _BROADCAST_LIMIT:
        return (x[:, :, None] + y[None, :, :]).max(axis=1)
    out = np.full((n, n), NEG_INF)
    for k in range(n):
        np.maximum(out, x[:, k, None] + y[k, None, :], out=out)
    return out


def mat_mul(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """c_ij = max_k (a_ik + b_kj)."""
    _check_same_n(a, b)
    return TropicalMatrix(_mp_matmul(a.arr, b.arr), copy=False)


def mat_power(a: TropicalMatrix, t: int) -> TropicalMatrix:
    """t-th max-plus power by repeated squaring; a^0 is the identity."""
    if t < 0:
        raise ValueError("negative power")
    result = None
    base = a.arr
    while t:
        if t & 1:
            result = base.copy() if result is None else _mp_matmul(result, base)
        t >>= 1
        if t:
            base = _mp_matmul(base, base)
    if result is None:
        return TropicalMatrix.identity(a.n)
    return TropicalMatrix(result, copy=False)


def mat_scalar_mul(lam: float, a: TropicalMatrix) -> TropicalMatrix:
    """Add lam to every finite entry (-inf entries stay -inf)."""
    if lam == NEG_INF:
        return TropicalMatrix.zeros(a.n)
    return TropicalMatrix(a.arr + lam, copy=False)


def mat_oplus(a: TropicalMatrix, b: TropicalMatrix) -> TropicalMatrix:
    """Entrywise max."""
    _check_same_n(a, b)
    return TropicalMatrix(np.maximum(a.arr, b.arr), copy=False)


def mat_eq(a: TropicalMatrix, b: TropicalMatrix, tol: float = 0.0) -> bool:
    """Equality: -inf patterns must coincide, finite entries within tol."""
    _check_same_n(a, b)
    if tol == 0.0:
        return bool(np.array_equal(a.arr, b.arr))
    fa, fb = a.finite_mask(), b.finite_mask()
    if not np.array_equal(fa, fb):
        return False
    return bool(np.all(np.abs(a.arr[fa] - b.arr[fb]) <= tol))


def as_vector(values, n: int | None = None) -> np.ndarray:
    """Validate a max-plus vector: 1-D, entries finite or -inf."""
    y = np.array(values, dtype=float)
    if y.ndim != 1:
        raise DimensionError("dimension: vector expected, got shape %s" % (y.shape,))
    if n is not None and y.shape[0] != n:
        raise DimensionError("dimension: vector length %d vs %d" % (y.shape[0], n))
    if np.isnan(y).any() or (y == np.inf).any():
        raise ValueError("entries must be finite or -inf")
    return y


def vec_eq(x, y, tol: float = 0.0) -> bool:
    x = as_vector(x)
    y = as_vector(y, x.shape[0])
    if tol == 0.0:
        return bool(np.array_equal(x, y))
    fx, fy = x != NEG_INF, y != NEG_INF
    if not np.array_equal(fx, fy):
        return False
    return bool(np.all(np.abs(x[fx] - y[fy]) <= tol))
