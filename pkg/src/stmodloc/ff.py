"""Dense exact linear algebra over small prime fields F_p.

Two layers live here.  The array functions (``rref``, ``kernel``, ``solve``,
``rank``, ``image_basis``, ``matmul``) take a plain integer ``numpy`` array
plus the modulus and are what the rest of the package calls in inner loops.
``FpMatrix`` wraps an array together with its modulus for callers that want
the modulus carried along (JSON I/O, the public API); mixing moduli raises.

Vectors are columns throughout: a basis of a subspace of F_p^n is an
``(n, k)`` array whose columns are the basis vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ModulusError(ValueError):
    """Raised when matrices over different prime fields are combined."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def as_array(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # float64 BLAS is exact here: entries < p <= 7 and inner dims << 2**40
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return (np.rint(prod).astype(np.int64)) % p


def matpow(a: np.ndarray, k: int, p: int) -> np.ndarray:
    out = np.eye(a.shape[0], dtype=np.int64)
    for _ in range(k):
        out = matmul(out, a, p)
    return out


def rref(a, p: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` over F_p.

    Pivots are chosen leftmost-column first, topmost-row first, so the
    output is canonical.  When ``ncols`` is given, pivots are only sought in
    the first ``ncols`` columns while row operations still act on the whole
    row (used for augmented systems).
    """
    r = as_array(a, p)
    if r.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = r.shape
    if ncols is None:
        ncols = cols
    if p == 2:
        r = r.astype(np.uint8)
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row == rows:
            break
        nz = np.flatnonzero(r[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        if p != 2:
            inv = pow(int(r[row, col]), -1, p)
            if inv != 1:
                r[row, col:] = (r[row, col:] * inv) % p
        others = np.flatnonzero(r[:, col])
        others = others[others != row]
        if others.size:
            if p == 2:
                r[others, col:] ^= r[row, col:]
            else:
                r[others, col:] = (
                    r[others, col:] - np.outer(r[others, col], r[row, col:])
                ) % p
        pivots.append(col)
        row += 1
    return r.astype(np.int64), pivots


def rank(a, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def kernel(a, p: int) -> np.ndarray:
    """Basis of the right null space, one vector per free column, as columns."""
    a = as_array(a, p)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-r[i, f]) % p
    return basis


def image_basis(a, p: int) -> np.ndarray:
    """The pivot columns of the original matrix (a basis of its column space)."""
    a = as_array(a, p)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    _, pivots = rref(a, p)
    return a[:, pivots]


def solve(a, b, p: int) -> np.ndarray | None:
    """Canonical solution of ``a @ x = b`` or ``None``.

    Free variables are set to zero after row reduction.  ``b`` may be a
    vector or a matrix of right-hand sides; with a matrix, ``None`` is
    returned as soon as one column is inconsistent.
    """
    a = as_array(a, p)
    b = as_array(b, p)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    if b.shape[0] != a.shape[0]:
        raise ValueError("right-hand side has the wrong length")
    n = a.shape[1]
    r, pivots = rref(np.concatenate([a, b], axis=1), p, ncols=n)
    k = len(pivots)
    if np.any(r[k:, n:]):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    x[pivots] = r[:k, n:]
    return x[:, 0] if vector else x


class Solver:
    """Row-reduces ``a`` once so many right-hand sides can be solved cheaply."""

    def __init__(self, a, p: int):
        a = as_array(a, p)
        self.p = p
        self.shape = a.shape
        m, n = a.shape
        aug = np.concatenate([a, np.eye(m, dtype=np.int64)], axis=1)
        r, pivots = rref(aug, p, ncols=n)
        self.pivots = pivots
        self.rank = len(pivots)
        self._transform = r[:, n:]

    def solve(self, b) -> np.ndarray | None:
        b = as_array(b, self.p)
        vector = b.ndim == 1
        if vector:
            b = b[:, None]
        if b.shape[0] != self.shape[0]:
            raise ValueError("right-hand side has the wrong length")
        c = matmul(self._transform, b, self.p)
        if np.any(c[self.rank:]):
            return None
        x = np.zeros((self.shape[1], b.shape[1]), dtype=np.int64)
        x[self.pivots] = c[: self.rank]
        return x[:, 0] if vector else x

    def consistent(self, b) -> bool:
        return self.solve(b) is not None


def inverse(a, p: int) -> np.ndarray:
    a = as_array(a, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    x = solve(a, np.eye(n, dtype=np.int64), p)
    if x is None:
        raise ValueError("matrix is singular")
    return x


def batch_invertible(mats: np.ndarray, p: int) -> np.ndarray:
    """Invertibility of a stack of square matrices, shape ``(batch, n, n)``."""
    m = as_array(mats, p).copy()
    batch, n, _ = m.shape
    alive = np.ones(batch, dtype=bool)
    idx = np.arange(batch)
    inv_table = np.array([0] + [pow(v, -1, p) for v in range(1, p)], dtype=np.int64)
    for col in range(n):
        sub = m[:, col:, col]
        has = sub.any(axis=1)
        alive &= has
        piv = col + np.argmax(sub != 0, axis=1)
        rows_piv = m[idx, piv].copy()
        m[idx, piv] = m[:, col]
        m[:, col] = rows_piv
        inv = inv_table[m[:, col, col]]
        m[:, col] = (m[:, col] * inv[:, None]) % p
        factors = m[:, col + 1:, col]
        m[:, col + 1:] = (
            m[:, col + 1:] - factors[:, :, None] * m[:, col][:, None, :]
        ) % p
    return alive


def complement_coordinates(basis: np.ndarray, p: int) -> list[int]:
    """Standard coordinates whose unit vectors span a complement of ``basis``.

    ``basis`` holds column vectors; the coordinates returned are those that
    are not pivots of the row-reduced span.
    """
    n = basis.shape[0]
    if basis.shape[1] == 0:
        return list(range(n))
    _, pivots = rref(basis.T, p)
    piv = set(pivots)
    return [j for j in range(n) if j not in piv]


def quotient_map(basis: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Projection F_p^n -> F_p^n / span(basis) in canonical coordinates.

    Returns the projection matrix and the coordinates (non-pivot positions)
    that index the quotient basis.
    """
    n = basis.shape[0]
    if basis.shape[1] == 0:
        return np.eye(n, dtype=np.int64), list(range(n))
    r, pivots = rref(basis.T, p)
    r = r[: len(pivots)]
    piv = set(pivots)
    keep = [j for j in range(n) if j not in piv]
    q = np.eye(n, dtype=np.int64)[keep]
    # v - sum_k v[piv_k] r_k has zeros at the pivots
    q = (q - matmul(r[:, keep].T, np.eye(n, dtype=np.int64)[pivots], p)) % p
    return q, keep


def coordinates(basis: np.ndarray, vectors: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of ``vectors`` (columns) in the independent columns ``basis``."""
    x = solve(basis, vectors, p)
    if x is None:
        raise ValueError("vectors are not in the span of the basis")
    return x


@dataclass(frozen=True)
class FpScalar:
    value: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        object.__setattr__(self, "value", self.value % self.p)

    def _other(self, other) -> int:
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise ModulusError(f"F_{self.p} vs F_{other.p}")
            return other.value
        return int(other)

    def __add__(self, other):
        return FpScalar(self.value + self._other(other), self.p)

    def __sub__(self, other):
        return FpScalar(self.value - self._other(other), self.p)

    def __mul__(self, other):
        return FpScalar(self.value * self._other(other), self.p)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return FpScalar(-self.value, self.p)

    def inverse(self) -> FpScalar:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return FpScalar(pow(self.value, -1, self.p), self.p)

    def __int__(self):
        return self.value


class FpMatrix:
    """An immutable dense matrix over F_p."""

    __slots__ = ("p", "data")

    def __init__(self, p: int, entries):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        data = np.array(entries, dtype=np.int64)
        if data.ndim == 1 and data.size == 0:
            data = data.reshape(0, 0)
        if data.ndim != 2:
            raise ValueError("FpMatrix entries must be 2-dimensional")
        if np.any(data < 0) or np.any(data >= p):
            data = data % p
        data.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("FpMatrix is immutable")

    @classmethod
    def identity(cls, p: int, n: int) -> FpMatrix:
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> FpMatrix:
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def entry(self, i: int, j: int) -> FpScalar:
        return FpScalar(int(self.data[i, j]), self.p)

    def _check(self, other: FpMatrix):
        if not isinstance(other, FpMatrix):
            raise TypeError("expected an FpMatrix")
        if other.p != self.p:
            raise ModulusError(f"F_{self.p} vs F_{other.p}")

    def __matmul__(self, other: FpMatrix) -> FpMatrix:
        return mat_mul(self, other)

    def __add__(self, other: FpMatrix) -> FpMatrix:
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("dimension mismatch")
        return FpMatrix(self.p, self.data + other.data)

    def __sub__(self, other: FpMatrix) -> FpMatrix:
        self._check(other)
        if other.shape != self.shape:
            raise ValueError("dimension mismatch")
        return FpMatrix(self.p, self.data - other.data)

    def __neg__(self) -> FpMatrix:
        return FpMatrix(self.p, -self.data)

    def scale(self, c: int) -> FpMatrix:
        return FpMatrix(self.p, self.data * int(c))

    @property
    def T(self) -> FpMatrix:
        return FpMatrix(self.p, self.data.T)

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.p, self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.data.tolist()})"

    def rref(self) -> tuple[FpMatrix, list[int]]:
        r, piv = rref(self.data, self.p)
        return FpMatrix(self.p, r), piv

    def rank(self) -> int:
        return rank(self.data, self.p)

    def kernel_basis(self) -> list[np.ndarray]:
        k = kernel(self.data, self.p)
        return [k[:, i].copy() for i in range(k.shape[1])]

    def image_basis(self) -> list[np.ndarray]:
        im = image_basis(self.data, self.p)
        return [im[:, i].copy() for i in range(im.shape[1])]

    def solve(self, b) -> np.ndarray | None:
        return solve(self.data, b, self.p)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.data.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> FpMatrix:
        p, rows, cols = int(obj["p"]), int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ValueError("matrix entries do not match rows/cols")
        if any(not (0 <= int(v) < p) for r in entries for v in r):
            raise ValueError(f"matrix entries must lie in [0, {p})")
        data = np.array(entries, dtype=np.int64).reshape(rows, cols)
        return cls(p, data)


def mat_mul(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    a._check(b)
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return FpMatrix(a.p, matmul(a.data, b.data, a.p))
