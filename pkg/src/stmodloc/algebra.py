"""Truncated polynomial algebras k[X_1..X_r]/(X_i^{e_i}) over F_p.

These are the group algebras of abelian p-groups written in the generators
X_i = g_i - 1.  The group itself is never materialised.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from . import ff


class CoproductKind(enum.Enum):
    GROUP_LIKE = "group_like"
    PRIMITIVE = "primitive"


def _is_power_of(n: int, p: int) -> bool:
    if n < p:
        return False
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class GroupAlgebra:
    """k[X_1..X_r]/(X_i^{e_i}) with the lexicographic monomial basis."""

    p: int
    exponents: tuple[int, ...]

    def __post_init__(self):
        if not ff.is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        exps = tuple(int(e) for e in self.exponents)
        object.__setattr__(self, "exponents", exps)
        for e in exps:
            if not _is_power_of(e, self.p):
                raise ValueError(f"exponent {e} is not a positive power of {self.p}")

    @property
    def ngens(self) -> int:
        return len(self.exponents)

    @cached_property
    def dim(self) -> int:
        return int(np.prod(self.exponents, dtype=np.int64)) if self.exponents else 1

    @cached_property
    def monomials(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(e) for e in self.exponents)))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {m: i for i, m in enumerate(self.monomials)}

    @property
    def socle_monomial(self) -> tuple[int, ...]:
        return tuple(e - 1 for e in self.exponents)

    @property
    def is_elementary_abelian(self) -> bool:
        return all(e == self.p for e in self.exponents)

    def mono_product(self, a, b) -> int | None:
        c = tuple(x + y for x, y in zip(a, b))
        if any(x >= e for x, e in zip(c, self.exponents)):
            return None
        return self.index[c]

    @cached_property
    def generator_matrices(self) -> tuple[np.ndarray, ...]:
        """Left multiplication by each X_i on the monomial basis."""
        mats = []
        for i in range(self.ngens):
            unit = tuple(int(j == i) for j in range(self.ngens))
            m = np.zeros((self.dim, self.dim), dtype=np.int64)
            for col, mono in enumerate(self.monomials):
                row = self.mono_product(unit, mono)
                if row is not None:
                    m[row, col] = 1
            m.flags.writeable = False
            mats.append(m)
        return tuple(mats)

    @cached_property
    def multiplication_table(self) -> np.ndarray:
        """``table[i, j]`` = index of monomial_i * monomial_j, or -1 for zero."""
        t = np.full((self.dim, self.dim), -1, dtype=np.int64)
        for i, a in enumerate(self.monomials):
            for j, b in enumerate(self.monomials):
                c = self.mono_product(a, b)
                if c is not None:
                    t[i, j] = c
        return t

    @cached_property
    def radical_basis(self) -> list[int]:
        return list(range(1, self.dim))

    @property
    def socle_index(self) -> int:
        return self.dim - 1

    def one(self) -> AlgebraElement:
        return self.monomial((0,) * self.ngens)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros(self.dim, dtype=np.int64))

    def monomial(self, mono: Sequence[int], coeff: int = 1) -> AlgebraElement:
        v = np.zeros(self.dim, dtype=np.int64)
        idx = self.index.get(tuple(mono))
        if idx is not None:
            v[idx] = coeff % self.p
        return AlgebraElement(self, v)

    def generator(self, i: int) -> AlgebraElement:
        return self.monomial(tuple(int(j == i) for j in range(self.ngens)))

    def socle_element(self) -> AlgebraElement:
        return self.monomial(self.socle_monomial)

    def element(self, coeffs) -> AlgebraElement:
        return AlgebraElement(self, ff.as_array(coeffs, self.p))

    def to_json(self) -> dict:
        return {"p": self.p, "exponents": list(self.exponents)}

    @classmethod
    def from_json(cls, obj: dict) -> GroupAlgebra:
        return cls(int(obj["p"]), tuple(int(e) for e in obj["exponents"]))

    def __repr__(self):
        return f"GroupAlgebra(p={self.p}, exponents={list(self.exponents)})"


def make_group_algebra(p: int, exponents: Sequence[int]) -> GroupAlgebra:
    return GroupAlgebra(p, tuple(exponents))


class AlgebraElement:
    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GroupAlgebra, coeffs: np.ndarray):
        coeffs = ff.as_array(coeffs, algebra.p)
        if coeffs.shape != (algebra.dim,):
            raise ValueError("coefficient vector has the wrong length")
        coeffs.flags.writeable = False
        self.algebra = algebra
        self.coeffs = coeffs

    def _same(self, other: AlgebraElement):
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise ValueError("elements live in different algebras")

    def __add__(self, other):
        self._same(other)
        return AlgebraElement(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same(other)
        return AlgebraElement(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlgebraElement(self.algebra, -self.coeffs)

    def scale(self, c: int) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.coeffs * int(c))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.algebra, self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def in_radical(self) -> bool:
        return self.coeffs[0] == 0

    def action_matrix(self) -> np.ndarray:
        """Matrix of left multiplication on the regular module."""
        a = self.algebra
        m = np.zeros((a.dim, a.dim), dtype=np.int64)
        table = a.multiplication_table
        for i in np.flatnonzero(self.coeffs):
            for j in range(a.dim):
                t = table[i, j]
                if t >= 0:
                    m[t, j] += self.coeffs[i]
        return m % a.p

    def inverse(self) -> AlgebraElement:
        if self.coeffs[0] == 0:
            raise ZeroDivisionError("element of the radical is not invertible")
        one = np.zeros(self.algebra.dim, dtype=np.int64)
        one[0] = 1
        return self.algebra.element(ff.solve(self.action_matrix(), one, self.algebra.p))

    def __repr__(self):
        terms = []
        for i in np.flatnonzero(self.coeffs):
            mono = self.algebra.monomials[i]
            name = "*".join(
                f"X{k + 1}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(mono) if e
            ) or "1"
            c = int(self.coeffs[i])
            terms.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(terms) or "0"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._same(b)
    alg = a.algebra
    out = np.zeros(alg.dim, dtype=np.int64)
    table = alg.multiplication_table
    for i in np.flatnonzero(a.coeffs):
        for j in np.flatnonzero(b.coeffs):
            t = table[i, j]
            if t >= 0:
                out[t] += a.coeffs[i] * b.coeffs[j]
    return AlgebraElement(alg, out)


@dataclass(frozen=True)
class Split:
    """A factorisation kG = kH (x) k[Z]/(Z^p).

    ``hgens`` are the generator indices of G that span kH (in order) and
    ``zgen`` is the single remaining generator, designated Z.
    """

    G: GroupAlgebra
    hgens: tuple[int, ...]
    zgen: int

    @property
    def p(self) -> int:
        return self.G.p

    @cached_property
    def kH(self) -> GroupAlgebra:
        return GroupAlgebra(self.G.p, tuple(self.G.exponents[i] for i in self.hgens))

    @cached_property
    def kC(self) -> GroupAlgebra:
        return GroupAlgebra(self.G.p, (self.G.p,))

    @classmethod
    def extend(cls, kH: GroupAlgebra) -> Split:
        """G = H x C with Z appended as the last generator."""
        G = GroupAlgebra(kH.p, kH.exponents + (kH.p,))
        return cls(G, tuple(range(kH.ngens)), kH.ngens)

    def assemble(self, h_actions: Sequence[np.ndarray], z_action: np.ndarray) -> list:
        """Order H-generator actions and the Z action as G's generator list."""
        actions = [None] * self.G.ngens
        for t, g in enumerate(self.hgens):
            actions[g] = h_actions[t]
        actions[self.zgen] = z_action
        return actions

    def to_json(self) -> dict:
        return {"G": self.G.to_json(), "hgens": list(self.hgens), "zgen": self.zgen}


def split_product(A: GroupAlgebra, hgens: Sequence[int]) -> tuple[GroupAlgebra, GroupAlgebra]:
    """The factorisation kG = kH (x) kC for a proper set of H-generators."""
    s = make_split(A, hgens)
    return s.kH, s.kC


def make_split(A: GroupAlgebra, hgens: Sequence[int]) -> Split:
    hgens = tuple(sorted(set(int(h) for h in hgens)))
    if any(h < 0 or h >= A.ngens for h in hgens):
        raise ValueError("H-generator index out of range")
    rest = [i for i in range(A.ngens) if i not in hgens]
    if len(rest) != 1:
        raise ValueError("complement of H must be a single generator")
    if A.exponents[rest[0]] != A.p:
        raise ValueError("complement generator must have exponent p")
    return Split(A, hgens, rest[0])


def coproduct_action_builder(kind: CoproductKind, p: int) -> Callable:
    """Rule for the action of a generator X on M (x) N.

    With ``A`` the action of X on M and ``B`` on N: group-like X = g - 1
    acts as (1+A)(x)(1+B) - 1; primitive X acts as A(x)1 + 1(x)B.
    """
    kind = CoproductKind(kind)
    if kind is CoproductKind.PRIMITIVE and p != 2:
        raise ValueError("the primitive coproduct is only available for p = 2")

    def build(A: np.ndarray, B: np.ndarray) -> np.ndarray:
        ia = np.eye(A.shape[0], dtype=np.int64)
        ib = np.eye(B.shape[0], dtype=np.int64)
        out = np.kron(A, ib) + np.kron(ia, B)
        if kind is CoproductKind.GROUP_LIKE:
            out = out + np.kron(A, B)
        return out % p

    return build


def antipode_polynomial(kind: CoproductKind, exponent: int, p: int) -> list[int]:
    """Coefficients c_k of S(X) = sum_k c_k X^k for a single generator."""
    kind = CoproductKind(kind)
    if kind is CoproductKind.PRIMITIVE:
        return [0, (-1) % p]
    # (1+X)^{-1} - 1 truncated at X^exponent
    return [0] + [((-1) ** k) % p for k in range(1, exponent)]


@dataclass(frozen=True)
class PiPoint:
    """A flat map k[t]/(t^p) -> kG, t -> sum_i lambda_i X_i."""

    algebra: GroupAlgebra
    lam: tuple[int, ...]

    @cached_property
    def image(self) -> AlgebraElement:
        u = self.algebra.zero()
        for i, c in enumerate(self.lam):
            if c:
                u = u + self.algebra.generator(i).scale(c)
        return u

    def to_json(self) -> dict:
        return {"lambda": list(self.lam)}


def make_pi_point(A: GroupAlgebra, lam: Sequence[int]) -> PiPoint:
    if not A.is_elementary_abelian:
        raise ValueError("pi-points are only built for elementary abelian algebras")
    lam = tuple(int(c) % A.p for c in lam)
    if len(lam) != A.ngens:
        raise ValueError("lambda must have one entry per generator")
    if not any(lam):
        raise ValueError("lambda must be nonzero")
    pt = PiPoint(A, lam)
    u = pt.image.action_matrix()
    if ff.matpow(u, A.p, A.p).any():
        raise ValueError("image of t does not satisfy u^p = 0")
    # free restriction of kG: rank(u^{p-1}) * p == dim
    if ff.rank(ff.matpow(u, A.p - 1, A.p), A.p) * A.p != A.dim:
        raise ValueError("restriction of kG along this map is not free")
    return pt
