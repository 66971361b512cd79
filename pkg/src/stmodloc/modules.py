"""Finite-dimensional kG-modules given by commuting nilpotent matrices.

A module stores one action matrix per generator X_i of the algebra, acting
on column vectors.  Everything stable-categorical (projectivity, syzygies,
stable homs) is computed with exact linear algebra, relying on kG being a
local self-injective algebra with one-dimensional socle spanned by
w = prod X_i^{e_i - 1}.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import ff
from .algebra import (
    AlgebraElement,
    CoproductKind,
    GroupAlgebra,
    PiPoint,
    antipode_polynomial,
    coproduct_action_builder,
)

DEFAULT_BUDGET = 2**20
MAX_BUDGET = 2**24
BUDGET_ENV = "STMODLOC_BUDGET"


class ModuleError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.flags.writeable = False
    return a


class KGModule:
    """A kG-module: ``actions[i]`` is the matrix of X_i."""

    def __init__(self, algebra: GroupAlgebra, actions, dim: int | None = None,
                 *, check: bool = True):
        p = algebra.p
        mats = []
        for a in actions:
            if isinstance(a, ff.FpMatrix):
                if a.p != p:
                    raise ff.ModulusError(f"action over F_{a.p} for an algebra over F_{p}")
                a = a.data
            mats.append(_frozen(ff.as_array(a, p)))
        if len(mats) != algebra.ngens:
            raise ModuleError(f"expected {algebra.ngens} action matrices, got {len(mats)}")
        if dim is None:
            if not mats:
                raise ModuleError("dimension is required when there are no generators")
            dim = mats[0].shape[0] if mats[0].ndim == 2 else 0
        for m in mats:
            if m.size == 0:
                continue
            if m.shape != (dim, dim):
                raise ModuleError(f"action matrix of shape {m.shape}, expected {(dim, dim)}")
        mats = [m if m.size else _frozen(np.zeros((dim, dim), dtype=np.int64)) for m in mats]
        self.algebra = algebra
        self.dim = int(dim)
        self.actions = tuple(mats)
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.algebra.p

    def validate(self):
        p = self.p
        for i, a in enumerate(self.actions):
            if ff.matpow(a, self.algebra.exponents[i], p).any():
                raise ModuleError(f"X_{i + 1}^{self.algebra.exponents[i]} does not act as zero")
        for i, j in itertools.combinations(range(len(self.actions)), 2):
            a, b = self.actions[i], self.actions[j]
            if not np.array_equal(ff.matmul(a, b, p), ff.matmul(b, a, p)):
                raise ModuleError(f"actions of X_{i + 1} and X_{j + 1} do not commute")

    @cached_property
    def mono_actions(self) -> np.ndarray:
        """Stack of matrices of every basis monomial, in the algebra's order."""
        p = self.p
        powers = []
        for a, e in zip(self.actions, self.algebra.exponents):
            pw = [np.eye(self.dim, dtype=np.int64)]
            for _ in range(1, e):
                pw.append(ff.matmul(pw[-1], a, p))
            powers.append(pw)
        out = np.zeros((self.algebra.dim, self.dim, self.dim), dtype=np.int64)
        for idx, mono in enumerate(self.algebra.monomials):
            m = np.eye(self.dim, dtype=np.int64)
            for g, k in enumerate(mono):
                if k:
                    m = ff.matmul(m, powers[g][k], p)
            out[idx] = m
        out.flags.writeable = False
        return out

    @property
    def socle_action(self) -> np.ndarray:
        return self.mono_actions[self.algebra.socle_index]

    def element_action(self, u: AlgebraElement) -> np.ndarray:
        if u.algebra != self.algebra:
            raise ModuleError("element of a different algebra")
        return np.tensordot(u.coeffs, self.mono_actions, axes=1) % self.p

    @cached_property
    def radical_span(self) -> np.ndarray:
        """Basis (columns) of rad(kG) * M = sum of the images of the X_i."""
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        return ff.image_basis(np.concatenate(self.actions, axis=1), self.p)

    @cached_property
    def socle_basis(self) -> np.ndarray:
        """Basis of {m : X_i m = 0 for all i}."""
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        return ff.kernel(np.concatenate(self.actions, axis=0), self.p)

    @cached_property
    def _cover(self):
        # top generators, cover matrix, kernel basis, section of the cover
        p, d = self.p, self.algebra.dim
        gens = ff.complement_coordinates(self.radical_span, p)
        n = len(gens)
        pi = np.zeros((self.dim, n * d), dtype=np.int64)
        for k, g in enumerate(gens):
            pi[:, k * d:(k + 1) * d] = self.mono_actions[:, :, g].T
        ker = ff.kernel(pi, p) if n else np.zeros((0, 0), dtype=np.int64)
        section = ff.solve(pi, np.eye(self.dim, dtype=np.int64), p) if n else None
        return gens, _frozen(pi), _frozen(ker), section

    def restrict_to(self, gens: Sequence[int]) -> KGModule:
        """Restriction to the subalgebra generated by the listed generators."""
        sub = GroupAlgebra(self.p, tuple(self.algebra.exponents[g] for g in gens))
        return KGModule(sub, [self.actions[g] for g in gens], self.dim, check=False)

    def is_zero(self) -> bool:
        return self.dim == 0

    def __eq__(self, other):
        if not isinstance(other, KGModule):
            return NotImplemented
        return (
            self.algebra == other.algebra
            and self.dim == other.dim
            and all(np.array_equal(a, b) for a, b in zip(self.actions, other.actions))
        )

    __hash__ = None

    def __repr__(self):
        return f"KGModule(dim={self.dim}, algebra={self.algebra!r})"

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra.to_json(),
            "dim": self.dim,
            "actions": [ff.FpMatrix(self.p, a).to_json() for a in self.actions],
        }

    @classmethod
    def from_json(cls, obj: dict) -> KGModule:
        alg = GroupAlgebra.from_json(obj["algebra"])
        dim = int(obj["dim"])
        acts = [ff.FpMatrix.from_json(m) for m in obj["actions"]]
        for m in acts:
            if m.shape != (dim, dim):
                raise ModuleError("action matrix shape does not match dim")
        return cls(alg, acts, dim)


def _same_algebra(*mods: KGModule):
    alg = mods[0].algebra
    for m in mods[1:]:
        if m.algebra != alg:
            raise ModuleError("modules over different algebras")


class ModuleHom:
    """A kG-linear map; the matrix sends source coordinates to target coordinates."""

    def __init__(self, source: KGModule, target: KGModule, matrix, *, check: bool = True):
        _same_algebra(source, target)
        m = ff.as_array(matrix, source.p).reshape(target.dim, source.dim)
        self.source = source
        self.target = target
        self.matrix = _frozen(m)
        if check and not is_hom(source, target, self.matrix):
            raise ModuleError("matrix does not commute with the module actions")

    def compose(self, other: ModuleHom) -> ModuleHom:
        """``self`` after ``other``."""
        return ModuleHom(other.source, self.target,
                         ff.matmul(self.matrix, other.matrix, self.source.p), check=False)

    def rank(self) -> int:
        return ff.rank(self.matrix, self.source.p)

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()


def is_hom(source: KGModule, target: KGModule, matrix: np.ndarray) -> bool:
    p = source.p
    return all(
        np.array_equal(ff.matmul(matrix, a, p), ff.matmul(b, matrix, p))
        for a, b in zip(source.actions, target.actions)
    )


# constructions

def zero_module(A: GroupAlgebra) -> KGModule:
    return KGModule(A, [np.zeros((0, 0), dtype=np.int64)] * A.ngens, 0)


def trivial_module(A: GroupAlgebra) -> KGModule:
    return KGModule(A, [np.zeros((1, 1), dtype=np.int64)] * A.ngens, 1)


def regular_module(A: GroupAlgebra) -> KGModule:
    return KGModule(A, A.generator_matrices, A.dim, check=False)


def free_module(A: GroupAlgebra, rank: int) -> KGModule:
    return direct_sum(*([regular_module(A)] * rank)) if rank else zero_module(A)


def _block_diag(mats: Sequence[np.ndarray]) -> np.ndarray:
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=np.int64)
    o = 0
    for m in mats:
        k = m.shape[0]
        out[o:o + k, o:o + k] = m
        o += k
    return out


def direct_sum(*mods: KGModule) -> KGModule:
    if not mods:
        raise ModuleError("direct sum of nothing")
    _same_algebra(*mods)
    A = mods[0].algebra
    acts = [_block_diag([m.actions[i] for m in mods]) for i in range(A.ngens)]
    return KGModule(A, acts, sum(m.dim for m in mods), check=False)


def _kinds(kind, ngens: int) -> list[CoproductKind]:
    if isinstance(kind, (CoproductKind, str)):
        return [CoproductKind(kind)] * ngens
    kinds = [CoproductKind(k) for k in kind]
    if len(kinds) != ngens:
        raise ModuleError("one coproduct kind per generator is required")
    return kinds


def dual(M: KGModule, kind=CoproductKind.GROUP_LIKE) -> KGModule:
    """k-linear dual; X_i acts by the transpose of S(X_i)."""
    p = M.p
    acts = []
    for a, e, k in zip(M.actions, M.algebra.exponents, _kinds(kind, M.algebra.ngens)):
        poly = antipode_polynomial(k, e, p)
        s = np.zeros_like(a)
        power = np.eye(M.dim, dtype=np.int64)
        for c in poly[1:]:
            power = ff.matmul(power, a, p)
            s = s + c * power
        acts.append((s % p).T)
    return KGModule(M.algebra, acts, M.dim, check=False)


def tensor_product(M: KGModule, N: KGModule, kind=CoproductKind.GROUP_LIKE) -> KGModule:
    """M (x)_k N; ``kind`` is one coproduct for all generators or one per generator."""
    _same_algebra(M, N)
    p = M.p
    acts = []
    for a, b, k in zip(M.actions, N.actions, _kinds(kind, M.algebra.ngens)):
        acts.append(coproduct_action_builder(k, p)(a, b))
    return KGModule(M.algebra, acts, M.dim * N.dim)


def restrict_along(M: KGModule, pi: PiPoint) -> KGModule:
    """Restriction to k[t]/(t^p) along a pi-point."""
    if pi.algebra != M.algebra:
        raise ModuleError("pi-point for a different algebra")
    target = GroupAlgebra(M.p, (M.p,))
    return KGModule(target, [M.element_action(pi.image)], M.dim)


def submodule(M: KGModule, basis: np.ndarray) -> KGModule:
    """The submodule spanned by the (independent) columns of ``basis``."""
    p = M.p
    basis = ff.as_array(basis, p)
    k = basis.shape[1]
    if k == 0:
        return zero_module(M.algebra)
    _, rows = ff.rref(basis.T, p)
    if len(rows) != k:
        raise ModuleError("submodule basis is not independent")
    inv = ff.inverse(basis[rows], p)
    acts = []
    for a in M.actions:
        img = ff.matmul(a, basis, p)
        coords = ff.matmul(inv, img[rows], p)
        if not np.array_equal(ff.matmul(basis, coords, p), img):
            raise ModuleError("subspace is not invariant under the action")
        acts.append(coords)
    return KGModule(M.algebra, acts, k, check=False)


def quotient(M: KGModule, basis: np.ndarray) -> tuple[KGModule, np.ndarray]:
    """M / span(basis) with the projection matrix."""
    p = M.p
    q, keep = ff.quotient_map(ff.as_array(basis, p), p)
    lift = np.eye(M.dim, dtype=np.int64)[:, keep]
    acts = [ff.matmul(ff.matmul(q, a, p), lift, p) for a in M.actions]
    return KGModule(M.algebra, acts, len(keep), check=False), q


def extend_from_generators(target: KGModule, images: np.ndarray) -> np.ndarray:
    """Matrix of the map kG^n -> target sending the k-th free generator to images[:, k]."""
    d = target.algebra.dim
    n = images.shape[1]
    if n == 0 or target.dim == 0:
        return np.zeros((target.dim, n * d), dtype=np.int64)
    flat = target.mono_actions.reshape(d * target.dim, target.dim)
    prod = ff.matmul(flat, images, target.p).reshape(d, target.dim, n)
    return prod.transpose(1, 2, 0).reshape(target.dim, n * d)


# projectivity

def free_rank(M: KGModule) -> int:
    if M.dim == 0:
        return 0
    return ff.rank(M.socle_action, M.p)


def is_projective(M: KGModule) -> bool:
    return free_rank(M) * M.algebra.dim == M.dim


def _strip(M: KGModule):
    A, p = M.algebra, M.p
    comp = [A.index[tuple(e - 1 - x for e, x in zip(A.exponents, mono))] for mono in A.monomials]
    core, inc, witnesses = M, np.eye(M.dim, dtype=np.int64), []
    while core.dim:
        W = core.socle_action
        cols = np.flatnonzero(W.any(axis=0))
        if cols.size == 0:
            break
        j = int(cols[0])
        row = int(np.flatnonzero(W[:, j])[0])
        scale = pow(int(W[row, j]), -1, p)
        # rho(m) = sum_a f(X^{e-1-a} m) X^a with f = e_row / w.m[row]; rho is kG-linear
        rho = (core.mono_actions[comp][:, row, :] * scale) % p
        K = ff.kernel(rho, p)
        witnesses.append(inc[:, j].copy())
        core = submodule(core, K)
        inc = ff.matmul(inc, K, p)
    return core, len(witnesses), inc, witnesses


def strip_free_summands(M: KGModule) -> tuple[KGModule, int]:
    """Split M = core (+) kG^r with core projective-free."""
    core, r, _, _ = _strip(M)
    return core, r


def stable_core(M: KGModule) -> tuple[KGModule, np.ndarray]:
    """Projective-free core with its inclusion matrix into M."""
    core, _, inc, _ = _strip(M)
    return core, inc


def projective_cover(M: KGModule) -> tuple[KGModule, ModuleHom]:
    gens, pi, _, _ = M._cover
    P = free_module(M.algebra, len(gens))
    return P, ModuleHom(P, M, pi, check=False)


def top_generators(M: KGModule) -> list[int]:
    """Coordinates of the basis vectors chosen as minimal generators."""
    return list(M._cover[0])


def omega(M: KGModule) -> KGModule:
    gens, pi, ker, _ = M._cover
    if not gens:
        return zero_module(M.algebra)
    return submodule(free_module(M.algebra, len(gens)), ker)


def injective_hull(M: KGModule) -> tuple[KGModule, ModuleHom]:
    """A monomorphism of M into a projective (= injective) module."""
    P, pi = projective_cover(dual(M))
    I = dual(P)
    return I, ModuleHom(M, I, pi.matrix.T, check=False)


def omega_inverse(M: KGModule) -> KGModule:
    return dual(omega(dual(M)))


def omega_n(M: KGModule, n: int) -> KGModule:
    """Omega^n(M); n = 0 gives the projective-free core."""
    out = strip_free_summands(M)[0]
    step = omega if n > 0 else omega_inverse
    for _ in range(abs(n)):
        out = step(out)
    return out


# homomorphisms

def hom_space(M: KGModule, N: KGModule) -> np.ndarray:
    """Basis of Hom_kG(M, N) as a stack of matrices, shape (h, N.dim, M.dim).

    A hom is determined by the images y_k of the top generators of M; these
    must kill the kernel of the projective cover.
    """
    _same_algebra(M, N)
    p, d = M.p, M.algebra.dim
    if M.dim == 0 or N.dim == 0:
        return np.zeros((0, N.dim, M.dim), dtype=np.int64)
    gens, pi, ker, section = M._cover
    n, kdim = len(gens), ker.shape[1]
    mono = N.mono_actions
    if kdim:
        kr = ker.reshape(n, d, kdim)
        eqs = np.einsum("kac,aij->cikj", kr, mono).reshape(kdim * N.dim, n * N.dim) % p
        Y = ff.kernel(eqs, p)
    else:
        Y = np.eye(n * N.dim, dtype=np.int64)
    h = Y.shape[1]
    if h == 0:
        return np.zeros((0, N.dim, M.dim), dtype=np.int64)
    y = Y.reshape(n, N.dim, h)
    fp = np.einsum("aij,kjh->hika", mono, y).reshape(h, N.dim, n * d) % p
    out = np.stack([ff.matmul(f, section, p) for f in fp])
    return out


def _span_rank(mats: np.ndarray, p: int) -> int:
    if mats.shape[0] == 0:
        return 0
    return ff.rank(mats.reshape(mats.shape[0], mats.shape[1] * mats.shape[2]), p)


def phom_space(M: KGModule, N: KGModule) -> np.ndarray:
    """Basis of the maps M -> N factoring through a projective.

    Such a map factors through the projective cover of N.
    """
    _same_algebra(M, N)
    p = M.p
    P, pi = projective_cover(N)
    G = hom_space(M, P)
    if G.shape[0] == 0:
        return np.zeros((0, N.dim, M.dim), dtype=np.int64)
    comp = np.stack([ff.matmul(pi.matrix, g, p) for g in G])
    flat = comp.reshape(comp.shape[0], N.dim * M.dim)
    basis = ff.image_basis(flat.T, p).T
    return basis.reshape(-1, N.dim, M.dim)


@dataclass
class StableHomSpace:
    hom: np.ndarray
    phom: np.ndarray
    classes: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.hom.shape[0] - self.phom.shape[0]


def stable_hom(M: KGModule, N: KGModule) -> StableHomSpace:
    """Hom modulo PHom, with ``classes`` a basis of a complement of PHom in Hom."""
    p = M.p
    H = hom_space(M, N)
    PH = phom_space(M, N)
    if H.shape[0] == 0:
        return StableHomSpace(H, PH, H)
    width = N.dim * M.dim
    stacked = np.concatenate([PH.reshape(PH.shape[0], width), H.reshape(H.shape[0], width)])
    _, piv = ff.rref(stacked.T, p)
    chosen = [c - PH.shape[0] for c in piv if c >= PH.shape[0]]
    return StableHomSpace(H, PH, H[chosen])


def is_stably_zero(f: np.ndarray, M: KGModule, N: KGModule) -> bool:
    PH = phom_space(M, N)
    f = ff.as_array(f, M.p).reshape(1, N.dim * M.dim)
    if PH.shape[0] == 0:
        return not f.any()
    flat = PH.reshape(PH.shape[0], N.dim * M.dim)
    return ff.rank(np.concatenate([flat, f]), M.p) == ff.rank(flat, M.p)


def mapping_cone(f: np.ndarray, M: KGModule, N: KGModule) -> KGModule:
    """Third object of the triangle of f: coker(M -> N (+) I(M))."""
    I, iota = injective_hull(M)
    g = np.concatenate([ff.as_array(f, M.p), iota.matrix], axis=0)
    return quotient(direct_sum(N, I), g)[0]


def is_stable_iso_map(f: np.ndarray, M: KGModule, N: KGModule) -> bool:
    if not is_hom(M, N, ff.as_array(f, M.p)):
        return False
    return is_projective(mapping_cone(f, M, N))


def loewy_profile(M: KGModule) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Dimensions of the radical series and of the socle series."""
    p = M.p
    rad = []
    basis = np.eye(M.dim, dtype=np.int64)
    while basis.shape[1]:
        rad.append(basis.shape[1])
        imgs = np.concatenate([ff.matmul(a, basis, p) for a in M.actions], axis=1)
        basis = ff.image_basis(imgs, p)
    # socle series: dim of the annihilator of rad^k for k = 1, 2, ...
    soc = []
    mats = [np.eye(M.dim, dtype=np.int64)]
    while M.dim:
        mats = [ff.matmul(m, a, p) for m in mats for a in M.actions]
        mats = [m for m in mats if m.any()]
        if not mats:
            soc.append(M.dim)
            break
        mats = [ff.image_basis(np.concatenate(mats, axis=0).T, p).T]
        soc.append(M.dim - mats[0].shape[0])
    return tuple(rad), tuple(soc)


@dataclass
class StableIsoResult:
    status: str
    reason: str
    iso: np.ndarray | None = None

    @property
    def yes(self) -> bool:
        return self.status == "yes"


def enumeration_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    value = int(raw)
    if not 1 <= value <= MAX_BUDGET:
        raise ValueError(f"{BUDGET_ENV} must lie in [1, {MAX_BUDGET}]")
    return value


def is_stably_isomorphic(M: KGModule, N: KGModule, *, budget: int | None = None,
                         candidates: Sequence[np.ndarray] = (),
                         samples: int = 2048) -> StableIsoResult:
    """Tri-state stable isomorphism test.

    Candidate maps M -> N are tried first (a map is a stable iso iff its
    mapping cone is projective).  Otherwise both modules are reduced to
    their projective-free cores, cheap invariants are compared, and an
    isomorphism between the cores is searched for: exhaustively in
    lexicographic coefficient order when p^dim Hom <= budget, else by a
    fixed-seed random sample.
    """
    _same_algebra(M, N)
    p = M.p
    budget = enumeration_budget() if budget is None else budget
    for f in candidates:
        if is_stable_iso_map(f, M, N):
            return StableIsoResult("yes", "candidate map has projective cone", ff.as_array(f, p))
    cm, _ = stable_core(M)
    cn, _ = stable_core(N)
    if cm.dim != cn.dim:
        return StableIsoResult("no", f"core dimensions differ: {cm.dim} vs {cn.dim}")
    if cm.dim == 0:
        return StableIsoResult("yes", "both modules are projective",
                               np.zeros((0, 0), dtype=np.int64))
    lm, ln = loewy_profile(cm), loewy_profile(cn)
    if lm != ln:
        return StableIsoResult("no", f"Loewy profiles differ: {lm} vs {ln}")
    H = hom_space(cm, cn)
    h = H.shape[0]
    if h == 0:
        return StableIsoResult("no", "no homomorphisms between the cores")
    n = cm.dim
    if p ** h <= budget:
        chunk = max(1, min(4096, 2**22 // max(1, n * n)))
        grid = itertools.product(range(p), repeat=h)
        while True:
            coeffs = np.array(list(itertools.islice(grid, chunk)), dtype=np.int64)
            if coeffs.size == 0:
                break
            mats = np.tensordot(coeffs, H, axes=1) % p
            ok = ff.batch_invertible(mats, p)
            if ok.any():
                return StableIsoResult("yes", "isomorphism of cores found by enumeration",
                                       mats[int(np.argmax(ok))])
        return StableIsoResult("no", f"exhaustive search over {p ** h} maps found no isomorphism")
    rng = np.random.default_rng(0)
    for start in range(0, samples, 256):
        coeffs = rng.integers(0, p, size=(min(256, samples - start), h))
        mats = np.tensordot(coeffs, H, axes=1) % p
        ok = ff.batch_invertible(mats, p)
        if ok.any():
            return StableIsoResult("yes", "isomorphism of cores found by sampling",
                                   mats[int(np.argmax(ok))])
    return StableIsoResult("unknown", f"hom space of dimension {h} exceeds the budget")
