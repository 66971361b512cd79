"""Tate cohomology of kH with trivial coefficients, negative-degree products,
and the desk-scale support and locality checks.

Negative classes live in Hom_kH(k, P_m) = soc(P_m) of a minimal resolution,
where Ĥ^{-m-1}(H, k) needs no quotient.  Products are read off from lifted
chain maps of the augmented resolution.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import ff
from .algebra import GroupAlgebra, Split
from .modules import (
    KGModule,
    ModuleError,
    is_hom,
    phom_space,
    regular_module,
    stable_hom,
    trivial_module,
)
from .resolutions import (
    AugmentedResolution,
    ChainLift,
    ResolutionError,
    build_N,
    free_map_from_images,
    inclusion,
    inflate,
    lift_augmented,
    lift_chain_map,
    minimal_resolution,
)


class TateError(ValueError):
    pass


# dimensions

def _resolution_for(kH: GroupAlgebra, length: int,
                    resolution: AugmentedResolution | None) -> AugmentedResolution:
    if resolution is None:
        return minimal_resolution(kH, length=max(1, length))
    if resolution.length < length:
        raise TateError(f"resolution of length {resolution.length} is too short (need {length})")
    return resolution


def cocycle_dim(P: AugmentedResolution, d: int) -> int:
    """dim H^d(H, k) from the cochain complex Hom_kH(P_*, k)."""
    if d < 0 or d + 1 > P.length:
        raise TateError(f"degree {d} is outside the computed range")
    p = P.p

    def functionals(i):
        mods = P.modules[i]
        if mods.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        stacked = np.concatenate([a.T for a in mods.actions], axis=0) if mods.actions else \
            np.zeros((0, mods.dim), dtype=np.int64)
        return ff.kernel(stacked, p).T

    F = functionals(d)
    ker = F.shape[0] - ff.rank(ff.matmul(F, P.boundaries[d + 1], p), p)
    if d == 0:
        return ker
    im = ff.rank(ff.matmul(functionals(d - 1), P.boundaries[d], p), p)
    return ker - im


def socle_homology_dim(P: AugmentedResolution, m: int) -> int:
    """dim Ĥ^{-m-1}(H, k) as homology of soc(P_*) with the augmentation appended."""
    if m < 0 or m + 1 > P.length:
        raise TateError(f"degree {-m - 1} is outside the computed range")
    p = P.p
    S = P.modules[m].socle_basis
    cycles = S.shape[1] - ff.rank(ff.matmul(P.aug_boundary(m + 1), S, p), p)
    S1 = P.modules[m + 1].socle_basis
    bounds = ff.rank(ff.matmul(P.boundaries[m + 1], S1, p), p)
    return cycles - bounds


def tate_dim(kH: GroupAlgebra, d: int, length: int | None = None, *,
             method: str = "homology", resolution: AugmentedResolution | None = None) -> int:
    """dim Ĥ^d(H, k).

    ``method="homology"`` counts socle homology (d <= -1) or cocycles modulo
    coboundaries (d >= 1) and works for any resolution; ``method="betti"``
    reads Betti numbers of a minimal resolution.  Ĥ^0 is k.
    """
    if kH.dim == 1:
        raise TateError("the trivial group has no Tate cohomology here")
    if d == 0:
        return 1
    need = (abs(d) if d < 0 else d + 1)
    if length is not None and length < need:
        raise TateError(f"degree {d} is outside the computed range")
    P = _resolution_for(kH, max(need, length or 0), resolution)
    if method == "betti":
        if not P.minimal:
            raise TateError("Betti numbers need a minimal resolution")
        return P.betti[d] if d > 0 else P.betti[-d - 1]
    if method != "homology":
        raise ValueError(f"unknown method {method!r}")
    return cocycle_dim(P, d) if d > 0 else socle_homology_dim(P, -d - 1)


# classes and products

@dataclass(frozen=True)
class TateClass:
    """An element of Ĥ^d(H, k).

    For d <= -1 the representative is a socle vector of P_{-d-1}; for d = 0
    it is a length-one vector holding a scalar.
    """

    algebra: GroupAlgebra
    degree: int
    representative: np.ndarray = field(compare=False)

    def __post_init__(self):
        rep = ff.as_array(self.representative, self.algebra.p).reshape(-1)
        rep.flags.writeable = False
        object.__setattr__(self, "representative", rep)
        if self.degree >= 1:
            raise TateError("only classes of degree <= 0 are represented")

    def __eq__(self, other):
        if not isinstance(other, TateClass):
            return NotImplemented
        return (self.algebra == other.algebra and self.degree == other.degree
                and np.array_equal(self.representative, other.representative))

    __hash__ = None

    @property
    def resolution_degree(self) -> int:
        return -self.degree - 1

    def is_zero(self) -> bool:
        return not self.representative.any()


def unit_class(kH: GroupAlgebra) -> TateClass:
    return TateClass(kH, 0, np.array([1]))


class TateRing:
    """Negative Tate cohomology over a fixed minimal resolution, with cached lifts."""

    def __init__(self, P: AugmentedResolution):
        if not P.minimal:
            raise TateError("products are read off a minimal resolution")
        if P.target.dim != 1:
            raise TateError("the resolution must resolve the trivial module")
        self.P = P
        self._lifts: dict[tuple, ChainLift] = {}

    @property
    def algebra(self) -> GroupAlgebra:
        return self.P.algebra

    @property
    def p(self) -> int:
        return self.P.p

    def basis(self, degree: int) -> np.ndarray:
        """Columns spanning Ĥ^degree (degree <= 0)."""
        if degree == 0:
            return np.ones((1, 1), dtype=np.int64)
        m = -degree - 1
        if m > self.P.length:
            raise TateError("resolution too short")
        return self.P.modules[m].socle_basis

    def basis_class(self, degree: int, i: int) -> TateClass:
        return TateClass(self.algebra, degree, self.basis(degree)[:, i])

    def coordinates(self, cls: TateClass) -> np.ndarray:
        return ff.coordinates(self.basis(cls.degree), cls.representative[:, None], self.p)[:, 0]

    def lift(self, alpha: TateClass, upto: int) -> ChainLift:
        key = (alpha.degree, alpha.representative.tobytes())
        f = self._lifts.get(key)
        if f is None or len(f.components) <= upto:
            f = lift_chain_map(self.P, alpha.representative, alpha.resolution_degree, upto)
            self._lifts[key] = f
        return f

    def product(self, alpha: TateClass, beta: TateClass, lift: ChainLift | None = None) -> TateClass:
        """alpha * beta; for negative classes this is lift(alpha) applied to beta."""
        if alpha.algebra != self.algebra or beta.algebra != self.algebra:
            raise TateError("classes over a different algebra")
        if alpha.degree == 0:
            return TateClass(self.algebra, beta.degree, alpha.representative[0] * beta.representative)
        if beta.degree == 0:
            return TateClass(self.algebra, alpha.degree, beta.representative[0] * alpha.representative)
        a, b = alpha.resolution_degree, beta.resolution_degree
        if a + b + 1 > self.P.length:
            raise TateError(f"resolution too short for a product in degree {-(a + b + 2)}")
        f = self.lift(alpha, b + 1) if lift is None else lift
        y = ff.matmul(f.at_resolution_degree(b), beta.representative[:, None], self.p)[:, 0]
        return TateClass(self.algebra, alpha.degree + beta.degree, y)


def negative_product(alpha: TateClass, beta: TateClass,
                     P: AugmentedResolution | None = None) -> TateClass:
    """Product of two negative classes by composing lifted chain maps."""
    if alpha.degree > -1 or beta.degree > -1:
        raise TateError("both classes must have negative degree")
    need = alpha.resolution_degree + beta.resolution_degree + 1
    if P is None:
        P = minimal_resolution(alpha.algebra, length=max(1, need))
    return TateRing(P).product(alpha, beta)


def perturb_lift(P: AugmentedResolution, lift: ChainLift, rng: np.random.Generator) -> ChainLift:
    """Add the null-homotopic map dh + hd for a random kH-linear h with h_0 = 0."""
    p, s = P.p, lift.shift
    comps = lift.components
    hs = [None]
    for c in range(1, len(comps)):
        t = c + s + 1
        if t > P.length + 1:
            hs.append(None)
            continue
        tgt = P.aug_module(t)
        ngen = P.betti[c - 1]
        images = rng.integers(0, p, size=(tgt.dim, ngen))
        hs.append(free_map_from_images(P, c - 1, tgt, images))
    out = [comps[0]]
    for c in range(1, len(comps)):
        f = comps[c].copy()
        if hs[c] is not None:
            f = f + ff.matmul(P.aug_boundary(c + s + 1), hs[c], p)
        if c >= 2 and hs[c - 1] is not None:
            f = f + ff.matmul(hs[c - 1], P.aug_boundary(c), p)
        out.append(f % p)
    return ChainLift(s, out)


def is_chain_lift(src: AugmentedResolution, dst: AugmentedResolution, lift: ChainLift) -> bool:
    """Check kH-linearity and the relations d' f_c = f_{c-1} d of a lift."""
    p, s = src.p, lift.shift
    for c, f in enumerate(lift.components):
        if c >= 1 and not is_hom(src.aug_module(c), dst.aug_module(c + s), f):
            return False
        if c >= 1:
            left = ff.matmul(dst.aug_boundary(c + s), f, p)
            right = ff.matmul(lift.components[c - 1], src.aug_boundary(c), p)
            if not np.array_equal(left % p, right):
                return False
    return True


# the endomorphism ring table

@dataclass
class EndoRingTable:
    """Ĥ^{-d}(H, k) for 0 <= d <= N with all structure constants landing in range."""

    algebra: GroupAlgebra
    N: int
    dims: list[int]
    products: list[tuple[tuple[int, int], tuple[int, int], tuple[int, ...]]]

    def product(self, a: tuple[int, int], b: tuple[int, int]) -> tuple[int, ...]:
        for x, y, r in self.products:
            if x == tuple(a) and y == tuple(b):
                return r
        raise KeyError((a, b))

    @cached_property
    def radical_square_zero(self) -> bool:
        """Every computed product of two strictly negative basis classes vanishes."""
        return all(not any(r) for (da, _), (db, _), r in self.products if da > 0 and db > 0)

    @cached_property
    def periodic_structure(self) -> bool:
        """All graded pieces are one-dimensional and every basis product is nonzero."""
        return all(d == 1 for d in self.dims) and all(any(r) for _, _, r in self.products)

    def to_json(self) -> dict:
        return {
            "H": self.algebra.to_json(),
            "N": self.N,
            "dims": list(self.dims),
            "products": [{"a": list(a), "b": list(b), "result": list(r)}
                         for a, b, r in self.products],
            "flags": {"radical_square_zero": self.radical_square_zero,
                      "periodic_structure": self.periodic_structure},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


class _Transport:
    """Negative classes of an arbitrary resolution F pushed to a minimal one P."""

    def __init__(self, F: AugmentedResolution, P: AugmentedResolution, N: int):
        self.F, self.P, self.p = F, P, P.p
        # comparison map F -> P over the identity of k
        self.phi = lift_augmented(F, P, 0, np.ones((1, 1), dtype=np.int64), N)
        self._lifts: dict[tuple, ChainLift] = {}

    def pull(self, m: int, alpha: np.ndarray) -> np.ndarray:
        """A socle cycle z of F_m with phi(z) = alpha."""
        p, F = self.p, self.F
        S = F.modules[m].socle_basis
        A = np.concatenate([ff.matmul(F.aug_boundary(m + 1), S, p),
                            ff.matmul(self.phi.components[m + 1], S, p)], axis=0)
        rhs = np.concatenate([np.zeros(F.aug_dim(m), dtype=np.int64), alpha])
        c = ff.solve(A, rhs, p)
        if c is None:
            raise TateError("comparison map does not reach this class")
        return ff.matmul(S, c[:, None], p)[:, 0]

    def lift(self, m: int, alpha: np.ndarray, upto: int) -> ChainLift:
        """Lift of the pulled-back class, reused while it reaches far enough."""
        key = (m, alpha.tobytes())
        f = self._lifts.get(key)
        if f is None or len(f.components) <= upto:
            f = lift_augmented(self.F, self.F, m + 1, self.pull(m, alpha), upto)
            self._lifts[key] = f
        return f

    def push(self, m: int, z: np.ndarray) -> np.ndarray:
        return ff.matmul(self.phi.components[m + 1], z[:, None], self.p)[:, 0]


def endo_ring_table(kH: GroupAlgebra, N: int,
                    resolution: AugmentedResolution | None = None) -> EndoRingTable:
    """Structure constants of Ĥ^{<=0}(H, k) down to degree -N.

    Basis classes are socle vectors of the minimal resolution.  When a
    different (possibly non-minimal) resolution of k is supplied, products
    are composed there and transported back through a comparison map, so
    the table does not depend on how the resolution was built.
    """
    if N < 1:
        raise TateError("N must be at least 1")
    if kH.dim == 1:
        raise TateError("the trivial group has no Tate cohomology here")
    P = minimal_resolution(kH, length=N)
    ring = TateRing(P)
    transport = None
    if resolution is not None:
        if resolution.algebra != kH or resolution.target.dim != 1:
            raise TateError("resolution must resolve the trivial kH-module")
        if resolution.length < N - 1:
            raise TateError("resolution too short")
        transport = _Transport(resolution, P, N)
    dims = [1] + [P.modules[d - 1].socle_basis.shape[1] for d in range(1, N + 1)]
    products = []
    for da in range(N + 1):
        for db in range(N + 1 - da):
            for i in range(dims[da]):
                alpha = ring.basis_class(-da, i)
                if da and db:
                    # one lift per class, long enough for the whole row
                    if transport is None:
                        ring.lift(alpha, N - da)
                    else:
                        transport.lift(da - 1, alpha.representative, N - da)
                for j in range(dims[db]):
                    beta = ring.basis_class(-db, j)
                    if transport is None or da == 0 or db == 0:
                        gamma = ring.product(alpha, beta)
                    else:
                        gamma = _transported_product(transport, alpha, beta)
                    coords = ring.coordinates(gamma)
                    products.append(((da, i), (db, j), tuple(int(c) for c in coords)))
    return EndoRingTable(kH, N, dims, products)


def _transported_product(t: _Transport, alpha: TateClass, beta: TateClass) -> TateClass:
    a, b = alpha.resolution_degree, beta.resolution_degree
    zb = t.pull(b, beta.representative)
    f = t.lift(a, alpha.representative, b + 1)
    y = ff.matmul(f.components[b + 1], zb[:, None], t.p)[:, 0]
    return TateClass(alpha.algebra, alpha.degree + beta.degree, t.push(a + b + 1, y))


# periodic case: the degree-zero part of the localized cohomology ring

@dataclass
class LocalizationView:
    algebra: GroupAlgebra
    N: int
    dims: list[int]
    nonzero: dict[tuple[int, int], bool]
    table_dims: list[int]
    mismatches: list[str]

    @property
    def match(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "H": self.algebra.to_json(),
            "N": self.N,
            "dims": self.dims,
            "table_dims": self.table_dims,
            "match": self.match,
            "mismatches": self.mismatches,
        }


def localization_ring_view(kH: GroupAlgebra, N: int,
                           table: EndoRingTable | None = None) -> LocalizationView:
    """Compare the table with the degree-zero part of H^*(G, k)[zeta^{-1}] for cyclic H.

    With zeta a periodicity generator, that part is the sum over j >= 0 of
    Ĥ^{-j}(H, k) (x) H^j(C_p, k): one dimension per j, and e_i e_j = 0
    exactly when i, j are both odd and |H| > 2 (odd-degree classes square
    to zero in both factors unless the group has order 2).
    """
    if kH.ngens != 1:
        raise TateError("the localization view needs a cyclic group")
    q = kH.exponents[0]
    if q == 1:
        raise TateError("the trivial group has no Tate cohomology here")
    table = endo_ring_table(kH, N) if table is None else table
    dims = [1] * (N + 1)
    nonzero = {}
    for i in range(N + 1):
        for j in range(N + 1 - i):
            nonzero[(i, j)] = not (i % 2 == 1 and j % 2 == 1 and q != 2)
    mismatches = []
    if table.dims != dims:
        mismatches.append(f"dims {table.dims} vs {dims}")
    else:
        for (da, i), (db, j), r in table.products:
            if bool(any(r)) != nonzero[(da, db)]:
                mismatches.append(f"product of degrees -{da}, -{db}: table {list(r)}")
    return LocalizationView(kH, N, dims, nonzero, list(table.dims), mismatches)


# support at rational and quadratic points

def _irreducible_quadratic(p: int) -> tuple[int, int]:
    """(a, b) with x^2 + a x + b irreducible over F_p, smallest in lexicographic order."""
    for a, b in itertools.product(range(p), range(1, p)):
        if all((x * x + a * x + b) % p for x in range(p)):
            return a, b
    raise AssertionError("no irreducible quadratic")


def _field(p: int, d: int):
    """Elements of F_{p^d} as d x d matrices over F_p, with the coordinate tuples."""
    if d == 1:
        return [((c,), np.array([[c]], dtype=np.int64)) for c in range(p)]
    if d != 2:
        raise TateError("extension fields of degree > 2 are not supported")
    a, b = _irreducible_quadratic(p)
    x = np.array([[0, (-b) % p], [1, (-a) % p]], dtype=np.int64)
    out = []
    for c0, c1 in itertools.product(range(p), repeat=2):
        out.append(((c0, c1), (c0 * np.eye(2, dtype=np.int64) + c1 * x) % p))
    return out


def _points(p: int, r: int, d: int):
    """Points of P^{r-1}(F_{p^d}) not defined over a smaller field, first nonzero coordinate 1."""
    elems = _field(p, d)
    zero = elems[0]
    one = elems[1] if d == 1 else next(e for e in elems if e[0] == (1, 0))
    for lead in range(r):
        for tail in itertools.product(elems, repeat=r - lead - 1):
            pt = [zero] * lead + [one] + list(tail)
            if d > 1 and all(c[1] == 0 for c, _ in pt):
                continue
            yield pt


@dataclass
class SupportEntry:
    lam: tuple
    field_degree: int
    free: bool

    def to_json(self) -> dict:
        lam = [list(c) if self.field_degree > 1 else c[0] for c in self.lam]
        return {"lambda": lam, "field_degree": self.field_degree, "free": self.free}


@dataclass
class SupportReport:
    module_id: str
    entries: list[SupportEntry]

    def free_at(self, lam: Sequence[int]) -> bool:
        key = tuple((int(c),) for c in lam)
        for e in self.entries:
            if e.field_degree == 1 and e.lam == key:
                return e.free
        raise KeyError(tuple(lam))

    @property
    def nonfree_points(self) -> list[SupportEntry]:
        return [e for e in self.entries if not e.free]

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]


def support_report(M: KGModule, D: int = 1, module_id: str = "M") -> SupportReport:
    """Freeness of M along t -> sum lambda_i X_i for every point lambda over F_{p^d}, d <= D."""
    A = M.algebra
    if not A.is_elementary_abelian:
        raise TateError("support is computed for elementary abelian algebras")
    if D < 1:
        raise TateError("D must be positive")
    if D > 2:
        raise TateError("extension fields of degree > 2 are not supported")
    p, r = A.p, A.ngens
    entries = []
    for d in range(1, D + 1):
        for pt in _points(p, r, d):
            u = np.zeros((d * M.dim, d * M.dim), dtype=np.int64)
            for (_, L), act in zip(pt, M.actions):
                u = u + np.kron(L, act)
            u %= p
            free = M.dim % p == 0 and ff.rank(ff.matpow(u, p - 1, p), p) * p == d * M.dim
            entries.append(SupportEntry(tuple(c for c, _ in pt), d, bool(free)))
    return SupportReport(module_id, entries)


# decay of maps from modules supported at the Z-point

@dataclass
class LocalityReport:
    n: int
    m_max: int
    classes: int
    profile: list[int | None]
    surviving: list[int]

    @property
    def passed(self) -> bool:
        return self.surviving[-1] == 0

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m_max": self.m_max,
            "classes": self.classes,
            "profile": self.profile,
            "surviving": self.surviving,
            "verdict": "pass" if self.passed else "non-decay",
        }


def z_point_module(split: Split) -> KGModule:
    """kG (x)_{kC} k: the regular kH-module with Z acting as zero."""
    return inflate(regular_module(split.kH), split)


def locality_decay_check(T: KGModule, P: AugmentedResolution, n: int, m_max: int,
                         split: Split | None = None) -> LocalityReport:
    """For each stable class f: T -> N(P, n), the least m with inc o f stably zero in N(P, n+m).

    ``surviving[m]`` is the dimension of the image of the whole stable
    hom space in N(P, n+m); the check passes when it reaches zero.
    """
    if m_max < 0:
        raise TateError("m_max must be nonnegative")
    p = P.p
    need = 2 * (n + m_max) - 1
    if P.length < need:
        P = minimal_resolution(P.algebra, P.target, need)
    base = build_N(P, n, split)
    if T.algebra != base.module.algebra:
        raise ModuleError("T is over a different algebra")
    classes = stable_hom(T, base.module).classes
    k = classes.shape[0]
    profile: list[int | None] = [None] * k
    surviving = []
    for m in range(m_max + 1):
        big = build_N(P, n + m, split)
        inc = inclusion(base, big)
        imgs = np.stack([ff.matmul(inc, f, p) for f in classes]) if k else \
            np.zeros((0, big.dim, T.dim), dtype=np.int64)
        PH = phom_space(T, big.module)
        width = big.dim * T.dim
        ph = PH.reshape(PH.shape[0], width)
        r0 = ff.rank(ph, p) if ph.shape[0] else 0
        for c in range(k):
            if profile[c] is None:
                stacked = np.concatenate([ph, imgs[c].reshape(1, width)])
                if ff.rank(stacked, p) == r0:
                    profile[c] = m
        stacked = np.concatenate([ph, imgs.reshape(k, width)])
        surviving.append((ff.rank(stacked, p) if stacked.shape[0] else 0) - r0)
    return LocalityReport(n, m_max, k, profile, surviving)
