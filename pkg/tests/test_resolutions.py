import numpy as np
import pytest

from stmodloc import ff
from stmodloc.algebra import CoproductKind, GroupAlgebra, Split, make_split
from stmodloc.modules import (
    direct_sum,
    free_rank,
    is_hom,
    is_projective,
    is_stably_isomorphic,
    omega_n,
    regular_module,
    trivial_module,
)
from stmodloc.resolutions import (
    ResolutionError,
    build_M,
    build_N,
    build_canonical_sequence,
    check_additivity,
    check_resolution_change,
    check_restriction,
    check_split_exact,
    complex_direct_sum,
    corrupt_sequence,
    gamma,
    inclusion,
    inflate,
    is_chain_map,
    lift_augmented,
    lift_chain_map,
    map_M,
    minimal_resolution,
    rank2_omega_iso,
    split_exact_complex,
    tensor_resolution,
    tensor_window_check,
    verify_exact,
)

C2, C3 = GroupAlgebra(2, (2,)), GroupAlgebra(3, (3,))
V4, E8 = GroupAlgebra(2, (2, 2)), GroupAlgebra(2, (2, 2, 2))


@pytest.mark.parametrize("A,betti", [
    (C2, [1] * 7),
    (C3, [1] * 7),
    (GroupAlgebra(2, (4,)), [1] * 7),
    (V4, [1, 2, 3, 4, 5, 6, 7]),
    (E8, [1, 3, 6, 10, 15, 21, 28]),
], ids=repr)
def test_minimal_betti_numbers(A, betti):
    P = minimal_resolution(A, length=6)
    assert P.betti == betti
    assert P.minimal and P.is_exact()
    P.complex.validate()


def test_resolution_of_a_module():
    k = trivial_module(V4)
    M = omega_n(k, -1)
    P = minimal_resolution(V4, M, 3)
    assert P.is_exact() and P.minimal
    # Omega^{-1} k is cyclic and Omega of it is k again
    assert P.betti == [1, 1, 2, 3]


def test_tensor_resolution_is_exact_but_not_minimal():
    P = minimal_resolution(V4, length=3)
    for kind in CoproductKind:
        F = tensor_resolution(P, P, kind)
        assert F.is_exact()
        assert not F.minimal
        assert F.betti == [4, 16, 40, 80]


@pytest.mark.parametrize("A", [C2, V4, C3], ids=repr)
@pytest.mark.parametrize("n", [1, 2])
def test_resolution_module_shapes(A, n):
    P = minimal_resolution(A, length=2 * n)
    M = build_M(P.complex, n)
    N = build_N(P, n)
    p = A.p
    assert M.dim == sum(P.modules[i].dim * (p - 1 if i % 2 else 1) for i in range(2 * n))
    assert N.dim == 1 + sum(P.modules[i].dim * (1 if i % 2 else p - 1) for i in range(2 * n))
    # restriction to kH is C_0 + C_1^{p-1} + ... ; free except for k in N
    hg = list(M.split.hgens)
    assert is_projective(M.module.restrict_to(hg))
    assert free_rank(N.module.restrict_to(hg)) * A.dim == N.dim - 1
    assert M.kh_restriction_shape() == [(i, p - 1 if i % 2 else 1) for i in range(2 * n)]


def test_inclusions_are_homs():
    P = minimal_resolution(V4, length=6)
    for n in (1, 2):
        a, b = build_M(P.complex, n), build_M(P.complex, n + 1)
        inc = inclusion(a, b)
        assert is_hom(a.module, b.module, inc)
        a, b = build_N(P, n), build_N(P, n + 1)
        assert is_hom(a.module, b.module, inclusion(a, b))


def test_map_M_rejects_non_chain_maps():
    P = minimal_resolution(C2, length=3)
    MC = build_M(P.complex, 2)
    bad = [np.eye(m.dim, dtype=np.int64) for m in P.modules]
    bad[1] = np.zeros_like(bad[1])
    assert not is_chain_map(bad, P.complex, P.complex, 3)
    with pytest.raises(ResolutionError):
        map_M(bad, MC, MC)


def test_gamma_and_inflate():
    k = trivial_module(C2)
    # stable invariance: free summands do not change Gamma
    a = gamma(k, 2)
    b = gamma(direct_sum(k, regular_module(C2)), 2)
    assert a.module == b.module
    # Gamma(kH) is the zero module after stripping
    assert gamma(regular_module(C2), 1).dim == 0
    split = Split.extend(C2)
    T = inflate(regular_module(C2), split)
    assert T.dim == 2 and not T.actions[split.zgen].any()


@pytest.mark.parametrize("p,H", [(2, (2,)), (2, (2, 2)), (3, (3,))])
@pytest.mark.parametrize("n", [1, 2])
def test_canonical_sequence_exact(p, H, n):
    kH = GroupAlgebra(p, H)
    P = minimal_resolution(kH, length=2 * n)
    seq = build_canonical_sequence(P, n, Split.extend(kH))
    rep = verify_exact(seq)
    assert rep.passed, rep.to_json()
    assert seq.solution_nullity["theta"] == 0
    assert not verify_exact(corrupt_sequence(seq)).passed


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1)])
def test_rank2_identification(p, n):
    r = rank2_omega_iso(p, n)
    assert r.passed and r.bijective
    if p == 2:
        assert r.N.dim == 4 * n + 1
    assert r.iterated_status == "yes"


def test_functor_laws_small():
    P = minimal_resolution(V4, length=3)
    split = Split.extend(V4)
    assert check_additivity(P.complex, P.complex, 2, split)
    for J in [(), (0,), (1,), (0, 1)]:
        assert check_restriction(P.complex, 2, split, J)
    assert all(check_split_exact(V4, 2, split).values())
    for i in range(3):
        assert check_resolution_change(P, 2, split, i).passed


def test_split_exact_complex_is_exact():
    S = split_exact_complex(C3, 1, 4, rank=2)
    S.validate()
    assert is_projective(build_M(S, 2).module)
    assert [m.dim for m in S.modules] == [0, 6, 6, 0, 0]


def test_lift_chain_map_is_chain_map():
    P = minimal_resolution(V4, length=5)
    p = 2
    for m in range(3):
        for a in P.modules[m].socle_basis.T:
            f = lift_chain_map(P, a, m)
            s = f.shift
            for c in range(1, len(f.components)):
                assert is_hom(P.aug_module(c), P.aug_module(c + s), f.components[c])
                left = ff.matmul(P.aug_boundary(c + s), f.components[c], p)
                right = ff.matmul(f.components[c - 1], P.aug_boundary(c), p)
                assert np.array_equal(left, right)


def test_lift_rejects_non_socle():
    P = minimal_resolution(V4, length=3)
    v = np.zeros(P.modules[0].dim, dtype=np.int64)
    v[0] = 1
    with pytest.raises(ResolutionError):
        lift_chain_map(P, v, 0)


def test_comparison_map_from_tensor_resolution():
    P = minimal_resolution(C3, length=3)
    F = tensor_resolution(P, P)
    phi = lift_augmented(F, P, 0, np.ones((1, 1), dtype=np.int64), 3)
    assert len(phi.components) == 4


def test_tensor_window_small():
    P = minimal_resolution(C2, length=1)
    rep = tensor_window_check(P, 1)
    assert rep.passed
    with pytest.raises(ResolutionError):
        tensor_window_check(minimal_resolution(C3, length=1), 1)


def test_complex_direct_sum_dims():
    P = minimal_resolution(C2, length=3)
    S = complex_direct_sum(P.complex, split_exact_complex(C2, 0, 3))
    assert S.dims() == [4, 4, 2, 2]


def test_module_split_with_h_not_first():
    G = GroupAlgebra(2, (2, 2))
    s = make_split(G, [1])
    P = minimal_resolution(s.kH, length=3)
    M = build_M(P.complex, 2, s)
    assert not is_projective(M.module)
    assert is_projective(M.module.restrict_to([1]))
