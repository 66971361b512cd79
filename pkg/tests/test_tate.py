import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stmodloc import ff
from stmodloc.algebra import CoproductKind, GroupAlgebra, Split, make_split
from stmodloc.modules import regular_module, trivial_module
from stmodloc.resolutions import build_M, minimal_resolution, tensor_resolution
from stmodloc.tate import (
    TateClass,
    TateError,
    TateRing,
    endo_ring_table,
    is_chain_lift,
    localization_ring_view,
    locality_decay_check,
    negative_product,
    perturb_lift,
    support_report,
    tate_dim,
    unit_class,
    z_point_module,
)

C2, C3, C4 = GroupAlgebra(2, (2,)), GroupAlgebra(3, (3,)), GroupAlgebra(2, (4,))
V4, E8 = GroupAlgebra(2, (2, 2)), GroupAlgebra(2, (2, 2, 2))
C3xC3 = GroupAlgebra(3, (3, 3))


@pytest.mark.parametrize("A", [C2, C3, C4, V4, E8, C3xC3], ids=repr)
def test_duality_dimensions(A):
    P = minimal_resolution(A, length=7)
    for n in range(1, 7):
        neg = tate_dim(A, -n, resolution=P)
        assert neg == tate_dim(A, n - 1, resolution=P)
        assert neg == tate_dim(A, -n, method="betti", resolution=P)


def test_known_dimensions():
    assert [tate_dim(V4, -n) for n in range(1, 7)] == [1, 2, 3, 4, 5, 6]
    assert all(tate_dim(C2, d) == 1 for d in range(-5, 6))
    assert tate_dim(E8, -1) == 1
    assert tate_dim(C3xC3, 2) == 3


def test_tate_dim_range_errors():
    with pytest.raises(TateError):
        tate_dim(V4, -5, length=3)
    with pytest.raises(TateError):
        tate_dim(GroupAlgebra(2, ()), 1)
    with pytest.raises(ValueError):
        tate_dim(V4, 1, method="spectral")


def test_c2_products_nonzero():
    P = minimal_resolution(C2, length=4)
    R = TateRing(P)
    x = R.basis_class(-1, 0)
    prod = negative_product(x, x, P)
    assert prod.degree == -2 and not prod.is_zero()


def test_klein_four_products_vanish():
    P = minimal_resolution(V4, length=6)
    R = TateRing(P)
    for da, db in itertools.product(range(1, 4), repeat=2):
        for i, j in itertools.product(range(da), range(db)):
            assert R.product(R.basis_class(-da, i), R.basis_class(-db, j)).is_zero()


def test_unit_acts_as_identity():
    P = minimal_resolution(V4, length=4)
    R = TateRing(P)
    one = unit_class(V4)
    for d in range(1, 4):
        for i in range(d):
            a = R.basis_class(-d, i)
            assert R.product(one, a) == a and R.product(a, one) == a


def test_negative_product_errors():
    P = minimal_resolution(V4, length=2)
    R = TateRing(P)
    a = R.basis_class(-2, 0)
    with pytest.raises(TateError):
        R.product(a, a)
    with pytest.raises(TateError):
        negative_product(unit_class(V4), a)
    with pytest.raises(TateError):
        TateClass(V4, 1, [1])


def _random_class(R, d, rng):
    B = R.basis(-d)
    c = rng.integers(0, R.p, size=B.shape[1])
    return TateClass(R.algebra, -d, ff.matmul(B, c[:, None], R.p)[:, 0])


@pytest.mark.parametrize("A", [C2, C3, C4, V4], ids=repr)
def test_associativity_and_bilinearity(A):
    N = 6
    P = minimal_resolution(A, length=N)
    R = TateRing(P)
    rng = np.random.default_rng(7)
    for da, db, dc in itertools.product(range(1, N), repeat=3):
        if da + db + dc > N:
            continue
        a, b, c = (_random_class(R, d, rng) for d in (da, db, dc))
        assert R.product(R.product(a, b), c) == R.product(a, R.product(b, c))
    for da, db in itertools.product(range(1, N), repeat=2):
        if da + db > N:
            continue
        a, a2, b = _random_class(R, da, rng), _random_class(R, da, rng), _random_class(R, db, rng)
        s = TateClass(A, -da, a.representative + a2.representative)
        lhs = R.product(s, b).representative
        rhs = (R.product(a, b).representative + R.product(a2, b).representative) % A.p
        assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("A", [C2, C4, V4, E8], ids=repr)
def test_graded_commutativity_p2(A):
    N = 4 if A == E8 else 6
    t = endo_ring_table(A, N)
    for a, b, r in t.products:
        assert t.product(b, a) == r


@settings(max_examples=10)
@given(st.integers(0, 2**31))
def test_products_survive_null_homotopies(seed):
    P = minimal_resolution(V4, length=5)
    R = TateRing(P)
    rng = np.random.default_rng(seed)
    for da in (1, 2):
        alpha = _random_class(R, da, rng)
        f = R.lift(alpha, 5 - da)
        g = perturb_lift(P, f, rng)
        assert is_chain_lift(P, P, g)
        for db in range(1, 6 - da):
            beta = _random_class(R, db, rng)
            assert R.product(alpha, beta, lift=g) == R.product(alpha, beta, lift=f)


def test_endo_tables():
    t = endo_ring_table(V4, 6)
    assert t.dims == [1, 1, 2, 3, 4, 5, 6]
    assert t.radical_square_zero and not t.periodic_structure
    t = endo_ring_table(C2, 6)
    assert t.dims == [1] * 7 and t.periodic_structure and not t.radical_square_zero
    assert endo_ring_table(E8, 4).radical_square_zero
    assert endo_ring_table(C3xC3, 3).radical_square_zero


def test_endo_table_json_is_deterministic():
    a = endo_ring_table(C3, 4).dumps()
    b = endo_ring_table(C3, 4).dumps()
    assert a == b
    obj = endo_ring_table(C3, 4).to_json()
    assert set(obj) == {"H", "N", "dims", "products", "flags"}


@pytest.mark.parametrize("A,kinds", [
    (C2, list(CoproductKind)), (C4, list(CoproductKind)), (C3, [CoproductKind.GROUP_LIKE]),
], ids=["C2", "C4", "C3"])
def test_table_independent_of_resolution(A, kinds):
    base = endo_ring_table(A, 5).dumps()
    P = minimal_resolution(A, length=5)
    for kind in kinds:
        assert endo_ring_table(A, 5, tensor_resolution(P, P, kind)).dumps() == base


@pytest.mark.parametrize("A", [C2, C4, C3, GroupAlgebra(3, (9,))], ids=repr)
def test_localization_view_matches(A):
    v = localization_ring_view(A, 4)
    assert v.match, v.mismatches


def test_localization_view_rejects_noncyclic():
    with pytest.raises(TateError):
        localization_ring_view(V4, 3)


def test_localization_view_detects_a_wrong_table():
    t = endo_ring_table(C3, 4)
    # zero out a product of two even-degree classes, which must be nonzero
    idx = next(i for i, (a, b, _) in enumerate(t.products) if a[0] == 2 and b[0] == 2)
    t.products[idx] = (t.products[idx][0], t.products[idx][1], (0,))
    assert not localization_ring_view(C3, 4, t).match


def test_support_trivial_cases():
    G = GroupAlgebra(2, (2, 2))
    rep = support_report(regular_module(G), 2)
    assert all(e.free for e in rep.entries)
    rep = support_report(trivial_module(G), 2)
    assert not any(e.free for e in rep.entries)
    # 3 rational points and 2 further points over F_4
    assert [e.field_degree for e in rep.entries] == [1, 1, 1, 2, 2]


def test_support_points_over_f9():
    rep = support_report(trivial_module(GroupAlgebra(3, (3, 3))), 2)
    assert sum(e.field_degree == 1 for e in rep.entries) == 4
    assert sum(e.field_degree == 2 for e in rep.entries) == 10 - 4


def test_support_of_resolution_module():
    G = GroupAlgebra(2, (2, 2))
    s = make_split(G, [0])
    P = minimal_resolution(s.kH, length=3)
    rep = support_report(build_M(P.complex, 2, s).module, 2)
    assert [e.lam for e in rep.nonfree_points] == [((0,), (1,))]
    assert rep.free_at([1, 0]) and rep.free_at([1, 1]) and not rep.free_at([0, 1])


def test_support_errors():
    with pytest.raises(TateError):
        support_report(trivial_module(C4), 1)
    with pytest.raises(TateError):
        support_report(trivial_module(V4), 3)


def test_locality_decay_and_control():
    split = Split.extend(C2)
    P = minimal_resolution(C2, length=9)
    rep = locality_decay_check(z_point_module(split), P, 1, 4, split)
    assert rep.passed and all(m is not None and m <= 4 for m in rep.profile)
    ctrl = locality_decay_check(trivial_module(split.G), P, 1, 4, split)
    assert not ctrl.passed and None in ctrl.profile
    free = locality_decay_check(regular_module(split.G), P, 1, 2, split)
    assert free.classes == 0 and free.passed
