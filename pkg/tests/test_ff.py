import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stmodloc import ff

primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    p = draw(primes)
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    flat = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return p, np.array(flat, dtype=np.int64).reshape(r, c)


def brute_rank(a, p):
    """Rank as log_p of the size of the row space, by enumeration."""
    r = a.shape[0]
    span = {tuple(np.dot(c, a) % p) for c in itertools.product(range(p), repeat=r)}
    return round(np.log(len(span)) / np.log(p))


def test_is_prime():
    assert [n for n in range(20) if ff.is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_rref_canonical_small():
    r, piv = ff.rref(np.array([[0, 1, 1], [1, 1, 0]]), 2)
    assert piv == [0, 1]
    assert r.tolist() == [[1, 0, 1], [0, 1, 1]]


@given(matrices(max_rows=3, max_cols=4))
def test_rank_matches_enumeration(pm):
    p, a = pm
    if a.shape[0] == 0 or a.shape[1] == 0:
        assert ff.rank(a, p) == 0
        return
    assert ff.rank(a, p) == brute_rank(a, p)


@given(matrices())
def test_rank_nullity(pm):
    p, a = pm
    K = ff.kernel(a, p)
    assert K.shape == (a.shape[1], a.shape[1] - ff.rank(a, p))
    assert not ff.matmul(a, K, p).any()
    assert ff.rank(K, p) == K.shape[1]


@given(matrices())
def test_rref_is_idempotent(pm):
    p, a = pm
    r, piv = ff.rref(a, p)
    r2, piv2 = ff.rref(r, p)
    assert piv == piv2 and np.array_equal(r, r2)


@given(matrices(), st.integers(0, 2**31))
def test_solve_consistent_systems(pm, seed):
    p, a = pm
    x0 = np.random.default_rng(seed).integers(0, p, size=a.shape[1])
    b = ff.matmul(a, x0[:, None], p)[:, 0] if a.size else np.zeros(a.shape[0], dtype=np.int64)
    x = ff.solve(a, b, p)
    assert x is not None
    assert np.array_equal(ff.matmul(a, x[:, None], p)[:, 0] if a.size else b, b)


def test_solve_inconsistent():
    assert ff.solve(np.array([[1, 1], [1, 1]]), np.array([0, 1]), 2) is None


def test_solver_matches_solve(rng):
    p = 3
    a = rng.integers(0, p, size=(5, 7))
    s = ff.Solver(a, p)
    b = ff.matmul(a, rng.integers(0, p, size=(7, 4)), p)
    x = s.solve(b)
    assert np.array_equal(ff.matmul(a, x, p), b)
    assert s.rank == ff.rank(a, p)


@given(primes, st.integers(1, 5), st.integers(0, 2**31))
def test_inverse(p, n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, p, size=(n, n))
    if ff.rank(a, p) < n:
        with pytest.raises(ValueError):
            ff.inverse(a, p)
        return
    inv = ff.inverse(a, p)
    assert np.array_equal(ff.matmul(a, inv, p), np.eye(n, dtype=np.int64))


def test_batch_invertible(rng):
    p = 2
    mats = rng.integers(0, p, size=(50, 4, 4))
    expect = [ff.rank(m, p) == 4 for m in mats]
    assert ff.batch_invertible(mats, p).tolist() == expect


def test_quotient_map_kills_subspace(rng):
    p = 5
    basis = ff.image_basis(rng.integers(0, p, size=(6, 3)), p)
    q, keep = ff.quotient_map(basis, p)
    assert q.shape[0] == 6 - basis.shape[1]
    assert not ff.matmul(q, basis, p).any()
    assert ff.rank(q, p) == q.shape[0]


def test_coordinates_roundtrip(rng):
    p = 7
    basis = ff.image_basis(rng.integers(0, p, size=(5, 3)), p)
    c = rng.integers(0, p, size=(basis.shape[1], 2))
    v = ff.matmul(basis, c, p)
    assert np.array_equal(ff.coordinates(basis, v, p), c)


def test_p2_fast_path_agrees_with_generic(rng):
    a = rng.integers(0, 2, size=(30, 40))
    r2, piv = ff.rref(a, 2)
    # the same matrix viewed over F_2 through the int path of a larger prime is different,
    # so compare against a direct elimination check instead
    assert ff.rank(r2, 2) == len(piv)
    assert np.array_equal(r2[: len(piv)][:, piv], np.eye(len(piv), dtype=r2.dtype))


def test_fpscalar_and_matrix():
    x = ff.FpScalar(3, 5)
    assert int(x * x.inverse()) == 1
    assert int(x + 4) == 2
    m = ff.FpMatrix(3, [[1, 2], [0, 1]])
    assert (m @ m) == ff.FpMatrix(3, [[1, 1], [0, 1]])
    assert ff.FpMatrix.from_json(m.to_json()) == m
    assert m.rank() == 2


def test_modulus_mismatch():
    with pytest.raises(ff.ModulusError):
        ff.FpMatrix(2, [[1]]) @ ff.FpMatrix(3, [[1]])


def test_fpmatrix_rejects_bad_json():
    with pytest.raises(ValueError):
        ff.FpMatrix.from_json({"p": 4, "rows": 1, "cols": 1, "entries": [[1]]})
