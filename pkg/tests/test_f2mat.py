import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minrank_pke import f2mat
from minrank_pke.errors import DimensionError, FormatError
from minrank_pke.f2mat import BitMatrix, MatrixTuple
from minrank_pke.rng import Rng


def schoolbook(a, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = sum(int(a[i, x]) * int(b[x, j]) for x in range(a.shape[1])) % 2
    return out


def rank_oracle(a):
    """Plain Gaussian elimination on a uint8 array."""
    a = a.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


def arrays(max_dim=70):
    return st.tuples(st.integers(1, max_dim), st.integers(1, max_dim), st.integers(0, 2**32 - 1)).map(
        lambda t: np.random.default_rng(t[2]).integers(0, 2, size=(t[0], t[1]), dtype=np.uint8))


def test_worked_rank_and_kernel():
    m = BitMatrix.from_rows(["1100", "0110", "1010"])
    assert f2mat.rank(m) == 2
    ker = f2mat.kernel_basis(m)
    assert ker.rows == 2
    span = {tuple(((c0 * ker.to_array()[0] + c1 * ker.to_array()[1]) % 2).tolist())
            for c0 in (0, 1) for c1 in (0, 1)}
    assert span == {(0, 0, 0, 0), (1, 1, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1)}


@settings(max_examples=60, deadline=None)
@given(arrays(), st.integers(1, 70), st.integers(0, 2**32 - 1))
def test_mul_matches_schoolbook(a, p, seed):
    b = np.random.default_rng(seed).integers(0, 2, size=(a.shape[1], p), dtype=np.uint8)
    got = (BitMatrix.from_array(a) @ BitMatrix.from_array(b)).to_array()
    assert np.array_equal(got, (a.astype(np.int64) @ b.astype(np.int64)) % 2)


def test_mul_schoolbook_small(rng):
    for _ in range(30):
        n, m, p = (int(x) for x in rng.integers(1, 12, size=3))
        a, b = f2mat.sample_uniform(rng, n, m), f2mat.sample_uniform(rng, m, p)
        assert np.array_equal((a @ b).to_array(), schoolbook(a.to_array(), b.to_array()))


@settings(max_examples=80, deadline=None)
@given(arrays())
def test_rank_and_kernel_properties(a):
    m = BitMatrix.from_array(a)
    rk = f2mat.rank(m)
    assert rk == rank_oracle(a)
    assert rk == f2mat.rank(m.T)
    ker = f2mat.kernel_basis(m)
    assert ker.rows == m.cols - rk
    if ker.rows:
        assert (m @ ker.T).is_zero()
        assert f2mat.rank(ker) == ker.rows
    assert f2mat.rank_at_most(m, rk) and (rk == 0 or not f2mat.rank_at_most(m, rk - 1))


@settings(max_examples=60, deadline=None)
@given(arrays(40))
def test_transpose_involution_and_bytes_roundtrip(a):
    m = BitMatrix.from_array(a)
    assert m.T.T == m
    assert np.array_equal(m.T.to_array(), a.T)
    back, off = BitMatrix.from_bytes(m.to_bytes())
    assert back == m and off == len(m.to_bytes())
    assert BitMatrix.from_ints(m.to_ints(), m.cols) == m


def test_rref_pivots(rng):
    for _ in range(20):
        m = f2mat.sample_uniform(rng, 7, 11)
        red, piv = f2mat.rref(m)
        assert len(piv) == f2mat.rank(m)
        arr = red.to_array()
        for i, c in enumerate(piv):
            assert arr[i, c] == 1 and arr[:, c].sum() == 1


def test_solve_and_affine(rng):
    for _ in range(40):
        m = f2mat.sample_uniform(rng, 9, 12)
        x = rng.bits(12)
        b = f2mat.matvec(m, x)
        sol = f2mat.solve(m, b)
        assert sol is not None and np.array_equal(f2mat.matvec(m, sol), b)
        x0, ker = f2mat.solve_affine(m, b)
        assert ker.rows == 12 - f2mat.rank(m)
    inconsistent = BitMatrix.from_rows(["10", "10"])
    assert f2mat.solve(inconsistent, [1, 0]) is None
    assert f2mat.solve_affine(inconsistent, [1, 0]) is None


def test_vec_kron_identities(rng):
    for _ in range(30):
        a, x, b = (f2mat.sample_uniform(rng, 4, 4) for _ in range(3))
        # vec(A X B) = (B^T kron A) vec(X)
        lhs = f2mat.vec(a @ x @ b)
        rhs = f2mat.matvec(f2mat.kron(b.T, a), f2mat.vec(x))
        assert np.array_equal(lhs, rhs)
        assert f2mat.unvec(f2mat.vec(x), 4, 4) == x
        # <A, B> = trace(A^T B) = vec(A) . vec(B)
        ip = f2mat.frobenius_ip(a, b)
        assert ip == f2mat.trace(a.T @ b) == int(f2mat.vec(a) @ f2mat.vec(b)) % 2


def test_vec_is_column_stacking():
    m = BitMatrix.from_rows(["10", "01", "11"])
    assert f2mat.vec(m).tolist() == [1, 0, 1, 0, 1, 1]


def test_sampler_ranks(rng):
    for n in (1, 5, 16, 70):
        for rho in range(0, min(n, 6) + 1):
            assert f2mat.rank(f2mat.sample_rank_exact(rng, n, rho)) == rho
        assert f2mat.rank(f2mat.sample_full_column_rank(rng, n, min(n, 4))) == min(n, 4)
        for _ in range(5):
            assert f2mat.rank(f2mat.sample_rank_at_most(rng, n, 2)) <= 2


def test_count_rank_exact_sums_to_total():
    for n in range(1, 5):
        assert sum(f2mat.count_rank_exact(n, r) for r in range(n + 1)) == 2 ** (n * n)
    assert f2mat.count_rank_exact(2, 1) == 9


def test_iter_rank_exact_enumerates_all():
    for n, rho in ((2, 1), (3, 1), (3, 2)):
        mats = list(f2mat.iter_rank_exact(n, rho))
        assert len(mats) == len(set(mats)) == f2mat.count_rank_exact(n, rho)
        assert all(f2mat.rank(m) == rho for m in mats)


def test_batch_rank_matches_rank(rng):
    arr = rng.generator.integers(0, 2, size=(200, 9, 13), dtype=np.uint8)
    expect = [f2mat.rank(BitMatrix.from_array(a)) for a in arr]
    assert f2mat.batch_rank(arr).tolist() == expect


def test_matrix_tuple(rng):
    mats = [f2mat.sample_uniform(rng, 3, 3) for _ in range(4)]
    tup = MatrixTuple(mats)
    s = [1, 0, 1, 1]
    assert tup.combine(s) == mats[0] + mats[2] + mats[3]
    assert len(tup.append(mats[0])) == 5
    empty = MatrixTuple([], (3, 3))
    assert len(empty) == 0 and empty.combine([]).is_zero()
    with pytest.raises(DimensionError):
        MatrixTuple([])
    with pytest.raises(DimensionError):
        MatrixTuple([mats[0], f2mat.sample_uniform(rng, 2, 3)])


def test_errors():
    with pytest.raises(DimensionError):
        BitMatrix.zeros(2, 3) @ BitMatrix.zeros(2, 3)
    with pytest.raises(DimensionError):
        BitMatrix.zeros(2, 3) + BitMatrix.zeros(3, 2)
    with pytest.raises(FormatError):
        BitMatrix.from_bytes(b"\x01\x00")
    with pytest.raises(FormatError):
        BitMatrix.from_bytes(BitMatrix.identity(9).to_bytes()[:-1])
    bad = bytearray(BitMatrix.zeros(1, 3).to_bytes())
    bad[-1] = 0xFF  # padding bits set
    with pytest.raises(FormatError):
        BitMatrix.from_bytes(bytes(bad))


def test_immutable():
    m = BitMatrix.identity(3)
    with pytest.raises(ValueError):
        m.data[0, 0] = 0


def test_rng_determinism():
    a, b = Rng(7), Rng(7)
    assert np.array_equal(a.bits(100), b.bits(100))
    assert Rng(7).spawn(2)[1].seed == Rng(7).spawn(2)[1].seed
    big = 1 << 200
    assert 0 <= Rng(1).randbelow(big) < big
