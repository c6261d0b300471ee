from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lsnlab.gf2 import BitMatrix, BitVector, complete_basis, inverse, mat_vec_mul, rank, rref, solve


def bv(s):
    return BitVector.from_string(s)


def test_mat_vec_identity():
    assert mat_vec_mul(BitMatrix.identity(3), bv("101")) == bv("101")


def test_mat_vec_all_ones():
    assert mat_vec_mul(BitMatrix.from_lists([[1, 1], [1, 1]]), bv("11")) == bv("00")


def test_mat_vec_rectangular():
    m = BitMatrix.from_lists([[1, 1], [0, 1], [1, 0]])
    assert mat_vec_mul(m, bv("10")) == bv("101")


def test_mat_vec_dimension_error_names_both():
    with pytest.raises(ValueError, match="2 columns.*length 3"):
        mat_vec_mul(BitMatrix.identity(2), bv("101"))


def test_rank_examples():
    assert rank(BitMatrix(4, 4)) == 0
    assert rank(BitMatrix.identity(5)) == 5
    assert rank(BitMatrix.from_lists([[1, 1], [1, 1]])) == 1


def test_rank_leaves_input_alone():
    m = BitMatrix.from_lists([[1, 1, 0], [1, 1, 0], [0, 1, 1]])
    before = m.rows
    rank(m)
    assert m.rows == before


def test_solve_examples():
    assert solve(BitMatrix.identity(3), bv("011")) == bv("011")
    assert solve(BitMatrix(3, 3), bv("010")) is None
    assert solve(BitMatrix.from_lists([[1, 1], [0, 1]]), bv("11")) == bv("01")


def test_solve_free_variables_are_zero():
    m = BitMatrix.from_lists([[1, 1, 1]])
    assert solve(m, bv("1")) == bv("100")


def test_solve_dimension_error():
    with pytest.raises(ValueError):
        solve(BitMatrix.identity(3), bv("01"))


def test_complete_basis_examples():
    assert complete_basis(BitMatrix.identity(4)) == BitMatrix.identity(4)
    single = BitMatrix.from_lists([[1], [1]])
    assert complete_basis(single) == BitMatrix.from_lists([[1, 1], [0, 1]])
    e23 = BitMatrix.from_columns(3, [0b010, 0b100])
    assert complete_basis(e23) == BitMatrix.identity(3)


def test_complete_basis_rejects_dependent():
    with pytest.raises(ValueError):
        complete_basis(BitMatrix.from_columns(3, [0b011, 0b011]))


def test_words_are_little_endian_64_bit():
    v = BitVector(130, (1 << 129) | (1 << 64) | 1)
    assert v.words() == [1, 1, 2]


def test_bits_past_length_are_masked():
    assert BitVector(3, 0b11111).value == 0b111


vec_pairs = st.integers(1, 80).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))
)


@given(vec_pairs)
def test_self_xor_is_zero(t):
    n, a, _ = t
    v = BitVector(n, a)
    assert (v ^ v) == BitVector.zeros(n)


@given(st.integers(1, 12), st.integers(1, 12), st.data())
def test_rank_bounded_and_rref_idempotent(r, c, data):
    rows = data.draw(st.lists(st.integers(0, (1 << c) - 1), min_size=r, max_size=r))
    m = BitMatrix(r, c, rows)
    assert rank(m) <= min(r, c)
    once = rref(m)
    assert rref(once) == once
    assert rank(once) == rank(m)


@given(st.integers(1, 20), st.data())
def test_mat_vec_distributes_over_xor(n, data):
    rows = data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n))
    u = BitVector(n, data.draw(st.integers(0, (1 << n) - 1)))
    v = BitVector(n, data.draw(st.integers(0, (1 << n) - 1)))
    m = BitMatrix(n, n, rows)
    assert mat_vec_mul(m, u ^ v) == mat_vec_mul(m, u) ^ mat_vec_mul(m, v)


def _random_full_rank(rng, n):
    while True:
        m = BitMatrix(n, n, [int(x) for x in rng.integers(0, 1 << n, size=n)])
        if rank(m) == n:
            return m


def test_solve_inverts_full_rank():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 33))
        m = _random_full_rank(rng, n)
        x = BitVector(n, int(rng.integers(0, 1 << n)) if n < 63 else 0)
        assert solve(m, mat_vec_mul(m, x)) == x


def test_solve_matches_numpy_oracle():
    # independent route: brute force over all x for small systems
    rng = np.random.default_rng(5)
    for _ in range(100):
        r, c = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        dense = rng.integers(0, 2, size=(r, c))
        b = rng.integers(0, 2, size=r)
        m = BitMatrix.from_lists(dense.tolist())
        got = solve(m, BitVector.from_bits(b.tolist()))
        sols = [x for x in range(1 << c) if np.array_equal(dense @ [(x >> j) & 1 for j in range(c)] % 2, b)]
        if not sols:
            assert got is None
        else:
            assert got is not None and got.value in sols


def test_complete_basis_random_full_column_rank():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(1, 33))
        c = int(rng.integers(1, n + 1))
        cols = [int(v) for v in rng.integers(1, 1 << n, size=c, dtype=np.int64)]
        m = BitMatrix.from_columns(n, cols)
        if rank(m) < c:
            continue
        full = complete_basis(m)
        assert rank(full) == n
        assert full.columns()[n - c:] == cols


def test_inverse_round_trip():
    rng = np.random.default_rng(21)
    for _ in range(200):
        n = int(rng.integers(1, 20))
        m = _random_full_rank(rng, n)
        assert m @ inverse(m) == BitMatrix.identity(n)
        assert inverse(m) @ m == BitMatrix.identity(n)
    with pytest.raises(ValueError):
        inverse(BitMatrix.from_lists([[1, 1], [1, 1]]))
