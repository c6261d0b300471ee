from __future__ import annotations

import itertools
from collections import Counter
from functools import reduce

import numpy as np
import pytest
from scipy import stats

from lsnlab.clifford import CliffordTableau, inverse, tableau_from_circuit
from lsnlab.codes import (
    StabilizerCode,
    canonical_code,
    decompose_pauli,
    distance_exact,
    five_qubit_code,
    gv_bound,
    is_nondegenerate,
    knill_laflamme_ok,
    random_code,
    random_codes,
    recompose,
    repetition_code,
    synthesize_encoder,
    syndrome,
)
from lsnlab.dense import apply_circuit, StateVector
from lsnlab.errors import GuardError
from lsnlab.gf2 import BitMatrix, BitVector, rank
from lsnlab.pauli import PauliOperator, commutes, multiply

P = PauliOperator.from_string

_PAULI = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}


def pauli_dense(p):
    return (1j**p.phase) * reduce(np.kron, [_PAULI[c] for c in p.letters()])


def all_paulis(n, w_max):
    for w in range(w_max + 1):
        for sup in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                chars = ["I"] * n
                for q, c in zip(sup, letters):
                    chars[q] = c
                yield P("".join(chars))


def brute_distance(code, w_max):
    # oracle: commute with every generator, and not in the generator span
    gens = [g.symplectic() for g in code.generators]
    base = rank(BitMatrix(len(gens), 2 * code.n, gens))
    best = None
    for p in all_paulis(code.n, w_max):
        if p.weight() == 0 or not all(commutes(p, g) for g in code.generators):
            continue
        if rank(BitMatrix(len(gens) + 1, 2 * code.n, gens + [p.symplectic()])) > base:
            w = p.weight()
            best = w if best is None else min(best, w)
    return best


def test_code_invariants_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, n))
        code = random_code(n, k, rng)
        gens = code.generators
        assert all(commutes(a, b) for a in gens for b in gens)
        assert rank(BitMatrix(len(gens), 2 * n, [g.symplectic() for g in gens])) == n - k
        assert all(not g.is_identity() for g in gens)
        for i, d in enumerate(code.destabilizers):
            for j, g in enumerate(gens):
                assert commutes(d, g) == (i != j)
        for lop in list(code.logical_x) + list(code.logical_z):
            assert all(commutes(lop, g) for g in gens)
            assert all(commutes(lop, d) for d in code.destabilizers)


def test_random_code_n2_k1_thirty_groups():
    draws = random_codes(2, 1, [np.random.default_rng([30, i]) for i in range(30000)])
    counts = Counter(c.group_key() for c in draws)
    assert len(counts) == 30
    assert stats.chisquare(list(counts.values())).pvalue > 0.001
    minus_identity = (0, 0, 2)
    assert all(minus_identity not in key for key in counts)


def test_random_code_rejects_k_ge_n():
    with pytest.raises(ValueError):
        random_code(3, 3, np.random.default_rng(0))


def test_random_codes_matches_scalar():
    seeds = range(8)
    one = [random_code(7, 2, np.random.default_rng(s)).encoder for s in seeds]
    many = [c.encoder for c in random_codes(7, 2, [np.random.default_rng(s) for s in seeds])]
    assert one == many


def test_canonical_generators_give_empty_circuit():
    gens = [PauliOperator.single(4, i, "Z") for i in range(3)]
    circuit, tab = synthesize_encoder(gens)
    assert len(circuit) == 0
    assert tab == CliffordTableau.identity(4)


def test_repetition_encoder_dense():
    code = repetition_code(3)
    assert [str(g) for g in code.generators] == ["+ZZI", "+IZZ"]
    for x in (0, 1):
        # input basis: secret sits on the last qubit, index 1 when x = 1
        psi = apply_circuit(StateVector.basis(3, x << 2), code.encoder_circuit).data
        for g in code.generators:
            assert np.allclose(pauli_dense(g) @ psi, psi)
        lz = pauli_dense(code.logical_z[0])
        assert np.allclose(lz @ psi, (-1) ** x * psi)
        support = {i for i in range(8) if abs(psi[i]) > 1e-9}
        assert support <= {0, 7}


def test_negative_sign_costs_one_x_gate():
    plus = [P("+XZZXI"), P("+IXZZX"), P("+XIXZZ"), P("+ZXIXZ")]
    minus = [P("-XZZXI")] + plus[1:]
    c_plus, t_plus = synthesize_encoder(plus)
    c_minus, t_minus = synthesize_encoder(minus)
    assert c_minus.count("X") == c_plus.count("X") + 1
    assert list(t_minus.zs[:4]) == minus


@pytest.mark.parametrize(
    "gens",
    [
        [P("XI"), P("ZI")],
        [P("ZZ"), P("ZZ")],
        [P("ZI"), P("IZ"), P("ZZ")],
    ],
)
def test_synthesis_rejects_bad_generators(gens):
    with pytest.raises(ValueError):
        synthesize_encoder(gens)


def test_encoder_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(30):
        code = random_code(6, 2, rng)
        inv = inverse(code.encoder)
        for i, g in enumerate(code.generators):
            assert inv.conjugate(g) == PauliOperator.single(6, i, "Z")
        assert tableau_from_circuit(code.encoder_circuit) == code.encoder


def test_syndrome_examples():
    code = repetition_code(3)
    assert syndrome(code, PauliOperator(3)) == BitVector(2, 0)
    assert syndrome(code, P("XII")) == BitVector.from_string("10")
    five = five_qubit_code()
    for lop in list(five.logical_x) + list(five.logical_z) + list(five.generators):
        assert syndrome(five, lop).value == 0
    with pytest.raises(ValueError):
        syndrome(code, P("XX"))


def test_syndrome_is_coset_invariant():
    rng = np.random.default_rng(2)
    for _ in range(200):
        code = random_code(6, 2, rng)
        e = PauliOperator(6, int(rng.integers(64)), int(rng.integers(64)))
        s = PauliOperator(6)
        for g in code.generators:
            if rng.integers(2):
                s = multiply(s, g)
        assert syndrome(code, multiply(e, s)) == syndrome(code, e)


def test_decompose_basic():
    code = five_qubit_code()
    dec = decompose_pauli(code, code.generators[0])
    assert dec.stabilizer == BitVector(4, 1)
    assert dec.syndrome.value == dec.logical_x.value == dec.logical_z.value == 0
    dec = decompose_pauli(code, code.logical_x[0])
    assert dec.logical_x == BitVector(1, 1)
    assert dec.syndrome.value == dec.stabilizer.value == dec.logical_z.value == 0


def test_decompose_round_trip():
    rng = np.random.default_rng(3)
    code = random_code(6, 2, rng)
    for _ in range(10000):
        p = PauliOperator(6, int(rng.integers(64)), int(rng.integers(64)), int(rng.integers(4)))
        assert recompose(code, decompose_pauli(code, p)) == p


def test_decompose_logical_x_powers():
    rng = np.random.default_rng(4)
    for k in range(1, 7):
        code = random_code(k + 2, k, rng)
        for u in range(1 << k):
            op = PauliOperator(code.n)
            for j in range(k):
                if (u >> j) & 1:
                    op = multiply(op, code.logical_x[j])
            assert decompose_pauli(code, op).logical_x.value == u


def test_distance_examples():
    assert distance_exact(five_qubit_code(), 3) == 3
    assert distance_exact(repetition_code(3), 3) == 1
    assert distance_exact(canonical_code(4, 1), 2) == 1
    assert distance_exact(five_qubit_code(), 2) is None


def test_distance_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        code = random_code(n, int(rng.integers(1, n)), rng)
        assert distance_exact(code, n) == brute_distance(code, n)


def test_distance_guard():
    with pytest.raises(GuardError):
        distance_exact(canonical_code(60, 1), 6)


def brute_kl(code, t):
    errs = list(all_paulis(code.n, t))
    gens = [g.symplectic() for g in code.generators]
    base = rank(BitMatrix(len(gens), 2 * code.n, gens))
    for a in errs:
        for b in errs:
            prod = multiply(a.adjoint(), b)
            if not all(commutes(prod, g) for g in code.generators):
                continue
            if rank(BitMatrix(len(gens) + 1, 2 * code.n, gens + [prod.symplectic()])) > base:
                return False
    return True


def test_knill_laflamme_examples():
    assert knill_laflamme_ok(five_qubit_code(), 1)
    assert not knill_laflamme_ok(repetition_code(3), 1)
    rng = np.random.default_rng(6)
    assert knill_laflamme_ok(random_code(5, 2, rng), 0)


def test_knill_laflamme_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(20):
        code = random_code(4, 1, rng)
        assert knill_laflamme_ok(code, 1) == brute_kl(code, 1)


def test_nondegenerate_five_qubit():
    assert is_nondegenerate(five_qubit_code(), 1)
    assert not is_nondegenerate(repetition_code(3), 1)


def test_gv_bound_examples():
    assert gv_bound(30, 1, 2) == pytest.approx(0.99995, abs=1e-5)
    # d = n: entropy term vanishes, 1 - 8 * 3^8 / 2^7
    assert gv_bound(8, 1, 8) == pytest.approx(1 - 8 * 3**8 / 2**7)
    assert gv_bound(8, 1, 8) < -400
    assert gv_bound(20, 4, 3) < 0


def test_code_json_round_trip():
    code = random_code(5, 2, np.random.default_rng(8))
    back = StabilizerCode.from_json(code.to_json(include_gates=True))
    assert back.encoder == code.encoder and back.k == code.k
