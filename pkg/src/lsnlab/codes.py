"""Stabilizer codes: encoders, syndromes, Pauli decomposition, distance."""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple

from .clifford import (
    CliffordCircuit,
    CliffordTableau,
    sample_uniform_clifford,
    sample_uniform_clifford_batch,
    synthesize_circuit,
    synthesize_unsigned,
    tableau_from_circuit,
)
from .errors import GuardError
from .gf2 import BitMatrix, BitVector, rank, solve
from .pauli import PauliOperator, multiply, pauli_letters

__all__ = [
    "StabilizerCode",
    "Decomposition",
    "random_code",
    "random_codes",
    "synthesize_encoder",
    "syndrome",
    "decompose_pauli",
    "recompose",
    "distance_exact",
    "find_min_logical",
    "knill_laflamme_ok",
    "is_nondegenerate",
    "gv_bound",
    "binary_entropy",
    "canonical_generators",
    "five_qubit_code",
    "repetition_code",
    "canonical_code",
    "count_paulis",
    "iter_paulis_of_weight",
    "SEARCH_GUARD",
]

SEARCH_GUARD = 10**7


class Decomposition(NamedTuple):
    syndrome: BitVector
    stabilizer: BitVector
    logical_x: BitVector
    logical_z: BitVector
    phase: int


class StabilizerCode:
    """Code defined by an encoder Clifford U: generator i is U Z_i U^dagger for i < n - k."""

    def __init__(self, encoder: CliffordTableau, k: int, circuit=None):
        # circuit: a CliffordCircuit, a zero-argument factory for one, or None to synthesize on demand
        n = encoder.n
        if not 0 <= k < n:
            raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
        self.n = n
        self.k = k
        self.r = n - k
        self.encoder = encoder
        self.generators = encoder.zs[: self.r]
        self.destabilizers = encoder.xs[: self.r]
        self.logical_x = encoder.xs[self.r :]
        self.logical_z = encoder.zs[self.r :]
        self._circuit = circuit
        self._sig_table: list[tuple[int, int, int]] | None = None

    @classmethod
    def from_generators(cls, generators: list[PauliOperator]) -> StabilizerCode:
        circuit, tableau = synthesize_encoder(generators)
        return cls(tableau, tableau.n - len(generators), circuit)

    @property
    def encoder_circuit(self) -> CliffordCircuit:
        if self._circuit is None:
            self._circuit = synthesize_circuit(self.encoder)
        elif callable(self._circuit):
            self._circuit = self._circuit()
        return self._circuit

    def syndrome_int(self, e: PauliOperator) -> int:
        out = 0
        ex, ez = e.x, e.z
        for i, g in enumerate(self.generators):
            if ((ex & g.z) ^ (ez & g.x)).bit_count() & 1:
                out |= 1 << i
        return out

    def syndrome(self, e: PauliOperator) -> BitVector:
        if e.n != self.n:
            raise ValueError(f"size mismatch: code on {self.n} qubits, Pauli on {e.n}")
        return BitVector(self.r, self.syndrome_int(e))

    def signature_table(self) -> list[tuple[int, int, int]]:
        """Per (qubit, letter) signature: syndrome bits | logical bits << r.

        Logical bits are the L_X coefficients followed by the L_Z coefficients.
        Signatures are additive under multiplication, so a Pauli lies in N(S)
        minus S exactly when its syndrome part is zero and its logical part is not.
        """
        if self._sig_table is None:
            n = self.n
            checks = list(self.generators) + list(self.logical_z) + list(self.logical_x)
            # X on qubit q flips check b iff the check has Z there; Z iff it has X there
            sx = [0] * n
            sz = [0] * n
            for b, c in enumerate(checks):
                bit = 1 << b
                for mask, acc in ((c.z, sx), (c.x, sz)):
                    while mask:
                        low = mask & -mask
                        acc[low.bit_length() - 1] |= bit
                        mask ^= low
            table = [(sx[q], sx[q] ^ sz[q], sz[q]) for q in range(n)]
            self._sig_table = table
        return self._sig_table

    def group_key(self) -> tuple:
        return tuple((p.x, p.z, p.phase) for p in canonical_generators(list(self.generators)))

    def to_json(self, include_gates: bool = False) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "generators": [str(g) for g in self.generators],
            "encoder": self.encoder.to_json(),
        }
        if include_gates:
            out["encoder_gates"] = self.encoder_circuit.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> StabilizerCode:
        n, k = int(data["n"]), int(data["k"])
        gens = [PauliOperator.from_string(s) for s in data["generators"]]
        if len(gens) != n - k:
            raise ValueError(f"expected {n - k} generators, got {len(gens)}")
        circuit = None
        if "encoder_gates" in data:
            circuit = CliffordCircuit.from_json(n, data["encoder_gates"])
        if "encoder" in data:
            tab = CliffordTableau.from_json(data["encoder"])
        elif circuit is not None:
            tab = tableau_from_circuit(circuit)
        else:
            return cls.from_generators(gens)
        if circuit is not None and tableau_from_circuit(circuit) != tab:
            raise ValueError("encoder gate list disagrees with encoder tableau")
        code = cls(tab, k, circuit)
        if list(code.generators) != gens:
            raise ValueError("encoder does not map Z_i to the listed generators")
        return code

    def __repr__(self) -> str:
        return f"StabilizerCode(n={self.n}, k={self.k}, generators={[str(g) for g in self.generators]})"


def syndrome(code: StabilizerCode, e: PauliOperator) -> BitVector:
    return code.syndrome(e)


def _sp(p: PauliOperator, q: PauliOperator) -> int:
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() & 1


def decompose_pauli(code: StabilizerCode, p: PauliOperator) -> Decomposition:
    if p.n != code.n:
        raise ValueError(f"size mismatch: code on {code.n} qubits, Pauli on {p.n}")
    s = sum(_sp(p, g) << i for i, g in enumerate(code.generators))
    t = sum(_sp(p, d) << i for i, d in enumerate(code.destabilizers))
    a = sum(_sp(p, lz) << j for j, lz in enumerate(code.logical_z))
    b = sum(_sp(p, lx) << j for j, lx in enumerate(code.logical_x))
    body = _product(code, s, t, a, b)
    return Decomposition(
        BitVector(code.r, s), BitVector(code.r, t), BitVector(code.k, a), BitVector(code.k, b), (p.phase - body.phase) & 3
    )


def _product(code: StabilizerCode, s: int, t: int, a: int, b: int) -> PauliOperator:
    acc = PauliOperator(code.n)
    for bits, ops in ((s, code.destabilizers), (t, code.generators), (a, code.logical_x), (b, code.logical_z)):
        for i, op in enumerate(ops):
            if (bits >> i) & 1:
                acc = multiply(acc, op)
    return acc


def recompose(code: StabilizerCode, dec: Decomposition) -> PauliOperator:
    body = _product(code, dec.syndrome.value, dec.stabilizer.value, dec.logical_x.value, dec.logical_z.value)
    return PauliOperator(code.n, body.x, body.z, body.phase + dec.phase)


def canonical_generators(gens: list[PauliOperator]) -> list[PauliOperator]:
    """Reduced echelon form of a stabilizer group, signs carried along."""
    rows = list(gens)
    out: list[PauliOperator] = []
    if not rows:
        return out
    n = rows[0].n
    for bit in reversed(range(2 * n)):
        sel = next((i for i, p in enumerate(rows) if (p.symplectic() >> bit) & 1), None)
        if sel is None:
            continue
        piv = rows.pop(sel)
        rows = [multiply(p, piv) if (p.symplectic() >> bit) & 1 else p for p in rows]
        out = [multiply(p, piv) if (p.symplectic() >> bit) & 1 else p for p in out]
        out.append(piv)
    return out


def _symplectic_rows(gens: list[PauliOperator], n: int) -> list[int]:
    return [g.symplectic() for g in gens]


def _swap_halves(v: int, n: int) -> int:
    return (v >> n) | ((v & ((1 << n) - 1)) << n)


def synthesize_encoder(generators: list[PauliOperator]) -> tuple[CliffordCircuit, CliffordTableau]:
    """Encoder circuit mapping Z_i to generator i (with sign) for each listed generator."""
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].n
    r = len(generators)
    for g in generators:
        if g.n != n:
            raise ValueError("generators act on different qubit counts")
        if g.phase & 1:
            raise ValueError(f"generator {g} is not Hermitian")
    for a in range(r):
        for b in range(a + 1, r):
            if _sp(generators[a], generators[b]):
                raise ValueError(f"generators {a} and {b} anticommute")
    vecs = _symplectic_rows(generators, n)
    if rank(BitMatrix(r, 2 * n, vecs)) != r:
        raise ValueError("generators are not independent")
    mask = (1 << n) - 1

    def sp(u: int, v: int) -> int:
        return (u & _swap_halves(v, n)).bit_count() & 1

    # destabilizers: sp(d_i, g_j) = delta_ij, then made mutually commuting
    system = BitMatrix(r, 2 * n, [_swap_halves(g, n) for g in vecs])
    destab = []
    for i in range(r):
        sol = solve(system, BitVector(r, 1 << i))
        assert sol is not None
        d = sol.value
        for j in range(i):
            if sp(d, destab[j]):
                d ^= vecs[j]
        destab.append(d)

    # logical pairs from the symplectic complement
    def project(v: int) -> int:
        for g, d in zip(vecs, destab):
            if sp(v, d):
                v ^= g
            if sp(v, g):
                v ^= d
        return v

    pool = [project(1 << b) for b in range(2 * n)]
    lx, lz = [], []
    while len(lx) < n - r:
        a = next(v for v in pool if v)
        b = next(v for v in pool if sp(a, v))
        lx.append(a)
        lz.append(b)
        pool = [v ^ (a if sp(v, b) else 0) ^ (b if sp(v, a) else 0) for v in pool]

    xs = [PauliOperator(n, v & mask, v >> n) for v in destab + lx]
    zs = [PauliOperator(n, v & mask, v >> n) for v in vecs + lz]
    body = synthesize_unsigned(CliffordTableau(xs, zs))
    got = tableau_from_circuit(body)
    # make every generator image positive with a trailing Pauli (product of destabilizers)
    tail = 0, 0
    for i in range(r):
        if got.zs[i].phase:
            d = got.xs[i]
            tail = tail[0] ^ d.x, tail[1] ^ d.z
    circuit = CliffordCircuit(n)
    for i in range(r):
        if generators[i].phase:
            circuit.append("X", i)
    circuit = circuit + body
    for q in range(n):
        if (tail[0] >> q) & 1:
            circuit.append("X", q)
        if (tail[1] >> q) & 1:
            circuit.append("Z", q)
    tableau = tableau_from_circuit(circuit)
    assert list(tableau.zs[:r]) == [PauliOperator(n, g.x, g.z, g.phase) for g in generators]
    return circuit, tableau


def random_code(n: int, k: int, rng) -> StabilizerCode:
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    return StabilizerCode(sample_uniform_clifford(n, rng), k)


def random_codes(n: int, k: int, rngs) -> list[StabilizerCode]:
    """``[random_code(n, k, g) for g in rngs]`` with the Clifford sampling vectorized."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    return [StabilizerCode(t, k) for t in sample_uniform_clifford_batch(n, rngs)]


def canonical_code(n: int, k: int) -> StabilizerCode:
    return StabilizerCode(CliffordTableau.identity(n), k)


def five_qubit_code() -> StabilizerCode:
    gens = [PauliOperator.from_string(s) for s in ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")]
    return StabilizerCode.from_generators(gens)


def repetition_code(n: int = 3) -> StabilizerCode:
    gens = [PauliOperator(n, 0, 0b11 << i) for i in range(n - 1)]
    return StabilizerCode.from_generators(gens)


def count_paulis(n: int, w_max: int) -> int:
    return sum(math.comb(n, w) * 3**w for w in range(w_max + 1))


def _colex(n: int, w: int):
    if w == 0:
        yield ()
        return
    for top in range(w - 1, n):
        for rest in _colex(top, w - 1):
            yield rest + (top,)


def iter_paulis_of_weight(n: int, w: int, order: str = "colex"):
    """Yield (support, letter codes) for all weight-w unsigned Paulis; letters X<Y<Z."""
    supports = _colex(n, w) if order == "colex" else itertools.combinations(range(n), w)
    for sup in supports:
        for codes in itertools.product((1, 2, 3), repeat=w):
            yield sup, codes


def _guard(n: int, w_max: int) -> None:
    total = count_paulis(n, w_max)
    if total > SEARCH_GUARD:
        raise GuardError(f"search over {total} Paulis exceeds the guard of {SEARCH_GUARD}")


def _signature(table, sup, codes) -> int:
    sig = 0
    for q, c in zip(sup, codes):
        sig ^= table[q][c - 1]
    return sig


def find_min_logical(code: StabilizerCode, w_max: int) -> PauliOperator | None:
    """First (lowest weight, colex) element of N(S) outside S, up to w_max."""
    _guard(code.n, w_max)
    table = code.signature_table()
    syn_mask = (1 << code.r) - 1
    for w in range(1, w_max + 1):
        for sup, codes in iter_paulis_of_weight(code.n, w):
            sig = _signature(table, sup, codes)
            if not sig & syn_mask and sig:
                return pauli_letters(code.n, sup, codes)
    return None


def distance_exact(code: StabilizerCode, w_max: int) -> int | None:
    hit = find_min_logical(code, w_max)
    return None if hit is None else hit.weight()


def knill_laflamme_ok(code: StabilizerCode, t: int) -> bool:
    """Every product of two errors of weight <= t is detectable or a stabilizer."""
    _guard(code.n, t)
    table = code.signature_table()
    syn_mask = (1 << code.r) - 1
    # E_a^dag E_b is undetectable iff the syndromes match; it is then harmless iff
    # the logical parts also match.  Group errors by syndrome.
    seen: dict[int, int] = {}
    for w in range(t + 1):
        for sup, codes in iter_paulis_of_weight(code.n, w):
            sig = _signature(table, sup, codes)
            s, logical = sig & syn_mask, sig >> code.r
            if seen.setdefault(s, logical) != logical:
                return False
    return True


def is_nondegenerate(code: StabilizerCode, t: int) -> bool:
    """Distinct errors of weight <= t have distinct syndromes (so E_a^dag E_b is never in N(S))."""
    _guard(code.n, t)
    table = code.signature_table()
    syn_mask = (1 << code.r) - 1
    seen: set[int] = set()
    for w in range(t + 1):
        for sup, codes in iter_paulis_of_weight(code.n, w):
            s = _signature(table, sup, codes) & syn_mask
            if s in seen:
                return False
            seen.add(s)
    return True


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def gv_bound(n: int, k: int, d: int) -> float:
    if not 0 < d <= n:
        raise ValueError(f"need 0 < d <= n, got d={d}, n={n}")
    return 1.0 - d * 2.0 ** (n * binary_entropy(d / n)) * 3.0**d * 2.0 ** (k - n)
