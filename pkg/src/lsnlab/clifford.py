"""Clifford unitaries as signed symplectic tableaux (global phase dropped).

A tableau stores the conjugation images U X_i U^dagger and U Z_i U^dagger.
Circuits are ordered gate lists in time order: the first gate acts first.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .pauli import PauliOperator
from .rng import randbits

__all__ = [
    "GATE_KINDS",
    "CliffordGate",
    "CliffordCircuit",
    "CliffordTableau",
    "Permutation",
    "conjugate",
    "compose",
    "inverse",
    "tableau_from_circuit",
    "sample_uniform_clifford",
    "sample_plc",
    "single_qubit_clifford",
    "local_cliffords_tableau",
    "permutation_circuit",
    "synthesize_circuit",
    "decompose_plc",
]

GATE_KINDS = {"H": 1, "S": 1, "X": 1, "Z": 1, "CNOT": 2, "CZ": 2, "SWAP": 2}


class CliffordGate(NamedTuple):
    kind: str
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind} {' '.join(map(str, self.qubits))}"


def _gate(kind: str, *qubits: int) -> CliffordGate:
    return CliffordGate(kind, tuple(qubits))


def _check_gate(g: CliffordGate, n: int) -> None:
    arity = GATE_KINDS.get(g.kind)
    if arity is None:
        raise ValueError(f"unknown gate kind {g.kind!r}")
    if len(g.qubits) != arity:
        raise ValueError(f"{g.kind} expects {arity} qubit(s), got {len(g.qubits)}")
    for q in g.qubits:
        if not 0 <= q < n:
            raise ValueError(f"{g.kind} qubit index {q} out of range for n={n}")
    if arity == 2 and g.qubits[0] == g.qubits[1]:
        raise ValueError(f"{g.kind} needs distinct qubits, got {g.qubits}")


def _conj_gate(kind: str, qs: tuple[int, ...], x: int, z: int, ph: int) -> tuple[int, int, int]:
    """Conjugate a Hermitian-form Pauli by one gate."""
    a = qs[0]
    xa = (x >> a) & 1
    za = (z >> a) & 1
    if kind == "H":
        if xa & za:
            ph += 2
        if xa != za:
            x ^= 1 << a
            z ^= 1 << a
    elif kind == "S":
        if xa & za:
            ph += 2
        z ^= xa << a
    elif kind == "X":
        if za:
            ph += 2
    elif kind == "Z":
        if xa:
            ph += 2
    else:
        b = qs[1]
        xb = (x >> b) & 1
        zb = (z >> b) & 1
        if kind == "CNOT":
            if xa & zb & (xb ^ za ^ 1):
                ph += 2
            x ^= xa << b
            z ^= zb << a
        elif kind == "CZ":
            if xa & xb & (za ^ zb):
                ph += 2
            z ^= (xb << a) | (xa << b)
        elif kind == "SWAP":
            if xa != xb:
                x ^= (1 << a) | (1 << b)
            if za != zb:
                z ^= (1 << a) | (1 << b)
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
    return x, z, ph & 3


@dataclass
class CliffordCircuit:
    n: int
    gates: list[CliffordGate] = field(default_factory=list)

    def __post_init__(self):
        self.gates = [g if isinstance(g, CliffordGate) else CliffordGate(g[0], tuple(g[1])) for g in self.gates]
        for g in self.gates:
            _check_gate(g, self.n)

    def append(self, kind: str, *qubits: int) -> None:
        g = _gate(kind, *qubits)
        _check_gate(g, self.n)
        self.gates.append(g)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: CliffordCircuit) -> CliffordCircuit:
        if other.n != self.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n} qubits")
        return CliffordCircuit(self.n, self.gates + other.gates)

    def inverse(self) -> CliffordCircuit:
        out = []
        for g in reversed(self.gates):
            if g.kind == "S":
                # S^dagger = S Z
                out.append(_gate("S", *g.qubits))
                out.append(_gate("Z", *g.qubits))
            else:
                out.append(g)
        return CliffordCircuit(self.n, out)

    def expand_swaps(self) -> CliffordCircuit:
        out = []
        for g in self.gates:
            if g.kind == "SWAP":
                a, b = g.qubits
                out += [_gate("CNOT", a, b), _gate("CNOT", b, a), _gate("CNOT", a, b)]
            else:
                out.append(g)
        return CliffordCircuit(self.n, out)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def to_json(self) -> list:
        return [[g.kind, list(g.qubits)] for g in self.gates]

    @classmethod
    def from_json(cls, n: int, data: list) -> CliffordCircuit:
        return cls(n, [CliffordGate(str(k), tuple(int(q) for q in qs)) for k, qs in data])


class CliffordTableau:
    __slots__ = ("n", "xs", "zs", "_xph", "_zph")

    def __init__(self, xs, zs):
        xs = tuple(xs)
        zs = tuple(zs)
        if len(xs) != len(zs):
            raise ValueError("x and z image counts differ")
        n = len(xs)
        for p in xs + zs:
            if p.n != n:
                raise ValueError(f"image on {p.n} qubits in an n={n} tableau")
            if p.phase & 1:
                raise ValueError(f"non-Hermitian image {p}")
        self.n = n
        self.xs = xs
        self.zs = zs
        # phases in X^x Z^z ordering, cached for conjugation
        self._xph = [p.phase + (p.x & p.z).bit_count() for p in xs]
        self._zph = [p.phase + (p.x & p.z).bit_count() for p in zs]

    @classmethod
    def _trusted(cls, xs, zs) -> CliffordTableau:
        t = object.__new__(cls)
        t.n = len(xs)
        t.xs = tuple(xs)
        t.zs = tuple(zs)
        t._xph = [p.phase + (p.x & p.z).bit_count() for p in t.xs]
        t._zph = [p.phase + (p.x & p.z).bit_count() for p in t.zs]
        return t

    @classmethod
    def identity(cls, n: int) -> CliffordTableau:
        return cls([PauliOperator(n, 1 << i, 0) for i in range(n)], [PauliOperator(n, 0, 1 << i) for i in range(n)])

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        if p.n != self.n:
            raise ValueError(f"size mismatch: tableau on {self.n} qubits, Pauli on {p.n}")
        ax = az = 0
        ph = p.phase + (p.x & p.z).bit_count()
        for bits, imgs, phs in ((p.x, self.xs, self._xph), (p.z, self.zs, self._zph)):
            while bits:
                low = bits & -bits
                i = low.bit_length() - 1
                bits ^= low
                img = imgs[i]
                ph += phs[i] + 2 * (az & img.x).bit_count()
                ax ^= img.x
                az ^= img.z
        ph -= (ax & az).bit_count()
        return PauliOperator(self.n, ax, az, ph)

    def conjugate_inverse(self, p: PauliOperator) -> PauliOperator:
        """U^dagger p U without building the inverse tableau."""
        if p.n != self.n:
            raise ValueError(f"size mismatch: tableau on {self.n} qubits, Pauli on {p.n}")
        x = z = 0
        px, pz = p.x, p.z
        for i in range(self.n):
            zi = self.zs[i]
            if ((px & zi.z) ^ (pz & zi.x)).bit_count() & 1:
                x |= 1 << i
            xi = self.xs[i]
            if ((px & xi.z) ^ (pz & xi.x)).bit_count() & 1:
                z |= 1 << i
        fwd = self.conjugate(PauliOperator(self.n, x, z))
        return PauliOperator(self.n, x, z, p.phase - fwd.phase)

    def apply_gate(self, g: CliffordGate) -> CliffordTableau:
        """Tableau of g . U (gate acting after U)."""
        _check_gate(g, self.n)
        n = self.n
        xs = [PauliOperator(n, *_conj_gate(g.kind, g.qubits, p.x, p.z, p.phase)) for p in self.xs]
        zs = [PauliOperator(n, *_conj_gate(g.kind, g.qubits, p.x, p.z, p.phase)) for p in self.zs]
        return CliffordTableau(xs, zs)

    def is_symplectic(self) -> bool:
        rows = self.xs + self.zs
        n = self.n
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                p, q = rows[a], rows[b]
                s = ((p.x & q.z) ^ (p.z & q.x)).bit_count() & 1
                if s != (b == a + n):
                    return False
        return True

    def signs(self) -> tuple[int, ...]:
        return tuple(p.phase >> 1 for p in self.xs + self.zs)

    def unsigned_key(self) -> tuple[int, ...]:
        return tuple(p.symplectic() for p in self.xs + self.zs)

    def key(self) -> tuple:
        return tuple((p.x, p.z, p.phase) for p in self.xs + self.zs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordTableau):
            return NotImplemented
        return self.n == other.n and self.xs == other.xs and self.zs == other.zs

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"CliffordTableau(x={[str(p) for p in self.xs]}, z={[str(p) for p in self.zs]})"

    def to_json(self) -> dict:
        return {"n": self.n, "x_images": [str(p) for p in self.xs], "z_images": [str(p) for p in self.zs]}

    @classmethod
    def from_json(cls, data: dict) -> CliffordTableau:
        n = int(data["n"])
        xs = [PauliOperator.from_string(s) for s in data["x_images"]]
        zs = [PauliOperator.from_string(s) for s in data["z_images"]]
        if len(xs) != n or len(zs) != n:
            raise ValueError(f"tableau for n={n} needs {n} x and z images")
        t = cls(xs, zs)
        if not t.is_symplectic():
            raise ValueError("tableau images violate the symplectic conditions")
        return t

    def direct_sum(self, other: CliffordTableau) -> CliffordTableau:
        a, b = self.n, other.n

        def lift_lo(p):
            return PauliOperator(a + b, p.x, p.z, p.phase)

        def lift_hi(p):
            return PauliOperator(a + b, p.x << a, p.z << a, p.phase)

        return CliffordTableau(
            [lift_lo(p) for p in self.xs] + [lift_hi(p) for p in other.xs],
            [lift_lo(p) for p in self.zs] + [lift_hi(p) for p in other.zs],
        )


def conjugate(t: CliffordTableau, p: PauliOperator) -> PauliOperator:
    return t.conjugate(p)


def compose(a: CliffordTableau, b: CliffordTableau) -> CliffordTableau:
    """Tableau of a . b, i.e. b acts first."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n} qubits")
    return CliffordTableau([a.conjugate(p) for p in b.xs], [a.conjugate(p) for p in b.zs])


def inverse(t: CliffordTableau) -> CliffordTableau:
    n = t.n
    xs = [t.conjugate_inverse(PauliOperator(n, 1 << i, 0)) for i in range(n)]
    zs = [t.conjugate_inverse(PauliOperator(n, 0, 1 << i)) for i in range(n)]
    return CliffordTableau(xs, zs)


def tableau_from_circuit(c: CliffordCircuit) -> CliffordTableau:
    n = c.n
    rows = [[1 << i, 0, 0] for i in range(n)] + [[0, 1 << i, 0] for i in range(n)]
    for g in c.gates:
        _check_gate(g, n)
        for r in rows:
            r[0], r[1], r[2] = _conj_gate(g.kind, g.qubits, r[0], r[1], r[2])
    return CliffordTableau([PauliOperator(n, *r) for r in rows[:n]], [PauliOperator(n, *r) for r in rows[n:]])


# --- sampling -------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _draw_bounds(n: int) -> tuple[np.ndarray, np.ndarray]:
    highs = np.array([1 << (2 * (n - i)) for i in range(n)] * 2 + [1 << (2 * n)], dtype=np.int64)
    lows = np.array([1] * n + [0] * (n + 1), dtype=np.int64)
    return lows, highs


def _clifford_draws(n: int, rng) -> tuple[list[int], list[int], int]:
    """Per-level choice bits (r_i nonzero, s_i arbitrary, 2(n - i) bits each) and 2n sign bits."""
    if 2 * n <= 62:
        vals = rng.integers(*_draw_bounds(n)).tolist()
        return vals[:n], vals[n : 2 * n], vals[2 * n]
    rs, ss = [], []
    for i in range(n):
        span = 2 * (n - i)
        r = 0
        while not r:
            r = randbits(rng, span)
        rs.append(r)
        ss.append(randbits(rng, span))
    return rs, ss, randbits(rng, 2 * n)


def _symplectic_from_draws(n: int, rs: list[int], ss: list[int]) -> list[tuple[int, int]]:
    """Symplectic Gram-Schmidt driven by the choice bits.

    Pair i is drawn uniformly from the symplectic complement of pairs 0..i-1:
    v is the combination of the current complement basis selected by r_i,
    w the one selected by s_i, shifted by a fixed partner of v when <v, w> = 0.
    The number of choices at each level does not depend on earlier levels, so
    the resulting symplectic basis is uniform.
    """
    mask = (1 << n) - 1

    def swap(a: int) -> int:
        return (a >> n) | ((a & mask) << n)

    basis = [1 << j for j in range(2 * n)]
    out = []
    for r, s in zip(rs, ss):
        v = w = 0
        bits = r
        while bits:
            low = bits & -bits
            v ^= basis[low.bit_length() - 1]
            bits ^= low
        bits = s
        while bits:
            low = bits & -bits
            w ^= basis[low.bit_length() - 1]
            bits ^= low
        vs = swap(v)
        if not (w & vs).bit_count() & 1:
            u = next(j for j, b in enumerate(basis) if (b & vs).bit_count() & 1)
            w ^= basis[u]
            s ^= 1 << u
        out.append((v, w))
        # basis vectors a and b are now dependent; project the rest onto the complement
        a = (r & -r).bit_length() - 1
        if (s >> a) & 1:
            s ^= r
        b = (s & -s).bit_length() - 1
        ws = swap(w)
        nxt = []
        for j, x in enumerate(basis):
            if j == a or j == b:
                continue
            if (x & ws).bit_count() & 1:
                x ^= v
            if (x & vs).bit_count() & 1:
                x ^= w
            nxt.append(x)
        basis = nxt
    return out


def sample_symplectic(n: int, rng) -> list[tuple[int, int]]:
    """Uniform element of Sp(2n, 2) as images (x_i, z_i) packed as x | z << n."""
    rs, ss, _ = _clifford_draws(n, rng)
    return _symplectic_from_draws(n, rs, ss)


def _lowest_bit_index(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count((a & -a) - 1).astype(np.int64)


def _symplectic_batch(n: int, rs: np.ndarray, ss: np.ndarray) -> np.ndarray:
    """Vectorized twin of ``_symplectic_from_draws``; returns (B, n, 2) packed images."""
    bsz = rs.shape[0]
    mask = np.int64((1 << n) - 1)
    rows = np.arange(bsz)

    def swap(a):
        return (a >> n) | ((a & mask) << n)

    def sp(a, bs):
        return np.bitwise_count(a & bs) & 1

    basis = np.tile(np.left_shift(np.int64(1), np.arange(2 * n, dtype=np.int64)), (bsz, 1))
    out = np.zeros((bsz, n, 2), dtype=np.int64)
    for i in range(n):
        span = basis.shape[1]
        sh = np.arange(span, dtype=np.int64)
        r = rs[:, i].copy()
        s = ss[:, i].copy()
        v = np.bitwise_xor.reduce(basis * ((r[:, None] >> sh) & 1), axis=1)
        w = np.bitwise_xor.reduce(basis * ((s[:, None] >> sh) & 1), axis=1)
        vs = swap(v)
        spv = sp(basis, vs[:, None])
        need = sp(w, vs) == 0
        u = np.argmax(spv, axis=1)
        w = np.where(need, w ^ basis[rows, u], w)
        s = np.where(need, s ^ (np.int64(1) << u), s)
        out[:, i, 0] = v
        out[:, i, 1] = w
        a = _lowest_bit_index(r)
        s = np.where((s >> a) & 1, s ^ r, s)
        b = _lowest_bit_index(s)
        ws = swap(w)
        spw = sp(basis, ws[:, None])
        basis = basis ^ (spw * v[:, None])
        spv = sp(basis, vs[:, None])
        basis = basis ^ (spv * w[:, None])
        keep = np.ones((bsz, span), dtype=bool)
        keep[rows, a] = False
        keep[rows, b] = False
        basis = basis[keep].reshape(bsz, span - 2)
    return out


def _tableau_from_pairs(n: int, pairs, signs: int) -> CliffordTableau:
    mask = (1 << n) - 1
    make = PauliOperator._trusted
    xs = [make(n, v & mask, v >> n, 2 * ((signs >> i) & 1)) for i, (v, _) in enumerate(pairs)]
    zs = [make(n, w & mask, w >> n, 2 * ((signs >> (n + i)) & 1)) for i, (_, w) in enumerate(pairs)]
    return CliffordTableau._trusted(xs, zs)


def sample_uniform_clifford(n: int, rng) -> CliffordTableau:
    if n < 1:
        raise ValueError("n must be at least 1")
    rs, ss, signs = _clifford_draws(n, rng)
    return _tableau_from_pairs(n, _symplectic_from_draws(n, rs, ss), signs)


def sample_uniform_clifford_batch(n: int, rngs) -> list[CliffordTableau]:
    """Same output as ``[sample_uniform_clifford(n, g) for g in rngs]``, vectorized across streams."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rngs = list(rngs)
    if 2 * n > 62 or len(rngs) < 2:
        return [sample_uniform_clifford(n, g) for g in rngs]
    draws = [_clifford_draws(n, g) for g in rngs]
    rs = np.array([d[0] for d in draws], dtype=np.int64)
    ss = np.array([d[1] for d in draws], dtype=np.int64)
    packed = _symplectic_batch(n, rs, ss).tolist()
    return [_tableau_from_pairs(n, pairs, d[2]) for pairs, d in zip(packed, draws)]


# Single-qubit Cliffords indexed 0..23: ordered letter pair (image of X, image of Z)
# then the two sign bits.  Letter codes: 1=X, 2=Y, 3=Z.
_LOCAL_PAIRS = [(1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)]
_CODE_BITS = {1: (1, 0), 2: (1, 1), 3: (0, 1)}


def _local_images(c: int) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    if not 0 <= c < 24:
        raise ValueError(f"single-qubit Clifford index {c} out of range")
    px, pz = _LOCAL_PAIRS[c >> 2]
    sx, sz = (c >> 1) & 1, c & 1
    return (*_CODE_BITS[px], 2 * sx), (*_CODE_BITS[pz], 2 * sz)


def _local_index(img_x: tuple[int, int, int], img_z: tuple[int, int, int]) -> int:
    inv = {v: k for k, v in _CODE_BITS.items()}
    pair = (inv[img_x[:2]], inv[img_z[:2]])
    return 4 * _LOCAL_PAIRS.index(pair) + 2 * (img_x[2] >> 1) + (img_z[2] >> 1)


def single_qubit_clifford(c: int) -> CliffordTableau:
    (ax, az, ap), (bx, bz, bp) = _local_images(c)
    return CliffordTableau([PauliOperator(1, ax, az, ap)], [PauliOperator(1, bx, bz, bp)])


@dataclass(frozen=True)
class Permutation:
    """Q(pi) sends the tensor factor on qubit i to qubit mapping[i]."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(int(v) for v in self.mapping))
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"not a permutation: {self.mapping}")

    @property
    def n(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other: Permutation) -> Permutation:
        """self after other."""
        return Permutation(tuple(self.mapping[other.mapping[i]] for i in range(self.n)))

    def tableau(self) -> CliffordTableau:
        n = self.n
        return CliffordTableau(
            [PauliOperator(n, 1 << self.mapping[i], 0) for i in range(n)],
            [PauliOperator(n, 0, 1 << self.mapping[i]) for i in range(n)],
        )

    def apply_bits(self, bits: int) -> int:
        out = 0
        for i, j in enumerate(self.mapping):
            if (bits >> i) & 1:
                out |= 1 << j
        return out

    def apply_pauli(self, p: PauliOperator) -> PauliOperator:
        return PauliOperator(p.n, self.apply_bits(p.x), self.apply_bits(p.z), p.phase)


def local_cliffords_tableau(locals_: list[int], perm: Permutation | None = None) -> CliffordTableau:
    """Tableau of (tensor of locals) . Q(perm)."""
    n = len(locals_)
    if perm is None:
        perm = Permutation.identity(n)
    imgs = [_local_images(int(c)) for c in locals_]
    xs, zs = [], []
    for j in range(n):
        q = perm.mapping[j]
        (ax, az, ap), (bx, bz, bp) = imgs[q]
        xs.append(PauliOperator(n, ax << q, az << q, ap))
        zs.append(PauliOperator(n, bx << q, bz << q, bp))
    return CliffordTableau(xs, zs)


def sample_plc(n: int, rng) -> CliffordTableau:
    if n < 1:
        raise ValueError("n must be at least 1")
    perm = Permutation(tuple(int(v) for v in rng.permutation(n)))
    locals_ = [int(c) for c in rng.integers(0, 24, size=n)]
    return local_cliffords_tableau(locals_, perm)


def decompose_plc(t: CliffordTableau) -> tuple[Permutation, list[int]] | None:
    """Split a weight-preserving tableau into (permutation, local indices), or None."""
    n = t.n
    mapping = [0] * n
    locals_ = [0] * n
    for j in range(n):
        px, pz = t.xs[j], t.zs[j]
        sup = px.support
        if sup.bit_count() != 1 or pz.support != sup:
            return None
        q = sup.bit_length() - 1
        mapping[j] = q
        locals_[q] = _local_index(
            ((px.x >> q) & 1, (px.z >> q) & 1, px.phase), ((pz.x >> q) & 1, (pz.z >> q) & 1, pz.phase)
        )
    if sorted(mapping) != list(range(n)):
        return None
    return Permutation(tuple(mapping)), locals_


def permutation_circuit(perm: Permutation) -> CliffordCircuit:
    n = perm.n
    seen = [False] * n
    circ = CliffordCircuit(n)
    for start in range(n):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        j = perm.mapping[start]
        while j != start:
            cycle.append(j)
            seen[j] = True
            j = perm.mapping[j]
        for c in cycle[1:]:
            circ.append("SWAP", start, c)
    return circ


# --- synthesis ------------------------------------------------------------


def _bits(v: int):
    while v:
        low = v & -v
        yield low.bit_length() - 1
        v ^= low


def _eliminate_to_identity(t: CliffordTableau) -> list[CliffordGate]:
    """Gates G_1..G_m with G_m...G_1 U equal to the identity up to signs."""
    n = t.n
    rows = [[p.x, p.z] for p in t.xs] + [[p.x, p.z] for p in t.zs]
    ops: list[CliffordGate] = []

    def apply(kind: str, *qs: int) -> None:
        ops.append(_gate(kind, *qs))
        for r in rows:
            r[0], r[1], _ = _conj_gate(kind, qs, r[0], r[1], 0)

    full = (1 << n) - 1
    for i in range(n):
        hi = full & ~((1 << i) - 1)
        others = hi & ~(1 << i)
        P = rows[i]
        if not P[0] & hi:
            apply("H", next(_bits(P[1] & hi)))
        j = next(_bits(P[0] & hi))
        if j != i:
            apply("SWAP", i, j)
        for j in list(_bits(P[0] & others)):
            apply("CNOT", i, j)
        if (P[1] >> i) & 1:
            apply("S", i)
        for j in list(_bits(P[1] & others)):
            apply("CZ", i, j)
        Q = rows[n + i]
        if Q[0] or Q[1] != 1 << i:
            apply("H", i)
            for j in list(_bits(Q[0] & others)):
                apply("CNOT", i, j)
            if (Q[1] >> i) & 1:
                apply("S", i)
            for j in list(_bits(Q[1] & others)):
                apply("CZ", i, j)
            apply("H", i)
    return ops


def synthesize_unsigned(t: CliffordTableau) -> CliffordCircuit:
    """Circuit over {H, S, Z, CNOT, CZ, SWAP} matching t up to image signs."""
    ops = _eliminate_to_identity(t)
    return CliffordCircuit(t.n, ops).inverse()


def synthesize_circuit(t: CliffordTableau) -> CliffordCircuit:
    """Exact circuit for t; sign fixes are Pauli gates at the start."""
    body = synthesize_unsigned(t)
    got = tableau_from_circuit(body)
    fix = CliffordCircuit(t.n)
    for i in range(t.n):
        if got.xs[i].phase != t.xs[i].phase:
            fix.append("Z", i)
    for i in range(t.n):
        if got.zs[i].phase != t.zs[i].phase:
            fix.append("X", i)
    return fix + body
