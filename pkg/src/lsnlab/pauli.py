"""Signed n-qubit Pauli operators in symplectic form.

A ``PauliOperator`` stores integer bitmasks ``x`` and ``z`` (bit i is qubit i)
and a phase exponent.  The phase is relative to the Hermitian letter string:
the operator is ``i**phase`` times the tensor product of I, X, Y, Z where qubit i
carries X if only x_i is set, Z if only z_i is set, and Y if both are set.
Under this convention ``X * Z`` has phase 3 and letter Y, since XZ = -iY.
"""

from __future__ import annotations

from .gf2 import BitVector

__all__ = [
    "PauliOperator",
    "multiply",
    "commutes",
    "weight",
    "symplectic_product",
    "random_pauli_of_weight",
    "pauli_letters",
]

_SIGNS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PARSE_SIGNS = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "−": 2, "-i": 3, "−i": 3}
# letter codes: 0=I, 1=X, 2=Y, 3=Z
LETTERS = "IXYZ"


def _letter_bits(code: int) -> tuple[int, int]:
    return (1, 0) if code == 1 else (1, 1) if code == 2 else (0, 1) if code == 3 else (0, 0)


class PauliOperator:
    __slots__ = ("n", "x", "z", "phase")

    def __init__(self, n: int, x: int = 0, z: int = 0, phase: int = 0):
        mask = (1 << n) - 1
        if x & ~mask or z & ~mask:
            raise ValueError(f"bits set beyond n={n}")
        self.n = n
        self.x = x
        self.z = z
        self.phase = phase & 3

    @classmethod
    def _trusted(cls, n: int, x: int, z: int, phase: int) -> PauliOperator:
        # hot-path constructor: caller guarantees x, z fit in n bits
        p = object.__new__(cls)
        p.n = n
        p.x = x
        p.z = z
        p.phase = phase & 3
        return p

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliOperator:
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for n={n}")
        bx, bz = _letter_bits(LETTERS.index(letter))
        return cls(n, bx << qubit, bz << qubit)

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        text = text.strip()
        i = 0
        while i < len(text) and text[i] not in LETTERS:
            i += 1
        sign, body = text[:i], text[i:]
        if sign not in _PARSE_SIGNS:
            raise ValueError(f"bad Pauli sign {sign!r} in {text!r}")
        x = z = 0
        for q, ch in enumerate(body):
            if ch not in LETTERS:
                raise ValueError(f"bad Pauli letter {ch!r} at position {q} in {text!r}")
            bx, bz = _letter_bits(LETTERS.index(ch))
            x |= bx << q
            z |= bz << q
        return cls(len(body), x, z, _PARSE_SIGNS[sign])

    @property
    def x_bits(self) -> BitVector:
        return BitVector(self.n, self.x)

    @property
    def z_bits(self) -> BitVector:
        return BitVector(self.n, self.z)

    @property
    def support(self) -> int:
        return self.x | self.z

    def letter(self, qubit: int) -> str:
        return "IZXY"[2 * ((self.x >> qubit) & 1) + ((self.z >> qubit) & 1)]

    def letters(self) -> str:
        return "".join(self.letter(q) for q in range(self.n))

    def __str__(self) -> str:
        return _SIGNS[self.phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def unsigned(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, 0)

    def is_identity(self, ignore_phase: bool = True) -> bool:
        return not (self.x | self.z) and (ignore_phase or self.phase == 0)

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def symplectic(self) -> int:
        """2n-bit vector (x | z << n)."""
        return self.x | (self.z << self.n)

    def adjoint(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, -self.phase)

    def inverse(self) -> PauliOperator:
        return self.adjoint()

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def tensor(self, other: PauliOperator) -> PauliOperator:
        return PauliOperator(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.phase + other.phase,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (self.n, self.x, self.z, self.phase) == (other.n, other.x, other.z, other.phase)

    def __hash__(self) -> int:
        return hash((self.n, self.x, self.z, self.phase))


def _check_n(p: PauliOperator, q: PauliOperator) -> None:
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n} qubits")


def product_phase(x1: int, z1: int, p1: int, x2: int, z2: int, p2: int) -> int:
    # go through the X^x Z^z ordering, where Y = i X Z
    ph = p1 + p2 + (x1 & z1).bit_count() + (x2 & z2).bit_count() + 2 * (z1 & x2).bit_count()
    ph -= ((x1 ^ x2) & (z1 ^ z2)).bit_count()
    return ph & 3


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    _check_n(p, q)
    ph = product_phase(p.x, p.z, p.phase, q.x, q.z, q.phase)
    return PauliOperator(p.n, p.x ^ q.x, p.z ^ q.z, ph)


def symplectic_product(p: PauliOperator, q: PauliOperator) -> int:
    _check_n(p, q)
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() & 1


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    return symplectic_product(p, q) == 0


def weight(p: PauliOperator) -> int:
    return p.weight()


def pauli_letters(n: int, support: tuple[int, ...], codes: tuple[int, ...]) -> PauliOperator:
    """Build an unsigned Pauli from qubit indices and letter codes (1=X, 2=Y, 3=Z)."""
    x = z = 0
    for q, c in zip(support, codes):
        bx, bz = _letter_bits(c)
        x |= bx << q
        z |= bz << q
    return PauliOperator(n, x, z)


def random_pauli_of_weight(n: int, w: int, rng) -> PauliOperator:
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range for n={n}")
    if w == 0:
        return PauliOperator(n)
    support = rng.choice(n, size=w, replace=False)
    codes = rng.integers(1, 4, size=w)
    return pauli_letters(n, tuple(int(q) for q in support), tuple(int(c) for c in codes))
