"""Dense GF(2) vectors and matrices backed by Python integers.

A Python ``int`` is an arbitrary-length two's-complement word array, so bit i
of the integer sits in 64-bit word i // 64 at position i % 64.  ``words()``
exposes that layout explicitly.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

__all__ = [
    "BitVector",
    "BitMatrix",
    "mat_vec_mul",
    "rank",
    "solve",
    "inverse",
    "complete_basis",
    "rref",
    "parity",
]

WORD_BITS = 64


def parity(v: int) -> int:
    return v.bit_count() & 1


class BitVector:
    __slots__ = ("length", "value")

    def __init__(self, length: int, value: int = 0):
        if length < 0:
            raise ValueError(f"negative length {length}")
        self.length = length
        self.value = value & ((1 << length) - 1)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVector:
        bits = list(bits)
        value = 0
        for i, b in enumerate(bits):
            if b & 1:
                value |= 1 << i
        return cls(len(bits), value)

    @classmethod
    def from_string(cls, s: str) -> BitVector:
        """Parse '0101' with bit 0 leftmost."""
        return cls.from_bits(int(c) for c in s)

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    def to_bits(self) -> list[int]:
        return [(self.value >> i) & 1 for i in range(self.length)]

    def to_string(self) -> str:
        return "".join(str(b) for b in self.to_bits())

    def words(self) -> list[int]:
        count = (self.length + WORD_BITS - 1) // WORD_BITS
        mask = (1 << WORD_BITS) - 1
        return [(self.value >> (WORD_BITS * i)) & mask for i in range(count)]

    def weight(self) -> int:
        return self.value.bit_count()

    def dot(self, other: BitVector) -> int:
        _check_len(self, other)
        return parity(self.value & other.value)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: BitVector) -> BitVector:
        _check_len(self, other)
        return BitVector(self.length, self.value ^ other.value)

    def __and__(self, other: BitVector) -> BitVector:
        _check_len(self, other)
        return BitVector(self.length, self.value & other.value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.length, self.value))

    def __repr__(self) -> str:
        return f"BitVector({self.to_string()!r})"


def _check_len(a: BitVector, b: BitVector) -> None:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")


class BitMatrix:
    """Row-major matrix; row i is an int whose bit j is entry (i, j)."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int] | None = None):
        mask = (1 << ncols) - 1
        if rows is None:
            rows = [0] * nrows
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(r & mask for r in rows)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> BitMatrix:
        nrows = len(entries)
        ncols = len(entries[0]) if nrows else 0
        rows = []
        for r in entries:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            rows.append(BitVector.from_bits(r).value)
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, cols: Sequence[int]) -> BitMatrix:
        rows = [0] * nrows
        for j, c in enumerate(cols):
            for i in range(nrows):
                if (c >> i) & 1:
                    rows[i] |= 1 << j
        return cls(nrows, len(cols), rows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, [1 << i for i in range(n)])

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def column(self, j: int) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                out |= 1 << i
        return out

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.ncols, self.nrows, self.columns())

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"dimension mismatch: {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        out = []
        for r in self.rows:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= other.rows[j]
                r >>= 1
                j += 1
            out.append(acc)
        return BitMatrix(self.nrows, other.ncols, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self.to_lists()!r})"


def mat_vec_mul(m: BitMatrix, v: BitVector) -> BitVector:
    if v.length != m.ncols:
        raise ValueError(f"dimension mismatch: matrix has {m.ncols} columns, vector has length {v.length}")
    out = 0
    for i, r in enumerate(m.rows):
        if parity(r & v.value):
            out |= 1 << i
    return BitVector(m.nrows, out)


def _eliminate(rows: list[int], ncols: int, reduced: bool) -> list[int]:
    """In-place Gaussian elimination; returns the pivot column per pivot row."""
    pivots = []
    r = 0
    for c in range(ncols):
        bit = 1 << c
        sel = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        start = 0 if reduced else r + 1
        for i in range(start, len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(m: BitMatrix) -> int:
    return len(_eliminate(list(m.rows), m.ncols, reduced=False))


def rref(m: BitMatrix) -> BitMatrix:
    rows = list(m.rows)
    _eliminate(rows, m.ncols, reduced=True)
    return BitMatrix(m.nrows, m.ncols, rows)


def solve(m: BitMatrix, b: BitVector) -> BitVector | None:
    """Return some x with m x = b, free variables zero, or None if inconsistent."""
    if b.length != m.nrows:
        raise ValueError(f"dimension mismatch: matrix has {m.nrows} rows, rhs has length {b.length}")
    aug_bit = 1 << m.ncols
    rows = [r | (aug_bit if (b.value >> i) & 1 else 0) for i, r in enumerate(m.rows)]
    pivots = _eliminate(rows, m.ncols, reduced=True)
    for r in rows[len(pivots):]:
        if r & aug_bit:
            return None
    x = 0
    for i, c in enumerate(pivots):
        if rows[i] & aug_bit:
            x |= 1 << c
    return BitVector(m.ncols, x)


def inverse(m: BitMatrix) -> BitMatrix:
    """Gauss-Jordan on [M | I]; raises ValueError if M is singular."""
    n = m.nrows
    if m.ncols != n:
        raise ValueError(f"inverse needs a square matrix, got {m.nrows}x{m.ncols}")
    rows = [r | (1 << (n + i)) for i, r in enumerate(m.rows)]
    if len(_eliminate(rows, n, reduced=True)) != n:
        raise ValueError("matrix is singular")
    return BitMatrix(n, n, [r >> n for r in rows])


def complete_basis(cols: BitMatrix) -> BitMatrix:
    """Prepend standard basis columns (lowest index first) until square and invertible."""
    n, c = cols.nrows, cols.ncols
    given = cols.columns()
    echelon: dict[int, int] = {}

    def insert(v: int) -> bool:
        while v:
            top = v.bit_length() - 1
            if top not in echelon:
                echelon[top] = v
                return True
            v ^= echelon[top]
        return False

    for v in given:
        if not insert(v):
            raise ValueError("input columns are not linearly independent")
    extra = []
    for i in range(n):
        if len(extra) + c == n:
            break
        if insert(1 << i):
            extra.append(1 << i)
    return BitMatrix.from_columns(n, extra + given)
