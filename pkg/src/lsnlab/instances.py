"""LSN, multi-shot LSN and LPN instances.

An LSN payload is either a Pauli frame (symbolic) or an explicit statevector
(dense).  Both expose the same query interface, which is all a decoder gets:

* ``syndrome(correction)``: stabilizer measurement outcomes as an int,
  bit i for generator i.
* ``measure_unencoded(correction, rng)``: apply the correction, undo the
  encoder, measure every qubit; returns an int with bit i for qubit i.
* ``dense()``: the physical state, for dense decoders.

The hidden secret and error live in a separate ``Witness`` used for scoring.
Secrets are ints with bit j for logical qubit j.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import dense as ds
from .clifford import CliffordCircuit, CliffordTableau, Permutation, compose, inverse
from .codes import StabilizerCode, random_code, random_codes
from .errors import ConfigError
from .gf2 import BitMatrix, BitVector, complete_basis, mat_vec_mul, rank
from .gf2 import inverse as gf2_inverse
from .noise import NoiseSpec, sample_error
from .pauli import PauliOperator, multiply
from .rng import randbits

__all__ = [
    "SCHEMA",
    "InstanceParseError",
    "PauliFrame",
    "DensePayload",
    "Witness",
    "LsnInstance",
    "MslsnInstance",
    "LpnInstance",
    "logical_x_power",
    "sample_lsn",
    "sample_lsn_batch",
    "sample_mslsn",
    "mslsn_to_lsn",
    "sample_lpn",
    "lpn_to_lsn",
    "cnot_synthesis",
    "serialize",
    "deserialize",
]

SCHEMA = "lsnlab.instance/1"


class InstanceParseError(ConfigError):
    """Malformed instance file; the message starts with a JSON path."""

    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def logical_x_power(code: StabilizerCode, bits: int) -> PauliOperator:
    acc = PauliOperator(code.n)
    for j, lx in enumerate(code.logical_x):
        if (bits >> j) & 1:
            acc = multiply(acc, lx)
    return acc


class PauliFrame:
    """Noisy codeword as an unsigned Pauli applied to the reference codeword U|0^n>."""

    form = "symbolic"

    def __init__(self, code: StabilizerCode, frame: PauliOperator):
        if frame.n != code.n:
            raise ValueError(f"size mismatch: code on {code.n} qubits, frame on {frame.n}")
        self.code = code
        self._frame = frame.unsigned()

    @classmethod
    def from_witness(cls, code: StabilizerCode, error: PauliOperator, secret: int) -> PauliFrame:
        return cls(code, multiply(error, logical_x_power(code, secret)))

    def _corrected(self, correction: PauliOperator | None) -> PauliOperator:
        if correction is None:
            return self._frame
        return multiply(correction, self._frame)

    def syndrome(self, correction: PauliOperator | None = None) -> int:
        return self.code.syndrome_int(self._corrected(correction))

    def measure_unencoded(self, correction: PauliOperator | None = None, rng=None) -> int:
        # U^dag F U |0^n> is a basis state; its label is the X part
        return self.code.encoder.conjugate_inverse(self._corrected(correction)).x

    def dense(self) -> ds.StateVector:
        ref = ds.apply_circuit(ds.StateVector.basis(self.code.n, 0), self.code.encoder_circuit)
        return ds.apply_pauli(ref, self._frame)

    def left_multiply(self, p: PauliOperator) -> PauliFrame:
        return PauliFrame(self.code, multiply(p, self._frame))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PauliFrame) and self._frame == other._frame and self.code.encoder == other.code.encoder

    def to_json(self) -> dict:
        return {"form": "symbolic", "frame": str(self._frame)}


class DensePayload:
    form = "dense"

    def __init__(self, code: StabilizerCode, state: ds.StateVector):
        if state.n != code.n:
            raise ValueError(f"size mismatch: code on {code.n} qubits, state on {state.n}")
        self.code = code
        self.state = state

    def _corrected(self, correction):
        return self.state if correction is None else ds.apply_pauli(self.state, correction)

    def syndrome(self, correction: PauliOperator | None = None) -> int:
        psi = self._corrected(correction)
        out = 0
        for i, g in enumerate(self.code.generators):
            val = psi.overlap(ds.apply_pauli(psi, g)).real
            if val < 0:
                out |= 1 << i
        return out

    def measure_unencoded(self, correction: PauliOperator | None = None, rng=None) -> int:
        psi = ds.apply_circuit(self._corrected(correction), self.code.encoder_circuit.inverse())
        probs = np.abs(psi.data) ** 2
        rng = np.random.default_rng() if rng is None else rng
        idx = int(rng.choice(probs.size, p=probs / probs.sum()))
        return ds.bits_of(idx, self.code.n)

    def dense(self) -> ds.StateVector:
        return self.state

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DensePayload)
            and np.array_equal(self.state.data, other.state.data)
            and self.code.encoder == other.code.encoder
        )

    def to_json(self) -> dict:
        return {"form": "dense", "amplitudes": [[float(a.real), float(a.imag)] for a in self.state.data]}


@dataclass(frozen=True)
class Witness:
    secret: int
    error: PauliOperator


@dataclass
class LsnInstance:
    code: StabilizerCode
    payload: PauliFrame | DensePayload
    witness: Witness | None = None
    noise: NoiseSpec | None = None

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def form(self) -> str:
        return self.payload.form

    def public(self) -> LsnInstance:
        return replace(self, witness=None)

    def to_dense(self) -> LsnInstance:
        return replace(self, payload=DensePayload(self.code, self.payload.dense()))

    def reconstruct(self) -> ds.StateVector:
        """E U (|0^{n-k}> (x) |x>) from the witness."""
        if self.witness is None:
            raise ValueError("instance has no witness")
        return ds.apply_pauli(ds.codeword(self.code, self.witness.secret), self.witness.error)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LsnInstance)
            and self.code.encoder == other.code.encoder
            and self.code.k == other.code.k
            and self.payload == other.payload
            and self.witness == other.witness
            and self.noise == other.noise
        )


@dataclass
class MslsnInstance:
    samples: list[LsnInstance]
    secret: int | None = None

    def __post_init__(self):
        if not self.samples:
            raise ValueError("need at least one sample")
        n, k = self.samples[0].n, self.samples[0].k
        for s in self.samples:
            if (s.n, s.k) != (n, k):
                raise ValueError("samples disagree on (n, k)")
            if self.secret is not None and s.witness is not None and s.witness.secret != self.secret:
                raise ValueError("samples disagree on the secret")

    @property
    def m(self) -> int:
        return len(self.samples)

    @property
    def n(self) -> int:
        return self.samples[0].n

    @property
    def k(self) -> int:
        return self.samples[0].k

    def public(self) -> MslsnInstance:
        return MslsnInstance([s.public() for s in self.samples], None)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MslsnInstance) and self.samples == other.samples and self.secret == other.secret


@dataclass
class LpnInstance:
    a: BitMatrix
    b: BitVector
    p: float
    secret: BitVector | None = None
    noise_bits: BitVector | None = None

    def __post_init__(self):
        if self.b.length != self.a.nrows:
            raise ValueError(f"dimension mismatch: A has {self.a.nrows} rows, b has length {self.b.length}")
        if self.secret is not None and self.noise_bits is not None:
            if mat_vec_mul(self.a, self.secret) ^ self.noise_bits != self.b:
                raise ValueError("b != A x + e")

    @property
    def n(self) -> int:
        return self.a.nrows

    @property
    def k(self) -> int:
        return self.a.ncols

    def public(self) -> LpnInstance:
        return LpnInstance(self.a, self.b, self.p)


# --- samplers -----------------------------------------------------------------


def _package(code, error, secret, noise, form) -> LsnInstance:
    if form == "symbolic":
        payload = PauliFrame.from_witness(code, error, secret)
    elif form == "dense":
        payload = DensePayload(code, ds.apply_pauli(ds.codeword(code, secret), error))
    else:
        raise ValueError(f"unknown form {form!r}")
    return LsnInstance(code, payload, Witness(secret, error.unsigned()), noise)


def sample_lsn(n: int, k: int, noise: NoiseSpec, rng, form: str = "symbolic") -> LsnInstance:
    if noise.n != n:
        noise = noise.with_n(n)
    if form == "dense":
        ds._guard(n, ds.MAX_STATE_QUBITS, "dense instance")
    code = random_code(n, k, rng)
    secret = randbits(rng, k)
    error = sample_error(noise, rng)
    return _package(code, error, secret, noise, form)


def sample_lsn_batch(n: int, k: int, noise: NoiseSpec, rngs, form: str = "symbolic") -> list[LsnInstance]:
    """Same instances as calling ``sample_lsn`` once per stream; Clifford sampling is vectorized."""
    if noise.n != n:
        noise = noise.with_n(n)
    if form == "dense":
        ds._guard(n, ds.MAX_STATE_QUBITS, "dense instance")
    rngs = list(rngs)
    codes = random_codes(n, k, rngs)
    out = []
    for code, rng in zip(codes, rngs):
        secret = randbits(rng, k)
        out.append(_package(code, sample_error(noise, rng), secret, noise, form))
    return out


def sample_mslsn(m: int, n: int, k: int, noise: NoiseSpec, rng, form: str = "symbolic") -> MslsnInstance:
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if noise.n != n:
        noise = noise.with_n(n)
    secret = randbits(rng, k)
    samples = []
    for _ in range(m):
        code = random_code(n, k, rng)
        samples.append(_package(code, sample_error(noise, rng), secret, noise, form))
    return MslsnInstance(samples, secret)


def _gather_permutation(m: int, n: int, k: int) -> Permutation:
    r = n - k
    mapping = []
    for i in range(m):
        mapping.extend(i * r + j for j in range(r))
        mapping.extend(m * r + i * k + j for j in range(k))
    return Permutation(tuple(mapping))


def _block_tensor(ops: list[PauliOperator]) -> PauliOperator:
    acc = ops[0]
    for p in ops[1:]:
        acc = acc.tensor(p)
    return acc


def mslsn_to_lsn(inst: MslsnInstance) -> LsnInstance:
    """One LSN instance on m*n qubits: ancillas of all blocks first, secret copies last."""
    forms = {s.form for s in inst.samples}
    if forms != {"symbolic"}:
        raise ValueError(f"mslsn_to_lsn needs symbolic samples, got forms {sorted(forms)}")
    m, n, k = inst.m, inst.n, inst.k
    perm = _gather_permutation(m, n, k)
    block = inst.samples[0].code.encoder
    for s in inst.samples[1:]:
        block = block.direct_sum(s.code.encoder)
    pt = perm.tableau()
    encoder = compose(pt, compose(block, inverse(pt)))
    code = StabilizerCode(encoder, m * k)
    frame = perm.apply_pauli(_block_tensor([s.payload._frame for s in inst.samples]))
    witness = None
    if all(s.witness is not None for s in inst.samples):
        error = perm.apply_pauli(_block_tensor([s.witness.error for s in inst.samples]))
        x = inst.samples[0].witness.secret
        repeated = sum(x << (i * k) for i in range(m))
        witness = Witness(repeated, error)
    return LsnInstance(code, PauliFrame(code, frame), witness, None)


def sample_lpn(n: int, k: int, p: float, rng) -> LpnInstance:
    if not 0.0 <= p < 0.5:
        raise ValueError(f"LPN noise rate p={p} outside [0, 1/2)")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    a = BitMatrix(n, k, [randbits(rng, k) for _ in range(n)])
    x = BitVector(k, randbits(rng, k))
    mask = rng.random(n) < p
    e = BitVector.from_bits(mask.astype(int).tolist())
    return LpnInstance(a, mat_vec_mul(a, x) ^ e, p, x, e)


def cnot_synthesis(m: BitMatrix) -> CliffordCircuit:
    """CNOT circuit with U|z> = |M z> on bit strings (bit i on qubit i)."""
    n = m.nrows
    if m.ncols != n or rank(m) != n:
        raise ValueError("matrix must be square and invertible")
    rows = list(m.rows)
    ops: list[tuple[int, int]] = []  # (source row, target row)

    def add(src: int, dst: int) -> None:
        rows[dst] ^= rows[src]
        ops.append((src, dst))

    for c in range(n):
        bit = 1 << c
        if not rows[c] & bit:
            j = next(i for i in range(c + 1, n) if rows[i] & bit)
            add(j, c)
        for i in range(n):
            if i != c and rows[i] & bit:
                add(c, i)
    # row ops reduced M to I, so M is their product in reverse; CNOT(a,b) adds bit a into bit b
    circ = CliffordCircuit(n)
    for src, dst in reversed(ops):
        circ.append("CNOT", src, dst)
    return circ


def _linear_tableau(m: BitMatrix) -> CliffordTableau:
    """Tableau of |z> -> |M z>: X^v -> X^{M v}, Z^w -> Z^{M^-T w}, no signs."""
    n = m.nrows
    # column i of M^-T is row i of M^-1
    return CliffordTableau(
        [PauliOperator(n, col, 0) for col in m.columns()],
        [PauliOperator(n, 0, row) for row in gf2_inverse(m).rows],
    )


def lpn_to_lsn(inst: LpnInstance, form: str = "symbolic") -> LsnInstance | None:
    """Bit-flip LSN instance |A x + e> under U_A, or None if A lacks full column rank."""
    n, k = inst.n, inst.k
    if rank(inst.a) != k or k >= n:
        return None
    full = complete_basis(inst.a)
    code = StabilizerCode(_linear_tableau(full), k, lambda: cnot_synthesis(full))
    noise = NoiseSpec("bitflip", n, inst.p)
    if form == "dense":
        ds._guard(n, ds.MAX_STATE_QUBITS, "dense instance")
        payload = DensePayload(code, ds.StateVector.basis(n, inst.b.value))
    else:
        payload = PauliFrame(code, PauliOperator(n, inst.b.value, 0))
    witness = None
    if inst.secret is not None and inst.noise_bits is not None:
        witness = Witness(inst.secret.value, PauliOperator(n, inst.noise_bits.value, 0))
    return LsnInstance(code, payload, witness, noise)


# --- JSON ---------------------------------------------------------------------


def _witness_json(w: Witness | None, k: int):
    if w is None:
        return None
    return {"secret": BitVector(k, w.secret).to_string(), "error": str(w.error)}


def _lsn_json(inst: LsnInstance, with_witness: bool) -> dict:
    out = {
        "code": inst.code.to_json(),
        "noise": None if inst.noise is None else inst.noise.to_json(),
        "payload": inst.payload.to_json(),
    }
    if with_witness and inst.witness is not None:
        out["witness"] = _witness_json(inst.witness, inst.k)
    return out


def serialize(inst, with_witness: bool = True) -> bytes:
    """Canonical JSON bytes; pass ``with_witness=False`` to ship a witness-free file."""
    if isinstance(inst, LsnInstance):
        body = {"type": "lsn", **_lsn_json(inst, with_witness)}
    elif isinstance(inst, MslsnInstance):
        body = {"type": "mslsn", "samples": [_lsn_json(s, with_witness) for s in inst.samples]}
        if with_witness and inst.secret is not None:
            body["secret"] = BitVector(inst.k, inst.secret).to_string()
    elif isinstance(inst, LpnInstance):
        body = {
            "type": "lpn",
            "p": inst.p,
            "A": ["".join(map(str, row)) for row in inst.a.to_lists()],
            "b": inst.b.to_string(),
        }
        if with_witness and inst.secret is not None:
            body["witness"] = {"secret": inst.secret.to_string(), "error": inst.noise_bits.to_string()}
    else:
        raise TypeError(f"cannot serialize {type(inst).__name__}")
    body["schema"] = SCHEMA
    return (json.dumps(body, sort_keys=True, indent=2) + "\n").encode()


def _get(obj, key, where: str, kind=None):
    if not isinstance(obj, dict):
        raise InstanceParseError(where, "expected an object")
    if key not in obj:
        raise InstanceParseError(f"{where}.{key}", "missing field")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        name = "number" if isinstance(kind, tuple) else kind.__name__
        raise InstanceParseError(f"{where}.{key}", f"expected {name}, got {type(val).__name__}")
    return val


def _bits_from(text: str, where: str) -> BitVector:
    try:
        return BitVector.from_string(text)
    except ValueError as exc:
        raise InstanceParseError(where, str(exc)) from None


def _pauli_from(text, where: str) -> PauliOperator:
    if not isinstance(text, str):
        raise InstanceParseError(where, "expected a Pauli string")
    try:
        return PauliOperator.from_string(text)
    except ValueError as exc:
        raise InstanceParseError(where, str(exc)) from None


def _lsn_from(obj, where: str) -> LsnInstance:
    code_obj = _get(obj, "code", where, dict)
    for key in ("n", "k"):
        val = _get(code_obj, key, f"{where}.code", int)
        if isinstance(val, bool) or val < 0:
            raise InstanceParseError(f"{where}.code.{key}", f"expected a non-negative integer, got {val!r}")
    gens = _get(code_obj, "generators", f"{where}.code", list)
    for i, g in enumerate(gens):
        _pauli_from(g, f"{where}.code.generators[{i}]")
    try:
        code = StabilizerCode.from_json(code_obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceParseError(f"{where}.code", str(exc)) from None
    noise = None
    if obj.get("noise") is not None:
        try:
            noise = NoiseSpec.from_json(obj["noise"], code.n)
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceParseError(f"{where}.noise", str(exc)) from None
    pay = _get(obj, "payload", where, dict)
    form = _get(pay, "form", f"{where}.payload", str)
    if form == "symbolic":
        frame = _pauli_from(_get(pay, "frame", f"{where}.payload"), f"{where}.payload.frame")
        if frame.n != code.n:
            raise InstanceParseError(f"{where}.payload.frame", f"frame has {frame.n} qubits, code has {code.n}")
        payload = PauliFrame(code, frame)
    elif form == "dense":
        amps = _get(pay, "amplitudes", f"{where}.payload", list)
        try:
            vec = np.array([complex(re, im) for re, im in amps])
            payload = DensePayload(code, ds.StateVector(vec))
        except (TypeError, ValueError) as exc:
            raise InstanceParseError(f"{where}.payload.amplitudes", str(exc)) from None
    else:
        raise InstanceParseError(f"{where}.payload.form", f"unknown form {form!r}")
    witness = None
    if obj.get("witness") is not None:
        w = obj["witness"]
        secret = _bits_from(_get(w, "secret", f"{where}.witness", str), f"{where}.witness.secret")
        if secret.length != code.k:
            raise InstanceParseError(f"{where}.witness.secret", f"expected {code.k} bits")
        error = _pauli_from(_get(w, "error", f"{where}.witness"), f"{where}.witness.error")
        witness = Witness(secret.value, error)
    return LsnInstance(code, payload, witness, noise)


def deserialize(data: bytes | str):
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    schema = _get(obj, "schema", "$", str)
    if schema != SCHEMA:
        raise InstanceParseError("$.schema", f"unsupported schema {schema!r}, expected {SCHEMA!r}")
    kind = _get(obj, "type", "$", str)
    if kind == "lsn":
        return _lsn_from(obj, "$")
    if kind == "mslsn":
        raw = _get(obj, "samples", "$", list)
        samples = [_lsn_from(s, f"$.samples[{i}]") for i, s in enumerate(raw)]
        secret = None
        if "secret" in obj:
            secret = _bits_from(_get(obj, "secret", "$", str), "$.secret").value
        try:
            return MslsnInstance(samples, secret)
        except ValueError as exc:
            raise InstanceParseError("$.samples", str(exc)) from None
    if kind == "lpn":
        rows = _get(obj, "A", "$", list)
        try:
            a = BitMatrix.from_lists([[int(c) for c in r] for r in rows])
        except (TypeError, ValueError) as exc:
            raise InstanceParseError("$.A", str(exc)) from None
        b = _bits_from(_get(obj, "b", "$", str), "$.b")
        p = _get(obj, "p", "$", (int, float))
        secret = e = None
        if obj.get("witness") is not None:
            secret = _bits_from(_get(obj["witness"], "secret", "$.witness", str), "$.witness.secret")
            e = _bits_from(_get(obj["witness"], "error", "$.witness", str), "$.witness.error")
        try:
            return LpnInstance(a, b, float(p), secret, e)
        except ValueError as exc:
            raise InstanceParseError("$", str(exc)) from None
    raise InstanceParseError("$.type", f"unknown instance type {kind!r}")
