"""Small-n exact statevector and density-matrix engine.

Basis ordering: qubit 0 is the most significant bit of a basis index, so the
state |0^{n-k}> (x) |x> puts the secret on the last k qubits.  Elsewhere in the
package bitmasks use bit i for qubit i; ``index_of`` converts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clifford import CliffordCircuit
from .errors import GuardError
from .pauli import PauliOperator

__all__ = [
    "MAX_STATE_QUBITS",
    "MAX_DENSITY_QUBITS",
    "FAIL",
    "StateVector",
    "DensityMatrix",
    "PovmSet",
    "index_of",
    "bits_of",
    "apply_circuit",
    "apply_pauli",
    "pauli_matrix",
    "codeword",
    "mix_ensemble",
    "depolarize_qubitwise",
    "hermitian_eigh",
    "jacobi_eigh",
    "fidelity",
    "trace_distance",
    "pgm",
    "measure",
    "outcome_probabilities",
    "purified_instance_states",
]

MAX_STATE_QUBITS = 14
MAX_DENSITY_QUBITS = 10
MAX_PURIFIED_QUBITS = 8
MAX_PURIFIED_DIM = 4096
KERNEL_TOL = 1e-10
# relative cut below which PSD eigenvalues are treated as rounding noise
FACTOR_RTOL = 1e-14
FAIL = -1


def _guard(n: int, limit: int, what: str) -> None:
    if n > limit:
        raise GuardError(f"{what} on {n} qubits exceeds the dense guard of {limit}")


def index_of(bits: int, n: int) -> int:
    """Basis index for a qubit bitmask (bit i = qubit i)."""
    out = 0
    for q in range(n):
        if (bits >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


def bits_of(index: int, n: int) -> int:
    return index_of(index, n)


@dataclass
class StateVector:
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        n = int(round(math.log2(self.data.size))) if self.data.size else -1
        if self.data.ndim != 1 or n < 0 or 1 << n != self.data.size:
            raise ValueError(f"state length {self.data.size} is not a power of two")
        self.n = n

    @classmethod
    def basis(cls, n: int, bits: int = 0) -> StateVector:
        _guard(n, MAX_STATE_QUBITS, "state vector")
        v = np.zeros(1 << n, dtype=complex)
        v[index_of(bits, n)] = 1.0
        return cls(v)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.data, self.data.conj()))

    def overlap(self, other: StateVector) -> complex:
        return complex(np.vdot(self.data, other.data))

    def equal_up_to_phase(self, other: StateVector, tol: float = 1e-9) -> bool:
        return abs(abs(self.overlap(other)) - self.norm() * other.norm()) <= tol


@dataclass
class DensityMatrix:
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        d = self.data.shape[0]
        if self.data.ndim != 2 or self.data.shape != (d, d) or not d:
            raise ValueError(f"density matrix shape {self.data.shape} is not square")
        # qubit count; None for registers whose dimension is not a power of two
        n = d.bit_length() - 1
        self.n = n if 1 << n == d else None

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def is_valid(self, tol: float = 1e-9) -> bool:
        if not np.allclose(self.data, self.data.conj().T, atol=tol):
            return False
        if abs(self.trace() - 1.0) > tol:
            return False
        return float(np.linalg.eigvalsh(self.data).min()) >= -tol


@dataclass
class PovmSet:
    elements: list[np.ndarray]
    fail: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def completeness_error(self) -> float:
        total = sum(self.elements)
        if self.fail is not None:
            total = total + self.fail
        return float(np.abs(total - np.eye(total.shape[0])).max())


# --- gates ------------------------------------------------------------------

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _sl(n: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * n
    for q, v in fixed.items():
        idx[q] = v
    return tuple(idx)


def apply_circuit(state: StateVector, circuit: CliffordCircuit) -> StateVector:
    n = state.n
    if circuit.n != n:
        raise ValueError(f"size mismatch: circuit on {circuit.n} qubits, state on {n}")
    _guard(n, MAX_STATE_QUBITS, "apply_circuit")
    psi = state.data.reshape((2,) * n).copy()
    for g in circuit.gates:
        kind, qs = g.kind, g.qubits
        a = qs[0]
        if kind == "H":
            psi = np.moveaxis(np.tensordot(_H, psi, axes=([1], [a])), 0, a)
        elif kind == "S":
            psi[_sl(n, {a: 1})] *= 1j
        elif kind == "Z":
            psi[_sl(n, {a: 1})] *= -1
        elif kind == "X":
            psi = np.flip(psi, axis=a).copy()
        elif kind == "CNOT":
            b = qs[1]
            sub = psi[_sl(n, {a: 1})]
            # axis b shifts down by one in the slice when a < b
            psi[_sl(n, {a: 1})] = np.flip(sub, axis=b - (a < b))
        elif kind == "CZ":
            psi[_sl(n, {a: 1, qs[1]: 1})] *= -1
        elif kind == "SWAP":
            psi = np.swapaxes(psi, a, qs[1]).copy()
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
    return StateVector(psi.reshape(-1))


def _pauli_action(p: PauliOperator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(permutation, coefficients) with P|b> = coef[b] |perm[b]>."""
    idx = np.arange(1 << n, dtype=np.int64)
    xm, zm = index_of(p.x, n), index_of(p.z, n)
    sign = 1 - 2 * (np.bitwise_count(idx & zm) & 1).astype(np.int64)
    coef = (1j) ** ((p.phase + (p.x & p.z).bit_count()) % 4) * sign
    return idx ^ xm, coef


def apply_pauli(state: StateVector, p: PauliOperator) -> StateVector:
    if p.n != state.n:
        raise ValueError(f"size mismatch: Pauli on {p.n} qubits, state on {state.n}")
    perm, coef = _pauli_action(p, state.n)
    out = np.empty_like(state.data)
    out[perm] = coef * state.data
    return StateVector(out)


_LETTER_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(p: PauliOperator) -> np.ndarray:
    _guard(p.n, MAX_DENSITY_QUBITS, "pauli_matrix")
    m = np.ones((1, 1), dtype=complex)
    for ch in p.letters():
        m = np.kron(m, _LETTER_MATS[ch])
    return (1j) ** p.phase * m


def codeword(code, x: int) -> StateVector:
    """U_enc (|0^{n-k}> (x) |x>), with bit j of x on qubit n-k+j."""
    return apply_circuit(StateVector.basis(code.n, x << code.r), code.encoder_circuit)


# --- mixtures and distances -------------------------------------------------


def mix_ensemble(weights, states) -> DensityMatrix:
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(states):
        raise ValueError(f"{len(weights)} weights for {len(states)} states")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights sum to {weights.sum()!r}, not 1")
    mats = [s.to_density().data if isinstance(s, StateVector) else s.data for s in states]
    n = int(round(math.log2(mats[0].shape[0])))
    _guard(n, MAX_DENSITY_QUBITS, "mix_ensemble")
    out = np.zeros_like(mats[0])
    for w, m in zip(weights, mats):
        if m.shape != out.shape:
            raise ValueError("states have different dimensions")
        out += w * m
    return DensityMatrix(out)


def depolarize_qubitwise(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Apply the single-qubit depolarizing channel to every qubit in turn."""
    n = rho.n
    if n is None:
        raise ValueError(f"dimension {rho.data.shape[0]} is not a qubit register")
    _guard(n, MAX_DENSITY_QUBITS, "depolarize_qubitwise")
    out = rho.data
    for q in range(n):
        acc = (1 - p) * out
        for ch in "XYZ":
            m = pauli_matrix(PauliOperator.from_string("I" * q + ch + "I" * (n - q - 1)))
            acc = acc + (p / 3) * (m @ out @ m.conj().T)
        out = acc
    return DensityMatrix(out)


def jacobi_eigh(a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Each rotation first removes the phase of a[p, q], then applies a real
    Givens rotation that zeroes it.  Returns ascending eigenvalues and the
    matrix whose columns are the eigenvectors.
    """
    a = np.array(a, dtype=complex)
    d = a.shape[0]
    if a.shape != (d, d):
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.conj().T, atol=1e-12):
        raise ValueError("matrix must be Hermitian")
    v = np.eye(d, dtype=complex)
    scale = max(float(np.abs(a).max()), 1e-300)
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                r = abs(apq)
                if r <= tol * scale * 1e-3:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * math.atan2(2 * r, app - aqq)
                c, s = math.cos(theta), math.sin(theta)
                # columns p, q of the unitary: D R with D = diag(1, conj(phase))
                j = np.array([[c, -s], [s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ j
                a[:, p], a[:, q] = cols[:, 0], cols[:, 1]
                rows = j.conj().T @ a[[p, q], :]
                a[p, :], a[q, :] = rows[0], rows[1]
                a[p, q] = a[q, p] = 0.0
                vc = v[:, [p, q]] @ j
                v[:, p], v[:, q] = vc[:, 0], vc[:, 1]
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(a).real
    order = np.argsort(w)
    return w[order], v[:, order]


def hermitian_eigh(a: np.ndarray, method: str = "lapack") -> tuple[np.ndarray, np.ndarray]:
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    return np.linalg.eigh(a)


def _as_matrix(s) -> np.ndarray:
    if isinstance(s, StateVector):
        return np.outer(s.data, s.data.conj())
    if isinstance(s, DensityMatrix):
        return s.data
    return np.asarray(s, dtype=complex)


def _psd_factor(m: np.ndarray) -> np.ndarray:
    """G with G G^dagger = m, dropping eigenvalues at rounding level."""
    w, v = hermitian_eigh((m + m.conj().T) / 2)
    top = max(float(w.max()), 0.0)
    if w.min() < -1e-9 * max(top, 1.0):
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    keep = w > FACTOR_RTOL * top
    return v[:, keep] * np.sqrt(w[keep])


def fidelity(a, b) -> float:
    """Squared fidelity ||sqrt(a) sqrt(b)||_1^2, as the nuclear norm of Ga^dagger Gb."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    ga, gb = _psd_factor(ma), _psd_factor(mb)
    if not ga.size or not gb.size:
        return 0.0
    sv = np.linalg.svd(ga.conj().T @ gb, compute_uv=False)
    return float(np.sum(sv) ** 2)


def trace_distance(a, b) -> float:
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    diff = ma - mb
    w, _ = hermitian_eigh((diff + diff.conj().T) / 2)
    return 0.5 * float(np.abs(w).sum())


# --- measurement ------------------------------------------------------------


def pgm(ensemble) -> PovmSet:
    """Pretty good measurement with a fail element on the kernel of the ensemble sum."""
    mats = [_as_matrix(s) for s in ensemble]
    if not mats:
        raise ValueError("empty ensemble")
    n = int(round(math.log2(mats[0].shape[0])))
    _guard(n, MAX_DENSITY_QUBITS, "pgm")
    total = sum(mats)
    w, v = hermitian_eigh((total + total.conj().T) / 2)
    keep = w > KERNEL_TOL
    inv_sqrt = np.zeros_like(w)
    inv_sqrt[keep] = 1.0 / np.sqrt(w[keep])
    root = (v * inv_sqrt) @ v.conj().T
    elements = [root @ m @ root for m in mats]
    elements = [(e + e.conj().T) / 2 for e in elements]
    kernel = v[:, ~keep]
    fail = kernel @ kernel.conj().T
    return PovmSet(elements, fail, {"kernel_dim": int((~keep).sum())})


def outcome_probabilities(povm: PovmSet, state) -> np.ndarray:
    """Born probabilities for each element, fail last."""
    ops = list(povm.elements) + ([povm.fail] if povm.fail is not None else [])
    if isinstance(state, StateVector):
        psi = state.data
        probs = np.array([np.vdot(psi, op @ psi).real for op in ops])
    else:
        rho = _as_matrix(state)
        probs = np.array([np.einsum("ij,ji->", op, rho).real for op in ops])
    if probs.min() < -1e-9:
        raise ValueError(f"negative outcome probability {probs.min():.3e}")
    return np.clip(probs, 0.0, None)


def measure(povm: PovmSet, state, rng) -> int:
    """Sample an outcome index; the fail element yields FAIL."""
    probs = outcome_probabilities(povm, state)
    total = probs.sum()
    idx = int(rng.choice(len(probs), p=probs / total))
    return FAIL if idx == len(povm.elements) else idx


def purified_instance_states(code, spec) -> tuple[DensityMatrix, DensityMatrix]:
    """Reduced states on the (secret, error-index) register of the two commitments.

    Register A has basis |x, a> ordered x-major.  For the codeword branch the
    reduced entry is 2^-k sqrt(p_a p_b) <psi_y| E_b E_a |psi_x>; the
    reference branch is diagonal because its purifying states are orthonormal.
    """
    from .noise import pmf, support

    n, k = code.n, code.k
    _guard(n, MAX_PURIFIED_QUBITS, "purified_instance_states")
    errs = [(e, pmf(spec, e)) for e in support(spec)]
    errs = [(e, pr) for e, pr in errs if pr > 0.0]
    dim = (1 << k) * len(errs)
    if dim > MAX_PURIFIED_DIM:
        raise GuardError(f"register A dimension {dim} exceeds the guard of {MAX_PURIFIED_DIM}")
    words = [codeword(code, x) for x in range(1 << k)]
    rows = []
    weights = []
    for x in range(1 << k):
        for e, pr in errs:
            amp = math.sqrt(pr / (1 << k))
            rows.append(amp * apply_pauli(words[x], e).data)
            weights.append(amp * amp)
    m = np.array(rows)
    q0 = m @ m.conj().T
    q1 = np.diag(np.array(weights, dtype=complex))
    return DensityMatrix(q0), DensityMatrix(q1)
