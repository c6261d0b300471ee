"""Decoders for LSN instances.

Decoders read only ``inst.code`` and the payload query interface; the witness
is left to scoring code (see ``score`` and ``classify_residual``).
"""

from __future__ import annotations

import itertools
import math
import time
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import dense as ds
from .codes import StabilizerCode, _guard as _search_guard, decompose_pauli
from .errors import GuardError
from .instances import LsnInstance, MslsnInstance
from .noise import NoiseSpec, pmf, support
from .pauli import PauliOperator, multiply, pauli_letters

__all__ = [
    "DecoderResult",
    "DECODED",
    "FAILED",
    "decode_projection",
    "decode_syndrome_ml",
    "min_weight_correction",
    "decode_pgm",
    "decode_pgm_multishot",
    "pgm_outcome_probabilities",
    "truncated_ensemble",
    "default_w_cut",
    "classify_residual",
    "score",
    "DECODERS",
]

DECODED = "decoded"
FAILED = "fail"
PGM_MAX_QUBITS = 10
PGM_MAX_K = 4


@dataclass
class DecoderResult:
    candidate: int | None
    syndrome: int
    correction: PauliOperator | None
    outcome: str
    wall_time: float

    def __post_init__(self):
        if self.outcome == DECODED and self.candidate is None:
            raise ValueError("decoded result without a candidate")


def _mask(bits: int) -> int:
    return (1 << bits) - 1


def decode_projection(inst: LsnInstance, rng=None) -> DecoderResult:
    """Undo the encoder, measure all qubits, read the secret off the last k."""
    t0 = time.perf_counter()
    r = inst.code.r
    out = inst.payload.measure_unencoded(rng=rng)
    return DecoderResult(out >> r, out & _mask(r), None, DECODED, time.perf_counter() - t0)


def min_weight_correction(code: StabilizerCode, syndrome: int, w_max: int) -> PauliOperator | None:
    """First unsigned Pauli with the given syndrome, by weight then lexicographic support, X<Y<Z."""
    _search_guard(code.n, w_max)
    n, r = code.n, code.r
    cols = [[sig & _mask(r) for sig in row] for row in code.signature_table()]
    if syndrome == 0:
        return PauliOperator(n)
    for w in range(1, w_max + 1):
        for sup in itertools.combinations(range(n), w):
            per = [cols[q] for q in sup]
            for codes in itertools.product((1, 2, 3), repeat=w):
                acc = 0
                for c, col in zip(codes, per):
                    acc ^= col[c - 1]
                if acc == syndrome:
                    return pauli_letters(n, sup, codes)
    return None


def decode_syndrome_ml(inst: LsnInstance, w_max: int = 2, rng=None) -> DecoderResult:
    """Minimum-weight syndrome decoding by exhaustive search up to ``w_max``.

    After correcting, the frame has zero syndrome and the unencoded measurement
    reads x plus the logical-X part of the residual, which is what decompose_pauli
    would report for the corrected frame.
    """
    t0 = time.perf_counter()
    code = inst.code
    s = inst.payload.syndrome()
    corr = min_weight_correction(code, s, w_max)
    if corr is None:
        return DecoderResult(None, s, None, FAILED, time.perf_counter() - t0)
    out = inst.payload.measure_unencoded(correction=corr, rng=rng)
    return DecoderResult(out >> code.r, s, corr, DECODED, time.perf_counter() - t0)


# --- PGM ------------------------------------------------------------------------


def default_w_cut(n: int, p: float) -> int:
    return math.ceil(3 * n * p / 2)


def truncated_ensemble(code: StabilizerCode, model: NoiseSpec) -> list[np.ndarray]:
    """Noisy codeword density matrices, one per secret, under the model noise."""
    n, k = code.n, code.k
    if n > PGM_MAX_QUBITS or k > PGM_MAX_K:
        raise GuardError(f"PGM needs n <= {PGM_MAX_QUBITS} and k <= {PGM_MAX_K}, got n={n}, k={k}")
    errs = [(e, pmf(model, e)) for e in support(model)]
    errs = [(e, pr) for e, pr in errs if pr > 0.0]
    dim = 1 << n
    perms = [ds._pauli_action(e, n) for e, _ in errs]
    weights = np.sqrt(np.array([pr for _, pr in errs]))
    out = []
    for x in range(1 << k):
        psi = ds.codeword(code, x).data
        rows = np.empty((len(errs), dim), dtype=complex)
        for i, (perm, coef) in enumerate(perms):
            rows[i, perm] = coef * psi
        rows *= weights[:, None]
        out.append(rows.T @ rows.conj())
    return out


_POVM_CACHE: OrderedDict = OrderedDict()
_POVM_CACHE_SIZE = 16


def _cached_pgm(key, build) -> ds.PovmSet:
    if key in _POVM_CACHE:
        _POVM_CACHE.move_to_end(key)
        return _POVM_CACHE[key]
    povm = ds.pgm(build())
    _POVM_CACHE[key] = povm
    if len(_POVM_CACHE) > _POVM_CACHE_SIZE:
        _POVM_CACHE.popitem(last=False)
    return povm


def _model_for(n: int, noise: NoiseSpec | None, p: float | None, w_cut: int | None) -> NoiseSpec:
    if p is None:
        if noise is None:
            raise ValueError("PGM needs a noise rate: pass p or use an instance with a noise spec")
        p = noise.p
    if w_cut is None:
        w_cut = default_w_cut(n, p)
    return NoiseSpec("truncated_depolarizing", n, min(p, 0.75), w_cut)


def _pgm_for_code(code: StabilizerCode, model: NoiseSpec) -> ds.PovmSet:
    return _cached_pgm((code.encoder, code.k, model), lambda: truncated_ensemble(code, model))


def pgm_outcome_probabilities(inst: LsnInstance, w_cut: int | None = None, p: float | None = None) -> np.ndarray:
    """Born probabilities of each candidate secret, fail last."""
    model = _model_for(inst.n, inst.noise, p, w_cut)
    return ds.outcome_probabilities(_pgm_for_code(inst.code, model), inst.payload.dense())


def _pgm_result(probs: np.ndarray, rng, syndrome: int, t0: float) -> DecoderResult:
    rng = np.random.default_rng() if rng is None else rng
    idx = int(rng.choice(len(probs), p=probs / probs.sum()))
    if idx == len(probs) - 1:
        return DecoderResult(None, syndrome, None, FAILED, time.perf_counter() - t0)
    return DecoderResult(idx, syndrome, None, DECODED, time.perf_counter() - t0)


def decode_pgm(inst: LsnInstance, w_cut: int | None = None, p: float | None = None, rng=None) -> DecoderResult:
    """Pretty good measurement against the truncated-noise ensemble of the instance's code.

    ``w_cut`` defaults to ceil(3np/2).  Landing on the kernel of the ensemble
    sum is reported as a failure.
    """
    t0 = time.perf_counter()
    probs = pgm_outcome_probabilities(inst, w_cut, p)
    return _pgm_result(probs, rng, 0, t0)


def decode_pgm_multishot(
    inst: MslsnInstance, w_cut: int | None = None, p: float | None = None, rng=None
) -> DecoderResult:
    """PGM over the product of per-block truncated ensembles."""
    t0 = time.perf_counter()
    m, n, k = inst.m, inst.n, inst.k
    if m * n > PGM_MAX_QUBITS or k > PGM_MAX_K:
        raise GuardError(f"multi-shot PGM needs m*n <= {PGM_MAX_QUBITS}, got m={m}, n={n}")
    model = _model_for(n, inst.samples[0].noise, p, w_cut)
    key = (tuple((s.code.encoder, s.code.k) for s in inst.samples), model, "multishot")

    def build():
        blocks = [truncated_ensemble(s.code, model) for s in inst.samples]
        out = []
        for x in range(1 << k):
            acc = blocks[0][x]
            for b in blocks[1:]:
                acc = np.kron(acc, b[x])
            out.append(acc)
        return out

    povm = _cached_pgm(key, build)
    state = inst.samples[0].payload.dense().data
    for s in inst.samples[1:]:
        state = np.kron(state, s.payload.dense().data)
    probs = ds.outcome_probabilities(povm, ds.StateVector(state))
    return _pgm_result(probs, rng, 0, t0)


# --- scoring ----------------------------------------------------------------------


def classify_residual(code: StabilizerCode, correction: PauliOperator, error: PauliOperator) -> str:
    """'stabilizer', 'logical' or 'detectable' for the residual correction * error."""
    res = multiply(correction, error)
    dec = decompose_pauli(code, res)
    if dec.syndrome.value:
        return "detectable"
    if dec.logical_x.value or dec.logical_z.value:
        return "logical"
    return "stabilizer"


def score(result: DecoderResult, secret: int) -> bool:
    return result.outcome == DECODED and result.candidate == secret


def _projection(inst, rng=None, **_):
    return decode_projection(inst, rng=rng)


def _syndrome_ml(inst, rng=None, w_max: int = 2, **_):
    return decode_syndrome_ml(inst, w_max=w_max, rng=rng)


def _pgm(inst, rng=None, w_cut=None, p=None, **_):
    return decode_pgm(inst, w_cut=w_cut, p=p, rng=rng)


def _pgm_multi(inst, rng=None, w_cut=None, p=None, **_):
    return decode_pgm_multishot(inst, w_cut=w_cut, p=p, rng=rng)


DECODERS = {
    "projection": _projection,
    "syndrome-ml": _syndrome_ml,
    "pgm": _pgm,
    "pgm-multishot": _pgm_multi,
}
