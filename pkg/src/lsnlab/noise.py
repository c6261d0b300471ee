"""Pauli noise: depolarizing, bit-flip and weight-truncated depolarizing.

Depolarizing strength p means each qubit is left alone with probability 1 - p
and otherwise hit by X, Y or Z with probability p/3 each.  Under the other
common parameterization, rho -> (1 - q) rho + q I/2, identity survives with
probability 1 - 3q/4, so q = 4p/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator

__all__ = [
    "NoiseSpec",
    "sample_error",
    "sample_error_by_weight",
    "pmf",
    "pmf_flagged",
    "in_support",
    "weight_pmf",
    "truncation_norm",
    "tail_bound",
    "support",
]

KINDS = ("depolarizing", "bitflip", "truncated_depolarizing")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    n: int
    p: float
    w_cut: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 0:
            raise ValueError(f"negative qubit count {self.n}")
        if self.kind == "bitflip":
            if not 0.0 <= self.p < 1.0:
                raise ValueError(f"bitflip p={self.p} outside [0, 1)")
        elif not 0.0 <= self.p <= 0.75:
            raise ValueError(f"depolarizing p={self.p} outside [0, 3/4]")
        if self.kind == "truncated_depolarizing":
            if self.w_cut is None or self.w_cut < 0:
                raise ValueError("truncated noise needs w_cut >= 0")
        elif self.w_cut is not None:
            raise ValueError(f"w_cut only applies to truncated noise, got kind {self.kind!r}")

    def to_json(self) -> dict:
        out = {"kind": self.kind, "p": self.p}
        if self.w_cut is not None:
            out["w_cut"] = self.w_cut
        return out

    @classmethod
    def from_json(cls, data: dict, n: int) -> NoiseSpec:
        return cls(str(data["kind"]), n, float(data["p"]), None if data.get("w_cut") is None else int(data["w_cut"]))

    def with_n(self, n: int) -> NoiseSpec:
        return NoiseSpec(self.kind, n, self.p, self.w_cut)


def _bits_to_int(mask: np.ndarray) -> int:
    if not mask.size:
        return 0
    return int.from_bytes(np.packbits(mask.astype(np.uint8), bitorder="little").tobytes(), "little")


def _depolarize(n: int, p: float, rng) -> PauliOperator:
    hit = rng.random(n) < p
    letters = rng.integers(1, 4, size=n)
    # letter code 1=X, 2=Y, 3=Z
    xm = hit & (letters <= 2)
    zm = hit & (letters >= 2)
    return PauliOperator(n, _bits_to_int(xm), _bits_to_int(zm))


def sample_error(spec: NoiseSpec, rng) -> PauliOperator:
    n, p = spec.n, spec.p
    if spec.kind == "bitflip":
        return PauliOperator(n, _bits_to_int(rng.random(n) < p), 0)
    if spec.kind == "depolarizing":
        return _depolarize(n, p, rng)
    # truncated: rejection from the untruncated channel
    while True:
        e = _depolarize(n, p, rng)
        if e.weight() <= spec.w_cut:
            return e


def sample_error_by_weight(spec: NoiseSpec, rng) -> PauliOperator:
    """Draw the weight from its (renormalized) pmf, then a uniform Pauli of that weight."""
    from .pauli import random_pauli_of_weight

    if spec.kind == "bitflip":
        w = int(rng.binomial(spec.n, spec.p))
        sup = rng.choice(spec.n, size=w, replace=False)
        return PauliOperator(spec.n, sum(1 << int(q) for q in sup), 0)
    probs = weight_pmf(spec)
    w = int(rng.choice(len(probs), p=probs))
    return random_pauli_of_weight(spec.n, w, rng)


def truncation_norm(n: int, p: float, w_cut: int) -> float:
    return sum(math.comb(n, w) * p**w * (1 - p) ** (n - w) for w in range(min(w_cut, n) + 1))


def weight_pmf(spec: NoiseSpec) -> np.ndarray:
    n, p = spec.n, spec.p
    probs = np.array([math.comb(n, w) * p**w * (1 - p) ** (n - w) for w in range(n + 1)])
    if spec.kind == "truncated_depolarizing":
        probs[spec.w_cut + 1 :] = 0.0
        probs /= truncation_norm(n, p, spec.w_cut)
    return probs


def pmf(spec: NoiseSpec, e: PauliOperator) -> float:
    """Exact probability of the unsigned error e; 0.0 outside the support."""
    if e.n != spec.n:
        raise ValueError(f"size mismatch: spec on {spec.n} qubits, Pauli on {e.n}")
    n, p = spec.n, spec.p
    w = e.weight()
    if spec.kind == "bitflip":
        if e.z:
            return 0.0
        return p**w * (1 - p) ** (n - w)
    prob = (p / 3) ** w * (1 - p) ** (n - w)
    if spec.kind == "truncated_depolarizing":
        if w > spec.w_cut:
            return 0.0
        prob /= truncation_norm(n, p, spec.w_cut)
    return prob


def in_support(spec: NoiseSpec, e: PauliOperator) -> bool:
    if spec.kind == "bitflip" and e.z:
        return False
    if spec.kind == "truncated_depolarizing" and e.weight() > spec.w_cut:
        return False
    return True


def pmf_flagged(spec: NoiseSpec, e: PauliOperator) -> tuple[float, bool]:
    """(probability, inside support); outside the support the probability is 0.0."""
    return pmf(spec, e), in_support(spec, e)


def support(spec: NoiseSpec):
    """Yield every unsigned error with nonzero probability (colex supports, X<Y<Z)."""
    from .codes import iter_paulis_of_weight
    from .pauli import pauli_letters

    n = spec.n
    if spec.kind == "bitflip":
        for mask in range(1 << n if spec.p > 0 else 1):
            yield PauliOperator(n, mask, 0)
        return
    top = n if spec.p > 0 else 0
    if spec.kind == "truncated_depolarizing":
        top = min(top, spec.w_cut)
    for w in range(top + 1):
        for sup, codes in iter_paulis_of_weight(n, w):
            yield pauli_letters(n, sup, codes)


def tail_bound(n: int, p: float) -> float:
    return math.exp(-n * p / 12)
