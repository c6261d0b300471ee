"""Worst-case to average-case pipeline: secret shift, PLC twirl, wrapped solver."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .clifford import CliffordTableau, compose, sample_plc
from .codes import StabilizerCode
from .errors import GuardError
from .instances import LsnInstance, PauliFrame, Witness, logical_x_power
from .pauli import PauliOperator
from .rng import randbits

__all__ = [
    "WorstCaseInstance",
    "rerandomize_secret",
    "twirl_code_error",
    "to_lsn_instance",
    "shifted_frame",
    "AVERAGE_CASE_LABEL",
    "worst_to_average",
    "orbit_statistics",
    "enumerate_orbit",
    "OrbitReport",
    "ORBIT_MAX_QUBITS",
]

ORBIT_MAX_QUBITS = 4
# label attached to instances produced here: the code distribution depends on the input code
AVERAGE_CASE_LABEL = "S-relative average case"


@dataclass(frozen=True)
class WorstCaseInstance:
    code: StabilizerCode
    error: PauliOperator
    secret: int
    weight_bound: int

    def __post_init__(self):
        if self.error.n != self.code.n:
            raise ValueError(f"size mismatch: code on {self.code.n} qubits, error on {self.error.n}")
        if self.error.weight() > self.weight_bound:
            raise ValueError(f"error weight {self.error.weight()} exceeds the declared bound {self.weight_bound}")
        if not 0 <= self.secret < 1 << self.code.k:
            raise ValueError(f"secret {self.secret} does not fit in k={self.code.k} bits")


def rerandomize_secret(inst: WorstCaseInstance, rng, shift: int | None = None) -> tuple[WorstCaseInstance, int]:
    """Apply logical X^u for uniform u; the secret becomes x ^ u, code and error are untouched."""
    u = randbits(rng, inst.code.k) if shift is None else shift
    return WorstCaseInstance(inst.code, inst.error, inst.secret ^ u, inst.weight_bound), u


def shifted_frame(inst: WorstCaseInstance, u: int) -> PauliFrame:
    """Frame of X^u E |codeword x>, built without touching the secret."""
    base = PauliFrame.from_witness(inst.code, inst.error, inst.secret)
    return base.left_multiply(logical_x_power(inst.code, u))


def twirl_code_error(inst: WorstCaseInstance, rng, twirl: CliffordTableau | None = None) -> WorstCaseInstance:
    """Conjugate code and error by a random permutation-times-local Clifford."""
    u = sample_plc(inst.code.n, rng) if twirl is None else twirl
    code = StabilizerCode(compose(u, inst.code.encoder), inst.code.k)
    error = u.conjugate(inst.error).unsigned()
    return WorstCaseInstance(code, error, inst.secret, inst.weight_bound)


def to_lsn_instance(inst: WorstCaseInstance) -> LsnInstance:
    return LsnInstance(
        inst.code, PauliFrame.from_witness(inst.code, inst.error, inst.secret), Witness(inst.secret, inst.error)
    )


def worst_to_average(inst: WorstCaseInstance, solver, rng, *, shift: int | None = None, twirl=None) -> int | None:
    """Shift the secret, twirl, hand the solver a witness-free instance, undo the shift.

    ``solver`` maps an LsnInstance to a candidate secret (int) or None.
    """
    shifted, u = rerandomize_secret(inst, rng, shift)
    twirled = twirl_code_error(shifted, rng, twirl)
    answer = solver(to_lsn_instance(twirled).public())
    if answer is None:
        return None
    return answer ^ u


# --- orbit statistics ---------------------------------------------------------


def _orbit_key(code: StabilizerCode, error: PauliOperator) -> tuple:
    e = error.unsigned()
    return (e.x, e.z), code.group_key()


def _generator_tableaux(n: int) -> list[CliffordTableau]:
    from .clifford import CliffordCircuit, tableau_from_circuit

    gens = []
    for q in range(n):
        for kind in ("H", "S"):
            c = CliffordCircuit(n)
            c.append(kind, q)
            gens.append(tableau_from_circuit(c))
    for q in range(n - 1):
        c = CliffordCircuit(n)
        c.append("SWAP", q, q + 1)
        gens.append(tableau_from_circuit(c))
    return gens


def enumerate_orbit(code: StabilizerCode, error: PauliOperator) -> set:
    """All (unsigned error, stabilizer group) keys reachable under the PLC group."""
    n = code.n
    if n > ORBIT_MAX_QUBITS:
        raise GuardError(f"orbit enumeration on {n} qubits exceeds the guard of {ORBIT_MAX_QUBITS}")
    gens = _generator_tableaux(n)
    start = (code, error.unsigned())
    seen = {_orbit_key(*start)}
    queue = deque([start])
    while queue:
        c, e = queue.popleft()
        for g in gens:
            nc = StabilizerCode(compose(g, c.encoder), c.k)
            ne = g.conjugate(e).unsigned()
            key = _orbit_key(nc, ne)
            if key not in seen:
                seen.add(key)
                queue.append((nc, ne))
    return seen


@dataclass
class OrbitReport:
    orbit_size: int
    samples: int
    counts: Counter
    distinct_codes: int
    chi2: float
    p_value: float
    outside_orbit: int


def orbit_statistics(code: StabilizerCode, error: PauliOperator, samples: int, rng) -> OrbitReport:
    """Twirl ``samples`` times and test the joint (error, code) frequencies for uniformity on the orbit."""
    orbit = enumerate_orbit(code, error)
    inst = WorstCaseInstance(code, error.unsigned(), 0, error.weight())
    counts: Counter = Counter()
    for _ in range(samples):
        tw = twirl_code_error(inst, rng)
        counts[_orbit_key(tw.code, tw.error)] += 1
    outside = sum(v for key, v in counts.items() if key not in orbit)
    observed = np.array([counts.get(key, 0) for key in sorted(orbit)], dtype=float)
    if len(orbit) > 1 and samples:
        chi2, p = stats.chisquare(observed)
    else:
        chi2, p = 0.0, 1.0
    distinct_codes = len({key[1] for key in orbit})
    return OrbitReport(len(orbit), samples, counts, distinct_codes, float(chi2), float(p), outside)
