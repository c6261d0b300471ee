"""Simulation lab for learning stabilizers with noise: codes, noise, decoders, reductions."""

from __future__ import annotations

from .clifford import CliffordCircuit, CliffordTableau, sample_uniform_clifford
from .codes import StabilizerCode, five_qubit_code, random_code, repetition_code
from .errors import ConfigError, GuardError
from .gf2 import BitMatrix, BitVector
from .noise import NoiseSpec
from .pauli import PauliOperator

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "CliffordCircuit",
    "CliffordTableau",
    "ConfigError",
    "GuardError",
    "NoiseSpec",
    "PauliOperator",
    "StabilizerCode",
    "five_qubit_code",
    "random_code",
    "repetition_code",
    "sample_uniform_clifford",
]
