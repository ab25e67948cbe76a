"""Variational block-encoding (VBE) compiler and analysis toolkit.

Fits the top-left block of a parameterized circuit unitary to a target
matrix, and predicts/verifies the required circuit resources through
Pauli-algebra closure computations and closed-form bounds.
"""

from vbe.pauli import PauliString, PauliSum

__all__ = ["PauliString", "PauliSum"]
__version__ = "0.1.0"
