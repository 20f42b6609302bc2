"""Gate matrices and small constructors shared by the test modules."""

from __future__ import annotations

import numpy as np

from app.quantum.random import haar_unitary

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=np.complex128,
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    dtype=np.complex128,
)
T_GATE = np.diag([1.0, np.exp(1j * np.pi / 4)])


def haar(d: int, seed: int) -> np.ndarray:
    return haar_unitary(d, np.random.default_rng(seed))


def ket(bits: str) -> np.ndarray:
    psi = np.zeros(2 ** len(bits), dtype=np.complex128)
    psi[int(bits, 2)] = 1.0
    return psi
