from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from app.core.exceptions import ValidationError

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}
LETTERS = "IXYZ"


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, qubit 0 leftmost (big-endian)."""
    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in PAULIS for c in self.letters):
            raise ValidationError(f"Invalid Pauli string {self.letters!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    def matrix(self) -> np.ndarray:
        return _pauli_matrix(self.letters)

    def __str__(self):
        return self.letters


@lru_cache(maxsize=8192)
def _pauli_matrix(letters: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for c in letters:
        out = np.kron(out, PAULIS[c])
    out.setflags(write=False)
    return out


def all_pauli_strings(n_qubits: int) -> Iterator[PauliString]:
    for letters in itertools.product(LETTERS, repeat=n_qubits):
        yield PauliString("".join(letters))


def pauli_operator_basis(n_qubits: int) -> np.ndarray:
    """All 4^n Pauli strings as an array of shape (4^n, 2^n, 2^n), in IXYZ lexicographic order."""
    return np.stack([p.matrix() for p in all_pauli_strings(n_qubits)])


def single_site_operator(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    mats = [I2] * n_qubits
    mats[site] = op
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def two_site_operator(op_i: np.ndarray, op_j: np.ndarray, i: int, j: int, n_qubits: int) -> np.ndarray:
    mats = [I2] * n_qubits
    mats[i] = op_i
    mats[j] = op_j
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out
