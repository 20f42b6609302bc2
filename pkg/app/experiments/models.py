"""
Spin models on qubit graphs and the qubit relabeling that brings subsystem A to the front.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from app.core.config import MAX_MODEL_QUBITS
from app.core.exceptions import DimensionMismatchError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square, qubit_permutation
from app.quantum.paulis import X, Y, Z, two_site_operator

Edge = Tuple[int, int]


@dataclass(frozen=True)
class SpinModel:
    """XYZ Heisenberg model H = -sum_<ij> (J_x X_i X_j + J_y Y_i Y_j + J_z Z_i Z_j)."""
    n_qubits: int
    edges: Tuple[Edge, ...]
    couplings: Tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        seen = set()
        for i, j in edges:
            if i == j or not (0 <= i < self.n_qubits and 0 <= j < self.n_qubits):
                raise ValidationError("edge references an invalid qubit", {"edge": (i, j), "n_qubits": self.n_qubits})
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValidationError("duplicate edge", {"edge": (i, j)})
            seen.add(key)
        if len(self.couplings) != 3:
            raise ValidationError("couplings must be (J_x, J_y, J_z)", {"couplings": list(self.couplings)})
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))


def chain_edges(n: int, periodic: bool = False) -> List[Edge]:
    edges = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 2:
        edges.append((n - 1, 0))
    return edges


def grid_edges(rows: int, cols: int) -> List[Edge]:
    """Open rows x cols grid, qubit r * cols + c. Row bonds first, then the rungs between rows."""
    edges = []
    for r in range(rows):
        edges.extend((r * cols + c, r * cols + c + 1) for c in range(cols - 1))
    for r in range(rows - 1):
        edges.extend((r * cols + c, (r + 1) * cols + c) for c in range(cols))
    return edges


def build_hamiltonian(model: SpinModel) -> np.ndarray:
    if model.n_qubits > MAX_MODEL_QUBITS:
        logger.error(f"Spin model with {model.n_qubits} qubits exceeds the limit {MAX_MODEL_QUBITS}")
        raise ValidationError(
            "model too large for dense simulation", {"n_qubits": model.n_qubits, "limit": MAX_MODEL_QUBITS}
        )
    j_x, j_y, j_z = model.couplings
    d = 2 ** model.n_qubits
    h = np.zeros((d, d), dtype=np.complex128)
    for i, j in model.edges:
        for coupling, pauli in ((j_x, X), (j_y, Y), (j_z, Z)):
            if coupling != 0.0:
                h -= coupling * two_site_operator(pauli, pauli, i, j, model.n_qubits)
    return h


def relabeling(a_qubits: Sequence[int], n_qubits: int) -> List[int]:
    """Qubit permutation that moves ``a_qubits`` onto positions 0..n_A-1.

    It is built from disjoint transpositions, so it is its own inverse. A-qubits already in the
    leading block stay put; the others are swapped with the free leading positions in order.
    """
    a_qubits = sorted(int(q) for q in a_qubits)
    if len(set(a_qubits)) != len(a_qubits) or any(q < 0 or q >= n_qubits for q in a_qubits):
        raise ValidationError("invalid subsystem A qubits", {"a_qubits": a_qubits, "n_qubits": n_qubits})
    n_a = len(a_qubits)
    perm = list(range(n_qubits))
    misplaced = [q for q in a_qubits if q >= n_a]
    free = [p for p in range(n_a) if p not in a_qubits]
    for q, p in zip(misplaced, free):
        perm[q], perm[p] = p, q
    return perm


def permute_operator(op, perm: Sequence[int]) -> np.ndarray:
    op = as_square(op, "operator")
    p = qubit_permutation(perm)
    if op.shape[0] != p.shape[0]:
        raise DimensionMismatchError("operator does not match the permutation", {"dim": op.shape[0]})
    return p @ op @ p.conj().T


def permute_state(psi, perm: Sequence[int]) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    p = qubit_permutation(perm)
    if psi.shape[0] != p.shape[0]:
        raise DimensionMismatchError("state does not match the permutation", {"length": psi.shape[0]})
    return p @ psi
