"""
Gauge fixing inside degenerate coefficient clusters.

Within a cluster of equal coefficients any unitary rotation of the factors is an equally valid
decomposition. A deterministic representative is picked by pivoted Gram-Schmidt of a reference
operator basis projected onto the cluster subspace, so the result depends on the subspace only.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from app.quantum.paulis import all_pauli_strings
from app.types.models import ClusterGauge


@lru_cache(maxsize=32)
def _reference_vectors(d: int, gauge: ClusterGauge) -> np.ndarray:
    """Unit-norm reference operators, row-major flattened, one per column."""
    n_qubits = d.bit_length() - 1
    if gauge == ClusterGauge.PAULI and 2 ** n_qubits == d:
        ops = np.stack([p.matrix() for p in all_pauli_strings(n_qubits)]) if n_qubits else np.ones((1, 1, 1))
        vectors = ops.reshape(d * d, d * d).T / np.sqrt(d)
    else:
        vectors = np.eye(d * d, dtype=np.complex128)
    vectors = np.ascontiguousarray(vectors, dtype=np.complex128)
    vectors.setflags(write=False)
    return vectors


def cluster_rotation(ops: np.ndarray, gauge: ClusterGauge) -> np.ndarray:
    """Unitary W (c x c) such that ``sum_i W[i, j] ops[i]`` is the gauge-fixed cluster basis.

    ``ops`` has shape (c, d, d) and is orthonormal under <A|B> / d.
    """
    c, d, _ = ops.shape
    q = ops.reshape(c, d * d).T / np.sqrt(d)
    coords = q.conj().T @ _reference_vectors(d, gauge)
    chosen = []
    for _ in range(c):
        residual = coords.copy()
        for w in chosen:
            residual -= np.outer(w, w.conj() @ residual)
        norms = np.linalg.norm(residual, axis=0)
        pivot = int(np.flatnonzero(norms >= norms.max() - 1e-9)[0])
        chosen.append(residual[:, pivot] / norms[pivot])
    return np.stack(chosen, axis=1)


def rotate_ops(ops: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.tensordot(w.T, ops, axes=([1], [0]))
