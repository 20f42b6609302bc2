"""
Dense complex linear-algebra kernel.

Conventions used everywhere in the lab:

* Matrices are ``numpy`` complex arrays; subsystem tensor order is big-endian
  (the first factor of ``kron`` is the most significant index).
* ``vectorize(A) = (1/sqrt(d)) sum_i |i> (x) A|i>``; the entry at index ``(i, k)``
  is ``A[k, i] / sqrt(d)`` (column stacking), so ``<vec(A), vec(B)> = Tr(A^dag B)/d``.
* ``reshuffle(U)[(iA, jA), (iB, jB)] = U[(iA, iB), (jA, jB)] / sqrt(dA dB)``; its singular
  values are the canonical operator-Schmidt coefficients.
"""

from __future__ import annotations

from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from app.core.config import CLUSTER_GAP, HERMITIAN_TOL, UNITARY_TOL
from app.core.exceptions import DimensionMismatchError, NotHermitianError, NotUnitaryError
from app.core.logger import logger
from app.types.models import BipartiteSplit


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray
    clusters: List[Tuple[int, ...]]


def as_square(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name} must be square", {"shape": list(m.shape)})
    return m


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Reduced matrix on the subsystems in ``keep`` (returned in ascending subsystem order)."""
    rho = as_square(rho, "rho")
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape[0] != total:
        raise DimensionMismatchError(
            "rho dimension does not match the product of dims",
            {"dim": rho.shape[0], "dims": dims},
        )
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionMismatchError("keep must be a nonempty set of subsystem indices", {"keep": keep})

    n = len(dims)
    tensor = rho.reshape(dims + dims)
    row_idx = list(range(n))
    col_idx = [i if i not in keep else n + i for i in range(n)]
    out_idx = keep + [n + i for i in keep]
    reduced = np.einsum(tensor, row_idx + col_idx, out_idx)
    d_keep = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(d_keep, d_keep)


def vectorize(a) -> np.ndarray:
    a = as_square(a, "operator")
    d = a.shape[0]
    return a.T.reshape(-1) / np.sqrt(d)


def unvectorize(v, d: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.shape[0] != d * d:
        raise DimensionMismatchError("vector length must be d^2", {"length": v.shape[0], "d": d})
    return v.reshape(d, d).T * np.sqrt(d)


def reshuffle_dims(u, d_a: int, d_b: int) -> np.ndarray:
    u = as_square(u, "u")
    if u.shape[0] != d_a * d_b:
        raise DimensionMismatchError(
            "operator dimension is not d_A * d_B", {"dim": u.shape[0], "d_a": d_a, "d_b": d_b}
        )
    r = u.reshape(d_a, d_b, d_a, d_b).transpose(0, 2, 1, 3)
    return r.reshape(d_a * d_a, d_b * d_b) / np.sqrt(d_a * d_b)


def reshuffle(u, split: BipartiteSplit) -> np.ndarray:
    return reshuffle_dims(u, split.d_a, split.d_b)


def unreshuffle(r, d_a: int, d_b: int) -> np.ndarray:
    """Inverse index map of ``reshuffle_dims``."""
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != (d_a * d_a, d_b * d_b):
        raise DimensionMismatchError("reshuffled matrix has the wrong shape", {"shape": list(r.shape)})
    u = (r * np.sqrt(d_a * d_b)).reshape(d_a, d_a, d_b, d_b).transpose(0, 2, 1, 3)
    return u.reshape(d_a * d_b, d_a * d_b)


def fix_phase(vector: np.ndarray) -> Tuple[np.ndarray, complex]:
    """Make the largest-magnitude component real positive (first index on ties).

    Returns the rotated vector and the unit phase it was multiplied by.
    """
    flat = vector.reshape(-1)
    mags = np.abs(flat)
    if mags.size == 0 or mags.max() == 0.0:
        return vector, 1.0 + 0.0j
    pivot = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    phase = np.conj(flat[pivot]) / mags[pivot]
    return vector * phase, phase


def find_clusters(values: np.ndarray, gap: float = CLUSTER_GAP) -> List[Tuple[int, ...]]:
    """Group consecutive entries of a descending vector closer than ``gap``."""
    clusters: List[Tuple[int, ...]] = []
    current = [0] if len(values) else []
    for i in range(1, len(values)):
        if abs(values[i - 1] - values[i]) < gap:
            current.append(i)
        else:
            clusters.append(tuple(current))
            current = [i]
    if current:
        clusters.append(tuple(current))
    return clusters


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Relative check ||h - h^dag||_F <= tol ||h||_F; the zero matrix passes."""
    h = as_square(h, "h")
    deviation = np.linalg.norm(h - h.conj().T)
    if deviation > tol * np.linalg.norm(h):
        logger.error(f"Hermiticity check failed: ||h - h^dag||_F = {deviation:.3e}")
        raise NotHermitianError("matrix is not Hermitian", {"deviation": float(deviation)})
    return h


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_square(u, "u")
    deviation = np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))
    if deviation > tol:
        logger.error(f"Unitarity check failed: ||U^dag U - I||_F = {deviation:.3e}")
        raise NotUnitaryError("matrix is not unitary", {"deviation": float(deviation)})
    return u


def hermitian_eig(h, cluster_gap: float = CLUSTER_GAP) -> EigenDecomposition:
    """Eigendecomposition with descending values and the largest-component phase gauge."""
    h = check_hermitian(h)
    h = 0.5 * (h + h.conj().T)
    values, vectors = np.linalg.eigh(h)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for i in range(vectors.shape[1]):
        vectors[:, i], _ = fix_phase(vectors[:, i])
    clusters = find_clusters(values, cluster_gap)
    return EigenDecomposition(values, vectors, clusters)


def svd(m) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = np.asarray(m, dtype=np.complex128)
    return np.linalg.svd(m, full_matrices=False)


def frobenius(m) -> float:
    return float(np.linalg.norm(m))


def spectral(m) -> float:
    return float(np.linalg.norm(m, 2))


def trace_norm(m) -> float:
    return float(np.linalg.norm(m, "nuc"))


def project_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    u = np.sort(values)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, len(u) + 1)
    active = np.flatnonzero(u - (css - 1.0) / ks > 0)[-1]
    theta = (css[active] - 1.0) / (active + 1)
    return np.maximum(values - theta, 0.0)


def nearest_density_matrix(h) -> np.ndarray:
    """Closest trace-one PSD matrix in Frobenius norm."""
    h = as_square(h, "h")
    h = 0.5 * (h + h.conj().T)
    values, vectors = np.linalg.eigh(h)
    projected = project_simplex(values)
    rho = (vectors * projected) @ vectors.conj().T
    return 0.5 * (rho + rho.conj().T)


def polar_unitary(m) -> np.ndarray:
    """Unitary factor U V^dag of the polar decomposition; no rank check."""
    left, _, right_h = np.linalg.svd(np.asarray(m, dtype=np.complex128))
    return left @ right_h


def span_projector(vectors: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span of ``vectors`` (assumed orthonormal)."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    return vectors @ vectors.conj().T


def align_phase(a: np.ndarray, reference: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``a`` by the global phase that makes its overlap with ``reference`` real positive."""
    overlap = np.vdot(a.reshape(-1), reference.reshape(-1))
    if abs(overlap) < tol:
        return a
    return a * (overlap / abs(overlap))


def qubit_permutation(perm: Sequence[int]) -> np.ndarray:
    """Permutation matrix P with P|x_0 ... x_{n-1}> = |y>, y_{perm[i]} = x_i (qubit 0 most significant)."""
    perm = [int(p) for p in perm]
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise DimensionMismatchError("not a permutation of the qubits", {"perm": perm})
    d = 2 ** n
    # axis i of the output tensor is input axis perm^-1(i)
    source = np.argsort(perm)
    images = np.arange(d).reshape([2] * n).transpose(source).reshape(-1)
    p = np.zeros((d, d), dtype=np.complex128)
    p[np.arange(d), images] = 1.0
    return p
