"""
Classical oracle for the tensor product decomposition U = sum_k s_k A_k (x) B_k.

The reshuffled matrix R(U) is factored by SVD; left singular vectors give the A-side factors,
right singular vectors the B-side factors. Canonical form: s_k >= 0 descending, <A_k|A_l> =
d_A delta_kl, <B_k|B_l> = d_B delta_kl, largest-magnitude entry of each A_k real positive, and
degenerate clusters fixed by ``app.tpd.gauge``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from app.core.config import CLUSTER_GAP, POLAR_SIGMA_MIN, RANK_TOL
from app.core.exceptions import DimensionMismatchError, RankDeficientError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square, find_clusters, fix_phase, reshuffle_dims, svd
from app.tpd.gauge import cluster_rotation, rotate_ops
from app.types.models import BipartiteSplit, ClusterGauge


@dataclass(frozen=True, eq=False)
class TensorProductDecomposition:
    split: BipartiteSplit
    s: np.ndarray
    a_ops: np.ndarray
    b_ops: np.ndarray
    clusters: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return int(len(self.s))

    @property
    def degenerate_clusters(self) -> List[Tuple[int, ...]]:
        return [c for c in self.clusters if len(c) > 1]


def _canonical_gauge(
    s: np.ndarray,
    a_ops: np.ndarray,
    b_ops: np.ndarray,
    gauge: ClusterGauge,
    cluster_gap: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[Tuple[int, ...]]]:
    """Fix the per-cluster rotation and per-factor phase; returns (s, A, B, clusters)."""
    s = s.copy()
    a_ops = a_ops.copy()
    b_ops = b_ops.copy()
    clusters = find_clusters(s, cluster_gap)
    for cluster in clusters:
        if len(cluster) < 2:
            continue
        idx = list(cluster)
        w = cluster_rotation(a_ops[idx], gauge)
        a_ops[idx] = rotate_ops(a_ops[idx], w)
        # partner of the rotated A_j: sum_i conj(W[i, j]) s_i B_i
        partners = rotate_ops(s[idx, None, None] * b_ops[idx], w.conj())
        d_b = b_ops.shape[1]
        norms = np.linalg.norm(partners.reshape(len(idx), -1), axis=1) / np.sqrt(d_b)
        s[idx] = norms
        b_ops[idx] = partners / np.where(norms > 0, norms, 1.0)[:, None, None]
    for k in range(len(s)):
        a_ops[k], phase = fix_phase(a_ops[k])
        b_ops[k] = b_ops[k] * np.conj(phase)
    return s, a_ops, b_ops, clusters


def operator_schmidt(
    u,
    d_a: int,
    d_b: int,
    rank_tol: float = RANK_TOL,
    gauge: ClusterGauge = ClusterGauge.MATRIX_UNITS,
    cluster_gap: float = CLUSTER_GAP,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, List[Tuple[int, ...]]]:
    """Canonical (s, A, B, clusters) of ``u`` for arbitrary factor dimensions."""
    r = reshuffle_dims(u, d_a, d_b)
    left, sigma, right_h = svd(r)
    keep = int(np.count_nonzero(sigma > rank_tol))
    a_ops = left[:, :keep].T.reshape(keep, d_a, d_a) * np.sqrt(d_a)
    b_ops = right_h[:keep, :].reshape(keep, d_b, d_b) * np.sqrt(d_b)
    return _canonical_gauge(sigma[:keep], a_ops, b_ops, gauge, cluster_gap)


def classical_tpd(
    u,
    split: BipartiteSplit,
    rank_tol: float = RANK_TOL,
    gauge: ClusterGauge = ClusterGauge.MATRIX_UNITS,
) -> TensorProductDecomposition:
    u = as_square(u, "u")
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    s, a_ops, b_ops, clusters = operator_schmidt(u, split.d_a, split.d_b, rank_tol, gauge)
    logger.debug(f"Classical TPD on split {split}: rank {len(s)}, s = {np.round(s, 12).tolist()}")
    return TensorProductDecomposition(split, s, a_ops, b_ops, clusters)


def canonicalize(
    tpd: TensorProductDecomposition,
    rank_tol: float = RANK_TOL,
    gauge: ClusterGauge = ClusterGauge.MATRIX_UNITS,
) -> TensorProductDecomposition:
    """Bring any (possibly complex-weighted, unordered, non-orthogonal) expansion to canonical form."""
    split = tpd.split
    d_a, d_b = split.d_a, split.d_b
    weights = np.asarray(tpd.s, dtype=np.complex128)
    a_vecs = np.asarray(tpd.a_ops, dtype=np.complex128).reshape(len(weights), -1).T / np.sqrt(d_a)
    b_vecs = np.asarray(tpd.b_ops, dtype=np.complex128).reshape(len(weights), -1).T / np.sqrt(d_b)
    # R = A diag(w) B^T, factored through thin QRs so the SVD stays R x R
    qa, ra = np.linalg.qr(a_vecs)
    qb, rb = np.linalg.qr(b_vecs)
    x, sigma, y_h = np.linalg.svd(ra @ np.diag(weights) @ rb.T)
    keep = int(np.count_nonzero(sigma > rank_tol))
    left = (qa @ x)[:, :keep]
    right = (qb @ y_h.T)[:, :keep]
    a_ops = left.T.reshape(keep, d_a, d_a) * np.sqrt(d_a)
    b_ops = right.T.reshape(keep, d_b, d_b) * np.sqrt(d_b)
    s, a_ops, b_ops, clusters = _canonical_gauge(sigma[:keep], a_ops, b_ops, gauge, CLUSTER_GAP)
    return TensorProductDecomposition(split, s, a_ops, b_ops, clusters)


def reconstruct(tpd: TensorProductDecomposition) -> np.ndarray:
    d_a, d_b = tpd.split.d_a, tpd.split.d_b
    u = np.einsum("k,kac,kbd->abcd", tpd.s, tpd.a_ops, tpd.b_ops)
    return u.reshape(d_a * d_b, d_a * d_b)


def normalized_frobenius(x, d: int) -> float:
    """Frobenius norm divided by sqrt(d); equals 1 for every d x d unitary."""
    return float(np.linalg.norm(x) / np.sqrt(d))


def low_rank_truncate(tpd: TensorProductDecomposition, r: int) -> TensorProductDecomposition:
    """Keep the r leading terms; coefficients are not renormalized."""
    if not 1 <= r <= tpd.rank:
        raise ValidationError("truncation rank out of range", {"r": r, "rank": tpd.rank})
    clusters = [tuple(i for i in c if i < r) for c in tpd.clusters]
    clusters = [c for c in clusters if c]
    return TensorProductDecomposition(tpd.split, tpd.s[:r].copy(), tpd.a_ops[:r].copy(), tpd.b_ops[:r].copy(), clusters)


def low_rank_error(tpd: TensorProductDecomposition, r: int) -> float:
    """sqrt(sum_{k>r} s_k^2), the normalized Frobenius distance to the best rank-r approximation."""
    if not 1 <= r <= tpd.rank:
        raise ValidationError("truncation rank out of range", {"r": r, "rank": tpd.rank})
    return float(np.sqrt(np.sum(tpd.s[r:] ** 2)))


def nearest_unitary(m) -> np.ndarray:
    """U V^dag from the SVD of m; refuses rank-deficient input."""
    m = as_square(m, "m")
    left, sigma, right_h = svd(m)
    if sigma[-1] <= POLAR_SIGMA_MIN:
        logger.error(f"Polar factor not unique: sigma_min = {sigma[-1]:.3e}")
        raise RankDeficientError("rank-deficient input has no unique nearest unitary", {"sigma_min": float(sigma[-1])})
    return left @ right_h


def nearest_unitary_distance(m) -> float:
    """||m - UV^dag||_F = sqrt(sum (sigma_k - 1)^2)."""
    sigma = np.linalg.svd(as_square(m, "m"), compute_uv=False)
    return float(np.sqrt(np.sum((sigma - 1.0) ** 2)))
