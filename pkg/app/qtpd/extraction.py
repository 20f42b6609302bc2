from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from app.core.config import CLUSTER_GAP, EIGEN_THRESHOLD, THRESHOLD_MULTIPLIER
from app.core.exceptions import ThresholdError
from app.core.logger import logger
from app.qtpd.snapshot import ChoiReducedState
from app.quantum.linalg import find_clusters, fix_phase, hermitian_eig, unvectorize, vectorize
from app.tpd.gauge import cluster_rotation, rotate_ops
from app.types.models import BipartiteSplit, ClusterGauge, Provenance


@dataclass(frozen=True, eq=False)
class ExtractedFactors:
    """A-side of the decomposition as read off the snapshot spectrum."""
    split: BipartiteSplit
    s: np.ndarray
    a_ops: np.ndarray
    threshold: float
    clusters: List[Tuple[int, ...]] = field(default_factory=list)
    provenance: Provenance = Provenance.EXACT

    @property
    def rank(self) -> int:
        return int(len(self.s))

    @property
    def degenerate_clusters(self) -> List[Tuple[int, ...]]:
        return [c for c in self.clusters if len(c) > 1]

    def vectors(self) -> np.ndarray:
        """vec(A_k) as columns."""
        return np.stack([vectorize(a) for a in self.a_ops], axis=1)


def default_threshold(snapshot: ChoiReducedState) -> float:
    """Rank cut on s_k^2: exact snapshots use EIGEN_THRESHOLD, sampled ones multiplier * eps_T / sqrt(d_A)."""
    if not snapshot.sampled or snapshot.noise_estimate <= 0.0:
        return EIGEN_THRESHOLD
    return max(THRESHOLD_MULTIPLIER * snapshot.noise_estimate / np.sqrt(snapshot.d_a), EIGEN_THRESHOLD)


def cluster_gap_for(snapshot: ChoiReducedState) -> float:
    if not snapshot.sampled:
        return CLUSTER_GAP
    return 3.0 / np.sqrt(snapshot.shots_per_setting)


def extract_factors(
    snapshot: ChoiReducedState,
    threshold: Optional[float] = None,
    gauge: ClusterGauge = ClusterGauge.MATRIX_UNITS,
) -> ExtractedFactors:
    """Diagonalize the snapshot; eigenvalues are s_k^2 and eigenvectors vec(A_k)."""
    if threshold is None:
        threshold = default_threshold(snapshot)
    if not 0.0 < threshold < 1.0:
        logger.error(f"Rejected extraction threshold {threshold}")
        raise ThresholdError("threshold must lie in (0, 1)", {"threshold": threshold})

    d_a = snapshot.d_a
    gap = cluster_gap_for(snapshot)
    eig = hermitian_eig(snapshot.rho, gap)
    keep = int(np.count_nonzero(eig.values >= threshold))
    if keep == 0:
        raise ThresholdError(
            "no eigenvalue survives the threshold",
            {"threshold": threshold, "largest": float(eig.values[0])},
        )

    values = eig.values[:keep].copy()
    a_ops = np.stack([unvectorize(eig.vectors[:, k], d_a) for k in range(keep)])
    clusters = find_clusters(values, gap)
    for cluster in clusters:
        if len(cluster) < 2:
            continue
        idx = list(cluster)
        a_ops[idx] = rotate_ops(a_ops[idx], cluster_rotation(a_ops[idx], gauge))
        # rotated factors inside a noisy cluster carry their Rayleigh quotients
        vecs = np.stack([vectorize(a) for a in a_ops[idx]], axis=1)
        quotients = np.einsum("ik,ij,jk->k", vecs.conj(), snapshot.rho, vecs).real
        if not snapshot.sampled:
            # exact clusters are degenerate; keep the gauge order
            values[idx] = quotients.mean()
            continue
        order = np.argsort(-quotients, kind="stable")
        values[idx] = quotients[order]
        a_ops[idx] = a_ops[idx][order]
    for k in range(keep):
        a_ops[k], _ = fix_phase(a_ops[k])

    s = np.sqrt(np.clip(values, 0.0, None))
    logger.info(
        f"Extracted {keep} factors on split {snapshot.split} (threshold {threshold:.3e}, "
        f"{len([c for c in clusters if len(c) > 1])} degenerate clusters)"
    )
    return ExtractedFactors(snapshot.split, s, a_ops, float(threshold), clusters, snapshot.provenance)
