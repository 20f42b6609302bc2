"""
Propagation of the tomography error eps_T = rho - rho^(T) into eigenvalues, eigenvectors, the
A-factors and the distilled B-side.

Noisy eigenvectors and factors are aligned to the exact ones before differencing: inside every
exact degenerate cluster by the Procrustes rotation polar(V_noisy^dag V_exact), which is the
overlap-phase alignment for a single vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.core.config import BOUND_CONSTANT, CLUSTER_GAP
from app.core.exceptions import DimensionMismatchError
from app.core.logger import logger
from app.qtpd.extraction import ExtractedFactors
from app.qtpd.snapshot import ChoiReducedState
from app.quantum.linalg import as_square, find_clusters, polar_unitary, unvectorize, vectorize
from app.quantum.statevector import bell_state

B_BOUND_FACTOR = 1.0 + 1.0 / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class ErrorReport:
    eps_T: float
    eps_S: np.ndarray
    eps_D: float
    eps_V: float
    eps_A: np.ndarray
    drift: np.ndarray
    matching: List[Tuple[int, int]]
    unmatched_exact: List[int] = field(default_factory=list)
    unmatched_noisy: List[int] = field(default_factory=list)
    eps_B: Optional[np.ndarray] = None
    bound_constant: float = BOUND_CONSTANT

    @property
    def epsilon(self) -> float:
        return max(self.eps_D, self.eps_V)

    @property
    def t_bound(self) -> float:
        return 3.0 * self.epsilon + self.bound_constant * self.epsilon ** 2

    @property
    def t_bound_holds(self) -> bool:
        return self.eps_T <= self.t_bound + 1e-12

    def b_bounds(self, d_a: int) -> np.ndarray:
        return B_BOUND_FACTOR * self.eps_A / np.sqrt(d_a) + self.bound_constant * self.epsilon ** 2

    def b_bound_holds(self, d_a: int) -> Optional[bool]:
        if self.eps_B is None:
            return None
        return bool(np.all(self.eps_B <= self.b_bounds(d_a) + 1e-12))


def _procrustes_align(noisy: np.ndarray, exact: np.ndarray, clusters: Sequence[Tuple[int, ...]]) -> np.ndarray:
    """Rotate noisy columns inside each exact cluster onto the exact columns."""
    aligned = noisy.copy()
    for cluster in clusters:
        idx = list(cluster)
        aligned[:, idx] = noisy[:, idx] @ polar_unitary(noisy[:, idx].conj().T @ exact[:, idx])
    return aligned


def _spectra(snapshot: ChoiReducedState) -> Tuple[np.ndarray, np.ndarray]:
    rho = 0.5 * (snapshot.rho + snapshot.rho.conj().T)
    values, vectors = np.linalg.eigh(rho)
    order = np.argsort(-values, kind="stable")
    return values[order], vectors[:, order]


def _distilled_b(u: np.ndarray, vec_a: np.ndarray, s_k: float, psi_b: np.ndarray, n_a: int) -> np.ndarray:
    """s_k^{-1} (<vec(A)| (x) 1) (1 (x) U)(|Phi+> |psi>)."""
    d_a = 2 ** n_a
    d_b = psi_b.shape[0]
    state = np.kron(bell_state(n_a).amplitudes, psi_b).reshape(d_a, d_a * d_b)
    # U acts on (A_out, B)
    state = (u @ state.T).T.reshape(d_a * d_a, d_b)
    return (vec_a.conj() @ state) / s_k


def error_report(
    exact_snapshot: ChoiReducedState,
    exact_factors: ExtractedFactors,
    noisy_snapshot: ChoiReducedState,
    noisy_factors: ExtractedFactors,
    u=None,
    psi_b=None,
    bound_constant: float = BOUND_CONSTANT,
) -> ErrorReport:
    """Spectral, factor and (with ``u``) B-side error measures between two pipelines."""
    if exact_snapshot.split != noisy_snapshot.split or exact_factors.split != noisy_factors.split:
        raise DimensionMismatchError(
            "error report needs matching splits",
            {"exact": str(exact_snapshot.split), "noisy": str(noisy_snapshot.split)},
        )
    split = exact_snapshot.split
    d_a = split.d_a

    eps_T = float(np.linalg.norm(exact_snapshot.rho - noisy_snapshot.rho))
    values, vectors = _spectra(exact_snapshot)
    noisy_values, noisy_vectors = _spectra(noisy_snapshot)
    eps_S = values - noisy_values
    eps_D = float(np.sqrt(np.sum(eps_S ** 2)))
    noisy_vectors = _procrustes_align(noisy_vectors, vectors, find_clusters(values, CLUSTER_GAP))
    eps_V = float(np.linalg.norm(vectors - noisy_vectors))

    exact_vecs = exact_factors.vectors()
    noisy_vecs = noisy_factors.vectors()
    overlaps = np.abs(noisy_vecs.conj().T @ exact_vecs)
    rows, cols = linear_sum_assignment(-overlaps)
    pairs = sorted(zip(cols.tolist(), rows.tolist()))
    matching = [(int(k), int(j)) for k, j in pairs]
    unmatched_exact = sorted(set(range(exact_factors.rank)) - {k for k, _ in matching})
    unmatched_noisy = sorted(set(range(noisy_factors.rank)) - {j for _, j in matching})
    if unmatched_exact or unmatched_noisy:
        logger.warning(
            f"Factor counts differ after thresholding: exact {exact_factors.rank}, noisy {noisy_factors.rank}"
        )

    exact_idx = [k for k, _ in matching]
    matched_exact = exact_vecs[:, exact_idx]
    matched_noisy = noisy_vecs[:, [j for _, j in matching]]
    position = {k: i for i, k in enumerate(exact_idx)}
    clusters = [
        tuple(position[k] for k in cluster if k in position) for cluster in exact_factors.clusters
    ]
    matched_noisy = _procrustes_align(matched_noisy, matched_exact, [c for c in clusters if c])

    exact_ops = np.stack([unvectorize(v, d_a) for v in matched_exact.T])
    noisy_ops = np.stack([unvectorize(v, d_a) for v in matched_noisy.T])
    differences = exact_ops - noisy_ops
    eps_A = np.linalg.norm(differences.reshape(len(matching), -1), axis=1)
    # drift[j, k] = <A_j^(T) | eps_k> / d_A
    drift = np.einsum("jab,kab->jk", noisy_ops.conj(), differences) / d_a

    eps_B = None
    if u is not None:
        u = as_square(u, "u")
        if psi_b is None:
            psi_b = np.zeros(split.d_b, dtype=np.complex128)
            psi_b[0] = 1.0
        psi_b = np.asarray(getattr(psi_b, "amplitudes", psi_b), dtype=np.complex128).reshape(-1)
        eps_B = np.array(
            [
                np.linalg.norm(
                    _distilled_b(u, vectorize(exact_ops[i]), exact_factors.s[k], psi_b, split.n_a)
                    - _distilled_b(u, vectorize(noisy_ops[i]), exact_factors.s[k], psi_b, split.n_a)
                )
                for i, (k, _) in enumerate(matching)
            ]
        )

    report = ErrorReport(
        eps_T=eps_T,
        eps_S=eps_S,
        eps_D=eps_D,
        eps_V=eps_V,
        eps_A=eps_A,
        drift=drift,
        matching=matching,
        unmatched_exact=unmatched_exact,
        unmatched_noisy=unmatched_noisy,
        eps_B=eps_B,
        bound_constant=bound_constant,
    )
    if not report.t_bound_holds:
        logger.warning(f"Snapshot error {eps_T:.3e} exceeds 3 eps + C eps^2 = {report.t_bound:.3e}")
    if report.b_bound_holds(d_a) is False:
        logger.warning("Distilled B-side error exceeds its first-order bound")
    logger.debug(f"Error report: eps_T {eps_T:.3e}, eps_D {eps_D:.3e}, eps_V {eps_V:.3e}")
    return report
