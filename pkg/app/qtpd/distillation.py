"""
B-distillation: measuring P_k = A_k|Phi+><Phi+|A_k^dag on the A registers of
(1 (x) U)(|Phi+_A> (x) |psi_B>) leaves B in B_k|psi>/||B_k|psi>|| with probability
p_k = s_k^2 ||B_k|psi>||^2. The unmatched weight lands in the residual projector Q = 1 - sum_k P_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from app.core.config import NULL_BRANCH_TOL
from app.core.exceptions import DimensionMismatchError, NonOrthonormalError, ValidationError
from app.core.logger import logger
from app.qtpd.extraction import ExtractedFactors
from app.quantum.linalg import as_square, check_unitary, fix_phase
from app.quantum.statevector import (
    StateVector,
    apply_block_unitary,
    bell_state,
    contract_blocks,
    from_amplitudes,
    measure_projector,
)

DISTILL_BLOCKS = ("A_ref", "A_out")


@dataclass(frozen=True, eq=False)
class DistillationBranch:
    k: int
    probability: float
    state: Optional[StateVector]

    @property
    def null_branch(self) -> bool:
        return self.state is None

    @property
    def overhead(self) -> float:
        """Expected number of repetitions per successful post-selection, 1/p_k."""
        return float("inf") if self.probability <= 0.0 else 1.0 / self.probability


@dataclass(frozen=True, eq=False)
class DistillationResult:
    branches: List[DistillationBranch]
    residual_prob: float

    @property
    def total_probability(self) -> float:
        return float(sum(b.probability for b in self.branches) + self.residual_prob)


@dataclass(frozen=True, eq=False)
class BReconstruction:
    matrix: np.ndarray
    flagged_columns: List[int] = field(default_factory=list)


def distillation_projectors(factors: ExtractedFactors, tol: float = 1e-8) -> np.ndarray:
    """P_k = vec(A_k) vec(A_k)^dag on (A_ref, A_out), stacked along the first axis."""
    vecs = factors.vectors()
    gram = vecs.conj().T @ vecs
    deviation = float(np.linalg.norm(gram - np.eye(factors.rank)))
    if deviation > tol:
        logger.error(f"Distillation factors are not orthonormal: ||G - I||_F = {deviation:.3e}")
        raise NonOrthonormalError("factors are not orthonormal", {"deviation": deviation})
    return np.einsum("ik,jk->kij", vecs, vecs.conj())


def _distillation_input(u: np.ndarray, factors: ExtractedFactors, psi_b) -> StateVector:
    split = factors.split
    u = check_unitary(as_square(u, "u"))
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    if isinstance(psi_b, StateVector):
        psi_b = psi_b.amplitudes
    psi_b = np.asarray(psi_b, dtype=np.complex128).reshape(-1)
    if psi_b.shape[0] != split.d_b:
        raise DimensionMismatchError("psi_B does not match subsystem B", {"length": psi_b.shape[0]})
    bell = bell_state(split.n_a).amplitudes
    layout = (("A_ref", split.n_a), ("A_out", split.n_a), ("B", split.n_b))
    state = from_amplitudes(np.kron(bell, psi_b), layout)
    return apply_block_unitary(state, u, ["A_out", "B"])


def _branch(state: StateVector, projector: np.ndarray, vec_a: np.ndarray, k: int, n_b: int) -> DistillationBranch:
    outcome = measure_projector(state, projector, DISTILL_BLOCKS)
    if outcome.null_branch:
        return DistillationBranch(k, outcome.probability, None)
    beta = contract_blocks(outcome.post_state, vec_a, DISTILL_BLOCKS)
    beta = beta / np.linalg.norm(beta)
    return DistillationBranch(k, outcome.probability, from_amplitudes(beta, (("B", n_b),)))


def distill(u, factors: ExtractedFactors, psi_b, ks: Optional[List[int]] = None) -> DistillationResult:
    """Simulated measurement channel sum_k P_k . P_k + Q . Q on the A registers."""
    state = _distillation_input(u, factors, psi_b)
    projectors = distillation_projectors(factors)
    vecs = factors.vectors()
    n_b = factors.split.n_b
    ks = list(range(factors.rank)) if ks is None else list(ks)
    if any(k < 0 or k >= factors.rank for k in ks):
        raise ValidationError("branch index out of range", {"ks": ks, "rank": factors.rank})

    branches = []
    for k in ks:
        branch = _branch(state, projectors[k], vecs[:, k], k, n_b)
        if branch.null_branch:
            logger.warning(f"Distillation branch {k} is null (p = {branch.probability:.3e})")
        branches.append(branch)

    residual = np.eye(projectors.shape[1], dtype=np.complex128) - projectors.sum(axis=0)
    residual_prob = measure_projector(state, residual, DISTILL_BLOCKS).probability
    logger.debug(
        f"Distilled {len(branches)} branches, p = {[round(b.probability, 12) for b in branches]}, "
        f"residual {residual_prob:.3e}"
    )
    return DistillationResult(branches, float(residual_prob))


def _column_output(u, factors: ExtractedFactors, k: int, psi_b: np.ndarray):
    """Unnormalized B_k psi up to an unknown global phase: (norm, canonical-phase direction)."""
    branch = distill(u, factors, psi_b, ks=[k]).branches[0]
    if branch.null_branch:
        return 0.0, None
    direction, _ = fix_phase(branch.state.amplitudes.copy())
    return np.sqrt(branch.probability) / factors.s[k], direction


def reconstruct_b(u, factors: ExtractedFactors, k: int, tol: float = 1e-7) -> BReconstruction:
    """Assemble B_k column by column from distillation runs on computational B inputs.

    Each run fixes a column only up to a global phase. Relative phases against the first
    non-null column are recovered from two more runs on (|a>+|j>)/sqrt2 and (|a>+i|j>)/sqrt2
    by polarization of their success probabilities, or from the direction of the superposed
    output when the two columns are orthogonal. The remaining global phase is chosen so that
    <A_k (x) B_k|U> / d is real positive.
    """
    split = factors.split
    if not 0 <= k < factors.rank:
        raise ValidationError("branch index out of range", {"k": k, "rank": factors.rank})
    d_b = split.d_b
    eye = np.eye(d_b, dtype=np.complex128)
    s_k = factors.s[k]

    columns = np.zeros((d_b, d_b), dtype=np.complex128)
    flagged = []
    for j in range(d_b):
        norm, direction = _column_output(u, factors, k, eye[j])
        if direction is None or norm < tol:
            flagged.append(j)
            continue
        columns[:, j] = norm * direction

    present = [j for j in range(d_b) if j not in flagged]
    if not present:
        logger.warning(f"Every column of B_{k} is null; nothing to reconstruct")
        return BReconstruction(columns, flagged)

    anchor = present[0]
    c_a = columns[:, anchor]
    for j in present[1:]:
        c_j = columns[:, j]
        overlap = np.vdot(c_a, c_j)
        if abs(overlap) > 1e-6 * np.linalg.norm(c_a) * np.linalg.norm(c_j):
            base = np.vdot(c_a, c_a).real + np.vdot(c_j, c_j).real
            p_re = distill(u, factors, (eye[anchor] + eye[j]) / np.sqrt(2), ks=[k]).branches[0].probability
            p_im = distill(u, factors, (eye[anchor] + 1j * eye[j]) / np.sqrt(2), ks=[k]).branches[0].probability
            # ||c_a + e c_j||^2 = base + 2 Re(e z), ||c_a + i e c_j||^2 = base - 2 Im(e z)
            re_part = (2.0 * p_re / s_k ** 2 - base) / 2.0
            im_part = -(2.0 * p_im / s_k ** 2 - base) / 2.0
            rotated = complex(re_part, im_part) / overlap
        else:
            norm, direction = _column_output(u, factors, k, (eye[anchor] + eye[j]) / np.sqrt(2))
            combined = norm * np.sqrt(2) * direction
            coeffs, *_ = np.linalg.lstsq(np.stack([c_a, c_j], axis=1), combined, rcond=None)
            rotated = coeffs[1] / coeffs[0]
        if abs(rotated) < 1e-12:
            flagged.append(j)
            continue
        columns[:, j] = c_j * (rotated / abs(rotated))

    a_k = factors.a_ops[k]
    u = as_square(u, "u")
    coefficient = np.vdot(np.kron(a_k, columns).reshape(-1), u.reshape(-1))
    if abs(coefficient) > 0:
        columns = columns * (coefficient / abs(coefficient))
    if flagged:
        logger.warning(f"B_{k} reconstruction flagged columns {sorted(flagged)}")
    return BReconstruction(columns, sorted(flagged))
