"""
Classical surrogate of the open dynamics of A: sigma_A = sum_kl lambda_kl A_k|psi_A><psi_A|A_l^dag
with lambda_kl = s_k s_l <psi_B|B_l^dag B_k|psi_B>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.core.exceptions import DimensionMismatchError, ValidationError
from app.core.logger import logger
from app.qtpd.distillation import DistillationResult
from app.quantum.statevector import apply_block_unitary, from_amplitudes, reduced_density_matrix
from app.types.models import BipartiteSplit


@dataclass(frozen=True, eq=False)
class OpenSurrogate:
    lambda_: np.ndarray
    a_ops: np.ndarray
    psi_b: Optional[np.ndarray] = None

    @property
    def rank(self) -> int:
        return int(len(self.a_ops))


def _as_vector(psi) -> np.ndarray:
    return np.asarray(getattr(psi, "amplitudes", psi), dtype=np.complex128).reshape(-1)


def open_surrogate(s, a_ops, b_source, psi_b=None) -> OpenSurrogate:
    """Build lambda from oracle B_k matrices (with ``psi_b``) or from a distillation result.

    Distilled branches give lambda_kl = sqrt(p_k p_l) <beta_l|beta_k> directly; null branches
    contribute nothing.
    """
    s = np.asarray(s, dtype=float)
    a_ops = np.asarray(a_ops, dtype=np.complex128)
    if len(s) != len(a_ops):
        raise ValidationError("coefficient and factor counts differ", {"s": len(s), "a_ops": len(a_ops)})

    if isinstance(b_source, DistillationResult):
        if len(b_source.branches) != len(s):
            raise ValidationError("branch count does not match the rank", {"branches": len(b_source.branches)})
        d_b = next((b.state.amplitudes.shape[0] for b in b_source.branches if not b.null_branch), 1)
        betas = np.zeros((len(s), d_b), dtype=np.complex128)
        for branch in b_source.branches:
            if not branch.null_branch:
                betas[branch.k] = np.sqrt(branch.probability) * branch.state.amplitudes
        psi_vector = None if psi_b is None else _as_vector(psi_b)
    else:
        b_ops = np.asarray(b_source, dtype=np.complex128)
        if len(b_ops) != len(s):
            raise ValidationError("B factor count does not match the rank", {"b": len(b_ops), "rank": len(s)})
        if psi_b is None:
            raise ValidationError("oracle B factors need psi_B")
        psi_vector = _as_vector(psi_b)
        if psi_vector.shape[0] != b_ops.shape[1]:
            raise DimensionMismatchError("psi_B does not match the B factors", {"length": psi_vector.shape[0]})
        betas = s[:, None] * np.einsum("kab,b->ka", b_ops, psi_vector)

    # lambda_kl = <beta_l|beta_k>
    lambda_ = betas @ betas.conj().T
    lambda_ = 0.5 * (lambda_ + lambda_.conj().T)
    return OpenSurrogate(lambda_, a_ops, psi_vector)


def evolve(surrogate: OpenSurrogate, psi_a) -> np.ndarray:
    psi_a = _as_vector(psi_a)
    if psi_a.shape[0] != surrogate.a_ops.shape[1]:
        raise DimensionMismatchError("psi_A does not match the A factors", {"length": psi_a.shape[0]})
    images = np.einsum("kab,b->ak", surrogate.a_ops, psi_a)
    sigma = images @ surrogate.lambda_ @ images.conj().T
    sigma = 0.5 * (sigma + sigma.conj().T)
    trace = np.trace(sigma).real
    if abs(trace - 1.0) > 1e-6:
        logger.warning(f"Surrogate evolution is not trace preserving: Tr sigma_A = {trace:.9f}")
    return sigma


def direct_reduced_state(u, split: BipartiteSplit, psi_a, psi_b) -> np.ndarray:
    """Tr_B U(|psi_A> (x) |psi_B>) by state-vector simulation."""
    layout = (("A", split.n_a), ("B", split.n_b))
    state = from_amplitudes(np.kron(_as_vector(psi_a), _as_vector(psi_b)), layout)
    state = apply_block_unitary(state, u, ["A", "B"])
    return reduced_density_matrix(state, ["A"])
