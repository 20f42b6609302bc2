from __future__ import annotations

from typing import NamedTuple, Tuple

import numpy as np

from app.core.config import NORMALIZATION_TOL
from app.core.exceptions import DimensionMismatchError, NotNormalizedError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square
from app.quantum.paulis import Z, single_site_operator


class Observables(NamedTuple):
    occupation: float
    entropy_norm: float


def spectral_entropy(weights: np.ndarray) -> float:
    """-sum w log w over weights above 1e-300."""
    weights = weights[weights > 1e-300]
    return float(-np.sum(weights * np.log(weights)))


def nonlocality(s) -> float:
    """Operator non-locality S_A(U) = -sum_k s_k^2 log s_k^2 (natural log)."""
    s = np.asarray(s, dtype=float)
    if s.size == 0 or np.any(s < -1e-12):
        raise ValidationError("coefficients must be a non-empty non-negative vector")
    weights = np.square(s)
    total = float(weights.sum())
    if abs(total - 1.0) > NORMALIZATION_TOL:
        logger.error(f"Non-locality needs sum s_k^2 = 1, got {total:.12f}")
        raise NotNormalizedError("coefficients are not normalized", {"sum_s2": total})
    return spectral_entropy(weights)


def nonlocality_normalized(s, d_a: int) -> float:
    """S_A(U) / log(d_A^2); 1 for the swap."""
    return nonlocality(s) / np.log(d_a * d_a)


def mereology_costs(s) -> Tuple[float, float]:
    """(1 - s_1^2, sum_{k>=2} s_k), the two split-selection cost functions."""
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        raise ValidationError("mereology costs need at least one coefficient")
    return float(1.0 - s[0] ** 2), float(np.sum(s[1:]))


def magnetization(sigma, n_a: int) -> float:
    """M_A = Tr(sum_i Z_i sigma)."""
    sigma = as_square(sigma, "sigma")
    if sigma.shape[0] != 2 ** n_a:
        raise DimensionMismatchError("sigma does not act on n_a qubits", {"dim": sigma.shape[0], "n_a": n_a})
    total = sum(single_site_operator(Z, i, n_a) for i in range(n_a))
    return float(np.trace(total @ sigma).real)


def state_entropy(sigma) -> float:
    """Von Neumann entropy -Tr(sigma log sigma), natural log."""
    sigma = as_square(sigma, "sigma")
    values = np.linalg.eigvalsh(0.5 * (sigma + sigma.conj().T))
    return spectral_entropy(np.clip(values, 0.0, None))


def observables(sigma, n_a: int) -> Observables:
    """Occupation 1/2 - M_A/(2 n_A) and the state entropy divided by log(d_A)."""
    occupation = 0.5 - magnetization(sigma, n_a) / (2 * n_a)
    entropy_norm = state_entropy(sigma) / np.log(2 ** n_a)
    return Observables(float(occupation), float(entropy_norm))
