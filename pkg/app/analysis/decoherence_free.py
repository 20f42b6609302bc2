"""
Decoherence-free split check.

A basis V with V U V^dag = A (x) B exists exactly when the eigenphases of U can be arranged on a
d_A x d_B grid theta_{mu m} = phi_mu + psi_m (mod 2 pi). The grid is searched by backtracking with
the gauge psi_1 = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.core.config import MAX_DFS_DIMENSION
from app.core.exceptions import DimensionMismatchError, SearchTooLargeError
from app.core.logger import logger
from app.quantum.linalg import as_square, check_unitary
from app.types.models import BipartiteSplit

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class DecoherenceFreeResult:
    decomposable: bool
    eigenphases: np.ndarray
    phi: Optional[np.ndarray] = None
    psi: Optional[np.ndarray] = None
    nearest_miss: float = 0.0


def _circular_distance(x, y):
    return np.abs(np.mod(np.asarray(x) - y + np.pi, TWO_PI) - np.pi)


def eigenphases(u) -> np.ndarray:
    """Eigenphases of a unitary in [0, 2 pi), ascending."""
    u = check_unitary(as_square(u, "u"))
    return np.sort(np.mod(np.angle(np.linalg.eigvals(u)), TWO_PI))


class _GridSearch:
    """Backtracking over assignments of phases to rows (length n_rows) and columns."""

    def __init__(self, phases: np.ndarray, n_rows: int, n_cols: int, tol: float):
        self.phases = phases
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.tol = tol
        self.nearest_miss = np.inf

    def _match(self, targets: np.ndarray, remaining: List[int]) -> Optional[List[int]]:
        """Assign one remaining phase to every target, all within tol, or None."""
        distances = _circular_distance(self.phases[remaining][None, :], targets[:, None])
        # any pair beyond tol costs more than a whole in-tolerance assignment
        cost = distances + (distances > self.tol) * len(targets) * np.pi
        rows, cols = linear_sum_assignment(cost)
        worst = float(distances[rows, cols].max())
        if worst > self.tol:
            self.nearest_miss = min(self.nearest_miss, worst)
            return None
        return [remaining[j] for j in cols]

    def _columns(self, phi: np.ndarray, remaining: List[int], psi: List[float]) -> Optional[List[float]]:
        if not remaining:
            return psi
        first = self.phases[remaining[0]]
        for mu in range(self.n_rows):
            shift = first - phi[mu]
            used = self._match(phi + shift, remaining)
            if used is None:
                continue
            rest = [i for i in remaining if i not in used]
            found = self._columns(phi, rest, psi + [shift])
            if found is not None:
                return found
        return None

    def _shift_candidates(self) -> List[int]:
        """Indices j whose offset theta_j - theta_0 maps at least n_cols phases onto phases."""
        theta = self.phases
        candidates = []
        for j in range(1, len(theta)):
            delta = theta[j] - theta[0]
            hits = sum(1 for x in theta if np.min(_circular_distance(theta, x + delta)) <= self.tol)
            if hits >= self.n_cols:
                candidates.append(j)
        return candidates

    def run(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        theta = self.phases
        everything = list(range(len(theta)))
        for rows in itertools.combinations(self._shift_candidates(), self.n_rows - 1):
            phi = theta[[0, *rows]]
            remaining = [i for i in everything if i not in (0, *rows)]
            psi = self._columns(phi, remaining, [0.0])
            if psi is not None:
                self.nearest_miss = 0.0
                return phi, np.array(psi)
        return None


def decoherence_free_check(u, split: BipartiteSplit, tol: float = 1e-8) -> DecoherenceFreeResult:
    """Decide whether some basis change turns U into a product over ``split``.

    On success ``phi`` (length d_A) and ``psi`` (length d_B, psi[0] = 0) are an additive
    witness modulo 2 pi. On failure ``nearest_miss`` is the smallest worst-phase mismatch seen.
    """
    u = as_square(u, "u")
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    if split.dim > MAX_DFS_DIMENSION:
        logger.error(f"Exact phase search over {split.dim} phases exceeds the limit {MAX_DFS_DIMENSION}")
        raise SearchTooLargeError(
            "dimension too large for the exact eigenphase search",
            {"dim": split.dim, "limit": MAX_DFS_DIMENSION},
        )
    theta = eigenphases(u)

    # d_A <= d_B, so A indexes the rows
    search = _GridSearch(theta, split.d_a, split.d_b, tol)
    found = search.run()
    if found is None:
        logger.info(f"U is not decoherence-free on {split}; nearest miss {search.nearest_miss:.3e}")
        return DecoherenceFreeResult(False, theta, nearest_miss=float(search.nearest_miss))

    phi, psi = found
    offset = psi[0]
    phi = np.mod(phi + offset, TWO_PI)
    psi = np.mod(psi - offset, TWO_PI)
    logger.debug(f"Additive witness found on {split}: phi={np.round(phi, 6)}, psi={np.round(psi, 6)}")
    return DecoherenceFreeResult(True, theta, phi, psi, 0.0)
