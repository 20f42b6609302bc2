"""
Multipartite decomposition U = sum s_{j_1...j_M} A^(1)_{j_1} (x) ... (x) A^(M)_{j_M} and the
fast-quantum-transform approximation built from its dominant factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from app.core.config import BOUND_SLACK, RANK_TOL, RECONSTRUCTION_TOL
from app.core.exceptions import BoundViolationError, DimensionMismatchError, ReconstructionError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square, kron_all
from app.tpd.classical import nearest_unitary, operator_schmidt
from app.types.models import ClusterGauge


@dataclass(frozen=True, eq=False)
class MultipartiteTPD:
    site_dims: tuple
    factors: List[np.ndarray]
    coefficients: np.ndarray

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    @property
    def dominant(self) -> float:
        """s_{1...1}, real non-negative by the phase convention."""
        return float(self.coefficients[(0,) * self.n_sites].real)


@dataclass(frozen=True, eq=False)
class FQTResult:
    product: np.ndarray
    site_unitaries: List[np.ndarray]
    bound: float
    achieved: float
    achieved_raw: float
    eps_s: float
    eps_sites: List[float]

    @property
    def bound_holds(self) -> bool:
        return self.achieved <= self.bound + BOUND_SLACK


def _site_tensor(u: np.ndarray, site_dims: Sequence[int]) -> np.ndarray:
    """u as a tensor with axes (out_1, in_1, out_2, in_2, ...)."""
    m = len(site_dims)
    tensor = u.reshape(list(site_dims) * 2)
    order = [ax for site in range(m) for ax in (site, m + site)]
    return tensor.transpose(order)


def _site_first(u: np.ndarray, site_dims: Sequence[int], site: int) -> np.ndarray:
    """u with ``site`` moved to the most significant position."""
    m = len(site_dims)
    perm = [site] + [i for i in range(m) if i != site]
    tensor = u.reshape(list(site_dims) * 2).transpose(perm + [m + i for i in perm])
    d = u.shape[0]
    return tensor.reshape(d, d)


def _check_site_dims(u: np.ndarray, site_dims: Sequence[int]) -> tuple:
    site_dims = tuple(int(d) for d in site_dims)
    if len(site_dims) < 2:
        raise ValidationError("multipartite decomposition needs at least two sites", {"site_dims": list(site_dims)})
    if any(d < 1 for d in site_dims) or int(np.prod(site_dims)) != u.shape[0]:
        raise DimensionMismatchError(
            "site dimensions do not multiply to the operator dimension",
            {"dim": u.shape[0], "site_dims": list(site_dims)},
        )
    return site_dims


def multipartite_tpd(u, site_dims: Sequence[int], rank_tol: float = RANK_TOL) -> MultipartiteTPD:
    """Per-site bases from the site-vs-rest decompositions, coefficients by projection.

    Sites are processed left to right. Degenerate clusters use the Pauli gauge so that the
    leading factor of a locally unitary site stays unitary.
    """
    u = as_square(u, "u")
    site_dims = _check_site_dims(u, site_dims)
    d = u.shape[0]

    factors = []
    for site, d_site in enumerate(site_dims):
        _, a_ops, _, _ = operator_schmidt(
            _site_first(u, site_dims, site), d_site, d // d_site, rank_tol, ClusterGauge.PAULI
        )
        factors.append(a_ops)

    coefficients = _site_tensor(u, site_dims).reshape([ds * ds for ds in site_dims])
    for a_ops in factors:
        coefficients = np.tensordot(coefficients, a_ops.conj().reshape(len(a_ops), -1), axes=([0], [1]))
    coefficients = coefficients / d

    corner = (0,) * len(site_dims)
    leading = coefficients[corner]
    if abs(leading) > 0:
        phase = leading / abs(leading)
        factors[0] = factors[0].copy()
        factors[0][0] = factors[0][0] * phase
        coefficients[(0,) + (slice(None),) * (len(site_dims) - 1)] *= np.conj(phase)

    result = MultipartiteTPD(site_dims, factors, coefficients)
    residual = np.linalg.norm(reconstruct_multipartite(result) - u)
    logger.debug(
        f"Multipartite TPD over sites {list(site_dims)}: ranks {[len(f) for f in factors]}, "
        f"dominant {result.dominant:.12f}, residual {residual:.3e}"
    )
    if residual > RECONSTRUCTION_TOL * max(np.linalg.norm(u), 1.0):
        logger.error(f"Multipartite reconstruction residual {residual:.3e} over sites {list(site_dims)}")
        raise ReconstructionError(
            "multipartite factors do not reproduce the operator",
            {"residual": float(residual), "site_dims": list(site_dims), "rank_tol": rank_tol},
        )
    return result


def reconstruct_multipartite(tpd: MultipartiteTPD) -> np.ndarray:
    tensor = tpd.coefficients
    for a_ops in tpd.factors:
        tensor = np.tensordot(tensor, a_ops.reshape(len(a_ops), -1), axes=([0], [0]))
    m = tpd.n_sites
    dims = list(tpd.site_dims)
    tensor = tensor.reshape([x for ds in dims for x in (ds, ds)])
    tensor = tensor.transpose([2 * i for i in range(m)] + [2 * i + 1 for i in range(m)])
    d = int(np.prod(dims))
    return tensor.reshape(d, d)


def fqt_approximation(u, site_dims: Sequence[int], rank_tol: float = RANK_TOL) -> FQTResult:
    """Approximate u by the tensor product of the nearest unitaries to the dominant site factors."""
    u = as_square(u, "u")
    tpd = multipartite_tpd(u, site_dims, rank_tol)
    d = u.shape[0]

    site_unitaries = []
    eps_sites = []
    for d_site, a_ops in zip(tpd.site_dims, tpd.factors):
        dominant = a_ops[0]
        unitary = nearest_unitary(dominant)
        site_unitaries.append(unitary)
        eps_sites.append(float(np.linalg.norm(dominant - unitary) / np.sqrt(2 * d_site)))

    eps_s = max(1.0 - tpd.dominant, 0.0)
    bound = float(np.sqrt(eps_s) + np.sqrt(eps_s ** 2 / 2 + np.sum(np.square(eps_sites))))
    product = kron_all(site_unitaries)
    achieved_raw = float(np.linalg.norm(u - product))
    achieved = achieved_raw / np.sqrt(2 * d)

    result = FQTResult(product, site_unitaries, bound, achieved, achieved_raw, eps_s, eps_sites)
    if not result.bound_holds:
        logger.error(f"Fast-transform bound violated: achieved {achieved:.6e} > bound {bound:.6e}")
        raise BoundViolationError(
            "fast-transform error exceeds its bound",
            {"achieved": achieved, "bound": bound, "eps_s": eps_s, "eps_sites": eps_sites},
        )
    return result
