"""
Entangling powers.

``e_A`` corrects the non-locality of U by that of U composed with swaps of A against every
qubit-aligned subsystem C of B of the same size. ``e_m`` is the Haar-mean linear entropy that U
generates on product states, in closed form from the full decomposition, with a Monte-Carlo
oracle for cross-checks.
"""

from __future__ import annotations

import itertools
from typing import Callable, Optional, Tuple

import numpy as np

from app.analysis.nonlocality import nonlocality
from app.core.config import MC_BATCH
from app.core.exceptions import DimensionMismatchError, OracleRequiredError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square, qubit_permutation
from app.quantum.random import MONTE_CARLO_STREAM, crandn, task_rng
from app.tpd.classical import TensorProductDecomposition, classical_tpd
from app.types.models import BipartiteSplit

SchmidtSource = Callable[[np.ndarray], np.ndarray]


def swap_subsystem(split: BipartiteSplit, c_qubits) -> np.ndarray:
    """P_AC exchanging the A qubits with the B qubits listed in ``c_qubits`` (global indices)."""
    perm = list(range(split.n_qubits))
    for a, c in zip(range(split.n_a), c_qubits):
        perm[a], perm[c] = c, a
    return qubit_permutation(perm)


def entangling_power_swap(u, split: BipartiteSplit, schmidt: Optional[SchmidtSource] = None) -> float:
    """e_A(U) = (S_A(U) + sum_C (S_A(U P_AC) - log d_A^2)) / log d_A^2.

    ``schmidt`` maps an operator to its coefficient vector and defaults to the classical oracle;
    quantum pipelines pass their own. Values are not clamped and can be negative when d_A < d_B.
    """
    u = as_square(u, "u")
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    if schmidt is None:
        def schmidt(op):
            return classical_tpd(op, split).s
    log_d2 = np.log(split.d_a ** 2)

    total = nonlocality(schmidt(u))
    b_qubits = range(split.n_a, split.n_qubits)
    for c_qubits in itertools.combinations(b_qubits, split.n_a):
        total += nonlocality(schmidt(u @ swap_subsystem(split, c_qubits))) - log_d2
    return float(total / log_d2)


def _trace_products(ops: np.ndarray) -> np.ndarray:
    """T[k, l, m, n] = Tr(O_k O_l^dag O_m O_n^dag)."""
    pairs = np.einsum("kab,lcb->klac", ops, ops.conj())
    return np.einsum("klab,mnba->klmn", pairs, pairs)


def _mean_entangling_closed_form(s: np.ndarray, a_ops: np.ndarray, b_ops: np.ndarray) -> float:
    d_a = a_ops.shape[1]
    d_b = b_ops.shape[1]
    trace_a = _trace_products(a_ops)
    # Tr(B_k B_n^dag B_m B_l^dag) is trace_b[k, n, m, l]
    trace_b = _trace_products(b_ops).transpose(0, 3, 2, 1)
    weights = np.einsum("k,l,m,n->klmn", s, s, s, s)
    cross = float(np.real(np.sum(weights * trace_a * trace_b)))
    norm = (d_a + 1) * (d_b + 1)
    value = (
        1.0
        - (d_a + d_b) / norm
        - d_a * d_b * np.sum(s ** 4) / norm
        - cross / (d_a * (d_a + 1) * d_b * (d_b + 1))
    )
    return float(value)


def entangling_power_mean(source, split: Optional[BipartiteSplit] = None, b_ops=None) -> float:
    """Closed-form e_m from a full decomposition.

    ``source`` is a unitary (decomposed by the oracle together with ``split``), a
    ``TensorProductDecomposition``, or an A-side factor set with ``s``/``a_ops`` attributes that
    is completed by ``b_ops`` (for instance from ``reconstruct_b``).
    """
    if isinstance(source, TensorProductDecomposition):
        return _mean_entangling_closed_form(source.s, source.a_ops, source.b_ops)
    if hasattr(source, "a_ops"):
        if b_ops is None:
            raise OracleRequiredError(
                "e_m requires the B factors; run the oracle or reconstruct them by distillation",
                {"rank": len(source.s)},
            )
        b_ops = np.asarray(b_ops, dtype=np.complex128)
        if len(b_ops) != len(source.s):
            raise ValidationError("B factor count does not match the rank", {"b": len(b_ops), "rank": len(source.s)})
        return _mean_entangling_closed_form(np.asarray(source.s), source.a_ops, b_ops)
    if split is None:
        raise ValidationError("a split is needed to decompose a bare operator")
    tpd = classical_tpd(source, split)
    return _mean_entangling_closed_form(tpd.s, tpd.a_ops, tpd.b_ops)


def _linear_entropies(u: np.ndarray, split: BipartiteSplit, rng: np.random.Generator, n: int) -> np.ndarray:
    psi_a = crandn((n, split.d_a), rng)
    psi_b = crandn((n, split.d_b), rng)
    psi_a /= np.linalg.norm(psi_a, axis=1, keepdims=True)
    psi_b /= np.linalg.norm(psi_b, axis=1, keepdims=True)
    product = np.einsum("na,nb->nab", psi_a, psi_b).reshape(n, -1)
    evolved = (product @ u.T).reshape(n, split.d_a, split.d_b)
    rho_a = np.einsum("nab,ncb->nac", evolved, evolved.conj())
    purity = np.einsum("nab,nba->n", rho_a, rho_a).real
    return 1.0 - purity


def mc_oracle(u, split: BipartiteSplit, n_samples: int, seed: int, batch: int = MC_BATCH) -> Tuple[float, float]:
    """Haar Monte-Carlo estimate of e_m as (mean, standard error).

    Batches draw from streams ``(seed, MONTE_CARLO_STREAM, batch_index)`` and are merged in order.
    """
    if n_samples < 100:
        raise ValidationError("the Monte-Carlo oracle needs at least 100 samples", {"n_samples": n_samples})
    u = as_square(u, "u")
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    samples = []
    for index, start in enumerate(range(0, n_samples, batch)):
        size = min(batch, n_samples - start)
        samples.append(_linear_entropies(u, split, task_rng(seed, MONTE_CARLO_STREAM, index), size))
    values = np.concatenate(samples)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(len(values)))
    logger.debug(f"Monte-Carlo e_m over {n_samples} samples: {mean:.6f} +- {stderr:.2e}")
    return mean, stderr
