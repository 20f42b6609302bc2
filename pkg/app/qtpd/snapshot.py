"""
Classical snapshots of the Choi reduced state rho_A(U).

Three routes produce the same d_A^2 x d_A^2 matrix: the exact marginal of the doubled-register
Choi state, Pauli linear-inversion tomography of that marginal with binomial shot noise, and the
sequential variant that never doubles the B register and instead loops over A-inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from app.core.exceptions import DimensionMismatchError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square, check_unitary, nearest_density_matrix
from app.quantum.paulis import all_pauli_strings
from app.quantum.random import SEQUENTIAL_STREAM, TOMOGRAPHY_STREAM, task_rng
from app.quantum.statevector import (
    apply_block_unitary,
    choi_state,
    from_amplitudes,
    reduced_density_matrix,
    sampled_mean,
)
from app.types.models import BipartiteSplit, Provenance


@dataclass(frozen=True, eq=False)
class ChoiReducedState:
    rho: np.ndarray
    split: BipartiteSplit
    provenance: Provenance = Provenance.EXACT
    shots_per_setting: Optional[int] = None
    seed: Optional[int] = None
    n_settings: int = 1
    # a-priori Frobenius shot-noise estimate; 0 for exact snapshots
    noise_estimate: float = 0.0

    @property
    def d_a(self) -> int:
        return self.split.d_a

    @property
    def sampled(self) -> bool:
        return self.shots_per_setting is not None


def _checked_unitary(u, split: BipartiteSplit) -> np.ndarray:
    u = check_unitary(as_square(u, "u"))
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    return u


def choi_reduced_exact(u, split: BipartiteSplit) -> ChoiReducedState:
    """Marginal of the Choi state on (A_ref, A_out); its spectrum is {s_k^2} padded with zeros."""
    state = choi_state(u, split)
    rho = reduced_density_matrix(state, ["A_ref", "A_out"])
    rho = 0.5 * (rho + rho.conj().T)
    logger.debug(f"Exact Choi snapshot on split {split}, trace {np.trace(rho).real:.12f}")
    return ChoiReducedState(rho, split)


def _linear_inversion(estimates: np.ndarray, n_qubits: int) -> np.ndarray:
    """(1/D) sum_P e_P P over all Pauli strings on n_qubits, D = 2^n_qubits."""
    d = 2 ** n_qubits
    rho = np.zeros((d, d), dtype=np.complex128)
    for value, pauli in zip(estimates, all_pauli_strings(n_qubits)):
        rho += value * pauli.matrix()
    return rho / d


def _pauli_expectations(rho: np.ndarray, n_qubits: int) -> np.ndarray:
    # Tr(P rho) for Hermitian P is real; clip guards roundoff at +-1
    return np.array(
        [np.clip(np.trace(p.matrix() @ rho).real, -1.0, 1.0) for p in all_pauli_strings(n_qubits)]
    )


def _shot_noise_variance(estimates: np.ndarray, shots: int) -> float:
    """Estimated sum of the per-string variances (1 - e^2)/N."""
    return float(np.sum(1.0 - np.square(estimates)) / shots)


def tomographic_snapshot(
    u,
    split: BipartiteSplit,
    shots_per_setting: int,
    seed: int,
    exact_expectations: bool = False,
) -> ChoiReducedState:
    """Pauli linear-inversion tomography of rho_A(U) followed by projection onto density matrices.

    Each of the 4^(2 n_a) Pauli strings gets its own binomial estimate drawn from the stream
    ``(seed, TOMOGRAPHY_STREAM, string_index)``. With ``exact_expectations`` the shot noise is
    switched off and the exact snapshot is recovered.
    """
    if shots_per_setting < 1:
        raise ValidationError("shots_per_setting must be >= 1", {"shots_per_setting": shots_per_setting})
    exact = choi_reduced_exact(u, split).rho
    n_qubits = 2 * split.n_a
    expectations = _pauli_expectations(exact, n_qubits)

    if exact_expectations:
        estimates = expectations
        noise = 0.0
    else:
        estimates = np.array(
            [
                sampled_mean(value, shots_per_setting, task_rng(seed, TOMOGRAPHY_STREAM, index))
                for index, value in enumerate(expectations)
            ]
        )
        noise = float(np.sqrt(_shot_noise_variance(estimates, shots_per_setting) / 2 ** n_qubits))

    rho = nearest_density_matrix(_linear_inversion(estimates, n_qubits))
    logger.info(
        f"Tomographic snapshot on split {split}: {len(estimates)} settings x {shots_per_setting} shots, "
        f"seed {seed}, noise estimate {noise:.3e}"
    )
    return ChoiReducedState(
        rho,
        split,
        Provenance.TOMOGRAPHIC,
        shots_per_setting=shots_per_setting,
        seed=seed,
        n_settings=len(estimates),
        noise_estimate=noise,
    )


def sequential_inputs(d_a: int) -> List[Tuple[Tuple[int, int], np.ndarray]]:
    """The d_A^2 A-side input states: basis states, then (|i>+|j>)/sqrt2 and (|i>+i|j>)/sqrt2 for i<j.

    Each entry is keyed by (i, j) for basis inputs with i == j, (i, j) for the real superposition
    and (j, i) for the imaginary one.
    """
    inputs = []
    eye = np.eye(d_a, dtype=np.complex128)
    for i in range(d_a):
        inputs.append(((i, i), eye[i]))
    for i in range(d_a):
        for j in range(i + 1, d_a):
            inputs.append(((i, j), (eye[i] + eye[j]) / np.sqrt(2)))
            inputs.append(((j, i), (eye[i] + 1j * eye[j]) / np.sqrt(2)))
    return inputs


def _conditional_output(u: np.ndarray, split: BipartiteSplit, phi_a: np.ndarray) -> np.ndarray:
    """Tr_B U(|phi><phi| (x) 1/d_B)U^dag, averaged over computational inputs |j_B>."""
    layout = (("A", split.n_a), ("B", split.n_b))
    sigma = np.zeros((split.d_a, split.d_a), dtype=np.complex128)
    for j_b in range(split.d_b):
        basis = np.zeros(split.d_b, dtype=np.complex128)
        basis[j_b] = 1.0
        state = from_amplitudes(np.kron(phi_a, basis), layout)
        state = apply_block_unitary(state, u, ["A", "B"])
        sigma += reduced_density_matrix(state, ["A"])
    return sigma / split.d_b


def sequential_snapshot(
    u,
    split: BipartiteSplit,
    shots: Optional[int] = None,
    seed: Optional[int] = None,
) -> ChoiReducedState:
    """Rebuild rho_A(U) without the doubled register.

    For every A-input the B register is fed with each computational state and averaged, which
    leaves the conditional output sum_k s_k^2 A_k |phi><phi| A_k^dag. Coherences between inputs
    are recovered by polarization, and the blocks are stacked via sum_j |j> A_k |j> =
    sqrt(d_A) vec(A_k). This costs d_A^2 input settings, recorded as ``n_settings``.

    With ``shots`` each conditional output is estimated by single-register Pauli tomography
    with binomial noise from stream ``(seed, SEQUENTIAL_STREAM, setting, string)``.
    """
    u = _checked_unitary(u, split)
    if shots is not None and shots < 1:
        raise ValidationError("shots must be >= 1", {"shots": shots})
    if shots is not None and seed is None:
        raise ValidationError("sampled sequential snapshots need a seed")
    d_a = split.d_a

    outputs = {}
    variance = 0.0
    for setting, (key, phi) in enumerate(sequential_inputs(d_a)):
        sigma = _conditional_output(u, split, phi)
        if shots is not None:
            expectations = _pauli_expectations(sigma, split.n_a)
            estimates = np.array(
                [
                    sampled_mean(value, shots, task_rng(seed, SEQUENTIAL_STREAM, setting, index))
                    for index, value in enumerate(expectations)
                ]
            )
            variance += _shot_noise_variance(estimates, shots) / d_a
            sigma = _linear_inversion(estimates, split.n_a)
        outputs[key] = sigma

    # blocks[i][j] = E(|i><j|)
    blocks = [[None] * d_a for _ in range(d_a)]
    for i in range(d_a):
        blocks[i][i] = outputs[(i, i)]
        for j in range(i + 1, d_a):
            diagonal = outputs[(i, i)] + outputs[(j, j)]
            real_part = 2.0 * outputs[(i, j)] - diagonal
            imag_part = 2.0 * outputs[(j, i)] - diagonal
            blocks[i][j] = 0.5 * (real_part + 1j * imag_part)
            blocks[j][i] = 0.5 * (real_part - 1j * imag_part)

    # rho[(i, k), (j, l)] = E(|i><j|)[k, l] / d_A
    rho = np.block(blocks) / d_a
    rho = 0.5 * (rho + rho.conj().T)

    if shots is None:
        provenance = Provenance.SEQUENTIAL_EXACT
        noise = 0.0
    else:
        provenance = Provenance.SEQUENTIAL_SAMPLED
        rho = nearest_density_matrix(rho)
        noise = float(np.sqrt(variance)) / d_a

    n_settings = d_a * d_a
    logger.info(f"Sequential snapshot on split {split}: {n_settings} input settings, provenance {provenance.value}")
    return ChoiReducedState(
        rho, split, provenance, shots_per_setting=shots, seed=seed, n_settings=n_settings, noise_estimate=noise
    )
