from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import expm

from app.core.exceptions import NotNormalizedError, NumericalError
from app.quantum.linalg import kron
from app.quantum.paulis import PauliString, pauli_operator_basis
from app.quantum.random import random_hermitian, random_state
from app.quantum.statevector import (
    Propagator,
    apply_block_unitary,
    bell_state,
    choi_state,
    exact_evolution,
    from_amplitudes,
    measure_projector,
    pauli_expectation,
    reduced_density_matrix,
    sampled_expectation,
    sampled_mean,
)
from app.tpd.classical import classical_tpd
from app.types.models import BipartiteSplit

from .helpers import haar


def test_unnormalized_state_rejected():
    with pytest.raises(NotNormalizedError):
        from_amplitudes(np.array([1.0, 1.0]))


def test_bell_state_amplitudes():
    state = bell_state(2)
    amps = state.amplitudes.reshape(4, 4)
    assert np.abs(amps - np.eye(4) / 2).max() < 1e-15
    assert state.block_names == ("ref", "out")


def test_choi_marginal_spectrum_is_schmidt_weights():
    split = BipartiteSplit(1, 2)
    u = haar(8, 11)
    state = choi_state(u, split)
    rho = reduced_density_matrix(state, ["A_ref", "A_out"])
    values = np.sort(np.linalg.eigvalsh(rho))[::-1]
    s = classical_tpd(u, split).s
    assert np.abs(values[: len(s)] - s ** 2).max() < 1e-12


def test_block_unitary_matches_kron(rng):
    a = haar(2, 4)
    psi = random_state(2, rng)
    phi = random_state(4, rng)
    state = from_amplitudes(np.kron(psi, phi), (("A", 1), ("B", 2)))
    evolved = apply_block_unitary(state, a, ["A"])
    expected = kron(a, np.eye(4)) @ np.kron(psi, phi)
    assert np.abs(evolved.amplitudes - expected).max() < 1e-12


def test_projector_and_complement_sum_to_one(rng):
    state = from_amplitudes(random_state(8, rng), (("A", 1), ("B", 2)))
    p = np.diag([1.0, 0.0]).astype(np.complex128)
    first = measure_projector(state, p, ["A"])
    second = measure_projector(state, np.eye(2) - p, ["A"])
    assert abs(first.probability + second.probability - 1.0) < 1e-12
    assert abs(np.linalg.norm(first.post_state.amplitudes) - 1.0) < 1e-12


def test_reduced_density_of_product(rng):
    psi = random_state(2, rng)
    phi = random_state(2, rng)
    state = from_amplitudes(np.kron(psi, phi), (("A", 1), ("B", 1)))
    assert np.abs(reduced_density_matrix(state, ["A"]) - np.outer(psi, psi.conj())).max() < 1e-12


def test_exact_evolution_matches_expm(rng):
    h = random_hermitian(8, rng)
    u = exact_evolution(h, 0.7)
    assert np.abs(u - expm(-1j * 0.7 * h)).max() < 1e-10
    assert np.abs(Propagator(h)(0.7) - u).max() < 1e-12


def test_pauli_basis_orthonormal():
    basis = pauli_operator_basis(2)
    gram = np.einsum("kab,lab->kl", basis.conj(), basis) / 4
    assert np.abs(gram - np.eye(16)).max() < 1e-12


def test_sampled_mean_reproducible():
    rho = np.diag([0.8, 0.2]).astype(np.complex128)
    exact = pauli_expectation(rho, PauliString("Z"))
    assert abs(exact - 0.6) < 1e-12
    first = sampled_mean(exact, 1000, np.random.default_rng(5))
    second = sampled_mean(exact, 1000, np.random.default_rng(5))
    assert first == second
    assert -1.0 <= first <= 1.0
    assert abs(first - exact) < 0.2


def test_block_operator_must_preserve_norm():
    state = from_amplitudes(np.kron(random_state(2, np.random.default_rng(3)), [1.0, 0.0]), (("A", 1), ("B", 1)))
    kept = apply_block_unitary(state, haar(2, 4), ["A"])
    assert abs(np.linalg.norm(kept.amplitudes) - 1.0) < 1e-12
    with pytest.raises(NumericalError) as info:
        apply_block_unitary(state, 1.01 * haar(2, 4), ["A"])
    assert abs(info.value.details["norm"] - 1.01) < 1e-9


@pytest.mark.slow
def test_sampled_expectation_error_falls_like_inverse_root_shots():
    rho = np.diag([0.8, 0.2]).astype(np.complex128)
    z = PauliString("Z")
    exact = pauli_expectation(rho, z)
    shots = np.array([100, 1000, 10000, 100000, 1000000])
    errors = [np.mean([abs(sampled_expectation(rho, z, int(n), seed) - exact) for seed in range(20)]) for n in shots]
    slope = np.polyfit(np.log(shots), np.log(errors), 1)[0]
    assert -0.6 < slope < -0.4
