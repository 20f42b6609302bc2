from __future__ import annotations

import numpy as np
import pytest

from app.analysis.decoherence_free import _GridSearch, decoherence_free_check, eigenphases
from app.core.exceptions import NotUnitaryError, SearchTooLargeError
from app.types.models import BipartiteSplit

from .helpers import CNOT, T_GATE, haar

SPLITS = [BipartiteSplit(1, 1), BipartiteSplit(1, 2), BipartiteSplit(2, 2)]


def _witness_matches(result, tol=1e-7) -> bool:
    grid = np.sort(np.mod(np.add.outer(result.phi, result.psi).reshape(-1), 2 * np.pi))
    distance = np.abs(np.mod(grid - result.eigenphases + np.pi, 2 * np.pi) - np.pi)
    return bool(distance.max() < tol)


@pytest.mark.parametrize("split", SPLITS, ids=str)
def test_products_are_decomposable(split):
    for seed in range(50):
        u = np.kron(haar(split.d_a, seed), haar(split.d_b, 50 + seed))
        result = decoherence_free_check(u, split)
        assert result.decomposable
        assert result.psi[0] == 0.0
        assert len(result.phi) == split.d_a
        assert len(result.psi) == split.d_b
        assert _witness_matches(result)


@pytest.mark.parametrize("split", SPLITS, ids=str)
def test_conjugated_products_are_decomposable(split):
    for seed in range(50):
        v = haar(split.dim, 900 + seed)
        u = v @ np.kron(haar(split.d_a, seed), haar(split.d_b, 100 + seed)) @ v.conj().T
        result = decoherence_free_check(u, split)
        assert result.decomposable
        assert _witness_matches(result)


def test_conjugated_phase_gate():
    u = CNOT @ np.kron(np.eye(2), T_GATE) @ CNOT
    assert decoherence_free_check(u, BipartiteSplit(1, 1)).decomposable


@pytest.mark.parametrize("split", SPLITS[:2], ids=str)
def test_haar_unitaries_are_not_decomposable(split):
    for seed in range(50):
        result = decoherence_free_check(haar(split.dim, 2000 + seed), split)
        assert not result.decomposable
        assert result.phi is None
        assert result.nearest_miss > 1e-8


def test_cnot_is_not_decomposable():
    """Phases {0, 0, 0, pi} admit no additive 2 x 2 grid."""
    result = decoherence_free_check(CNOT, BipartiteSplit(1, 1))
    assert not result.decomposable


def test_phase_matching_uses_optimal_assignment():
    """The nearest phase of the first target is the only one the second target can use."""
    phases = np.mod(np.array([0.7e-8, -0.9e-8]), 2 * np.pi)
    search = _GridSearch(phases, 2, 1, 1e-8)
    assert search._match(np.array([0.0, 1.6e-8]), [0, 1]) == [1, 0]
    assert search._match(np.array([0.0, 3.0e-8]), [0, 1]) is None
    assert 1e-8 < search.nearest_miss < 3e-8


def test_near_degenerate_product_spectrum():
    phi = np.array([0.0, 5e-9])
    psi = np.array([0.3, 0.3 + 7e-9, 2.0, 2.0 + 4e-9])
    v = haar(8, 77)
    u = v @ np.diag(np.exp(1j * np.add.outer(phi, psi).reshape(-1))) @ v.conj().T
    result = decoherence_free_check(u, BipartiteSplit(1, 2))
    assert result.decomposable
    assert _witness_matches(result, tol=2e-8)


def test_limits():
    with pytest.raises(SearchTooLargeError):
        decoherence_free_check(np.eye(128), BipartiteSplit(3, 4))
    with pytest.raises(NotUnitaryError):
        eigenphases(2.0 * np.eye(4))
    phases = eigenphases(np.diag(np.exp(1j * np.array([3.0, -1.0, 0.5, 2.0]))))
    assert np.abs(phases - np.sort(np.mod([3.0, -1.0, 0.5, 2.0], 2 * np.pi))).max() < 1e-12
