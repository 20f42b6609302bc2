"""Tests for the spin models, the qubit relabeling and the two-qubit closed forms."""

from __future__ import annotations

import numpy as np
import pytest

from app.analysis.nonlocality import nonlocality_normalized, observables
from app.analysis.surrogate import direct_reduced_state
from app.core.exceptions import ValidationError
from app.experiments.heisenberg import analytic_two_qubit, two_qubit_model
from app.experiments.models import (
    SpinModel,
    build_hamiltonian,
    chain_edges,
    grid_edges,
    permute_operator,
    permute_state,
    relabeling,
)
from app.experiments.states import parse_state, qubit_states
from app.quantum.paulis import Z, single_site_operator
from app.quantum.statevector import exact_evolution
from app.tpd.classical import classical_tpd
from app.types.models import BipartiteSplit

from .helpers import ket

PAIR = BipartiteSplit(1, 1)
GRID_2X3 = [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]


def test_initial_time():
    analytic = analytic_two_qubit(1.0, 1.0, 1.0, 0.0)
    assert np.abs(analytic.g - [1, 0, 0, 0]).max() < 1e-15
    assert np.abs(analytic.s - [1.0]).max() < 1e-15
    assert analytic.z == -1.0
    assert analytic.entropy == 0.0
    assert analytic.occupation == 1.0


def test_swap_point():
    """J_x = J_y, J_z = 0 at t = pi/4J is the swap up to local phases."""
    analytic = analytic_two_qubit(1.0, 1.0, 0.0, np.pi / 4)
    assert np.abs(np.abs(analytic.g) - 0.5).max() < 1e-12
    assert abs(analytic.S_A_norm - 1.0) < 1e-12


def test_isotropic_rank_one_point():
    analytic = analytic_two_qubit(1.0, 1.0, 1.0, np.pi / 2)
    assert abs(analytic.g[0] - 1j) < 1e-12
    assert len(analytic.s) == 1


@pytest.mark.parametrize("couplings", [(1.0, 1.0, 1.0), (1.0, 0.6, 0.3), (0.2, -0.7, 1.1)])
def test_closed_form_matches_simulation(couplings):
    h = build_hamiltonian(two_qubit_model(*couplings))
    for t in (0.0, 0.3, 1.1, 2.5):
        analytic = analytic_two_qubit(*couplings, t)
        u = exact_evolution(h, t)
        assert np.abs(analytic.unitary() - u).max() < 1e-12
        assert np.abs(analytic.s - classical_tpd(u, PAIR).s).max() < 1e-10
        assert abs(analytic.S_A_norm - nonlocality_normalized(classical_tpd(u, PAIR).s, 2)) < 1e-10

        rho1 = direct_reduced_state(u, PAIR, ket("1"), ket("0"))
        assert np.abs(analytic.rho1 - rho1).max() < 1e-12
        occupation, entropy_norm = observables(rho1, 1)
        assert abs(analytic.occupation - occupation) < 1e-12
        assert abs(analytic.entropy_norm - entropy_norm) < 1e-10
        assert abs(analytic.z - np.trace(Z @ rho1).real) < 1e-12

        plus = direct_reduced_state(u, PAIR, ket("1"), parse_state("+"))
        assert np.abs(analytic.rho1_plus - plus).max() < 1e-12
        assert abs(analytic.coherence_1plus - plus[1, 0]) < 1e-12


def test_isotropic_spectrum():
    h = build_hamiltonian(two_qubit_model(1.0, 1.0, 1.0))
    assert np.abs(np.linalg.eigvalsh(h) - [-1.0, -1.0, -1.0, 3.0]).max() < 1e-12


def test_isotropic_grid_conserves_magnetization():
    model = SpinModel(6, tuple(grid_edges(2, 3)))
    h = build_hamiltonian(model)
    total = sum(single_site_operator(Z, i, 6) for i in range(6))
    assert np.abs(total @ h - h @ total).max() < 1e-12
    assert np.abs(h - h.conj().T).max() == 0.0


def test_edges():
    assert grid_edges(2, 3) == GRID_2X3
    assert chain_edges(4) == [(0, 1), (1, 2), (2, 3)]
    assert chain_edges(4, periodic=True)[-1] == (3, 0)
    with pytest.raises(ValidationError):
        SpinModel(3, ((0, 1), (1, 0)))
    with pytest.raises(ValidationError):
        SpinModel(3, ((0, 3),))
    with pytest.raises(ValidationError):
        build_hamiltonian(SpinModel(13, tuple(chain_edges(13))))


def test_relabeling_is_an_involution():
    perm = relabeling([0, 3], 6)
    assert perm == [0, 3, 2, 1, 4, 5]
    assert [perm[p] for p in perm] == list(range(6))
    assert relabeling([1], 2) == [1, 0]
    with pytest.raises(ValidationError):
        relabeling([0, 0], 4)


def test_permuted_state_and_operator():
    perm = relabeling([0, 3], 6)
    assert np.abs(permute_state(parse_state("100100"), perm) - parse_state("110000")).max() == 0.0
    op = single_site_operator(Z, 3, 6)
    assert np.abs(permute_operator(op, perm) - single_site_operator(Z, 1, 6)).max() == 0.0


def test_state_specs():
    assert len(qubit_states("1+0-")) == 4
    assert np.abs(parse_state("1+") - np.kron([0, 1], [1, 1]) / np.sqrt(2)).max() < 1e-15
    with pytest.raises(ValidationError):
        parse_state("")
    with pytest.raises(ValidationError):
        parse_state("10x")
