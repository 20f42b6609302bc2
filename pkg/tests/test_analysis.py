"""Tests for non-locality, the mereology costs and the open-dynamics surrogate."""

from __future__ import annotations

import numpy as np
import pytest

from app.analysis.nonlocality import mereology_costs, nonlocality, nonlocality_normalized, observables
from app.analysis.surrogate import direct_reduced_state, evolve, open_surrogate
from app.core.exceptions import DimensionMismatchError, NotNormalizedError, ValidationError
from app.qtpd.distillation import distill
from app.qtpd.extraction import extract_factors
from app.qtpd.snapshot import choi_reduced_exact
from app.quantum.random import random_state
from app.tpd.classical import classical_tpd
from app.types.models import BipartiteSplit

from .helpers import CNOT, SWAP, haar, ket

SPLITS = [BipartiteSplit(1, 1), BipartiteSplit(1, 2), BipartiteSplit(2, 2)]


def test_nonlocality_reference_values():
    assert nonlocality([1.0]) == 0.0
    assert abs(nonlocality([0.5] * 4) - np.log(4)) < 1e-12
    assert abs(nonlocality_normalized([0.5] * 4, 2) - 1.0) < 1e-12
    assert abs(nonlocality_normalized([1 / np.sqrt(2)] * 2, 2) - 0.5) < 1e-12


def test_nonlocality_rejects_bad_coefficients():
    with pytest.raises(NotNormalizedError):
        nonlocality([0.5, 0.5])
    with pytest.raises(ValidationError):
        nonlocality([])


def test_mereology_costs():
    assert mereology_costs([1.0]) == (0.0, 0.0)
    cnot = classical_tpd(CNOT, BipartiteSplit(1, 1)).s
    swap = classical_tpd(SWAP, BipartiteSplit(1, 1)).s
    assert np.abs(np.array(mereology_costs(cnot)) - [0.5, 1 / np.sqrt(2)]).max() < 1e-12
    assert np.abs(np.array(mereology_costs(swap)) - [0.75, 1.5]).max() < 1e-12


def test_observables():
    down = np.outer(ket("00"), ket("00"))
    up = np.outer(ket("11"), ket("11"))
    assert np.abs(np.array(observables(down, 2)) - [0.0, 0.0]).max() < 1e-12
    assert np.abs(np.array(observables(up, 2)) - [1.0, 0.0]).max() < 1e-12
    assert np.abs(np.array(observables(np.eye(4) / 4, 2)) - [0.5, 1.0]).max() < 1e-12
    with pytest.raises(DimensionMismatchError):
        observables(np.eye(2) / 2, 2)


@pytest.mark.parametrize("split", SPLITS, ids=str)
def test_surrogate_matches_direct_simulation(split):
    for seed in range(10):
        rng = np.random.default_rng(seed)
        u = haar(split.dim, 700 + seed)
        psi_a = random_state(split.d_a, rng)
        psi_b = random_state(split.d_b, rng)
        tpd = classical_tpd(u, split)
        sigma = evolve(open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops, psi_b), psi_a)
        assert np.abs(sigma - direct_reduced_state(u, split, psi_a, psi_b)).max() < 1e-8


def test_distilled_surrogate_matches_direct_simulation():
    split = BipartiteSplit(1, 2)
    rng = np.random.default_rng(3)
    u = haar(8, 77)
    psi_a = random_state(2, rng)
    psi_b = random_state(4, rng)
    factors = extract_factors(choi_reduced_exact(u, split))
    surrogate = open_surrogate(factors.s, factors.a_ops, distill(u, factors, psi_b))
    assert surrogate.rank == factors.rank
    assert np.abs(evolve(surrogate, psi_a) - direct_reduced_state(u, split, psi_a, psi_b)).max() < 1e-8


def test_product_unitary_keeps_a_pure():
    split = BipartiteSplit(1, 1)
    a = haar(2, 1)
    u = np.kron(a, haar(2, 2))
    tpd = classical_tpd(u, split)
    sigma = evolve(open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops, ket("0")), ket("1"))
    image = a @ ket("1")
    assert np.abs(sigma - np.outer(image, image.conj())).max() < 1e-12


def test_swap_moves_b_into_a():
    split = BipartiteSplit(1, 1)
    psi_b = random_state(2, np.random.default_rng(4))
    tpd = classical_tpd(SWAP, split)
    sigma = evolve(open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops, psi_b), ket("0"))
    assert np.abs(sigma - np.outer(psi_b, psi_b.conj())).max() < 1e-12


def test_surrogate_input_checks():
    tpd = classical_tpd(CNOT, BipartiteSplit(1, 1))
    with pytest.raises(ValidationError):
        open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops[:1], ket("0"))
    with pytest.raises(ValidationError):
        open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops)
    with pytest.raises(DimensionMismatchError):
        open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops, ket("00"))
    surrogate = open_surrogate(tpd.s, tpd.a_ops, tpd.b_ops, ket("0"))
    with pytest.raises(DimensionMismatchError):
        evolve(surrogate, ket("00"))
