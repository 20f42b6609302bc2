"""Tests for the swap-corrected and Haar-mean entangling powers."""

from __future__ import annotations

import numpy as np
import pytest

from app.analysis.entangling import entangling_power_mean, entangling_power_swap, mc_oracle, swap_subsystem
from app.core.exceptions import OracleRequiredError, ValidationError
from app.experiments.heisenberg import analytic_two_qubit
from app.qtpd.distillation import reconstruct_b
from app.qtpd.extraction import extract_factors
from app.qtpd.snapshot import choi_reduced_exact
from app.tpd.classical import classical_tpd
from app.types.models import BipartiteSplit

from .helpers import CNOT, SWAP, haar

PAIR = BipartiteSplit(1, 1)


def test_swap_power_reference_values():
    assert abs(entangling_power_swap(SWAP, PAIR)) < 1e-12
    assert abs(entangling_power_swap(np.eye(4), PAIR)) < 1e-12
    assert abs(entangling_power_swap(CNOT, PAIR) - 0.5) < 1e-12


def test_swap_power_matches_heisenberg_closed_form():
    for t in (0.1, 0.4, 0.9, 1.7):
        analytic = analytic_two_qubit(1.0, 0.6, 0.3, t)
        assert abs(entangling_power_swap(analytic.unitary(), PAIR) - analytic.e1) < 1e-10


def test_swap_subsystem_on_larger_split():
    split = BipartiteSplit(1, 2)
    p = swap_subsystem(split, [2])
    assert np.abs(p @ p - np.eye(8)).max() < 1e-15
    # |100> -> |001>
    assert p[1, 4] == 1.0


def test_mean_power_reference_values():
    """e_m vanishes on products and the swap and equals 2/9 for CNOT."""
    assert abs(entangling_power_mean(np.eye(4), PAIR)) < 1e-12
    assert abs(entangling_power_mean(SWAP, PAIR)) < 1e-12
    assert abs(entangling_power_mean(np.kron(haar(2, 1), haar(2, 2)), PAIR)) < 1e-12
    assert abs(entangling_power_mean(CNOT, PAIR) - 2 / 9) < 1e-12


def test_mean_power_local_invariance():
    split = BipartiteSplit(1, 2)
    u = haar(8, 31)
    dressed = np.kron(haar(2, 32), haar(4, 33)) @ u @ np.kron(haar(2, 34), haar(4, 35))
    assert abs(entangling_power_mean(u, split) - entangling_power_mean(dressed, split)) < 1e-10
    assert abs(entangling_power_mean(classical_tpd(u, split)) - entangling_power_mean(u, split)) < 1e-12


def test_mean_power_needs_b_factors():
    factors = extract_factors(choi_reduced_exact(CNOT, PAIR))
    with pytest.raises(OracleRequiredError):
        entangling_power_mean(factors)
    with pytest.raises(ValidationError):
        entangling_power_mean(np.eye(4))


def test_mean_power_from_reconstructed_b():
    u = haar(4, 41)
    factors = extract_factors(choi_reduced_exact(u, PAIR))
    b_ops = np.stack([reconstruct_b(u, factors, k).matrix for k in range(factors.rank)])
    assert abs(entangling_power_mean(factors, b_ops=b_ops) - entangling_power_mean(u, PAIR)) < 1e-6


def test_mc_oracle_checks():
    with pytest.raises(ValidationError):
        mc_oracle(CNOT, PAIR, 50, seed=1)
    first = mc_oracle(CNOT, PAIR, 1000, seed=1)
    assert first == mc_oracle(CNOT, PAIR, 1000, seed=1)


MC_CASES = [("cnot", CNOT), ("swap", SWAP)] + [(f"haar-{seed}", haar(4, 51 + seed)) for seed in range(10)]


@pytest.mark.slow
@pytest.mark.parametrize("name,u", MC_CASES, ids=[name for name, _ in MC_CASES])
def test_closed_form_agrees_with_monte_carlo(name, u):
    mean, stderr = mc_oracle(u, PAIR, 100000, seed=2024)
    assert abs(mean - entangling_power_mean(u, PAIR)) <= 3 * stderr + 1e-12
