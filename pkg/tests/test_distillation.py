"""Tests for B-distillation and the column-wise reconstruction of B factors."""

from __future__ import annotations

import numpy as np
import pytest

from app.core.exceptions import DimensionMismatchError, NonOrthonormalError, ValidationError
from app.qtpd.distillation import distill, distillation_projectors, reconstruct_b
from app.qtpd.extraction import ExtractedFactors, extract_factors
from app.qtpd.snapshot import choi_reduced_exact
from app.quantum.random import random_state
from app.tpd.classical import classical_tpd
from app.types.models import BipartiteSplit

from .helpers import CNOT, SWAP, haar, ket


def _exact_factors(u, split):
    return extract_factors(choi_reduced_exact(u, split))


def test_probabilities_match_oracle():
    """p_k = s_k^2 ||B_k psi||^2 and the branch states are B_k psi up to phase."""
    split = BipartiteSplit(1, 2)
    for seed in range(50):
        u = haar(8, 300 + seed)
        psi = random_state(4, np.random.default_rng(seed))
        oracle = classical_tpd(u, split)
        result = distill(u, _exact_factors(u, split), psi)
        assert abs(result.total_probability - 1.0) < 1e-9
        assert result.residual_prob < 1e-10
        for branch in result.branches:
            image = oracle.b_ops[branch.k] @ psi
            expected = oracle.s[branch.k] ** 2 * np.linalg.norm(image) ** 2
            assert abs(branch.probability - expected) < 1e-9
            overlap = np.vdot(branch.state.amplitudes, image / np.linalg.norm(image))
            assert abs(abs(overlap) - 1.0) < 1e-8


def test_swap_null_branches():
    """With |0> on B, the swap factors sqrt2|1><0| and sqrt2|1><1| on A leave null branches."""
    split = BipartiteSplit(1, 1)
    factors = _exact_factors(SWAP, split)
    result = distill(SWAP, factors, ket("0"))
    null = [b.k for b in result.branches if b.null_branch]
    assert null == [2, 3]
    for branch in result.branches[:2]:
        assert abs(branch.probability - 0.5) < 1e-12
        assert abs(branch.overhead - 2.0) < 1e-10
    assert abs(abs(result.branches[0].state.amplitudes[0]) - 1.0) < 1e-10
    assert abs(abs(result.branches[1].state.amplitudes[1]) - 1.0) < 1e-10
    assert result.branches[2].overhead > 1e12
    assert abs(result.total_probability - 1.0) < 1e-12


def test_selected_branches():
    split = BipartiteSplit(1, 1)
    factors = _exact_factors(CNOT, split)
    result = distill(CNOT, factors, ket("0"), ks=[1])
    assert [b.k for b in result.branches] == [1]
    with pytest.raises(ValidationError):
        distill(CNOT, factors, ket("0"), ks=[5])


def test_projectors_are_orthogonal_rank_one():
    factors = _exact_factors(haar(8, 77), BipartiteSplit(1, 2))
    projectors = distillation_projectors(factors)
    assert projectors.shape == (factors.rank, 4, 4)
    for j, p in enumerate(projectors):
        assert np.abs(p @ p - p).max() < 1e-12
        assert abs(np.trace(p) - 1.0) < 1e-12
        for q in projectors[j + 1:]:
            assert np.abs(p @ q).max() < 1e-12


def test_input_checks():
    split = BipartiteSplit(1, 1)
    factors = _exact_factors(CNOT, split)
    with pytest.raises(DimensionMismatchError):
        distill(CNOT, factors, ket("00"))
    scaled = ExtractedFactors(split, factors.s, 2.0 * factors.a_ops, factors.threshold, factors.clusters)
    with pytest.raises(NonOrthonormalError):
        distill(CNOT, scaled, ket("0"))


@pytest.mark.parametrize("split", [BipartiteSplit(1, 1), BipartiteSplit(1, 2)], ids=str)
def test_reconstructed_b_rebuilds_u(split):
    for seed in range(50):
        u = haar(split.dim, 400 + seed)
        factors = _exact_factors(u, split)
        b_ops = [reconstruct_b(u, factors, k) for k in range(factors.rank)]
        assert all(not b.flagged_columns for b in b_ops)
        rebuilt = sum(s * np.kron(a, b.matrix) for s, a, b in zip(factors.s, factors.a_ops, b_ops))
        assert np.abs(rebuilt - u).max() < 1e-6


def test_reconstruct_b_flags_null_columns():
    split = BipartiteSplit(1, 1)
    factors = _exact_factors(SWAP, split)
    # A_0 = sqrt2 |0><0| pairs with B_0 = sqrt2 |0><0|
    b = reconstruct_b(SWAP, factors, 0)
    assert b.flagged_columns == [1]
    assert np.abs(b.matrix - np.sqrt(2) * np.diag([1.0, 0.0])).max() < 1e-8
