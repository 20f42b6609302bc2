"""Tests for the propagation of snapshot errors into spectra, factors and the B-side."""

from __future__ import annotations

import numpy as np
import pytest

from app.core.exceptions import DimensionMismatchError
from app.qtpd.error_report import error_report
from app.qtpd.extraction import extract_factors
from app.qtpd.snapshot import ChoiReducedState, choi_reduced_exact, tomographic_snapshot
from app.quantum.random import PERTURBATION_STREAM, random_hermitian, task_rng
from app.types.models import BipartiteSplit

from .helpers import CNOT, haar, ket


def _perturbed(snapshot: ChoiReducedState, strength: float, seed: int) -> ChoiReducedState:
    h = random_hermitian(snapshot.rho.shape[0], task_rng(seed, PERTURBATION_STREAM))
    h -= np.trace(h) / h.shape[0] * np.eye(h.shape[0])
    h /= np.linalg.norm(h)
    return ChoiReducedState(snapshot.rho + strength * h, snapshot.split)


def test_identical_snapshots_have_no_error():
    split = BipartiteSplit(1, 1)
    snapshot = choi_reduced_exact(CNOT, split)
    factors = extract_factors(snapshot)
    report = error_report(snapshot, factors, snapshot, factors, u=CNOT, psi_b=ket("0"))
    assert report.eps_T == 0.0
    assert report.eps_D < 1e-15
    assert np.abs(report.eps_A).max() < 1e-12
    assert np.abs(report.eps_B).max() < 1e-12
    assert report.matching == [(0, 0), (1, 1)]
    assert report.t_bound_holds


@pytest.mark.parametrize("strength", [1e-7, 1e-5, 1e-3])
def test_snapshot_error_bound(strength):
    """eps_T stays below 3 eps + C eps^2 for random perturbations."""
    split = BipartiteSplit(1, 1)
    for seed in range(100):
        u = haar(4, 600 + seed)
        exact = choi_reduced_exact(u, split)
        noisy = _perturbed(exact, strength, seed)
        report = error_report(exact, extract_factors(exact), noisy, extract_factors(noisy, threshold=1e-2))
        assert abs(report.eps_T - strength) < 1e-12
        assert report.t_bound_holds


@pytest.mark.parametrize("strength", [1e-6, 1e-4])
def test_cnot_b_side_bound(strength):
    split = BipartiteSplit(1, 1)
    exact = choi_reduced_exact(CNOT, split)
    exact_factors = extract_factors(exact)
    for seed in range(100):
        noisy = _perturbed(exact, strength, seed)
        report = error_report(
            exact, exact_factors, noisy, extract_factors(noisy, threshold=0.1), u=CNOT, psi_b=ket("0")
        )
        assert len(report.matching) == 2
        assert report.b_bound_holds(split.d_a)


def test_tomographic_report_and_rank_mismatch():
    split = BipartiteSplit(1, 1)
    exact = choi_reduced_exact(CNOT, split)
    noisy = tomographic_snapshot(CNOT, split, 1000, seed=2)
    report = error_report(exact, extract_factors(exact), noisy, extract_factors(noisy, threshold=1e-6))
    assert report.eps_T > 0.0
    assert len(report.matching) == 2
    assert report.unmatched_exact == []
    assert report.t_bound_holds
    assert report.b_bound_holds(split.d_a) is None


def test_split_mismatch_rejected():
    small = choi_reduced_exact(CNOT, BipartiteSplit(1, 1))
    large = choi_reduced_exact(haar(8, 1), BipartiteSplit(1, 2))
    with pytest.raises(DimensionMismatchError):
        error_report(small, extract_factors(small), large, extract_factors(large))
