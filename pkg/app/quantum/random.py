"""
Seeded randomness.

Every seeded operation derives an independent stream from the root seed with
``SeedSequence(root_seed, spawn_key=(stream, *indices))``. Stream ids are fixed below so
results stay reproducible when unrelated code starts drawing numbers.
"""

from __future__ import annotations

import numpy as np

TOMOGRAPHY_STREAM = 1
SEQUENTIAL_STREAM = 2
MONTE_CARLO_STREAM = 3
PERTURBATION_STREAM = 4


def task_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def crandn(size, rng: np.random.Generator) -> np.ndarray:
    """Standard complex normal samples."""
    # 1/sqrt(2) keeps E|z|^2 = 1
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix with phase fix."""
    q, r = np.linalg.qr(crandn((d, d), rng))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = crandn(d, rng)
    return psi / np.linalg.norm(psi)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = crandn((d, d), rng)
    return 0.5 * (g + g.conj().T)
