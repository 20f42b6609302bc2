"""
Closed forms for the two-qubit XYZ Heisenberg model.

U(t) = e^{-iHt} with H = -(J_x XX + J_y YY + J_z ZZ) factorizes into commuting exponentials, so
U = g_0 1 + g_x XX + g_y YY + g_z ZZ and the Pauli pairs are already its decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.analysis.nonlocality import spectral_entropy
from app.core.config import RANK_TOL
from app.experiments.models import SpinModel
from app.quantum.paulis import I2, X, Y, Z

LOG4 = np.log(4.0)


def two_qubit_model(j_x: float, j_y: float, j_z: float) -> SpinModel:
    return SpinModel(2, ((0, 1),), (j_x, j_y, j_z))


@dataclass(frozen=True, eq=False)
class TwoQubitAnalytic:
    g: np.ndarray
    s: np.ndarray
    rho1: np.ndarray
    z: float
    occupation: float
    entropy: float
    S1: float
    S1_swap: float
    e1: float
    coherence_1plus: complex
    rho1_plus: np.ndarray

    @property
    def S_A_norm(self) -> float:
        return self.S1 / LOG4

    @property
    def entropy_norm(self) -> float:
        return self.entropy / np.log(2.0)

    def unitary(self) -> np.ndarray:
        g_0, g_x, g_y, g_z = self.g
        return g_0 * np.kron(I2, I2) + g_x * np.kron(X, X) + g_y * np.kron(Y, Y) + g_z * np.kron(Z, Z)


def analytic_two_qubit(j_x: float, j_y: float, j_z: float, t: float) -> TwoQubitAnalytic:
    """Coefficients, qubit-1 dynamics and entangling power of the two-qubit propagator at time t.

    ``rho1`` is the state of qubit 1 for the input |10>, ``rho1_plus`` for |1+>.
    """
    c_x, s_x = np.cos(j_x * t), np.sin(j_x * t)
    c_y, s_y = np.cos(j_y * t), np.sin(j_y * t)
    c_z, s_z = np.cos(j_z * t), np.sin(j_z * t)
    g = np.array(
        [
            c_x * c_y * c_z + 1j * s_x * s_y * s_z,
            1j * s_x * c_y * c_z + c_x * s_y * s_z,
            1j * s_y * c_x * c_z + c_y * s_x * s_z,
            1j * s_z * c_x * c_y + c_z * s_x * s_y,
        ]
    )
    magnitudes = np.sort(np.abs(g))[::-1]
    s = magnitudes[magnitudes > RANK_TOL]

    stay = np.cos((j_x + j_y) * t) ** 2
    flip = np.sin((j_x + j_y) * t) ** 2
    rho1 = np.diag([flip, stay]).astype(np.complex128)
    z = float(flip - stay)
    entropy = spectral_entropy(np.array([flip, stay]))

    S1 = spectral_entropy(np.abs(g) ** 2)
    g_0, g_x, g_y, g_z = g
    # U . SWAP = sum_R c_R / 2 R (x) R
    swapped = np.array(
        [
            g_0 + g_x + g_y + g_z,
            g_0 + g_x - g_y - g_z,
            g_0 - g_x + g_y - g_z,
            g_0 - g_x - g_y + g_z,
        ]
    )
    S1_swap = spectral_entropy(np.abs(swapped) ** 2 / 4.0)
    e1 = (S1 + S1_swap) / LOG4 - 1.0

    coherence = complex(g_0 * np.conj(g_x) + g_z * np.conj(g_y))
    rho1_plus = np.array(
        [
            [abs(g_x) ** 2 + abs(g_y) ** 2, np.conj(coherence)],
            [coherence, abs(g_0) ** 2 + abs(g_z) ** 2],
        ],
        dtype=np.complex128,
    )
    return TwoQubitAnalytic(
        g=g,
        s=s,
        rho1=rho1,
        z=z,
        occupation=float(stay),
        entropy=entropy,
        S1=S1,
        S1_swap=S1_swap,
        e1=float(e1),
        coherence_1plus=coherence,
        rho1_plus=rho1_plus,
    )
