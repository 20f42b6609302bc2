"""
Minimal pure-state simulator.

A ``StateVector`` carries its amplitudes together with a register layout, an ordered tuple of
named blocks ``(name, n_qubits)``. Qubits are big-endian across the layout: the first block holds
the most significant bits. The Choi layout is ``[A_ref, A_out, B_ref, B_out]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from app.core.config import MAX_QUBITS, NORMALIZATION_TOL, NULL_BRANCH_TOL
from app.core.exceptions import DimensionMismatchError, NotNormalizedError, NumericalError, ValidationError
from app.core.logger import logger
from app.quantum.linalg import as_square, check_hermitian, check_unitary
from app.quantum.paulis import PauliString
from app.types.models import BipartiteSplit

Layout = Tuple[Tuple[str, int], ...]

CHOI_BLOCKS = ("A_ref", "A_out", "B_ref", "B_out")


def choi_layout(split: BipartiteSplit) -> Layout:
    return (("A_ref", split.n_a), ("A_out", split.n_a), ("B_ref", split.n_b), ("B_out", split.n_b))


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    layout: Layout

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.n_qubits > MAX_QUBITS:
            raise ValidationError("state exceeds the simulator width", {"n_qubits": self.n_qubits})
        if amps.shape[0] != 2 ** self.n_qubits:
            raise DimensionMismatchError(
                "amplitude count does not match the layout",
                {"length": amps.shape[0], "n_qubits": self.n_qubits},
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise NotNormalizedError("state vector is not normalized", {"norm": float(norm)})
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return sum(n for _, n in self.layout)

    @property
    def block_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.layout)

    def block_dims(self) -> list:
        return [2 ** n for _, n in self.layout]

    def block_index(self, name: str) -> int:
        try:
            return self.block_names.index(name)
        except ValueError:
            raise ValidationError(f"Unknown register block {name!r}", {"layout": self.block_names})


def from_amplitudes(amplitudes, layout: Sequence[Tuple[str, int]] | None = None, name: str = "q") -> StateVector:
    amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if layout is None:
        n = int(round(np.log2(amps.shape[0])))
        layout = ((name, n),)
    return StateVector(amps, tuple(layout))


def bell_state(n: int) -> StateVector:
    """(1/sqrt(d)) sum_i |i>|i> on layout (ref, out)."""
    if n < 1:
        raise ValidationError("bell_state needs n >= 1", {"n": n})
    d = 2 ** n
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return StateVector(amps, (("ref", n), ("out", n)))


def choi_state(u, split: BipartiteSplit) -> StateVector:
    """(1 (x) U (x) 1)|Phi+_A>|Phi+_B> on the Choi layout."""
    u = check_unitary(as_square(u, "u"))
    if u.shape[0] != split.dim:
        raise DimensionMismatchError("u does not act on the split", {"dim": u.shape[0], "split": str(split)})
    d_a, d_b = split.d_a, split.d_b
    # psi[a_ref, a_out, b_ref, b_out] = U[(a_out, b_out), (a_ref, b_ref)] / sqrt(d_A d_B)
    tensor = u.reshape(d_a, d_b, d_a, d_b).transpose(2, 0, 3, 1) / np.sqrt(d_a * d_b)
    return StateVector(tensor.reshape(-1), choi_layout(split))


def _block_axes(state: StateVector, blocks: Sequence[str]) -> list:
    axes = [state.block_index(b) for b in blocks]
    if len(set(axes)) != len(axes):
        raise ValidationError("register blocks listed twice", {"blocks": list(blocks)})
    return axes


def apply_block_unitary(state: StateVector, u, blocks: Sequence[str]) -> StateVector:
    """Apply ``u`` to the named blocks, taken in the listed order as one register."""
    u = as_square(u, "u")
    dims = state.block_dims()
    axes = _block_axes(state, blocks)
    d_target = int(np.prod([dims[a] for a in axes]))
    if u.shape[0] != d_target:
        raise DimensionMismatchError(
            "unitary does not match the named blocks", {"dim": u.shape[0], "blocks": list(blocks)}
        )
    rest = [a for a in range(len(dims)) if a not in axes]
    tensor = state.amplitudes.reshape(dims).transpose(axes + rest)
    flat = tensor.reshape(d_target, -1)
    flat = u @ flat
    tensor = flat.reshape([dims[a] for a in axes + rest])
    tensor = tensor.transpose(np.argsort(axes + rest))
    amps = tensor.reshape(-1)
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        logger.error(f"Block unitary changed the state norm to {norm:.9f}")
        raise NumericalError("block operator is not norm preserving", {"norm": norm, "blocks": list(blocks)})
    return StateVector(amps / norm, state.layout)


def contract_blocks(state: StateVector, bra, blocks: Sequence[str]) -> np.ndarray:
    """(<bra| (x) 1) |state>; returns unnormalized amplitudes on the remaining blocks (layout order)."""
    dims = state.block_dims()
    axes = _block_axes(state, blocks)
    bra = np.asarray(bra, dtype=np.complex128).reshape(-1)
    d_target = int(np.prod([dims[a] for a in axes]))
    if bra.shape[0] != d_target:
        raise DimensionMismatchError("bra does not match the named blocks", {"length": bra.shape[0]})
    rest = [a for a in range(len(dims)) if a not in axes]
    tensor = state.amplitudes.reshape(dims).transpose(axes + rest).reshape(d_target, -1)
    return bra.conj() @ tensor


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    probability: float
    post_state: Optional[StateVector]

    @property
    def null_branch(self) -> bool:
        return self.post_state is None


def measure_projector(state: StateVector, p, blocks: Sequence[str] | None = None) -> MeasurementOutcome:
    """Projective outcome of P on ``blocks`` (all blocks when omitted)."""
    p = check_hermitian(p, 1e-9)
    if np.linalg.norm(p @ p - p) > 1e-9 * max(1.0, np.linalg.norm(p)):
        raise ValidationError("measurement operator is not idempotent")
    blocks = list(blocks) if blocks is not None else list(state.block_names)
    dims = state.block_dims()
    axes = _block_axes(state, blocks)
    d_target = int(np.prod([dims[a] for a in axes]))
    if p.shape[0] != d_target:
        raise DimensionMismatchError("projector does not match the named blocks", {"dim": p.shape[0]})
    rest = [a for a in range(len(dims)) if a not in axes]
    tensor = state.amplitudes.reshape(dims).transpose(axes + rest).reshape(d_target, -1)
    projected = p @ tensor
    probability = float(np.vdot(projected, projected).real)
    if probability < NULL_BRANCH_TOL:
        logger.debug(f"Null measurement branch (p = {probability:.3e})")
        return MeasurementOutcome(probability, None)
    tensor = projected.reshape([dims[a] for a in axes + rest]).transpose(np.argsort(axes + rest))
    amps = tensor.reshape(-1) / np.sqrt(probability)
    return MeasurementOutcome(probability, StateVector(amps / np.linalg.norm(amps), state.layout))


def reduced_density_matrix(state: StateVector, blocks: Sequence[str]) -> np.ndarray:
    """Marginal on ``blocks``, returned in layout order."""
    axes = sorted(_block_axes(state, blocks))
    dims = state.block_dims()
    rest = [a for a in range(len(dims)) if a not in axes]
    d_keep = int(np.prod([dims[a] for a in axes]))
    m = state.amplitudes.reshape(dims).transpose(axes + rest).reshape(d_keep, -1)
    return m @ m.conj().T


def pauli_expectation(rho, p: PauliString) -> float:
    rho = as_square(rho, "rho")
    if rho.shape[0] != 2 ** p.n_qubits:
        raise DimensionMismatchError("Pauli string width does not match rho", {"pauli": str(p)})
    return float(np.clip(np.trace(p.matrix() @ rho).real, -1.0, 1.0))


def sampled_mean(exact: float, shots: int, rng: np.random.Generator) -> float:
    """Mean of ``shots`` +-1 outcomes with P(+1) = (1 + exact)/2, drawn as one binomial."""
    if shots < 1:
        raise ValidationError("shots must be >= 1", {"shots": shots})
    prob = min(max((1.0 + exact) / 2.0, 0.0), 1.0)
    ups = rng.binomial(shots, prob)
    return 2.0 * ups / shots - 1.0


def sampled_expectation(rho, p: PauliString, shots: int, seed: int) -> float:
    return sampled_mean(pauli_expectation(rho, p), shots, np.random.default_rng(seed))


def exact_evolution(h, t: float) -> np.ndarray:
    """e^{-iHt} via eigendecomposition."""
    h = check_hermitian(h)
    values, vectors = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (vectors * np.exp(-1j * values * t)) @ vectors.conj().T


class Propagator:
    """Caches the eigendecomposition of H for repeated evaluation of e^{-iHt}."""

    def __init__(self, h):
        h = check_hermitian(h)
        self.values, self.vectors = np.linalg.eigh(0.5 * (h + h.conj().T))

    def __call__(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.values * t)) @ self.vectors.conj().T
