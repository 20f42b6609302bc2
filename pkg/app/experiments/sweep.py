"""
Time sweeps of a spin model: at every grid point U(t) is decomposed by the configured pipeline
and the non-locality, the surrogate dynamics of A and the requested entangling powers are
recorded. Rows are independent; a failing row carries its error and the sweep goes on.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from app.analysis.entangling import entangling_power_mean, entangling_power_swap
from app.analysis.nonlocality import nonlocality_normalized, observables
from app.analysis.surrogate import direct_reduced_state, evolve, open_surrogate
from app.core.config import CSV_SIGNIFICANT_DIGITS, DEFAULT_SEED, SWEEP_WORKERS
from app.core.exceptions import QTPDError, ValidationError
from app.core.logger import logger
from app.experiments.models import SpinModel, build_hamiltonian, permute_operator, relabeling
from app.experiments.states import qubit_states
from app.qtpd.distillation import distill, reconstruct_b
from app.qtpd.extraction import ExtractedFactors, extract_factors
from app.qtpd.snapshot import ChoiReducedState, choi_reduced_exact, sequential_snapshot, tomographic_snapshot
from app.quantum.linalg import frobenius, kron_all
from app.quantum.statevector import Propagator
from app.schemas import ExperimentConfig, PipelineConfig
from app.tpd.classical import TensorProductDecomposition, classical_tpd
from app.types.models import BipartiteSplit, OutputName, PipelineMode, Provenance

BASE_COLUMNS = ("t", "S_A_norm", "occupation", "S_state_norm")
SAMPLED = (Provenance.TOMOGRAPHIC, Provenance.SEQUENTIAL_SAMPLED)


@dataclass(frozen=True)
class SweepRow:
    t: float
    S_A_norm: Optional[float] = None
    occupation: Optional[float] = None
    S_state_norm: Optional[float] = None
    e_A: Optional[float] = None
    e_m: Optional[float] = None
    surrogate_deviation: Optional[float] = None
    error: Optional[str] = None


@dataclass(frozen=True, eq=False)
class PreparedExperiment:
    """The model relabeled so that subsystem A holds the leading qubits."""
    config: ExperimentConfig
    split: BipartiteSplit
    perm: List[int]
    propagator: Propagator
    psi_a: np.ndarray
    psi_b: np.ndarray


def prepare_experiment(config: ExperimentConfig) -> PreparedExperiment:
    n = config.model.n_qubits
    model = SpinModel(n, tuple(config.model.edges), tuple(config.model.couplings))
    perm = relabeling(config.a_qubits, n)
    h = permute_operator(build_hamiltonian(model), perm)

    # qubit q of the initial state sits at position perm[q] after relabeling
    states = qubit_states(config.initial_state)
    relabeled = [None] * n
    for q, vector in enumerate(states):
        relabeled[perm[q]] = vector
    n_a = len(config.a_qubits)
    split = BipartiteSplit(n_a, n - n_a)
    if perm != list(range(n)):
        logger.info(f"Relabeled qubits {perm} to bring A = {sorted(config.a_qubits)} to the front")
    return PreparedExperiment(
        config=config,
        split=split,
        perm=perm,
        propagator=Propagator(h),
        psi_a=kron_all(relabeled[:n_a]).reshape(-1),
        psi_b=kron_all(relabeled[n_a:]).reshape(-1),
    )


def _seed(sequence: np.random.SeedSequence) -> int:
    return int(sequence.generate_state(1)[0])


def build_snapshot(u, split: BipartiteSplit, pipeline: PipelineConfig, seed: Optional[int] = None) -> ChoiReducedState:
    mode = pipeline.mode
    if mode == PipelineMode.CHOI_EXACT:
        return choi_reduced_exact(u, split)
    if mode == PipelineMode.CHOI_TOMOGRAPHIC:
        return tomographic_snapshot(u, split, pipeline.shots, DEFAULT_SEED if seed is None else seed)
    if mode == PipelineMode.SEQUENTIAL:
        if pipeline.shots is None:
            return sequential_snapshot(u, split)
        return sequential_snapshot(u, split, pipeline.shots, DEFAULT_SEED if seed is None else seed)
    raise ValidationError("the oracle pipeline builds no snapshot", {"mode": mode.value})


def decompose(u, split: BipartiteSplit, pipeline: PipelineConfig, seed: Optional[int] = None):
    """Oracle decomposition or A-side factors extracted from the pipeline's snapshot."""
    if pipeline.mode == PipelineMode.ORACLE:
        return classical_tpd(u, split)
    return extract_factors(build_snapshot(u, split, pipeline, seed), pipeline.threshold)


def coefficients(decomposition) -> np.ndarray:
    """s of a decomposition, renormalized to sum s_k^2 = 1 for sampled snapshots."""
    s = np.asarray(decomposition.s, dtype=float)
    if isinstance(decomposition, ExtractedFactors) and decomposition.provenance in SAMPLED:
        return s / np.linalg.norm(s)
    return s


def _row(prepared: PreparedExperiment, t: float, sequence: np.random.SeedSequence) -> SweepRow:
    config = prepared.config
    split = prepared.split
    pipeline = config.pipeline
    try:
        u = prepared.propagator(t)
        decomposition = decompose(u, split, pipeline, _seed(sequence))
        S_A_norm = nonlocality_normalized(coefficients(decomposition), split.d_a)

        if isinstance(decomposition, TensorProductDecomposition):
            surrogate = open_surrogate(decomposition.s, decomposition.a_ops, decomposition.b_ops, prepared.psi_b)
        else:
            branches = distill(u, decomposition, prepared.psi_b)
            surrogate = open_surrogate(decomposition.s, decomposition.a_ops, branches)
        sigma = evolve(surrogate, prepared.psi_a)
        deviation = frobenius(sigma - direct_reduced_state(u, split, prepared.psi_a, prepared.psi_b))
        occupation, S_state_norm = observables(sigma, split.n_a)

        e_A = e_m = None
        if OutputName.E_A in config.outputs:
            schmidt = None
            if pipeline.mode != PipelineMode.ORACLE:
                def schmidt(op):
                    return coefficients(decompose(op, split, pipeline, _seed(sequence.spawn(1)[0])))
            e_A = entangling_power_swap(u, split, schmidt)
        if OutputName.E_M in config.outputs:
            if isinstance(decomposition, TensorProductDecomposition):
                e_m = entangling_power_mean(decomposition)
            else:
                b_ops = np.stack([reconstruct_b(u, decomposition, k).matrix for k in range(decomposition.rank)])
                e_m = entangling_power_mean(decomposition, b_ops=b_ops)
    except (QTPDError, np.linalg.LinAlgError) as e:
        logger.warning(f"Sweep row at t={t:.6g} failed: {e}")
        return SweepRow(t=float(t), error=str(e))

    logger.debug(f"t={t:.6g}: S_A_norm={S_A_norm:.6f}, occupation={occupation:.6f}")
    return SweepRow(
        t=float(t),
        S_A_norm=float(S_A_norm),
        occupation=float(occupation),
        S_state_norm=float(S_state_norm),
        e_A=e_A,
        e_m=e_m,
        surrogate_deviation=float(deviation),
    )


def run_sweep(config: ExperimentConfig, workers: Optional[int] = None) -> List[SweepRow]:
    """Evaluate every grid point; rows come back in grid order whatever the worker count.

    Row i draws its randomness from the i-th child of ``SeedSequence(seed)``.
    """
    prepared = prepare_experiment(config)
    times = config.time.values()
    root = config.pipeline.seed if config.pipeline.seed is not None else DEFAULT_SEED
    sequences = np.random.SeedSequence(root).spawn(len(times))
    workers = max(1, workers or SWEEP_WORKERS)
    logger.info(
        f"Sweep {config.name or ''} over {len(times)} points on split {prepared.split}, "
        f"{config.pipeline.mode.value} pipeline, {workers} worker(s)"
    )

    if workers == 1:
        rows = [_row(prepared, t, seq) for t, seq in zip(times, sequences)]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(lambda args: _row(prepared, *args), zip(times, sequences)))

    failures = sum(1 for row in rows if row.error)
    if failures:
        logger.warning(f"{failures} of {len(rows)} sweep rows failed")
    logger.info(f"Sweep finished: {len(rows)} rows")
    return rows


def sweep_columns(rows: Sequence[SweepRow], outputs: Sequence[OutputName]) -> List[str]:
    columns = list(BASE_COLUMNS)
    columns += [name.value for name in (OutputName.E_A, OutputName.E_M) if name in outputs]
    if any(row.error for row in rows):
        columns.append("error")
    return columns


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"


def format_csv(rows: Sequence[SweepRow], outputs: Sequence[OutputName]) -> str:
    columns = sweep_columns(rows, outputs)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(getattr(row, column)) for column in columns])
    return buffer.getvalue()


def write_csv(path, rows: Sequence[SweepRow], outputs: Sequence[OutputName]) -> None:
    Path(path).write_text(format_csv(rows, outputs))
