"""
Command-line surface. Results go to stdout (JSON documents, CSV for sweeps) or to ``--out``;
logs go to stderr. Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

import argparse
import sys
import uuid
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel
from pydantic import ValidationError as SchemaError

from app.__version__ import __version__
from app.analysis.decoherence_free import decoherence_free_check
from app.analysis.nonlocality import mereology_costs, nonlocality, nonlocality_normalized
from app.core.config import DEFAULT_SEED
from app.core.exceptions import ConfigError, NotNormalizedError, QTPDError, ValidationError
from app.core.logger import configure_run_logger, logger
from app.experiments.heisenberg import analytic_two_qubit
from app.experiments.io import load_experiment_config, read_matrix_file
from app.experiments.states import parse_state
from app.experiments.sweep import build_snapshot, coefficients, format_csv, run_sweep
from app.qtpd.distillation import distill
from app.qtpd.error_report import error_report
from app.qtpd.extraction import extract_factors
from app.qtpd.snapshot import choi_reduced_exact
from app.schemas import (
    AnalyticPayload,
    BranchPayload,
    DFSPayload,
    DistillationPayload,
    ErrorReportPayload,
    FactorsPayload,
    FQTReport,
    LowRankReport,
    MatrixFile,
    PipelineConfig,
    TPDPayload,
    complex_pairs,
)
from app.tpd.classical import classical_tpd, low_rank_error
from app.tpd.multipartite import fqt_approximation
from app.types.decoders import decode_output_names, decode_pipeline_mode, decode_split
from app.types.models import ClusterGauge, PipelineMode


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with code 1 like every other validation failure."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _pipeline(mode: PipelineMode, shots: Optional[int], seed: Optional[int], threshold: Optional[float] = None) -> PipelineConfig:
    try:
        return PipelineConfig(mode=mode, shots=shots, seed=seed, threshold=threshold)
    except SchemaError as e:
        raise ConfigError("Invalid pipeline options", {"errors": [err["msg"] for err in e.errors()]})


def _quantum_mode(value: Optional[str]) -> PipelineMode:
    mode = decode_pipeline_mode(value or PipelineMode.CHOI_EXACT.value)
    if mode == PipelineMode.ORACLE:
        raise ValidationError("this command needs a quantum pipeline", {"mode": mode.value})
    return mode


def _matrices(ops) -> List[MatrixFile]:
    return [MatrixFile.from_matrix(op) for op in ops]


def run_tpd(args) -> BaseModel:
    u = read_matrix_file(args.matrix)
    split = decode_split(args.split)
    tpd = classical_tpd(u, split, gauge=ClusterGauge(args.gauge))
    try:
        S_A = nonlocality(tpd.s)
        S_A_norm = nonlocality_normalized(tpd.s, split.d_a)
    except NotNormalizedError:
        logger.warning("Input is not unitary; sum s_k^2 != 1, reporting no non-locality")
        S_A = S_A_norm = None

    low_rank = None
    if args.rank is not None:
        error = low_rank_error(tpd, args.rank)
        low_rank = LowRankReport(r=args.rank, error=error, error_raw=error * np.sqrt(split.dim))

    fqt = None
    if args.nearest_unitary_sites:
        site_dims = [2] * split.n_qubits
        result = fqt_approximation(u, site_dims)
        fqt = FQTReport(
            site_dims=site_dims,
            bound=result.bound,
            achieved=result.achieved,
            achieved_raw=result.achieved_raw,
            eps_s=result.eps_s,
            eps_sites=list(result.eps_sites),
            bound_holds=result.bound_holds,
        )

    return TPDPayload(
        split=str(split),
        rank=tpd.rank,
        s=tpd.s.tolist(),
        clusters=[list(c) for c in tpd.clusters],
        S_A=S_A,
        S_A_norm=S_A_norm,
        mereology_costs=mereology_costs(tpd.s),
        a_ops=_matrices(tpd.a_ops),
        b_ops=_matrices(tpd.b_ops),
        low_rank=low_rank,
        fqt=fqt,
    )


def run_qtpd(args) -> BaseModel:
    u = read_matrix_file(args.matrix)
    split = decode_split(args.split)
    mode = _quantum_mode(args.mode)
    pipeline = _pipeline(mode, args.shots, args.seed, args.threshold)
    seed = DEFAULT_SEED if args.seed is None else args.seed
    snapshot = build_snapshot(u, split, pipeline, seed)
    factors = extract_factors(snapshot, args.threshold, ClusterGauge(args.gauge))

    errors = None
    if args.report_errors:
        exact = choi_reduced_exact(u, split)
        report = error_report(exact, extract_factors(exact), snapshot, factors, u=u)
        errors = ErrorReportPayload(
            eps_T=report.eps_T,
            eps_S=report.eps_S.tolist(),
            eps_D=report.eps_D,
            eps_V=report.eps_V,
            eps_A=report.eps_A.tolist(),
            eps_B=None if report.eps_B is None else report.eps_B.tolist(),
            matching=report.matching,
            unmatched_exact=report.unmatched_exact,
            unmatched_noisy=report.unmatched_noisy,
            t_bound=report.t_bound,
            t_bound_holds=report.t_bound_holds,
            b_bound_holds=report.b_bound_holds(split.d_a),
        )

    return FactorsPayload(
        split=str(split),
        mode=mode,
        provenance=factors.provenance.value,
        threshold=factors.threshold,
        shots_per_setting=snapshot.shots_per_setting,
        seed=snapshot.seed,
        n_settings=snapshot.n_settings,
        noise_estimate=snapshot.noise_estimate,
        rank=factors.rank,
        s=factors.s.tolist(),
        clusters=[list(c) for c in factors.clusters],
        S_A_norm=nonlocality_normalized(coefficients(factors), split.d_a),
        a_ops=_matrices(factors.a_ops),
        errors=errors,
    )


def run_distill(args) -> BaseModel:
    u = read_matrix_file(args.matrix)
    split = decode_split(args.split)
    mode = _quantum_mode(args.mode)
    pipeline = _pipeline(mode, args.shots, args.seed)
    factors = extract_factors(build_snapshot(u, split, pipeline, args.seed))
    result = distill(u, factors, parse_state(args.state), args.k or None)
    branches = [
        BranchPayload(
            k=b.k,
            probability=b.probability,
            overhead=None if b.null_branch else b.overhead,
            null_branch=b.null_branch,
            state=None if b.null_branch else complex_pairs(b.state.amplitudes),
        )
        for b in result.branches
    ]
    return DistillationPayload(
        split=str(split),
        mode=mode,
        state=args.state,
        s=factors.s.tolist(),
        branches=branches,
        residual_prob=result.residual_prob,
        total_probability=result.total_probability,
    )


def run_sweep_command(args) -> str:
    config = load_experiment_config(args.config)
    if args.outputs is not None:
        names = [name.strip() for name in args.outputs.split(",") if name.strip()]
        config = config.model_copy(update={"outputs": decode_output_names(names)})
    rows = run_sweep(config, args.workers)
    return format_csv(rows, config.outputs)


def _couplings(value: str):
    parts = [p.strip() for p in value.split(",")]
    try:
        numbers = [float(p) for p in parts]
    except ValueError:
        raise ValidationError(f"--J must be one number or 'Jx,Jy,Jz', got {value!r}")
    if len(numbers) == 1:
        return numbers * 3
    if len(numbers) != 3:
        raise ValidationError(f"--J must be one number or 'Jx,Jy,Jz', got {value!r}")
    return numbers


def run_analytic(args) -> BaseModel:
    j_x, j_y, j_z = _couplings(args.J)
    result = analytic_two_qubit(j_x, j_y, j_z, args.t)
    return AnalyticPayload(
        couplings=(j_x, j_y, j_z),
        t=args.t,
        g=complex_pairs(result.g),
        s=result.s.tolist(),
        rho1=MatrixFile.from_matrix(result.rho1),
        z=result.z,
        occupation=result.occupation,
        entropy=result.entropy,
        entropy_norm=result.entropy_norm,
        S_A_norm=result.S_A_norm,
        e1=result.e1,
        coherence_1plus=(result.coherence_1plus.real, result.coherence_1plus.imag),
    )


def run_dfs_check(args) -> BaseModel:
    u = read_matrix_file(args.matrix)
    split = decode_split(args.split)
    result = decoherence_free_check(u, split, args.tol)
    return DFSPayload(
        split=str(split),
        tol=args.tol,
        decomposable=result.decomposable,
        eigenphases=result.eigenphases.tolist(),
        phi=None if result.phi is None else result.phi.tolist(),
        psi=None if result.psi is None else result.psi.tolist(),
        nearest_miss=result.nearest_miss,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qtpd", description="Tensor product decomposition lab")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, split=True):
        if split:
            p.add_argument("--split", required=True, help="qubit split 'nA,nB' with nA <= nB")
        p.add_argument("--out", help="write the result here instead of stdout")

    gauges = [g.value for g in ClusterGauge]

    p = sub.add_parser("tpd", help="classical decomposition of a matrix file")
    p.add_argument("matrix")
    add_common(p)
    p.add_argument("--rank", type=int, help="truncate to this rank and report the low-rank error")
    p.add_argument("--nearest-unitary-sites", action="store_true",
                   help="fast-quantum-transform report over single-qubit sites")
    p.add_argument("--gauge", choices=gauges, default=ClusterGauge.MATRIX_UNITS.value)
    p.set_defaults(handler=run_tpd)

    p = sub.add_parser("qtpd", help="A-side factors from a simulated snapshot")
    p.add_argument("matrix")
    add_common(p)
    p.add_argument("--mode", default=PipelineMode.CHOI_EXACT.value,
                   help="choi-exact | choi-tomographic | sequential")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--gauge", choices=gauges, default=ClusterGauge.MATRIX_UNITS.value)
    p.add_argument("--report-errors", action="store_true", help="compare against the exact pipeline")
    p.set_defaults(handler=run_qtpd)

    p = sub.add_parser("distill", help="B-distillation on a product input of B")
    p.add_argument("matrix")
    add_common(p)
    p.add_argument("--state", required=True, help="state of B over 0 1 + -, e.g. '0' or '+0'")
    p.add_argument("--k", type=int, nargs="*", help="branches to measure (default: all)")
    p.add_argument("--mode", default=PipelineMode.CHOI_EXACT.value, help="pipeline that supplies the factors")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=run_distill)

    p = sub.add_parser("sweep", help="time sweep from a JSON experiment config, CSV output")
    p.add_argument("config")
    add_common(p, split=False)
    p.add_argument("--workers", type=int, help="threads for sweep rows")
    p.add_argument("--outputs", help="comma-separated optional columns (e_A, e_m); replaces the config list")
    p.set_defaults(handler=run_sweep_command)

    p = sub.add_parser("analytic2q", help="closed forms of the two-qubit Heisenberg model")
    p.add_argument("--J", required=True, help="J or 'Jx,Jy,Jz'")
    p.add_argument("--t", type=float, required=True)
    add_common(p, split=False)
    p.set_defaults(handler=run_analytic)

    p = sub.add_parser("dfs-check", help="decoherence-free split check by eigenphase search")
    p.add_argument("matrix")
    add_common(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(handler=run_dfs_check)

    return parser


def _emit(result, out: Optional[str]) -> None:
    text = result if isinstance(result, str) else result.model_dump_json(indent=2) + "\n"
    if out:
        Path(out).write_text(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_run_logger(str(uuid.uuid4()), command=args.command, seed=getattr(args, "seed", None))
    logger.info(f"Running {args.command}")
    try:
        _emit(args.handler(args), args.out)
    except QTPDError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure in {args.command}: {e}")
        return 2
    return 0
