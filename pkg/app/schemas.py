from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import CONFIG_SCHEMA_VERSION
from app.types.models import OutputName, PipelineMode

ComplexPair = Tuple[float, float]


def complex_pairs(values) -> List[ComplexPair]:
    flat = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [(float(z.real), float(z.imag)) for z in flat]


class MatrixFile(BaseModel):
    """Square complex matrix, entries as [re, im] pairs in row-major order."""
    dim: int = Field(..., ge=1)
    entries: List[ComplexPair]

    @model_validator(mode="after")
    def check_entry_count(self):
        if len(self.entries) != self.dim * self.dim:
            raise ValueError(f"expected {self.dim * self.dim} entries for dim {self.dim}, got {len(self.entries)}")
        return self

    @classmethod
    def from_matrix(cls, matrix) -> "MatrixFile":
        matrix = np.asarray(matrix, dtype=np.complex128)
        return cls(dim=matrix.shape[0], entries=complex_pairs(matrix))

    def to_matrix(self) -> np.ndarray:
        pairs = np.asarray(self.entries, dtype=float).reshape(self.dim, self.dim, 2)
        return pairs[..., 0] + 1j * pairs[..., 1]


class SpinModelConfig(BaseModel):
    n_qubits: int = Field(..., ge=2)
    edges: List[Tuple[int, int]]
    couplings: Tuple[float, float, float] = (1.0, 1.0, 1.0)


class TimeGrid(BaseModel):
    """Times in units of 1/J, so a unit coupling makes the CSV column J*t."""
    t_start: float = 0.0
    t_end: float
    n_points: int = Field(..., ge=2)

    def values(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)


class PipelineConfig(BaseModel):
    mode: PipelineMode = PipelineMode.ORACLE
    shots: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    threshold: Optional[float] = None

    @model_validator(mode="after")
    def check_shots(self):
        if self.mode == PipelineMode.CHOI_TOMOGRAPHIC and self.shots is None:
            raise ValueError("choi-tomographic pipelines need shots")
        if self.mode in (PipelineMode.ORACLE, PipelineMode.CHOI_EXACT) and self.shots is not None:
            raise ValueError(f"{self.mode.value} pipelines take no shots")
        return self


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    schema_version: int = Field(CONFIG_SCHEMA_VERSION, alias="schema")
    name: Optional[str] = None
    model: SpinModelConfig
    a_qubits: List[int]
    initial_state: str
    time: TimeGrid
    pipeline: PipelineConfig = PipelineConfig()
    outputs: List[OutputName] = []

    @field_validator("schema_version")
    @classmethod
    def check_schema(cls, value: int) -> int:
        if value != CONFIG_SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema {value}, expected {CONFIG_SCHEMA_VERSION}")
        return value

    @model_validator(mode="after")
    def check_subsystems(self):
        n = self.model.n_qubits
        if len(self.initial_state) != n:
            raise ValueError(f"initial state {self.initial_state!r} does not have {n} qubits")
        if not self.a_qubits or 2 * len(self.a_qubits) > n:
            raise ValueError("subsystem A needs between 1 and n_qubits / 2 qubits")
        return self


# --- CLI results ---

class LowRankReport(BaseModel):
    r: int
    error: float
    error_raw: float


class FQTReport(BaseModel):
    site_dims: List[int]
    bound: float
    achieved: float
    achieved_raw: float
    eps_s: float
    eps_sites: List[float]
    bound_holds: bool


class TPDPayload(BaseModel):
    split: str
    rank: int
    s: List[float]
    clusters: List[List[int]]
    S_A: Optional[float] = None
    S_A_norm: Optional[float] = None
    mereology_costs: Tuple[float, float]
    a_ops: List[MatrixFile]
    b_ops: List[MatrixFile]
    low_rank: Optional[LowRankReport] = None
    fqt: Optional[FQTReport] = None


class ErrorReportPayload(BaseModel):
    eps_T: float
    eps_S: List[float]
    eps_D: float
    eps_V: float
    eps_A: List[float]
    eps_B: Optional[List[float]] = None
    matching: List[Tuple[int, int]]
    unmatched_exact: List[int] = []
    unmatched_noisy: List[int] = []
    t_bound: float
    t_bound_holds: bool
    b_bound_holds: Optional[bool] = None


class FactorsPayload(BaseModel):
    split: str
    mode: PipelineMode
    provenance: str
    threshold: float
    shots_per_setting: Optional[int] = None
    seed: Optional[int] = None
    n_settings: int
    noise_estimate: float
    rank: int
    s: List[float]
    clusters: List[List[int]]
    S_A_norm: Optional[float] = None
    a_ops: List[MatrixFile]
    errors: Optional[ErrorReportPayload] = None


class BranchPayload(BaseModel):
    k: int
    probability: float
    overhead: Optional[float] = None
    null_branch: bool
    state: Optional[List[ComplexPair]] = None


class DistillationPayload(BaseModel):
    split: str
    mode: PipelineMode
    state: str
    s: List[float]
    branches: List[BranchPayload]
    residual_prob: float
    total_probability: float


class AnalyticPayload(BaseModel):
    couplings: Tuple[float, float, float]
    t: float
    g: List[ComplexPair]
    s: List[float]
    rho1: MatrixFile
    z: float
    occupation: float
    entropy: float
    entropy_norm: float
    S_A_norm: float
    e1: float
    coherence_1plus: ComplexPair


class DFSPayload(BaseModel):
    split: str
    tol: float
    decomposable: bool
    eigenphases: List[float]
    phi: Optional[List[float]] = None
    psi: Optional[List[float]] = None
    nearest_miss: float
