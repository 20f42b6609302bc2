from dataclasses import dataclass
from enum import Enum

from app.core.exceptions import DimensionMismatchError


class PipelineMode(str, Enum):
    ORACLE = "oracle"
    CHOI_EXACT = "choi-exact"
    CHOI_TOMOGRAPHIC = "choi-tomographic"
    SEQUENTIAL = "sequential"


class Provenance(str, Enum):
    EXACT = "exact"
    TOMOGRAPHIC = "tomographic"
    SEQUENTIAL_EXACT = "sequential-exact"
    SEQUENTIAL_SAMPLED = "sequential-sampled"


class ClusterGauge(str, Enum):
    """Reference basis used to fix factors inside a degenerate s-cluster."""
    MATRIX_UNITS = "matrix-units"
    PAULI = "pauli"


class OutputName(str, Enum):
    E_A = "e_A"
    E_M = "e_m"


@dataclass(frozen=True)
class BipartiteSplit:
    """Qubit split A|B with the convention d_A <= d_B."""
    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise DimensionMismatchError(
                "Both subsystems need at least one qubit", {"n_a": self.n_a, "n_b": self.n_b}
            )
        if self.n_a > self.n_b:
            raise DimensionMismatchError(
                "Subsystem A must not be larger than B (d_A <= d_B)",
                {"n_a": self.n_a, "n_b": self.n_b},
            )

    @property
    def d_a(self) -> int:
        return 2 ** self.n_a

    @property
    def d_b(self) -> int:
        return 2 ** self.n_b

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b

    @property
    def n_qubits(self) -> int:
        return self.n_a + self.n_b

    def __str__(self):
        return f"{self.n_a}+{self.n_b}"
