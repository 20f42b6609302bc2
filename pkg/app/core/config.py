import os

# loguru's logger is a process-wide singleton; importing it here (instead of
# app.core.logger) keeps config importable before the sinks are configured.
from loguru import logger

# --- Configuration ---

def get_int_env(var_name: str, default: int) -> int:
    value = os.environ.get(var_name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        logger.error(f"{var_name} must be an integer, got {value!r}")
        raise ValueError(f"{var_name} must be an integer, got {value!r}")


def get_float_env(var_name: str, default: float) -> float:
    value = os.environ.get(var_name)
    if value is None or value == "":
        return default
    try:
        return float(value)
    except ValueError:
        logger.error(f"{var_name} must be a number, got {value!r}")
        raise ValueError(f"{var_name} must be a number, got {value!r}")


# Environment
ENVIRONMENT = os.environ.get("ENVIRONMENT", "production")
PROD_LOG_LEVEL = os.environ.get("PROD_LOG_LEVEL", "WARNING")

# Reproducibility
DEFAULT_SEED = get_int_env("QTPD_SEED", 1234)

# Numerical tolerances
RANK_TOL = get_float_env("QTPD_RANK_TOL", 1e-10)
EIGEN_THRESHOLD = get_float_env("QTPD_EIGEN_THRESHOLD", 1e-14)
CLUSTER_GAP = get_float_env("QTPD_CLUSTER_GAP", 1e-8)
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-9
NORMALIZATION_TOL = 1e-6
NULL_BRANCH_TOL = get_float_env("QTPD_NULL_BRANCH_TOL", 1e-14)
POLAR_SIGMA_MIN = 1e-10
RECONSTRUCTION_TOL = get_float_env("QTPD_RECONSTRUCTION_TOL", 1e-7)
BOUND_SLACK = 1e-9

# Tomography
THRESHOLD_MULTIPLIER = get_float_env("QTPD_THRESHOLD_MULTIPLIER", 3.0)

# Error report: C of the C·eps² allowance
BOUND_CONSTANT = get_float_env("QTPD_BOUND_CONSTANT", 10.0)

# Monte-Carlo e_m oracle
MC_BATCH = get_int_env("QTPD_MC_BATCH", 10000)

# Sweeps
SWEEP_WORKERS = get_int_env("QTPD_SWEEP_WORKERS", 1)

# Simulator and exact-search limits
MAX_QUBITS = get_int_env("QTPD_MAX_QUBITS", 14)
MAX_MODEL_QUBITS = 12
MAX_DFS_DIMENSION = 64

# Result files
CSV_SIGNIFICANT_DIGITS = 12
CONFIG_SCHEMA_VERSION = 1
