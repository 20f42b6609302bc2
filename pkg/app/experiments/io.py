from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from pydantic import ValidationError as SchemaError

from app.core.exceptions import ConfigError
from app.core.logger import logger
from app.schemas import ExperimentConfig, MatrixFile


def _read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"File not found: {path}")
    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in {path}: {e}")
        raise ConfigError(f"Invalid JSON in {path}", {"error": str(e)})


def read_matrix_file(path) -> np.ndarray:
    try:
        document = MatrixFile.model_validate(_read_json(path))
    except SchemaError as e:
        logger.error(f"Malformed matrix file {path}: {e.error_count()} errors")
        raise ConfigError(f"Malformed matrix file {path}", {"errors": e.errors(include_url=False)})
    return document.to_matrix()


def write_matrix_file(path, matrix) -> None:
    Path(path).write_text(MatrixFile.from_matrix(matrix).model_dump_json(indent=2) + "\n")


def load_experiment_config(path) -> ExperimentConfig:
    try:
        config = ExperimentConfig.model_validate(_read_json(path))
    except SchemaError as e:
        logger.error(f"Invalid experiment config {path}: {e.error_count()} errors")
        raise ConfigError(f"Invalid experiment config {path}", {"errors": e.errors(include_url=False)})
    logger.info(f"Loaded experiment config {config.name or path} ({config.pipeline.mode.value} pipeline)")
    return config
