from __future__ import annotations

from typing import List

import numpy as np

from app.core.exceptions import ValidationError

_SINGLE_QUBIT = {
    "0": np.array([1.0, 0.0], dtype=np.complex128),
    "1": np.array([0.0, 1.0], dtype=np.complex128),
    "+": np.array([1.0, 1.0], dtype=np.complex128) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=np.complex128) / np.sqrt(2.0),
}


def qubit_states(spec: str) -> List[np.ndarray]:
    """One single-qubit vector per character of a product-state spec such as '1+' or '100100'."""
    spec = (spec or "").strip()
    if not spec:
        raise ValidationError("empty state string")
    unknown = sorted(set(spec) - set(_SINGLE_QUBIT))
    if unknown:
        raise ValidationError(f"Unknown state letters {unknown} in {spec!r}", {"allowed": sorted(_SINGLE_QUBIT)})
    return [_SINGLE_QUBIT[c] for c in spec]


def parse_state(spec: str) -> np.ndarray:
    """Product state from a letter string over 0 1 + -, qubit 0 most significant."""
    psi = np.ones(1, dtype=np.complex128)
    for vector in qubit_states(spec):
        psi = np.kron(psi, vector)
    return psi
