from typing import Iterable, List

from app.core.exceptions import ValidationError
from .models import BipartiteSplit, OutputName, PipelineMode


def decode_pipeline_mode(mode: str | None) -> PipelineMode:
    """Decodes a pipeline mode string, falling back to the oracle when absent."""
    if not mode:
        return PipelineMode.ORACLE
    try:
        return PipelineMode(mode.strip().lower())
    except ValueError:
        raise ValidationError(
            f"Unknown pipeline mode {mode!r}",
            {"allowed": [m.value for m in PipelineMode]},
        )


def decode_split(split: str | None) -> BipartiteSplit:
    """Decodes 'nA,nB' (or 'nA+nB') into a BipartiteSplit."""
    if not split:
        raise ValidationError("A split 'nA,nB' is required")
    parts = split.replace("+", ",").split(",")
    if len(parts) != 2:
        raise ValidationError(f"Split must look like 'nA,nB', got {split!r}")
    try:
        n_a, n_b = (int(p.strip()) for p in parts)
    except ValueError:
        raise ValidationError(f"Split must contain integers, got {split!r}")
    return BipartiteSplit(n_a, n_b)


def decode_output_names(names: Iterable[str] | None) -> List[OutputName]:
    """Decodes requested optional sweep outputs; an absent list means none."""
    if not names:
        return []
    decoded = []
    for name in names:
        try:
            decoded.append(OutputName(name))
        except ValueError:
            raise ValidationError(
                f"Unknown output {name!r}", {"allowed": [o.value for o in OutputName]}
            )
    return decoded
