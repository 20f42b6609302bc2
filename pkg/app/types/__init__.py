from .models import (
    BipartiteSplit,
    ClusterGauge,
    OutputName,
    PipelineMode,
    Provenance,
)
from .decoders import (
    decode_output_names,
    decode_pipeline_mode,
    decode_split,
)

__all__ = [
    "BipartiteSplit",
    "ClusterGauge",
    "OutputName",
    "PipelineMode",
    "Provenance",
    "decode_output_names",
    "decode_pipeline_mode",
    "decode_split",
]
