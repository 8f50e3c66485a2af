from .ascent import AscentResult, projected_ascent
from .reference import (
    ReferenceDraw,
    acceptance_rate,
    draw_reference_batch,
    log_partition,
    sample_reference,
    sample_reference_batch,
)
from .sample_space import SampleSpace, SpaceKind, cost

__all__ = [
    "AscentResult",
    "ReferenceDraw",
    "SampleSpace",
    "SpaceKind",
    "acceptance_rate",
    "cost",
    "draw_reference_batch",
    "log_partition",
    "projected_ascent",
    "sample_reference",
    "sample_reference_batch",
]
