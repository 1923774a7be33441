"""
Pydantic схемы VectorSensorCapacity.
"""

from .experiment import (
    SweepAxis,
    AoaModelKind,
    GainMode,
    SnrReference,
    ChannelSpec,
    GainSpec,
    CapacitySpec,
    SweepSpec,
    ExperimentConfig,
    CapacityRow,
    AoaComparisonRow,
)

__all__ = [
    "SweepAxis",
    "AoaModelKind",
    "GainMode",
    "SnrReference",
    "ChannelSpec",
    "GainSpec",
    "CapacitySpec",
    "SweepSpec",
    "ExperimentConfig",
    "CapacityRow",
    "AoaComparisonRow",
]
