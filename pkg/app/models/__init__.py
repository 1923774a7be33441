"""
Доменные модели VectorSensorCapacity.
"""

from .base import BaseModel
from .channel import (
    RAYLEIGH_ENERGY_FACTOR,
    GainSampling,
    TruncatedKind,
    ScaledGaussianGainModel,
    TriangularAoaModel,
    TruncatedAoaModel,
    PathArrival,
    ChannelRealization,
)
from .geometry import Scenario, Eigenray, ArrivalsTable
from .capacity import ReceiverKind, SnrSpec, CapacityEstimate
from .fitting import GainAoaPoint, FitResult

__all__ = [
    "BaseModel",
    "RAYLEIGH_ENERGY_FACTOR",
    "GainSampling",
    "TruncatedKind",
    "ScaledGaussianGainModel",
    "TriangularAoaModel",
    "TruncatedAoaModel",
    "PathArrival",
    "ChannelRealization",
    "Scenario",
    "Eigenray",
    "ArrivalsTable",
    "ReceiverKind",
    "SnrSpec",
    "CapacityEstimate",
    "GainAoaPoint",
    "FitResult",
]
