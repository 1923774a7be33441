"""
Сервисы VectorSensorCapacity.
"""

from .channel_service import ChannelService
from .ray_service import RayService
from .fitting_service import FittingService
from .capacity_service import CapacityService
from .experiment_service import ExperimentService, ChannelSetup

__all__ = [
    "ChannelService",
    "RayService",
    "FittingService",
    "CapacityService",
    "ExperimentService",
    "ChannelSetup",
]
