"""
Модели для расчета емкости.
"""

import math
from enum import Enum

from pydantic import Field, field_validator

from .base import BaseModel
from .geometry import Scenario


class ReceiverKind(str, Enum):
    """Тип приемника."""

    VECTOR = "vector"  # давление + две компоненты скорости (1x3 SIMO)
    SISO = "siso"  # только канал давления


class SnrSpec(BaseModel):
    """Отношение сигнал/шум rho в линейном масштабе."""

    rho: float = Field(..., gt=0, description="Линейное ОСШ rho")

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, v: float) -> float:
        """Валидация конечности ОСШ."""
        if not math.isfinite(v):
            raise ValueError("ОСШ должно быть конечным")
        return v

    @classmethod
    def from_db(cls, snr_db: float) -> "SnrSpec":
        """ОСШ из децибел."""
        return cls(rho=10.0 ** (snr_db / 10.0))

    @classmethod
    def from_scenario(cls, scenario: Scenario, tx_power: float = 1.0) -> "SnrSpec":
        """
        ОСШ передачи rho = P_tx / Omega_N.

        Применяется к абсолютным энергиям канала; выигрыш каналов скорости
        (шум Omega_N/2) уже учтен коэффициентами 2 в формуле емкости.
        """
        return cls(rho=tx_power / scenario.noise_power)

    @property
    def db(self) -> float:
        """ОСШ в децибелах."""
        return 10.0 * math.log10(self.rho)


class CapacityEstimate(BaseModel):
    """Оценка эргодической емкости методом Монте-Карло, бит/с/Гц."""

    mean: float = Field(..., description="Выборочное среднее, бит/с/Гц")
    std_error: float = Field(..., ge=0, description="Стандартная ошибка, бит/с/Гц")
    trials: int = Field(..., ge=1, description="Число испытаний")
