"""
Модели подгонки карты масштаба по статистике лучей.
"""

import math

from pydantic import Field, model_validator

from .base import BaseModel
from .channel import ScaledGaussianGainModel


class GainAoaPoint(BaseModel):
    """Точка статистики: средний квадрат амплитуды в бине угла прихода."""

    aoa: float = Field(..., description="Центр бина, рад")
    gain_sq: float = Field(..., ge=0, description="Средний квадрат амплитуды")
    weight: float = Field(1.0, ge=1, description="Число лучей в бине")


class FitResult(BaseModel):
    """Результат подгонки и метрики качества."""

    model: ScaledGaussianGainModel
    sse: float = Field(..., ge=0, description="Сумма квадратов ошибок")
    r2: float = Field(..., le=1, description="Коэффициент детерминации")
    rmse: float = Field(..., ge=0, description="Среднеквадратичная ошибка")
    converged: bool = Field(..., description="Признак сходимости")
    iterations: int = Field(..., ge=0, description="Число вычислений невязки")
    n_points: int = Field(..., ge=1, description="Число точек")

    @model_validator(mode="after")
    def validate_rmse(self) -> "FitResult":
        """rmse^2 * n = sse."""
        if not math.isclose(self.rmse ** 2 * self.n_points, self.sse, rel_tol=1e-9, abs_tol=1e-300):
            raise ValueError("rmse не согласована с sse")
        return self
