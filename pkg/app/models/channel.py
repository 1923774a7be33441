"""
Модели статистического канала.

Содержит карту масштаба Рэлея по углу прихода, плотности угла прихода
и выборочные реализации многолучевого канала.
"""

import math
from enum import Enum
from typing import Tuple

from pydantic import Field, PrivateAttr, field_validator
from scipy import integrate

from .base import BaseModel

# E[h^2] = 2*sigma^2 для плотности Рэлея в форме alpha/sigma^2 * exp(-alpha^2 / (2 sigma^2))
RAYLEIGH_ENERGY_FACTOR = 2.0


class GainSampling(str, Enum):
    """Способ получения амплитуды пути."""

    RAYLEIGH = "rayleigh"
    # Тестовый режим: h = sqrt(kappa * sigma^2(gamma)) без замираний
    DETERMINISTIC = "deterministic"


class TruncatedKind(str, Enum):
    """Семейство усеченной плотности угла прихода."""

    GAUSSIAN = "gaussian"
    LAPLACIAN = "laplacian"


class ScaledGaussianGainModel(BaseModel):
    """Масштабированная гауссиана sigma^2(gamma) = Lambda * exp(-((gamma - xi) / varsigma)^2)."""

    lambda_: float = Field(..., alias="lambda", gt=0, description="Масштаб Lambda")
    xi: float = Field(..., description="Среднее xi, рад")
    varsigma: float = Field(..., gt=0, description="Разброс varsigma, рад")

    @field_validator("lambda_", "xi", "varsigma")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        """Валидация конечности параметров."""
        if not math.isfinite(v):
            raise ValueError("Параметр должен быть конечным числом")
        return v

    def scaled(self, factor: float) -> "ScaledGaussianGainModel":
        """Модель с масштабом Lambda, умноженным на factor."""
        return self.model_copy(update={"lambda_": self.lambda_ * factor})


class TriangularAoaModel(BaseModel):
    """Треугольная плотность угла прихода с модой theta и полушириной beta."""

    theta: float = Field(..., description="Мода theta, рад")
    beta: float = Field(..., ge=0, description="Полуширина beta, рад (0 - точечная масса)")

    @property
    def support(self) -> Tuple[float, float]:
        """Носитель плотности."""
        return self.theta - self.beta, self.theta + self.beta

    @property
    def is_degenerate(self) -> bool:
        """Вырожденная плотность (точечная масса в theta)."""
        return self.beta == 0.0


class TruncatedAoaModel(BaseModel):
    """
    Усеченная на [mu - pi/2, mu + pi/2] гауссова или лапласова плотность.

    Нормировка A вычисляется квадратурой при создании и не задается извне.
    """

    kind: TruncatedKind = Field(..., description="Семейство плотности")
    mu: float = Field(..., description="Среднее mu, рад")
    sigma: float = Field(..., gt=0, description="Разброс sigma, рад")

    _normalizer: float = PrivateAttr(default=1.0)

    def model_post_init(self, __context) -> None:
        lo, hi = self.support
        area, _ = integrate.quad(self.base_density, lo, hi, points=[self.mu], epsabs=1e-14, epsrel=1e-13)
        self._normalizer = 1.0 / area

    @property
    def normalizer(self) -> float:
        """Нормировочная константа A."""
        return self._normalizer

    @property
    def support(self) -> Tuple[float, float]:
        """Носитель плотности."""
        return self.mu - math.pi / 2, self.mu + math.pi / 2

    @property
    def laplace_scale(self) -> float:
        """Параметр масштаба b = sigma / sqrt(2) неусеченного распределения Лапласа."""
        return self.sigma / math.sqrt(2.0)

    def base_density(self, gamma: float) -> float:
        """Плотность неусеченного распределения."""
        if self.kind == TruncatedKind.GAUSSIAN:
            z = (gamma - self.mu) / self.sigma
            return math.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))
        return math.exp(-math.sqrt(2.0) * abs(gamma - self.mu) / self.sigma) / (self.sigma * math.sqrt(2.0))


class PathArrival(BaseModel):
    """Один путь реализации канала."""

    amplitude: float = Field(..., ge=0, description="Амплитуда пути h_i")
    aoa: float = Field(..., gt=-math.pi / 2, lt=math.pi / 2, description="Угол прихода gamma_i, рад")
    delay: float = Field(..., ge=0, description="Задержка tau_i, с")


class ChannelRealization(BaseModel):
    """Реализация канала: набор путей (N >= 1)."""

    paths: Tuple[PathArrival, ...] = Field(..., min_length=1, description="Пути реализации")

    @property
    def n_paths(self) -> int:
        """Число путей N."""
        return len(self.paths)
