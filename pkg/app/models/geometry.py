"""
Модели геометрии мелководного волновода.

Содержит сценарий (параметры среды и геометрии), собственные лучи
и таблицу приходов в формате Bellhop.
"""

import math
from typing import Dict, List, Tuple

from pydantic import Field, model_validator

from .base import BaseModel


class Scenario(BaseModel):
    """Сценарий: геометрия, акустика среды, свойства дна и шум."""

    range_m: float = Field(1000.0, gt=0, description="Дальность R, м")
    water_depth_m: float = Field(250.0, gt=0, description="Глубина воды d_w, м")
    tx_depth_m: float = Field(150.0, gt=0, description="Глубина источника d_t, м")
    rx_depth_m: float = Field(130.0, gt=0, description="Глубина приемника d_r, м")
    sound_speed_mps: float = Field(1520.0, gt=0, description="Скорость звука c, м/с")
    frequency_hz: float = Field(5000.0, gt=0, description="Частота f, Гц")
    water_density_kgm3: float = Field(1027.0, gt=0, description="Плотность воды rho_o, кг/м^3")
    bottom_speed_mps: float = Field(1550.0, gt=0, description="Скорость звука в дне c_p, м/с")
    bottom_density_gcm3: float = Field(1.8, gt=0, description="Плотность дна, г/см^3")
    bottom_attenuation_db_wavelength: float = Field(0.6, ge=0, description="Затухание в дне, дБ/длина волны")
    noise_power: float = Field(1.3e-8, gt=0, description="Мощность шума Omega_N")
    max_bounce_order: int = Field(8, ge=0, description="Максимальный порядок отражений")

    @model_validator(mode="after")
    def validate_depths(self) -> "Scenario":
        """Источник и приемник должны находиться внутри водного слоя."""
        if not self.tx_depth_m < self.water_depth_m:
            raise ValueError("tx_depth_m должна быть меньше water_depth_m")
        if not self.rx_depth_m < self.water_depth_m:
            raise ValueError("rx_depth_m должна быть меньше water_depth_m")
        return self

    @property
    def bottom_density_kgm3(self) -> float:
        """Плотность дна в кг/м^3."""
        return self.bottom_density_gcm3 * 1000.0

    @property
    def wavelength_m(self) -> float:
        """Длина волны в воде."""
        return self.sound_speed_mps / self.frequency_hz

    @property
    def los_delay_s(self) -> float:
        """Задержка прямого пути."""
        return math.hypot(self.range_m, self.tx_depth_m - self.rx_depth_m) / self.sound_speed_mps


class Eigenray(BaseModel):
    """
    Собственный луч.

    Знак угла прихода: положительный угол соответствует приходу со стороны дна
    (мнимый источник глубже приемника), поэтому для прямого пути
    aoa = atan((d_t - d_r) / R).
    """

    aoa: float = Field(..., description="Угол прихода gamma, рад")
    delay: float = Field(..., ge=0, description="Задержка tau, с")
    amplitude: float = Field(..., ge=0, description="Детерминированная амплитуда пути")
    surface_bounces: int = Field(0, ge=0, description="Число отражений от поверхности")
    bottom_bounces: int = Field(0, ge=0, description="Число отражений от дна")
    # Поля для точного обмена с форматом Bellhop
    phase: float = Field(0.0, description="Фаза, рад")
    delay_imag: float = Field(0.0, description="Мнимая часть задержки, с")
    departure_angle: float = Field(0.0, description="Угол выхода из источника, рад")

    @model_validator(mode="after")
    def validate_bounces(self) -> "Eigenray":
        """Отражения от поверхности и дна чередуются."""
        if abs(self.surface_bounces - self.bottom_bounces) > 1:
            raise ValueError("Числа отражений от поверхности и дна различаются больше чем на 1")
        return self

    @property
    def bounce_order(self) -> int:
        """Полное число отражений."""
        return self.surface_bounces + self.bottom_bounces


PairKey = Tuple[int, int, int]


class ArrivalsTable(BaseModel):
    """Таблица приходов: заголовок Bellhop и лучи для каждой пары источник/приемник."""

    frequency_hz: float = Field(..., gt=0, description="Частота, Гц")
    tx_depths_m: Tuple[float, ...] = Field(..., min_length=1, description="Глубины источников, м")
    rx_depths_m: Tuple[float, ...] = Field(..., min_length=1, description="Глубины приемников, м")
    rx_ranges_m: Tuple[float, ...] = Field(..., min_length=1, description="Дальности приемников, м")
    # Ключ: (индекс источника, индекс глубины приемника, индекс дальности приемника)
    arrivals: Dict[PairKey, Tuple[Eigenray, ...]] = Field(default_factory=dict, description="Лучи по парам")

    def pairs(self) -> List[PairKey]:
        """Все пары в порядке записи файла."""
        return [
            (j, k, m)
            for j in range(len(self.tx_depths_m))
            for k in range(len(self.rx_depths_m))
            for m in range(len(self.rx_ranges_m))
        ]

    def rays(self, tx_index: int = 0, rx_depth_index: int = 0, rx_range_index: int = 0) -> List[Eigenray]:
        """Лучи для одной пары источник/приемник."""
        return list(self.arrivals.get((tx_index, rx_depth_index, rx_range_index), ()))
