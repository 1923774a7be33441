"""
Схемы конфигурации эксперимента.

Содержит Pydantic модели для валидации файлов конфигурации
(ключи вида scenario.range_m = 1000).
"""

import json
from enum import Enum
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.exceptions import ValidationException
from app.models.channel import ScaledGaussianGainModel
from app.models.geometry import Scenario


class SweepAxis(str, Enum):
    """Ось развертки."""

    SNR_DB = "snr_db"
    RANGE_M = "range_m"
    FREQUENCY_HZ = "frequency_hz"
    N_RAYS = "n_rays"


class AoaModelKind(str, Enum):
    """Плотность угла прихода пути."""

    TRIANGULAR = "triangular"
    GAUSSIAN = "gaussian"  # усеченная гауссова
    LAPLACIAN = "laplacian"  # усеченная лапласова


class GainMode(str, Enum):
    """Источник параметров карты масштаба."""

    FIT = "fit"  # подгонка по трассированным лучам
    EXPLICIT = "explicit"  # значения из конфигурации


class SnrReference(str, Enum):
    """Отсчет ОСШ."""

    TRANSMIT = "transmit"  # rho = P_tx / Omega_N к абсолютным энергиям
    PATH = "path"  # rho - пиковое ОСШ одного пути, Lambda = 1 / kappa


def parse_list(value: Any) -> Any:
    """Список из JSON-массива или строки через запятую."""
    if isinstance(value, str):
        if value.strip().startswith("["):
            return json.loads(value)
        return [x.strip() for x in value.split(",") if x.strip()]
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ChannelSpec(_Section):
    """Параметры угловой модели путей."""

    beta_rad: float = Field(0.02, ge=0, description="Полуширина треугольной плотности угла, рад")
    beta_per_path_rad: Optional[List[float]] = Field(None, description="Полуширина для каждого пути, рад")
    n_rays: Optional[int] = Field(None, ge=1, description="Число первых по задержке лучей")
    aoa_model: AoaModelKind = Field(AoaModelKind.TRIANGULAR, description="triangular, gaussian или laplacian")

    @field_validator("beta_per_path_rad", mode="before")
    @classmethod
    def split_beta_list(cls, v: Any) -> Any:
        """Парсинг списка полуширин."""
        return parse_list(v)

    @field_validator("beta_per_path_rad")
    @classmethod
    def validate_beta_list(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Полуширины неотрицательны."""
        if v is not None and (not v or any(beta < 0 for beta in v)):
            raise ValueError("Список полуширин должен быть непустым и неотрицательным")
        return v

    def beta_for(self, n_paths: int) -> List[float]:
        """Полуширины для n_paths путей."""
        if self.beta_per_path_rad is None:
            return [self.beta_rad] * n_paths
        if len(self.beta_per_path_rad) < n_paths:
            raise ValidationException(f"Задано {len(self.beta_per_path_rad)} полуширин для {n_paths} путей")
        return list(self.beta_per_path_rad[:n_paths])


class GainSpec(_Section):
    """Карта масштаба: явные параметры или подгонка."""

    mode: GainMode = Field(GainMode.FIT, description="fit или explicit")
    lambda_: Optional[float] = Field(None, alias="lambda", gt=0, description="Масштаб Lambda")
    xi_rad: Optional[float] = Field(None, description="Центр xi, рад")
    varsigma_rad: Optional[float] = Field(None, gt=0, description="Ширина varsigma, рад")
    n_bins: Optional[int] = Field(None, ge=2, description="Число бинов при подгонке")

    @model_validator(mode="after")
    def validate_explicit(self) -> "GainSpec":
        """Для explicit нужны все три параметра."""
        if self.mode == GainMode.EXPLICIT:
            missing = [
                name
                for name, value in (("lambda", self.lambda_), ("xi_rad", self.xi_rad), ("varsigma_rad", self.varsigma_rad))
                if value is None
            ]
            if missing:
                raise ValueError(f"Для mode=explicit не заданы: {', '.join(missing)}")
        return self

    def explicit_model(self) -> ScaledGaussianGainModel:
        """Модель из явных параметров."""
        return ScaledGaussianGainModel(lambda_=self.lambda_, xi=self.xi_rad, varsigma=self.varsigma_rad)


class CapacitySpec(_Section):
    """Параметры расчета емкости."""

    trials: Optional[int] = Field(None, ge=1, description="Число испытаний Монте-Карло")
    seed: Optional[int] = Field(None, ge=0, description="Зерно генератора")
    snr_db: Optional[float] = Field(None, description="ОСШ, дБ (по умолчанию из сценария)")
    snr_reference: SnrReference = Field(SnrReference.TRANSMIT, description="transmit или path")
    tx_power: float = Field(1.0, gt=0, description="Мощность передачи для отсчета transmit")
    snr_db_values: Optional[List[float]] = Field(None, description="Сетка ОСШ для compare и разверток по физическим осям, дБ")

    @field_validator("snr_db_values", mode="before")
    @classmethod
    def split_snr_list(cls, v: Any) -> Any:
        """Парсинг сетки ОСШ."""
        return parse_list(v)

    @field_validator("snr_db_values")
    @classmethod
    def validate_snr_list(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        """Сетка непустая и строго возрастает."""
        if v is not None:
            _check_increasing(v)
        return v


def _check_increasing(values: List[float]) -> None:
    if not values:
        raise ValueError("Список значений не может быть пустым")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("Значения должны строго возрастать")


class SweepSpec(_Section):
    """Развертка по одной оси; остальные параметры берутся из конфигурации."""

    axis: SweepAxis = Field(..., description="Ось развертки")
    values: List[float] = Field(..., description="Значения оси")

    @field_validator("values", mode="before")
    @classmethod
    def split_values(cls, v: Any) -> Any:
        """Парсинг списка значений."""
        return parse_list(v)

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: List[float]) -> List[float]:
        """Значения непустые и строго возрастают."""
        _check_increasing(v)
        return v

    @model_validator(mode="after")
    def validate_axis_values(self) -> "SweepSpec":
        """Проверка значений для физических осей."""
        if self.axis == SweepAxis.N_RAYS and any(x < 1 or x != int(x) for x in self.values):
            raise ValueError("Для оси n_rays значения должны быть целыми >= 1")
        if self.axis in (SweepAxis.RANGE_M, SweepAxis.FREQUENCY_HZ) and any(x <= 0 for x in self.values):
            raise ValueError(f"Для оси {self.axis.value} значения должны быть положительными")
        return self


class ExperimentConfig(_Section):
    """Конфигурация эксперимента."""

    name: str = Field("experiment", description="Имя эксперимента")
    scenario: Scenario = Field(default_factory=Scenario)
    channel: ChannelSpec = Field(default_factory=ChannelSpec)
    gain: GainSpec = Field(default_factory=GainSpec)
    capacity: CapacitySpec = Field(default_factory=CapacitySpec)
    sweep: Optional[SweepSpec] = None

    @model_validator(mode="after")
    def validate_path_reference(self) -> "ExperimentConfig":
        """Для отсчета path ОСШ задается явно; сетка ОСШ не сочетается с осью snr_db."""
        snr_given = (
            self.capacity.snr_db is not None
            or self.capacity.snr_db_values is not None
            or (self.sweep is not None and self.sweep.axis == SweepAxis.SNR_DB)
        )
        if self.capacity.snr_reference == SnrReference.PATH and not snr_given:
            raise ValueError("Для capacity.snr_reference=path нужно задать capacity.snr_db")
        if self.sweep is not None and self.sweep.axis == SweepAxis.SNR_DB and self.capacity.snr_db_values is not None:
            raise ValueError("capacity.snr_db_values нельзя задавать вместе с sweep.axis=snr_db")
        return self


class CapacityRow(BaseModel):
    """Строка таблицы емкости для одной рабочей точки."""

    axis_value: Optional[float] = Field(None, description="Значение оси развертки")
    c_mc_vector: float = Field(..., description="Емкость векторного приемника (Монте-Карло), бит/с/Гц")
    c_mc_stderr: float = Field(..., ge=0, description="Стандартная ошибка c_mc_vector")
    c_mc_siso: float = Field(..., description="Емкость скалярного приемника (Монте-Карло), бит/с/Гц")
    c_ub_closed: Optional[float] = Field(None, description="Верхняя граница, замкнутая форма (только треугольная плотность)")
    c_ub_quadrature: float = Field(..., description="Верхняя граница, квадратура")
    snr_db: float = Field(..., description="ОСШ, дБ")
    n_paths: int = Field(..., ge=1, description="Число путей")
    lambda_: float = Field(..., alias="lambda", description="Lambda карты масштаба")
    xi_rad: float = Field(..., description="xi карты масштаба, рад")
    varsigma_rad: float = Field(..., description="varsigma карты масштаба, рад")

    model_config = ConfigDict(populate_by_name=True)


class AoaComparisonRow(BaseModel):
    """Емкость векторного приемника при разных плотностях угла прихода."""

    snr_db: float = Field(..., description="ОСШ, дБ")
    c_mc_triangular: float = Field(..., description="Треугольная плотность, бит/с/Гц")
    c_mc_gaussian: float = Field(..., description="Усеченная гауссова плотность, бит/с/Гц")
    c_mc_laplacian: float = Field(..., description="Усеченная лапласова плотность, бит/с/Гц")
    c_mc_stderr: float = Field(..., ge=0, description="Наибольшая стандартная ошибка трех оценок")
    max_relative_difference: float = Field(..., ge=0, description="Наибольшее отличие усеченных от треугольной")
    n_paths: int = Field(..., ge=1, description="Число путей")
