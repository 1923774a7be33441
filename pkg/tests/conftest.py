"""
Общие фикстуры тестов.
"""

from pathlib import Path

import numpy as np
import pytest

from app.models.channel import ScaledGaussianGainModel
from app.models.geometry import Scenario

FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    """Каталог файлов-образцов."""
    return FIXTURES_DIR


@pytest.fixture
def table_scenario() -> Scenario:
    """Сценарий с параметрами по умолчанию (1 км, 5 кГц, порядок 8)."""
    return Scenario()


@pytest.fixture
def unit_gain_model() -> ScaledGaussianGainModel:
    """Карта масштаба с Lambda = 1 / kappa: средняя энергия пути при xi равна 1."""
    return ScaledGaussianGainModel(lambda_=0.5, xi=0.0, varsigma=0.3)


@pytest.fixture
def rng() -> np.random.Generator:
    """Генератор с фиксированным зерном."""
    return np.random.default_rng(12345)


@pytest.fixture
def write_config(tmp_path):
    """Запись текста конфигурации во временный файл."""

    def _write(text: str, name: str = "experiment.conf") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
