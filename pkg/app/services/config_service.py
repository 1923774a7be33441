"""
Сервис загрузки конфигурации эксперимента.

Файл конфигурации - плоский текст ключ = значение с точками в ключах
(scenario.range_m = 1000) и комментариями '#'. Ключи собираются во
вложенный словарь и валидируются схемой ExperimentConfig.
"""

import io
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import dotenv_values
from loguru import logger
from pydantic import ValidationError

from app.core.exceptions import ConfigurationException
from app.schemas.experiment import ExperimentConfig


def nest_dotted(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Вложенный словарь из ключей с точками.

    Raises:
        ConfigurationException: Ключ без значения или конфликт вложенности
    """
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        if value is None:
            raise ConfigurationException(f"Ключ {key} задан без значения")
        parts = key.strip().split(".")
        if any(not part for part in parts):
            raise ConfigurationException(f"Недопустимый ключ: {key}")
        node = nested
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationException(f"Ключ {key} конфликтует с ключом {part}")
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ConfigurationException(f"Ключ {key} конфликтует с вложенными ключами")
        node[parts[-1]] = value
    return nested


def _error_key(error: Mapping[str, Any]) -> str:
    return ".".join(str(part) for part in error["loc"]) or "<config>"


def build_experiment_config(flat: Mapping[str, Any]) -> ExperimentConfig:
    """
    Валидация плоского словаря конфигурации.

    Raises:
        ConfigurationException: Ошибка валидации; сообщение перечисляет все ключи с ошибками
    """
    try:
        return ExperimentConfig.model_validate(nest_dotted(flat))
    except ValidationError as e:
        problems = "; ".join(f"{_error_key(error)}: {error['msg']}" for error in e.errors())
        logger.error(f"Ошибка конфигурации: {problems}")
        raise ConfigurationException(f"Ошибка конфигурации: {problems}")


def parse_experiment_config(text: str, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Разбор текста конфигурации.

    Args:
        text: Текст конфигурации
        overrides: Значения с ключами через точку, заменяющие значения файла

    Returns:
        ExperimentConfig: Валидированная конфигурация
    """
    flat: Dict[str, Any] = dict(dotenv_values(stream=io.StringIO(text), interpolate=False))
    for key, value in (overrides or {}).items():
        if value is not None:
            flat[key] = value
    return build_experiment_config(flat)


def load_experiment_config(
    path: Optional[Union[str, Path]],
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Чтение конфигурации с диска; без пути используются значения по умолчанию.

    Raises:
        ConfigurationException: Файл не найден или содержит ошибки
    """
    if path is None:
        return parse_experiment_config("", overrides)
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigurationException(f"Файл конфигурации не найден: {config_path}")
    config = parse_experiment_config(config_path.read_text(encoding="utf-8"), overrides)
    logger.info(f"Загружена конфигурация '{config.name}' из {config_path}")
    return config
