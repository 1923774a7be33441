"""
Конфигурация для VectorSensorCapacity - моделирования канала векторного приемника.
"""

from typing import Optional
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения."""

    # Настройки Монте-Карло
    DEFAULT_TRIALS: int = Field(default=100_000, description="Число испытаний Монте-Карло по умолчанию")
    DEFAULT_SEED: int = Field(default=2024, description="Зерно генератора по умолчанию")
    DEFAULT_BINS: int = Field(default=15, description="Число бинов по углу прихода для подгонки")
    MAX_WORKERS: int = Field(default=4, description="Размер пула потоков")

    # Настройки логирования
    LOG_LEVEL: str = Field(default="INFO", description="Уровень логирования")
    LOG_FILE: Optional[str] = Field(default=None, description="Файл журнала (необязательно)")

    # Настройки разработки
    DEBUG: bool = Field(default=False, description="Режим отладки")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",  # Игнорируем лишние поля из .env
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Валидация уровня логирования."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Уровень логирования должен быть одним из: {valid_levels}")
        return v.upper()

    @field_validator("DEFAULT_TRIALS", "MAX_WORKERS")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Валидация положительных целых параметров."""
        if v < 1:
            raise ValueError("Значение должно быть не меньше 1")
        return v

    @field_validator("DEFAULT_BINS")
    @classmethod
    def validate_bins(cls, v: int) -> int:
        """Валидация числа бинов."""
        if v < 2:
            raise ValueError("Число бинов должно быть не меньше 2")
        return v


# Создаем глобальный экземпляр настроек
settings = Settings()
