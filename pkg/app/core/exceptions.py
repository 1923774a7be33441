"""
Пользовательские исключения приложения.

Содержит все исключения, используемые в модели канала и экспериментах.
"""

from typing import Optional


class ChannelSimException(Exception):
    """Базовое исключение приложения."""

    def __init__(self, message: str = "Произошла ошибка"):
        self.message = message
        super().__init__(self.message)


class ValidationException(ChannelSimException):
    """Исключение для недопустимых значений доменных типов и аргументов."""
    pass


class ConfigurationException(ChannelSimException):
    """Исключение для ошибок конфигурации эксперимента."""
    pass


class ArrivalsParseException(ChannelSimException):
    """Исключение для ошибок разбора файла приходов Bellhop."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class QuadratureException(ChannelSimException):
    """Исключение для несошедшейся численной квадратуры."""
    pass


class FittingException(ChannelSimException):
    """Исключение для ошибок подгонки масштабированной гауссианы."""
    pass


class CapacityException(ChannelSimException):
    """Исключение для нарушений внутренней согласованности расчета емкости."""
    pass


class DominanceViolationException(CapacityException):
    """Исключение при нарушении доминирования верхней границы над оценкой Монте-Карло."""
    pass


class ExperimentException(ChannelSimException):
    """Исключение для ошибок выполнения эксперимента (точки развертки)."""
    pass
