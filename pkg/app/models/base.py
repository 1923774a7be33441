"""
Базовая модель для доменных типов.
"""

from pydantic import BaseModel as PydanticBaseModel, ConfigDict


class BaseModel(PydanticBaseModel):
    """Базовая неизменяемая модель для всех доменных значений."""

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    def __repr__(self) -> str:
        fields = ", ".join(f"{name}={getattr(self, name)!r}" for name in type(self).model_fields)
        return f"<{self.__class__.__name__}({fields})>"
