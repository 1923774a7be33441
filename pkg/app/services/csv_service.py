"""
Сервис чтения и записи CSV-таблиц.

Строки комментариев начинаются с '#', затем строка заголовка и данные.
Вещественные числа выводятся через repr (кратчайшее точное представление),
поэтому одинаковые входы дают побайтно одинаковые файлы.
"""

import csv
import io
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger

from app.core.exceptions import ValidationException

PathLike = Union[str, Path]


def format_value(value: Any) -> str:
    """Текстовое представление значения ячейки."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], comments: Sequence[str] = ()) -> str:
    """
    Формирование текста CSV.

    Args:
        header: Имена столбцов
        rows: Строки данных
        comments: Строки комментариев (без '#')

    Returns:
        Текст CSV с переводами строк '\\n'
    """
    buffer = io.StringIO()
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValidationException(f"Строка CSV содержит {len(row)} значений, ожидалось {len(header)}")
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Sequence[str] = (),
    path: Optional[PathLike] = None,
) -> str:
    """Запись CSV в файл (если задан путь) и возврат текста."""
    text = render_csv(header, rows, comments)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"Таблица записана: {path}")
    return text


def parse_csv(text: str) -> Tuple[List[str], List[Tuple[int, List[str]]]]:
    """
    Разбор CSV: комментарии и пустые строки пропускаются.

    Returns:
        (заголовок, [(номер строки, поля), ...])

    Raises:
        ValidationException: Нет строки заголовка
    """
    header: Optional[List[str]] = None
    rows: List[Tuple[int, List[str]]] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [field.strip() for field in next(csv.reader([stripped]))]
        if header is None:
            header = fields
        else:
            rows.append((number, fields))
    if header is None:
        raise ValidationException("CSV не содержит строки заголовка")
    return header, rows


def read_csv(path: PathLike) -> Tuple[List[str], List[Tuple[int, List[str]]]]:
    """Чтение CSV с диска."""
    csv_path = Path(path)
    if not csv_path.is_file():
        raise ValidationException(f"Файл не найден: {csv_path}")
    return parse_csv(csv_path.read_text(encoding="utf-8"))
