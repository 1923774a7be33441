"""
Сервис чтения и записи файлов приходов Bellhop ('.arr', ASCII, вариант 2D).

Формат описан в docs/arrivals_format.md.
"""

import math
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from app.core.exceptions import ArrivalsParseException, ValidationException
from app.models.geometry import ArrivalsTable, Eigenray, PairKey, Scenario

# Число полей в записи прихода
_RECORD_FIELDS = 8


class _LineReader:
    """Построчное чтение с номерами строк и пропуском пустых строк."""

    def __init__(self, text: str):
        self._lines: Iterator[Tuple[int, str]] = (
            (number, line) for number, line in enumerate(text.splitlines(), start=1) if line.strip()
        )
        self.line_number = 0

    def next_line(self, what: str) -> str:
        try:
            self.line_number, line = next(self._lines)
        except StopIteration:
            raise ArrivalsParseException(f"неожиданный конец файла, ожидалось: {what}", self.line_number + 1)
        return line.strip()

    def next_fields(self, what: str) -> List[str]:
        return self.next_line(what).split()


def _convert(value: str, cast: Callable, what: str, line_number: int):
    try:
        return cast(value)
    except ValueError:
        raise ArrivalsParseException(f"нечисловое поле '{value}' ({what})", line_number)


def _read_counted(reader: _LineReader, what: str) -> Tuple[float, ...]:
    """Строка вида '<n> v1 v2 ... vn'."""
    fields = reader.next_fields(what)
    count = _convert(fields[0], int, f"{what}: количество", reader.line_number)
    values = tuple(_convert(v, float, what, reader.line_number) for v in fields[1:])
    if count != len(values) or count < 1:
        raise ArrivalsParseException(
            f"{what}: заявлено {count} значений, прочитано {len(values)}", reader.line_number
        )
    return values


def _record_to_eigenray(fields: Sequence[str], line_number: int) -> Eigenray:
    if len(fields) != _RECORD_FIELDS:
        raise ArrivalsParseException(
            f"запись прихода должна содержать {_RECORD_FIELDS} полей, получено {len(fields)}", line_number
        )
    amplitude, phase_deg, delay, delay_imag, source_deg, receiver_deg = (
        _convert(v, float, "запись прихода", line_number) for v in fields[:6]
    )
    surface_bounces, bottom_bounces = (
        _convert(v, int, "число отражений", line_number) for v in fields[6:]
    )
    try:
        # Углы Bellhop положительны вниз; угол прихода положителен со стороны дна
        return Eigenray(
            aoa=-math.radians(receiver_deg),
            delay=delay,
            amplitude=amplitude,
            surface_bounces=surface_bounces,
            bottom_bounces=bottom_bounces,
            phase=math.radians(phase_deg),
            delay_imag=delay_imag,
            departure_angle=math.radians(source_deg),
        )
    except ValidationError as e:
        raise ArrivalsParseException(f"недопустимая запись прихода: {e.errors()[0]['msg']}", line_number)


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line_number = data.count(b"\n", 0, e.start) + 1
        raise ArrivalsParseException(f"файл не в кодировке UTF-8 (байт {e.start})", line_number)


def parse_bellhop_arrivals(text: Union[str, bytes]) -> ArrivalsTable:
    """
    Разбор ASCII-файла приходов Bellhop.

    Args:
        text: Содержимое файла

    Returns:
        ArrivalsTable: Заголовок и лучи по парам источник/приемник

    Raises:
        ArrivalsParseException: Ошибка формата (с номером строки)
    """
    if isinstance(text, bytes):
        text = _decode(text)

    reader = _LineReader(text)
    header = reader.next_line("заголовок '2D'")
    if header.strip("'\" ").upper() != "2D":
        raise ArrivalsParseException(f"ожидался заголовок '2D', получено: {header}", reader.line_number)

    frequency_fields = reader.next_fields("частота")
    if len(frequency_fields) != 1:
        raise ArrivalsParseException("строка частоты должна содержать одно число", reader.line_number)
    frequency = _convert(frequency_fields[0], float, "частота", reader.line_number)

    tx_depths = _read_counted(reader, "глубины источников")
    rx_depths = _read_counted(reader, "глубины приемников")
    rx_ranges = _read_counted(reader, "дальности приемников")

    arrivals: Dict[PairKey, Tuple[Eigenray, ...]] = {}
    for j in range(len(tx_depths)):
        # Максимальное число приходов для источника (информационное поле)
        max_fields = reader.next_fields("максимум приходов")
        _convert(max_fields[0], int, "максимум приходов", reader.line_number)
        for k in range(len(rx_depths)):
            for m in range(len(rx_ranges)):
                count_fields = reader.next_fields("число приходов")
                if len(count_fields) != 1:
                    raise ArrivalsParseException("строка числа приходов должна содержать одно целое", reader.line_number)
                count = _convert(count_fields[0], int, "число приходов", reader.line_number)
                if count < 0:
                    raise ArrivalsParseException(f"отрицательное число приходов: {count}", reader.line_number)
                rays = []
                for _ in range(count):
                    fields = reader.next_fields("запись прихода")
                    rays.append(_record_to_eigenray(fields, reader.line_number))
                arrivals[(j, k, m)] = tuple(rays)

    try:
        reader.next_line("конец файла")
    except ArrivalsParseException:
        pass
    else:
        raise ArrivalsParseException("лишние строки после последней записи", reader.line_number)

    try:
        table = ArrivalsTable(
            frequency_hz=frequency,
            tx_depths_m=tx_depths,
            rx_depths_m=rx_depths,
            rx_ranges_m=rx_ranges,
            arrivals=arrivals,
        )
    except ValidationError as e:
        raise ArrivalsParseException(f"недопустимый заголовок: {e.errors()[0]['msg']}", 2)

    total = sum(len(rays) for rays in arrivals.values())
    logger.info(f"Прочитан файл приходов: {len(arrivals)} пар, {total} приходов")
    return table


def load_bellhop_arrivals(path: Union[str, Path]) -> ArrivalsTable:
    """
    Чтение файла приходов с диска.

    Raises:
        ValidationException: Файл не найден
        ArrivalsParseException: Ошибка формата (с номером строки)
    """
    arrivals_path = Path(path)
    if not arrivals_path.is_file():
        raise ValidationException(f"Файл приходов не найден: {arrivals_path}")
    return parse_bellhop_arrivals(arrivals_path.read_bytes())


def _fmt(value: float) -> str:
    return repr(float(value))


def render_bellhop_arrivals(table: ArrivalsTable) -> str:
    """
    Запись таблицы приходов в ASCII-формат Bellhop.

    Числа выводятся кратчайшим точным представлением, поэтому
    parse(render(x)) воспроизводит x.
    """
    lines = ["'2D'", _fmt(table.frequency_hz)]
    for values in (table.tx_depths_m, table.rx_depths_m, table.rx_ranges_m):
        lines.append(" ".join([str(len(values))] + [_fmt(v) for v in values]))

    for j in range(len(table.tx_depths_m)):
        per_source = [
            len(table.rays(j, k, m))
            for k in range(len(table.rx_depths_m))
            for m in range(len(table.rx_ranges_m))
        ]
        lines.append(str(max(per_source, default=0)))
        for k in range(len(table.rx_depths_m)):
            for m in range(len(table.rx_ranges_m)):
                rays = table.rays(j, k, m)
                lines.append(str(len(rays)))
                for ray in rays:
                    lines.append(
                        " ".join(
                            [
                                _fmt(ray.amplitude),
                                _fmt(math.degrees(ray.phase)),
                                _fmt(ray.delay),
                                _fmt(ray.delay_imag),
                                _fmt(math.degrees(ray.departure_angle)),
                                _fmt(-math.degrees(ray.aoa)),
                                str(ray.surface_bounces),
                                str(ray.bottom_bounces),
                            ]
                        )
                    )
    return "\n".join(lines) + "\n"


def scenario_to_arrivals_table(scenario: Scenario, rays: Sequence[Eigenray]) -> ArrivalsTable:
    """Таблица приходов для одной пары источник/приемник сценария."""
    return ArrivalsTable(
        frequency_hz=scenario.frequency_hz,
        tx_depths_m=(scenario.tx_depth_m,),
        rx_depths_m=(scenario.rx_depth_m,),
        rx_ranges_m=(scenario.range_m,),
        arrivals={(0, 0, 0): tuple(rays)},
    )
