"""
Инициализация обработчиков подкоманд.

Регистрирует все подкоманды командной строки.
"""

import argparse

from .trace import trace_command_handler, parse_arrivals_command_handler
from .fit import fit_command_handler
from .capacity import capacity_command_handler, sweep_command_handler, compare_command_handler


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Файл конфигурации эксперимента")
    parser.add_argument("--out", help="Файл результата (по умолчанию stdout)")


def _add_mc(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="Зерно генератора")
    parser.add_argument("--trials", type=int, help="Число испытаний Монте-Карло")
    parser.add_argument("--bins", type=int, help="Число бинов по углу прихода")


def register_handlers(subparsers: argparse._SubParsersAction) -> None:
    """
    Регистрация всех подкоманд.

    Args:
        subparsers: Группа подкоманд парсера
    """
    trace = subparsers.add_parser("trace", help="Собственные лучи сценария")
    _add_common(trace)
    trace.add_argument("--format", choices=("csv", "arr"), default="csv", help="Формат вывода")
    trace.set_defaults(handler=trace_command_handler)

    parse_arrivals = subparsers.add_parser("parse-arrivals", help="Файл приходов Bellhop в CSV")
    _add_common(parse_arrivals)
    parse_arrivals.add_argument("--arrivals", required=True, help="Файл .arr")
    parse_arrivals.set_defaults(handler=parse_arrivals_command_handler)

    fit = subparsers.add_parser("fit", help="Подгонка карты масштаба")
    _add_common(fit)
    fit.add_argument("--bins", type=int, help="Число бинов по углу прихода")
    source = fit.add_mutually_exclusive_group()
    source.add_argument("--arrivals", help="Файл .arr")
    source.add_argument("--points", help="CSV точек (aoa_rad, gain_sq, weight)")
    fit.set_defaults(handler=fit_command_handler)

    for name, handler, help_text in (
        ("capacity", capacity_command_handler, "Емкость в одной рабочей точке"),
        ("sweep", sweep_command_handler, "Развертка емкости по оси"),
        ("compare", compare_command_handler, "Вектор, SISO и верхняя граница по ОСШ"),
    ):
        parser = subparsers.add_parser(name, help=help_text)
        _add_common(parser)
        _add_mc(parser)
        parser.set_defaults(handler=handler)
        if name == "compare":
            parser.add_argument(
                "--aoa-models",
                action="store_true",
                help="Сравнить треугольную плотность угла с усеченными гауссовой и лапласовой",
            )


__all__ = [
    "register_handlers",
    "trace_command_handler",
    "parse_arrivals_command_handler",
    "fit_command_handler",
    "capacity_command_handler",
    "sweep_command_handler",
    "compare_command_handler",
]
