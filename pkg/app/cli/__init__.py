"""
Командная строка VectorSensorCapacity.
"""

import argparse
import sys
from typing import Optional, Sequence

from loguru import logger

from app.core.exceptions import ChannelSimException

from .handlers import register_handlers


def build_parser() -> argparse.ArgumentParser:
    """Парсер аргументов со всеми подкомандами."""
    parser = argparse.ArgumentParser(
        prog="vector-sensor-capacity",
        description="Емкость канала векторного приемника в мелководном волноводе",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_handlers(subparsers)
    return parser


async def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """
    Разбор аргументов и выполнение подкоманды.

    Returns:
        Код завершения: 0 - успех, 1 - ошибка предметной области
    """
    args = build_parser().parse_args(argv)
    try:
        text = await args.handler(args)
    except ChannelSimException as e:
        logger.error(f"{args.command}: {e.message}")
        return 1
    if not args.out:
        sys.stdout.write(text)
    return 0


__all__ = ["build_parser", "run_cli"]
