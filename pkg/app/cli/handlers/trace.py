"""
Обработчики подкоманд trace и parse-arrivals.

Выводят собственные лучи в CSV (или в формате приходов Bellhop).
"""

import argparse
from typing import List, Sequence

from loguru import logger

from app.models.geometry import Eigenray
from app.services.arrivals_service import (
    load_bellhop_arrivals,
    render_bellhop_arrivals,
    scenario_to_arrivals_table,
)
from app.services.csv_service import write_csv
from app.services.experiment_service import ExperimentService

from .common import load_config, provenance

RAY_COLUMNS = ("aoa_rad", "delay_s", "amplitude", "surface_bounces", "bottom_bounces")


def _ray_values(ray: Eigenray) -> List:
    return [ray.aoa, ray.delay, ray.amplitude, ray.surface_bounces, ray.bottom_bounces]


def rays_to_csv(rays: Sequence[Eigenray], comments: Sequence[str], path=None) -> str:
    """Таблица лучей."""
    return write_csv(RAY_COLUMNS, [_ray_values(ray) for ray in rays], comments, path=path)


async def trace_command_handler(args: argparse.Namespace) -> str:
    """
    Обработчик подкоманды trace.

    Args:
        args: Аргументы командной строки

    Returns:
        Текст CSV или файла приходов
    """
    config = load_config(args)
    service = ExperimentService(config)
    rays = await service.run_trace()

    if args.format == "arr":
        text = render_bellhop_arrivals(scenario_to_arrivals_table(config.scenario, rays))
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(text)
            logger.info(f"Файл приходов записан: {args.out}")
        return text

    comments = provenance(args, scenario=config.scenario.model_dump_json())
    return rays_to_csv(rays, comments, path=args.out)


async def parse_arrivals_command_handler(args: argparse.Namespace) -> str:
    """Обработчик подкоманды parse-arrivals: файл .arr в CSV лучей."""
    table = load_bellhop_arrivals(args.arrivals)
    header = ("tx_index", "rx_depth_index", "rx_range_index") + RAY_COLUMNS
    rows = [
        [j, k, m] + _ray_values(ray)
        for (j, k, m) in table.pairs()
        for ray in table.rays(j, k, m)
    ]
    comments = [
        f"command: {args.command}",
        f"arrivals: {args.arrivals}",
        f"frequency_hz: {table.frequency_hz!r}",
    ]
    return write_csv(header, rows, comments, path=args.out)
