"""
Обработчик подкоманды fit.

Подгонка карты масштаба по файлу приходов, таблице точек или
трассировке сценария конфигурации.
"""

import argparse

from loguru import logger

from app.services.arrivals_service import load_bellhop_arrivals
from app.services.experiment_service import ExperimentService
from app.services.fitting_service import FittingService

from .common import load_config, provenance


async def fit_command_handler(args: argparse.Namespace) -> str:
    """
    Обработчик подкоманды fit.

    Args:
        args: Аргументы командной строки (--arrivals, --points или --config)

    Returns:
        Текст CSV с параметрами и метриками подгонки
    """
    config = load_config(args)
    service = ExperimentService(config)

    if args.points:
        source = f"points: {args.points}"
        result = FittingService.fit_scaled_gaussian(FittingService.load_points_csv(args.points))
    elif args.arrivals:
        source = f"arrivals: {args.arrivals}"
        table = load_bellhop_arrivals(args.arrivals)
        rays = [ray for pair in table.pairs() for ray in table.rays(*pair)]
        result = FittingService.fit_scaled_gaussian(FittingService.bin_gain_vs_aoa(rays, service.n_bins))
    else:
        source = "trace: config scenario"
        result = await service.run_fit()

    if not result.converged:
        logger.warning("Подгонка не сошлась, результат помечен в выводе")

    comments = provenance(args) + [source, f"bins: {service.n_bins}"]
    return FittingService.dump_fit_csv(result, comments, path=args.out)
