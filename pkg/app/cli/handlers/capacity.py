"""
Обработчики подкоманд capacity, sweep и compare.
"""

import argparse

from app.services.csv_service import write_csv
from app.services.experiment_service import ExperimentService

from .common import (
    AOA_COMPARISON_COLUMNS,
    AXIS_UNITS,
    CAPACITY_COLUMNS,
    aoa_comparison_values,
    capacity_values,
    load_config,
    provenance,
    with_axis,
)


async def capacity_command_handler(args: argparse.Namespace) -> str:
    """Обработчик подкоманды capacity: одна рабочая точка."""
    service = ExperimentService(load_config(args))
    row = await service.run_capacity()
    comments = provenance(args, service, capacity_unit="bits/s/Hz")
    return write_csv(CAPACITY_COLUMNS, [capacity_values(row)], comments, path=args.out)


async def sweep_command_handler(args: argparse.Namespace) -> str:
    """
    Обработчик подкоманды sweep.

    Args:
        args: Аргументы командной строки

    Returns:
        Текст CSV: значение оси и емкости в порядке значений оси
    """
    service = ExperimentService(load_config(args))
    rows = await service.run_sweep()
    axis = service.config.sweep.axis.value
    comments = provenance(args, service, axis=f"{axis} ({AXIS_UNITS[axis]})", capacity_unit="bits/s/Hz")
    return write_csv(("axis_value",) + CAPACITY_COLUMNS, with_axis(rows), comments, path=args.out)


async def compare_command_handler(args: argparse.Namespace) -> str:
    """
    Обработчик подкоманды compare.

    По умолчанию - вектор, SISO и граница по ОСШ; с --aoa-models -
    емкость при треугольной и усеченных плотностях угла прихода.
    """
    service = ExperimentService(load_config(args))
    if getattr(args, "aoa_models", False):
        rows = await service.run_compare_aoa_models()
        comments = provenance(args, service, axis="snr_db (dB)", capacity_unit="bits/s/Hz", aoa_spread="matched variance")
        return write_csv(AOA_COMPARISON_COLUMNS, [aoa_comparison_values(row) for row in rows], comments, path=args.out)
    rows = await service.run_compare()
    comments = provenance(args, service, axis="snr_db (dB)", capacity_unit="bits/s/Hz", jensen_check="passed")
    return write_csv(("axis_value",) + CAPACITY_COLUMNS, with_axis(rows), comments, path=args.out)
