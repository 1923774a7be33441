"""
Общие функции обработчиков подкоманд.
"""

import argparse
from typing import Any, Dict, List, Sequence

from app.schemas.experiment import AoaComparisonRow, CapacityRow, ExperimentConfig
from app.services.config_service import load_experiment_config
from app.services.experiment_service import ExperimentService

CAPACITY_COLUMNS = (
    "c_mc_vector",
    "c_mc_stderr",
    "c_mc_siso",
    "c_ub_closed",
    "c_ub_quadrature",
    "snr_db",
    "n_paths",
    "lambda",
    "xi_rad",
    "varsigma_rad",
)

AOA_COMPARISON_COLUMNS = (
    "snr_db",
    "c_mc_triangular",
    "c_mc_gaussian",
    "c_mc_laplacian",
    "c_mc_stderr",
    "max_relative_difference",
    "n_paths",
)

AXIS_UNITS = {
    "snr_db": "dB",
    "range_m": "m",
    "frequency_hz": "Hz",
    "n_rays": "count",
}


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Значения флагов, заменяющие ключи конфигурации."""
    return {
        "capacity.seed": getattr(args, "seed", None),
        "capacity.trials": getattr(args, "trials", None),
        "gain.n_bins": getattr(args, "bins", None),
    }


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Конфигурация из --config с учетом флагов."""
    return load_experiment_config(args.config, config_overrides(args))


def provenance(args: argparse.Namespace, service: ExperimentService = None, **extra: Any) -> List[str]:
    """Строки комментариев о происхождении таблицы."""
    lines = [f"command: {args.command}", f"config: {args.config or '<defaults>'}"]
    if service is not None:
        lines.append(f"experiment: {service.config.name}")
        lines.append(f"seed: {service.seed}")
        lines.append(f"trials: {service.trials}")
    lines.extend(f"{key}: {value}" for key, value in extra.items())
    return lines


def capacity_values(row: CapacityRow) -> List[Any]:
    """Значения строки в порядке CAPACITY_COLUMNS."""
    return [
        row.c_mc_vector,
        row.c_mc_stderr,
        row.c_mc_siso,
        row.c_ub_closed,
        row.c_ub_quadrature,
        row.snr_db,
        row.n_paths,
        row.lambda_,
        row.xi_rad,
        row.varsigma_rad,
    ]


def with_axis(rows: Sequence[CapacityRow]) -> List[List[Any]]:
    """Строки таблицы развертки: значение оси и емкости."""
    return [[row.axis_value] + capacity_values(row) for row in rows]


def aoa_comparison_values(row: AoaComparisonRow) -> List[Any]:
    """Значения строки в порядке AOA_COMPARISON_COLUMNS."""
    return [getattr(row, column) for column in AOA_COMPARISON_COLUMNS]
