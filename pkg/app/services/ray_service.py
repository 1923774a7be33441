"""
Сервис лучевой геометрии изоскоростного волновода.

Метод мнимых источников, коэффициент отражения от дна, поглощение Торпа
и преобразование лучей в модели угла прихода.
"""

import math
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger

from app.core.exceptions import ValidationException
from app.models.channel import TriangularAoaModel
from app.models.geometry import Eigenray, Scenario

# 20*log10(e): перевод непер в децибелы
_DB_PER_NEPER = 20.0 * math.log10(math.e)


def thorp_absorption(frequency: float) -> float:
    """
    Поглощение в морской воде по формуле Торпа.

    Args:
        frequency: Частота, Гц

    Returns:
        Поглощение, дБ/км
    """
    if not frequency > 0:
        raise ValidationException(f"Частота должна быть положительной: {frequency}")
    f2 = (frequency / 1000.0) ** 2
    return 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003


def bottom_reflection_coefficient(grazing: float, scenario: Scenario) -> float:
    """
    Модуль коэффициента отражения Рэлея от жидкого поглощающего дна.

    Затухание в дБ на длину волны вносится мнимой частью показателя
    преломления n = (c / c_p)(1 + i*delta).

    Args:
        grazing: Угол скольжения, рад, из (0, pi/2]
        scenario: Сценарий со свойствами воды и дна

    Returns:
        |R| из [0, 1]
    """
    if not 0.0 < grazing <= math.pi / 2:
        raise ValidationException(f"Угол скольжения вне (0, pi/2]: {grazing}")

    delta = scenario.bottom_attenuation_db_wavelength / (2.0 * math.pi * _DB_PER_NEPER)
    n = scenario.sound_speed_mps / scenario.bottom_speed_mps * (1.0 + 1j * delta)
    m = scenario.bottom_density_kgm3 / scenario.water_density_kgm3

    t1 = m * math.sin(grazing)
    t2 = np.sqrt(n * n - math.cos(grazing) ** 2 + 0j)
    coefficient = (t1 - t2) / (t1 + t2)
    return float(min(abs(coefficient), 1.0))


def _image_offsets(scenario: Scenario, order: int) -> List[Tuple[float, int, int, float]]:
    """
    Смещения мнимых источников по вертикали для данного порядка отражений.

    Returns:
        Список (z_image - d_r, отражения от поверхности, отражения от дна,
        знак угла выхода: +1 вниз, -1 вверх)
    """
    d = scenario.water_depth_m
    zs = scenario.tx_depth_m
    zr = scenario.rx_depth_m

    if order == 0:
        return [(zs - zr, 0, 0, math.copysign(1.0, zr - zs))]

    m, odd = divmod(order, 2)
    if odd:
        surface_first = (-(2 * m * d + zs + zr), m + 1, m, -1.0)
        bottom_first = (2 * (m + 1) * d - zs - zr, m, m + 1, 1.0)
    else:
        surface_first = (2 * m * d + zs - zr, m, m, -1.0)
        bottom_first = (zs - zr - 2 * m * d, m, m, 1.0)
    return [surface_first, bottom_first]


def trace_image_method(scenario: Scenario) -> List[Eigenray]:
    """
    Собственные лучи изоскоростного волновода методом мнимых источников.

    Амплитуда луча: сферическое расхождение 1/L, модуль отражения от
    поверхности 1, отражение от дна по Рэлею для каждого удара о дно,
    поглощение Торпа вдоль пути.

    Args:
        scenario: Сценарий

    Returns:
        List[Eigenray]: 1 + 2K лучей, отсортированных по задержке
    """
    if not scenario.range_m > 0:
        raise ValidationException("range_m должна быть положительной")

    absorption_db_per_m = thorp_absorption(scenario.frequency_hz) / 1000.0
    rays: List[Eigenray] = []

    for order in range(scenario.max_bounce_order + 1):
        for offset, surface_bounces, bottom_bounces, departure_sign in _image_offsets(scenario, order):
            length = math.hypot(scenario.range_m, offset)
            amplitude = 10.0 ** (-absorption_db_per_m * length / 20.0) / length
            if bottom_bounces:
                grazing = math.atan2(abs(offset), scenario.range_m)
                amplitude *= bottom_reflection_coefficient(grazing, scenario) ** bottom_bounces
            rays.append(
                Eigenray(
                    aoa=math.atan2(offset, scenario.range_m),
                    delay=length / scenario.sound_speed_mps,
                    amplitude=amplitude,
                    surface_bounces=surface_bounces,
                    bottom_bounces=bottom_bounces,
                    departure_angle=departure_sign * math.atan2(abs(offset), scenario.range_m),
                )
            )

    # Устойчивая сортировка сохраняет прямой путь первым
    rays.sort(key=lambda ray: ray.delay)
    logger.debug(f"Трассировка: {len(rays)} лучей, R={scenario.range_m} м, f={scenario.frequency_hz} Гц")
    return rays


def truncate_rays(rays: Sequence[Eigenray], n_rays: int) -> List[Eigenray]:
    """
    Первые n_rays лучей по задержке.

    Raises:
        ValidationException: Лучей меньше, чем требуется
    """
    if n_rays < 1:
        raise ValidationException(f"Число лучей должно быть не меньше 1: {n_rays}")
    if len(rays) < n_rays:
        raise ValidationException(f"Запрошено {n_rays} лучей, доступно {len(rays)}")
    ordered = sorted(rays, key=lambda ray: ray.delay)
    return ordered[:n_rays]


def required_bounce_order(n_rays: int) -> int:
    """Минимальный порядок отражений, дающий не меньше n_rays лучей."""
    return max(0, math.ceil((n_rays - 1) / 2))


def eigenrays_to_aoa_specs(
    rays: Sequence[Eigenray],
    beta: float,
) -> Tuple[List[TriangularAoaModel], List[float]]:
    """
    Модели угла прихода по лучам: theta_i = угол луча, beta_i = beta.

    Args:
        rays: Собственные лучи
        beta: Полуширина треугольной плотности, рад

    Returns:
        (модели угла, задержки) в порядке лучей
    """
    if not rays:
        raise ValidationException("Пустой набор лучей")
    if beta < 0:
        raise ValidationException(f"beta должна быть неотрицательной: {beta}")
    models = [TriangularAoaModel(theta=ray.aoa, beta=beta) for ray in rays]
    delays = [ray.delay for ray in rays]
    return models, delays


class RayService:
    """Собственные лучи изоскоростного волновода."""

    thorp_absorption = staticmethod(thorp_absorption)
    bottom_reflection_coefficient = staticmethod(bottom_reflection_coefficient)
    trace_image_method = staticmethod(trace_image_method)
    truncate_rays = staticmethod(truncate_rays)
    required_bounce_order = staticmethod(required_bounce_order)
    eigenrays_to_aoa_specs = staticmethod(eigenrays_to_aoa_specs)
