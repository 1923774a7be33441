"""
Сервис подгонки карты масштаба sigma^2(gamma) = Lambda exp(-((gamma - xi)/varsigma)^2)
по статистике амплитуд лучей.
"""

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError
from scipy import optimize

from app.core.exceptions import FittingException, ValidationException
from app.models.channel import ScaledGaussianGainModel
from app.models.fitting import FitResult, GainAoaPoint
from app.models.geometry import Eigenray
from app.services.csv_service import read_csv, write_csv

POINTS_COLUMNS = ("aoa_rad", "gain_sq", "weight")
FIT_COLUMNS = ("lambda", "xi_rad", "varsigma_rad", "sse", "r2", "rmse", "converged", "iterations", "n_points")

# Параметры решателя Левенберга-Марквардта
_XTOL = 1e-10
_FTOL = 1e-15
_GTOL = 1e-15
_MAX_NFEV = 200


def bin_gain_vs_aoa(rays: Sequence[Eigenray], n_bins: int) -> List[GainAoaPoint]:
    """
    Средний квадрат амплитуды по равным бинам угла прихода.

    Args:
        rays: Собственные лучи
        n_bins: Число бинов на наблюдаемом диапазоне углов

    Returns:
        List[GainAoaPoint]: Точки в центрах непустых бинов, вес - число лучей

    Raises:
        ValidationException: Пустой набор лучей или n_bins < 2
    """
    if not rays:
        raise ValidationException("Пустой набор лучей")
    if n_bins < 2:
        raise ValidationException(f"Число бинов должно быть не меньше 2: {n_bins}")

    aoas = np.array([ray.aoa for ray in rays])
    energy = np.array([ray.amplitude for ray in rays]) ** 2
    lower, upper = float(aoas.min()), float(aoas.max())

    if lower == upper:
        logger.warning(f"Все {len(rays)} лучей приходят под одним углом {lower}; формируется один бин")
        return [GainAoaPoint(aoa=lower, gain_sq=float(energy.mean()), weight=float(len(rays)))]

    counts, edges = np.histogram(aoas, bins=n_bins, range=(lower, upper))
    sums, _ = np.histogram(aoas, bins=edges, weights=energy)
    centers = 0.5 * (edges[:-1] + edges[1:])

    points = [
        GainAoaPoint(aoa=float(center), gain_sq=float(total / count), weight=float(count))
        for center, total, count in zip(centers, sums, counts)
        if count > 0
    ]
    logger.debug(f"Биннинг: {len(rays)} лучей, {len(points)} непустых бинов из {n_bins}")
    return points


def _as_arrays(points: Sequence[GainAoaPoint]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.array([p.aoa for p in points])
    y = np.array([p.gain_sq for p in points])
    w = np.array([p.weight for p in points])
    return x, y, w


def _shape(x: np.ndarray, xi: float, varsigma: float) -> np.ndarray:
    return np.exp(-(((x - xi) / varsigma) ** 2))


def _model_jacobian(x: np.ndarray, lam: float, xi: float, varsigma: float) -> np.ndarray:
    """Производные модели по (Lambda, xi, varsigma), форма (n, 3)."""
    e = _shape(x, xi, varsigma)
    offset = x - xi
    return np.column_stack(
        [
            e,
            lam * e * 2.0 * offset / varsigma ** 2,
            lam * e * 2.0 * offset ** 2 / varsigma ** 3,
        ]
    )


def model_gradient(points: Sequence[GainAoaPoint], model: ScaledGaussianGainModel) -> np.ndarray:
    """
    Градиент 0.5 * sum w (gain_sq - model)^2 по (Lambda, xi, varsigma).

    Returns:
        Массив из трех компонент
    """
    if not points:
        raise ValidationException("Пустой набор точек")
    x, y, w = _as_arrays(points)
    residual = y - model.lambda_ * _shape(x, model.xi, model.varsigma)
    jacobian = _model_jacobian(x, model.lambda_, model.xi, model.varsigma)
    return -(jacobian.T @ (w * residual))


def goodness_of_fit(points: Sequence[GainAoaPoint], model: ScaledGaussianGainModel) -> Tuple[float, float, float]:
    """
    Метрики качества подгонки (без весов).

    Returns:
        (sse, r2, rmse)

    Raises:
        FittingException: Нулевая дисперсия данных, r2 не определен
    """
    if not points:
        raise ValidationException("Пустой набор точек")
    x, y, _ = _as_arrays(points)
    residual = y - model.lambda_ * _shape(x, model.xi, model.varsigma)
    sse = float(np.sum(residual ** 2))
    variance = float(np.sum((y - y.mean()) ** 2))
    if variance == 0.0:
        raise FittingException("Нулевая дисперсия данных: коэффициент детерминации не определен")
    rmse = math.sqrt(sse / len(points))
    return sse, 1.0 - sse / variance, rmse


def fit_scaled_gaussian(points: Sequence[GainAoaPoint]) -> FitResult:
    """
    Взвешенная подгонка (Lambda, xi, varsigma) методом Левенберга-Марквардта.

    Данные нормируются на Lambda_0 = max gain_sq, поэтому подгонка точно
    эквивариантна к масштабу. Начальное приближение: Lambda_0, xi_0 - угол
    максимума, varsigma_0 - половина диапазона углов.

    Args:
        points: Точки статистики (не меньше трех)

    Returns:
        FitResult: Модель и метрики; converged=False при исчерпании вычислений

    Raises:
        FittingException: Мало точек или вырожденные данные
    """
    if len(points) < 3:
        raise FittingException(f"Для подгонки трех параметров нужно не меньше 3 точек, получено {len(points)}")

    x, y, w = _as_arrays(points)
    if float(np.ptp(y)) == 0.0:
        raise FittingException("Все значения gain_sq равны: varsigma не ограничена")
    span = float(np.ptp(x))
    if span == 0.0:
        raise FittingException("Все точки при одном угле прихода: подгонка вырождена")

    scale = float(y.max())
    y_norm = y / scale
    sqrt_w = np.sqrt(w)
    start = np.array([1.0, float(x[np.argmax(y)]), 0.5 * span])

    def residuals(p: np.ndarray) -> np.ndarray:
        return sqrt_w * (y_norm - p[0] * _shape(x, p[1], p[2]))

    def jacobian(p: np.ndarray) -> np.ndarray:
        return -sqrt_w[:, None] * _model_jacobian(x, p[0], p[1], p[2])

    solution = optimize.least_squares(
        residuals,
        start,
        jac=jacobian,
        method="lm",
        x_scale="jac",
        xtol=_XTOL,
        ftol=_FTOL,
        gtol=_GTOL,
        max_nfev=_MAX_NFEV,
    )

    amplitude, xi, varsigma = solution.x
    if not np.all(np.isfinite(solution.x)) or amplitude <= 0.0 or varsigma == 0.0:
        logger.error(f"Подгонка дала недопустимые параметры: {solution.x}")
        raise FittingException(f"Подгонка дала недопустимые параметры: {solution.x}")

    try:
        model = ScaledGaussianGainModel(lambda_=amplitude * scale, xi=float(xi), varsigma=abs(float(varsigma)))
    except ValidationError as e:
        raise FittingException(f"Недопустимая модель после подгонки: {e.errors()[0]['msg']}")

    converged = bool(solution.status > 0)
    if not converged:
        logger.warning(f"Подгонка не сошлась за {solution.nfev} вычислений: {solution.message}")

    sse, r2, rmse = goodness_of_fit(points, model)
    logger.info(
        f"Подгонка: Lambda={model.lambda_:.4e}, xi={model.xi:.5f}, varsigma={model.varsigma:.5f}, "
        f"R2={r2:.4f}, точек {len(points)}"
    )
    return FitResult(
        model=model,
        sse=sse,
        r2=r2,
        rmse=rmse,
        converged=converged,
        iterations=int(solution.nfev),
        n_points=len(points),
    )


def load_points_csv(path: Union[str, Path]) -> List[GainAoaPoint]:
    """
    Чтение точек статистики из CSV (aoa_rad, gain_sq[, weight]).

    Raises:
        ValidationException: Нет нужных столбцов или недопустимое значение (с номером строки)
    """
    header, rows = read_csv(path)
    missing = [name for name in POINTS_COLUMNS[:2] if name not in header]
    if missing:
        raise ValidationException(f"В CSV нет столбцов: {', '.join(missing)}")
    index = {name: header.index(name) for name in POINTS_COLUMNS if name in header}

    points = []
    for number, fields in rows:
        try:
            points.append(
                GainAoaPoint(
                    aoa=float(fields[index["aoa_rad"]]),
                    gain_sq=float(fields[index["gain_sq"]]),
                    weight=float(fields[index["weight"]]) if "weight" in index else 1.0,
                )
            )
        except (ValueError, IndexError) as e:
            raise ValidationException(f"line {number}: недопустимая точка: {e}")
    logger.info(f"Прочитано {len(points)} точек из {path}")
    return points


def dump_points_csv(points: Sequence[GainAoaPoint], path: Optional[Union[str, Path]] = None) -> str:
    """Запись точек статистики в CSV."""
    return write_csv(POINTS_COLUMNS, [(p.aoa, p.gain_sq, p.weight) for p in points], path=path)


def fit_result_row(result: FitResult) -> Tuple:
    """Строка таблицы FIT_COLUMNS."""
    return (
        result.model.lambda_,
        result.model.xi,
        result.model.varsigma,
        result.sse,
        result.r2,
        result.rmse,
        result.converged,
        result.iterations,
        result.n_points,
    )


def dump_fit_csv(
    result: FitResult,
    comments: Sequence[str] = (),
    path: Optional[Union[str, Path]] = None,
) -> str:
    """Запись результата подгонки в CSV; несошедшаяся подгонка помечается в комментарии."""
    comments = list(comments)
    if not result.converged:
        comments.append("WARNING: fit did not converge, best-so-far parameters")
    return write_csv(FIT_COLUMNS, [fit_result_row(result)], comments, path=path)


class FittingService:
    """Биннинг статистики лучей и подгонка карты масштаба."""

    bin_gain_vs_aoa = staticmethod(bin_gain_vs_aoa)
    model_gradient = staticmethod(model_gradient)
    goodness_of_fit = staticmethod(goodness_of_fit)
    fit_scaled_gaussian = staticmethod(fit_scaled_gaussian)
    load_points_csv = staticmethod(load_points_csv)
    dump_points_csv = staticmethod(dump_points_csv)
    fit_result_row = staticmethod(fit_result_row)
    dump_fit_csv = staticmethod(dump_fit_csv)
