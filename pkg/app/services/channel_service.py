"""
Сервис статистической модели канала.

Плотности угла прихода, карта масштаба Рэлея, выборка путей и энергии
трех компонент векторного приемника.
"""

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from app.core.exceptions import ValidationException
from app.models.channel import (
    RAYLEIGH_ENERGY_FACTOR,
    ChannelRealization,
    GainSampling,
    PathArrival,
    ScaledGaussianGainModel,
    TriangularAoaModel,
    TruncatedAoaModel,
    TruncatedKind,
)

AoaModel = Union[TriangularAoaModel, TruncatedAoaModel]
ArrayLike = Union[float, np.ndarray]

# Минимальный размер пачки предложений при выборке с отклонением
_REJECTION_MIN_BATCH = 64


def _as_output(value: np.ndarray, scalar: bool) -> ArrayLike:
    return float(value) if scalar else value


def sigma_squared(model: ScaledGaussianGainModel, gamma: ArrayLike) -> ArrayLike:
    """
    Масштаб Рэлея как функция угла прихода.

    Args:
        model: Карта масштаба
        gamma: Угол прихода, рад (число или массив)

    Returns:
        Lambda * exp(-((gamma - xi) / varsigma)^2)
    """
    g = np.asarray(gamma, dtype=float)
    value = model.lambda_ * np.exp(-(((g - model.xi) / model.varsigma) ** 2))
    return _as_output(value, g.ndim == 0)


def rayleigh_gain_density(sigma2: float, alpha: float) -> float:
    """
    Плотность Рэлея (alpha / sigma^2) * exp(-alpha^2 / (2 sigma^2)).

    Raises:
        ValidationException: sigma2 <= 0 или alpha < 0
    """
    if not sigma2 > 0:
        raise ValidationException(f"sigma2 должна быть положительной: {sigma2}")
    if alpha < 0:
        raise ValidationException(f"alpha должна быть неотрицательной: {alpha}")
    return alpha / sigma2 * math.exp(-alpha * alpha / (2.0 * sigma2))


def rayleigh_inverse_cdf(sigma2: ArrayLike, u: ArrayLike) -> ArrayLike:
    """Обратная функция распределения: alpha = sqrt(-2 sigma^2 ln U), U из (0, 1]."""
    s = np.asarray(sigma2, dtype=float)
    uu = np.asarray(u, dtype=float)
    value = np.sqrt(-2.0 * s * np.log(uu))
    # -0.0 при U = 1
    value = np.abs(value)
    return _as_output(value, s.ndim == 0 and uu.ndim == 0)


def _unit_interval_open_left(rng: np.random.Generator, size: Optional[int]) -> ArrayLike:
    # rng.random() лежит в [0, 1), поэтому 1 - U лежит в (0, 1]
    return 1.0 - rng.random(size)


def sample_path_gain(
    model: ScaledGaussianGainModel,
    gamma: ArrayLike,
    rng: np.random.Generator,
) -> ArrayLike:
    """
    Амплитуда пути из распределения Рэлея с масштабом sigma^2(gamma).

    Args:
        model: Карта масштаба
        gamma: Угол прихода (число или массив)
        rng: Генератор случайных чисел

    Returns:
        Амплитуда (или массив амплитуд той же формы, что gamma)
    """
    g = np.asarray(gamma, dtype=float)
    u = _unit_interval_open_left(rng, None if g.ndim == 0 else g.shape)
    return rayleigh_inverse_cdf(sigma_squared(model, g), u)


def triangular_density(model: TriangularAoaModel, gamma: ArrayLike) -> ArrayLike:
    """
    Треугольная плотность угла прихода.

    Для beta = 0 плотность вырождается в точечную массу: inf в theta, 0 вне.
    """
    g = np.asarray(gamma, dtype=float)
    if model.is_degenerate:
        value = np.where(g == model.theta, np.inf, 0.0)
        return _as_output(value, g.ndim == 0)

    beta = model.beta
    distance = np.abs(g - model.theta)
    value = np.where(distance < beta, (beta - distance) / (beta * beta), 0.0)
    return _as_output(value, g.ndim == 0)


def triangular_inverse_cdf(model: TriangularAoaModel, u: ArrayLike) -> ArrayLike:
    """Обратная функция распределения треугольной плотности, U из [0, 1]."""
    uu = np.asarray(u, dtype=float)
    lower = model.theta - model.beta + model.beta * np.sqrt(2.0 * uu)
    upper = model.theta + model.beta - model.beta * np.sqrt(2.0 * (1.0 - uu))
    value = np.where(uu <= 0.5, lower, upper)
    return _as_output(value, uu.ndim == 0)


def truncated_density(model: TruncatedAoaModel, gamma: ArrayLike) -> ArrayLike:
    """Усеченная гауссова или лапласова плотность угла прихода."""
    g = np.asarray(gamma, dtype=float)
    offset = g - model.mu
    if model.kind == TruncatedKind.GAUSSIAN:
        base = np.exp(-0.5 * (offset / model.sigma) ** 2) / (model.sigma * math.sqrt(2.0 * math.pi))
    else:
        base = np.exp(-math.sqrt(2.0) * np.abs(offset) / model.sigma) / (model.sigma * math.sqrt(2.0))
    value = np.where(np.abs(offset) <= math.pi / 2, model.normalizer * base, 0.0)
    return _as_output(value, g.ndim == 0)


def aoa_density(model: AoaModel, gamma: ArrayLike) -> ArrayLike:
    """Плотность угла прихода для любой поддерживаемой модели."""
    if isinstance(model, TriangularAoaModel):
        return triangular_density(model, gamma)
    return truncated_density(model, gamma)


def matched_truncated_model(model: TriangularAoaModel, kind: TruncatedKind) -> TruncatedAoaModel:
    """
    Усеченная плотность с той же модой и дисперсией, что у треугольной.

    Дисперсия треугольной плотности beta^2 / 6, поэтому sigma = beta / sqrt(6).

    Raises:
        ValidationException: Треугольная плотность вырождена (beta = 0)
    """
    if model.is_degenerate:
        raise ValidationException(f"Усеченная плотность {kind.value} требует beta > 0 (theta={model.theta})")
    return TruncatedAoaModel(kind=kind, mu=model.theta, sigma=model.beta / math.sqrt(6.0))


def _sample_truncated(model: TruncatedAoaModel, rng: np.random.Generator, n: int) -> np.ndarray:
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        batch = max(need, _REJECTION_MIN_BATCH)
        if model.kind == TruncatedKind.GAUSSIAN:
            proposal = rng.normal(model.mu, model.sigma, size=batch)
        else:
            proposal = rng.laplace(model.mu, model.laplace_scale, size=batch)
        accepted = proposal[np.abs(proposal - model.mu) <= math.pi / 2][:need]
        out[filled:filled + accepted.size] = accepted
        filled += accepted.size
    return out


def sample_aoa(model: AoaModel, rng: np.random.Generator, size: Optional[int] = None) -> ArrayLike:
    """
    Выборка угла прихода.

    Треугольная плотность - через обратную функцию распределения, усеченные -
    отбором из неусеченной плотности.

    Args:
        model: Модель угла прихода
        rng: Генератор случайных чисел
        size: Размер выборки (None - одно число)

    Returns:
        Угол или массив углов внутри носителя
    """
    if isinstance(model, TriangularAoaModel):
        return triangular_inverse_cdf(model, rng.random(size))

    values = _sample_truncated(model, rng, 1 if size is None else size)
    return float(values[0]) if size is None else values


def _validate_paths(aoa_models: Sequence[AoaModel], delays: Optional[Sequence[float]] = None) -> None:
    if len(aoa_models) == 0:
        raise ValidationException("Нужен хотя бы один путь")
    if delays is not None and len(delays) != len(aoa_models):
        raise ValidationException(
            f"Число задержек ({len(delays)}) не совпадает с числом моделей угла ({len(aoa_models)})"
        )


def sample_channel_batch(
    aoa_models: Sequence[AoaModel],
    gain_model: ScaledGaussianGainModel,
    rng: np.random.Generator,
    size: int,
    gain_sampling: GainSampling = GainSampling.RAYLEIGH,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Выборка size независимых реализаций канала.

    Порядок выборки - по путям: все величины пути i извлекаются раньше,
    чем величины пути i + 1. Добавление пути в конец не меняет выборки
    предыдущих путей.

    Returns:
        (gains, aoas) - массивы формы (size, N)
    """
    _validate_paths(aoa_models)
    n_paths = len(aoa_models)
    gains = np.empty((size, n_paths))
    aoas = np.empty((size, n_paths))

    for i, aoa_model in enumerate(aoa_models):
        aoas[:, i] = sample_aoa(aoa_model, rng, size)
        u = _unit_interval_open_left(rng, size)
        scale = sigma_squared(gain_model, aoas[:, i])
        if gain_sampling == GainSampling.DETERMINISTIC:
            gains[:, i] = np.sqrt(RAYLEIGH_ENERGY_FACTOR * scale)
        else:
            gains[:, i] = rayleigh_inverse_cdf(scale, u)

    return gains, aoas


def sample_channel(
    aoa_models: Sequence[AoaModel],
    delays: Sequence[float],
    gain_model: ScaledGaussianGainModel,
    rng: np.random.Generator,
    gain_sampling: GainSampling = GainSampling.RAYLEIGH,
) -> ChannelRealization:
    """
    Одна реализация канала.

    Args:
        aoa_models: Модели угла прихода по путям
        delays: Задержки путей, с
        gain_model: Карта масштаба
        rng: Генератор случайных чисел
        gain_sampling: Способ получения амплитуд

    Returns:
        ChannelRealization: Реализация с N путями

    Raises:
        ValidationException: Пустой вход или несовпадение длин
    """
    _validate_paths(aoa_models, delays)
    gains, aoas = sample_channel_batch(aoa_models, gain_model, rng, 1, gain_sampling)
    try:
        paths = tuple(
            PathArrival(amplitude=float(h), aoa=float(gamma), delay=float(tau))
            for h, gamma, tau in zip(gains[0], aoas[0], delays)
        )
    except ValueError as e:
        logger.error(f"Недопустимая реализация канала: {e}")
        raise ValidationException(f"Недопустимая реализация канала: {e}")
    return ChannelRealization(paths=paths)


def component_energies_batch(gains: np.ndarray, aoas: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Энергии (e_p, e_y, e_z) для массивов формы (size, N)."""
    energy = gains * gains
    e_p = energy.sum(axis=-1)
    e_y = (energy * np.cos(aoas) ** 2).sum(axis=-1)
    e_z = (energy * np.sin(aoas) ** 2).sum(axis=-1)
    return e_p, e_y, e_z


def component_energies(realization: ChannelRealization) -> Tuple[float, float, float]:
    """
    Энергии канала давления и двух каналов скорости.

    Returns:
        (e_p, e_y, e_z): sum h^2, sum h^2 cos^2(gamma), sum h^2 sin^2(gamma)
    """
    gains = np.array([p.amplitude for p in realization.paths])
    aoas = np.array([p.aoa for p in realization.paths])
    e_p, e_y, e_z = component_energies_batch(gains, aoas)
    return float(e_p), float(e_y), float(e_z)


class ChannelService:
    """Плотности, сэмплеры и энергии компонент статистического канала."""

    sigma_squared = staticmethod(sigma_squared)
    rayleigh_gain_density = staticmethod(rayleigh_gain_density)
    rayleigh_inverse_cdf = staticmethod(rayleigh_inverse_cdf)
    sample_path_gain = staticmethod(sample_path_gain)
    triangular_density = staticmethod(triangular_density)
    triangular_inverse_cdf = staticmethod(triangular_inverse_cdf)
    truncated_density = staticmethod(truncated_density)
    aoa_density = staticmethod(aoa_density)
    matched_truncated_model = staticmethod(matched_truncated_model)
    sample_aoa = staticmethod(sample_aoa)
    sample_channel_batch = staticmethod(sample_channel_batch)
    sample_channel = staticmethod(sample_channel)
    component_energies_batch = staticmethod(component_energies_batch)
    component_energies = staticmethod(component_energies)
