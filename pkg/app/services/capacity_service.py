"""
Сервис расчета емкости векторного приемника (1x3 SIMO) и скалярного приемника.

Мгновенная и эргодическая емкость, верхняя граница Йенсена в замкнутой
форме и через квадратуру.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np
from loguru import logger
from scipy import integrate, special

from app.core.exceptions import (
    CapacityException,
    DominanceViolationException,
    QuadratureException,
    ValidationException,
)
from app.models.capacity import CapacityEstimate, ReceiverKind, SnrSpec
from app.models.channel import (
    RAYLEIGH_ENERGY_FACTOR,
    ChannelRealization,
    GainSampling,
    ScaledGaussianGainModel,
    TriangularAoaModel,
)
from app.services.channel_service import (
    AoaModel,
    aoa_density,
    component_energies,
    component_energies_batch,
    sample_channel_batch,
    sigma_squared,
)
from config.settings import settings

# Абсолютный допуск квадратуры в долях максимума sigma^2 на носителе
QUAD_ABS_TOL = 1e-15
QUAD_REL_TOL = 1e-12
# Допуск согласованности двух форм емкости векторного приемника
ENERGY_IDENTITY_RTOL = 1e-12
# Ниже этого beta/varsigma * max(1, |theta - xi| / varsigma) вторая разность теряет точность
SERIES_THRESHOLD = 0.05
# Испытаний в одном подпотоке генератора; часть контракта воспроизводимости
MC_SUBSTREAM_TRIALS = 4096
HALF_SQRT_PI = 0.5 * math.sqrt(math.pi)

SnrLike = Union[SnrSpec, float]


def _rho(snr: SnrLike) -> float:
    if isinstance(snr, SnrSpec):
        return snr.rho
    if not snr > 0:
        raise ValidationException(f"ОСШ должно быть положительным: {snr}")
    return float(snr)


def erf_eval(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Функция ошибок erf(x)."""
    value = special.erf(x)
    return float(value) if np.ndim(value) == 0 else value


def capacity_from_energies(
    e_p: np.ndarray,
    e_y: np.ndarray,
    e_z: np.ndarray,
    snr: SnrLike,
    receiver: ReceiverKind = ReceiverKind.VECTOR,
) -> np.ndarray:
    """
    Мгновенная емкость по энергиям компонент, бит/с/Гц.

    Для векторного приемника шум каналов скорости вдвое меньше шума
    давления, отсюда коэффициенты 2.

    Raises:
        CapacityException: Формы 1 + rho(e_p + 2e_y + 2e_z) и 1 + 3 rho e_p расходятся
    """
    rho = _rho(snr)
    if receiver == ReceiverKind.SISO:
        return np.log2(1.0 + rho * np.asarray(e_p))

    combined = rho * (np.asarray(e_p) + 2.0 * np.asarray(e_y) + 2.0 * np.asarray(e_z))
    collapsed = 3.0 * rho * np.asarray(e_p)
    if not np.allclose(combined, collapsed, rtol=ENERGY_IDENTITY_RTOL, atol=0.0):
        worst = float(np.max(np.abs(combined - collapsed) / np.maximum(collapsed, np.finfo(float).tiny)))
        logger.error(f"Нарушено тождество энергий: относительное расхождение {worst:.3e}")
        raise CapacityException(f"Нарушено тождество энергий: относительное расхождение {worst:.3e}")
    return np.log2(1.0 + combined)


def instantaneous_capacity_vector(realization: ChannelRealization, snr: SnrLike) -> float:
    """Мгновенная емкость векторного приемника log2(1 + rho(e_p + 2e_y + 2e_z))."""
    e_p, e_y, e_z = component_energies(realization)
    return float(capacity_from_energies(e_p, e_y, e_z, snr, ReceiverKind.VECTOR))


def instantaneous_capacity_siso(realization: ChannelRealization, snr: SnrLike) -> float:
    """Мгновенная емкость скалярного приемника log2(1 + rho e_p)."""
    e_p, e_y, e_z = component_energies(realization)
    return float(capacity_from_energies(e_p, e_y, e_z, snr, ReceiverKind.SISO))


def capacity_samples(
    aoa_specs: Sequence[AoaModel],
    gain_model: ScaledGaussianGainModel,
    snr: SnrLike,
    trials: int,
    seed: int,
    receiver: ReceiverKind = ReceiverKind.VECTOR,
    gain_sampling: GainSampling = GainSampling.RAYLEIGH,
    max_workers: Optional[int] = None,
) -> np.ndarray:
    """
    Мгновенные емкости trials испытаний Монте-Карло.

    Испытания разбиты на подпотоки по MC_SUBSTREAM_TRIALS; подпоток b
    получает SeedSequence(seed, spawn_key=(b,)) и всегда разыгрывается
    целиком, последний обрезается. Испытание k зависит только от seed и k:
    первые n испытаний совпадают при любом trials >= n и любом числе потоков.
    """
    rho = _rho(snr)
    max_workers = max_workers or settings.MAX_WORKERS
    n_substreams = math.ceil(trials / MC_SUBSTREAM_TRIALS)

    def run_substream(index: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
        gains, aoas = sample_channel_batch(aoa_specs, gain_model, rng, MC_SUBSTREAM_TRIALS, gain_sampling)
        e_p, e_y, e_z = component_energies_batch(gains, aoas)
        return capacity_from_energies(e_p, e_y, e_z, rho, receiver)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        values = np.concatenate(list(pool.map(run_substream, range(n_substreams))))
    return values[:trials]


def ergodic_capacity_mc(
    aoa_specs: Sequence[AoaModel],
    delays: Sequence[float],
    gain_model: ScaledGaussianGainModel,
    snr: SnrLike,
    trials: int,
    seed: int,
    receiver: ReceiverKind = ReceiverKind.VECTOR,
    gain_sampling: GainSampling = GainSampling.RAYLEIGH,
    max_workers: Optional[int] = None,
) -> CapacityEstimate:
    """
    Эргодическая емкость методом Монте-Карло.

    Подпотоки считаются в пуле потоков и сводятся в порядке номеров,
    поэтому оценка зависит только от (seed, trials) и не зависит ни от
    числа потоков, ни от настроек окружения.

    Args:
        aoa_specs: Модели угла прихода по путям (треугольные или усеченные)
        delays: Задержки путей, с
        gain_model: Карта масштаба
        snr: ОСШ
        trials: Число испытаний
        seed: Зерно
        receiver: Векторный или скалярный приемник
        gain_sampling: Рэлей или детерминированные амплитуды
        max_workers: Размер пула потоков (по умолчанию из настроек)

    Returns:
        CapacityEstimate: Среднее и стандартная ошибка
    """
    if trials < 1:
        raise ValidationException(f"Число испытаний должно быть не меньше 1: {trials}")
    if seed < 0:
        raise ValidationException(f"Зерно должно быть неотрицательным: {seed}")
    if len(aoa_specs) == 0 or len(aoa_specs) != len(delays):
        raise ValidationException("Число моделей угла и задержек должно совпадать и быть не меньше 1")

    values = capacity_samples(aoa_specs, gain_model, snr, trials, seed, receiver, gain_sampling, max_workers)
    mean = float(np.mean(values))
    std_error = float(np.std(values, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    logger.debug(
        f"Монте-Карло ({receiver.value}): N={len(aoa_specs)}, испытаний {trials}, "
        f"C={mean:.6f} +- {std_error:.2e}"
    )
    return CapacityEstimate(mean=mean, std_error=std_error, trials=trials)


def _quad(func, lower: float, upper: float, epsabs: float) -> float:
    result = integrate.quad(func, lower, upper, epsabs=epsabs, epsrel=QUAD_REL_TOL, limit=200, full_output=1)
    if len(result) > 3:
        logger.error(f"Квадратура не сошлась на [{lower}, {upper}]: {result[3]}")
        raise QuadratureException(f"Квадратура не сошлась на [{lower}, {upper}]: {result[3]}")
    return result[0]


def per_path_expected_energy(gain_model: ScaledGaussianGainModel, aoa_model: AoaModel) -> float:
    """
    Интеграл sigma^2(gamma) p(gamma) по носителю плотности угла прихода.

    Квадратура разбита в моде (theta или mu), где подынтегральная функция
    имеет излом или узкий пик.

    Raises:
        QuadratureException: Квадратура не сошлась
    """
    if isinstance(aoa_model, TriangularAoaModel):
        if aoa_model.is_degenerate:
            return sigma_squared(gain_model, aoa_model.theta)
        mode = aoa_model.theta
    else:
        mode = aoa_model.mu
    lower, upper = aoa_model.support

    def integrand(gamma: float) -> float:
        return sigma_squared(gain_model, gamma) * float(aoa_density(aoa_model, gamma))

    # sigma^2 на носителе максимальна в ближайшей к xi точке
    peak = sigma_squared(gain_model, min(max(gain_model.xi, lower), upper))
    epsabs = QUAD_ABS_TOL * peak
    return _quad(integrand, lower, mode, epsabs) + _quad(integrand, mode, upper, epsabs)


def _expected_energy_series(gain_model: ScaledGaussianGainModel, aoa_model: TriangularAoaModel) -> float:
    # Ряд по четным моментам треугольной плотности: E[u^2k] = 2 beta^2k / ((2k+1)(2k+2))
    t = (aoa_model.theta - gain_model.xi) / gain_model.varsigma
    r2 = (aoa_model.beta / gain_model.varsigma) ** 2
    correction = (
        special.eval_hermite(2, t) * r2 / 12.0
        + special.eval_hermite(4, t) * r2 ** 2 / 360.0
        + special.eval_hermite(6, t) * r2 ** 3 / 20160.0
        + special.eval_hermite(8, t) * r2 ** 4 / 1814400.0
    )
    return gain_model.lambda_ * math.exp(-t * t) * (1.0 + correction)


def _tail_second_integral(x: float) -> float:
    # Psi(x) = int_x^inf (y - x) exp(-y^2) dy, Psi'' = exp(-x^2)
    if x >= 0.0:
        # erfc(x) = exp(-x^2) erfcx(x): без вычитания близких erf в хвосте
        return math.exp(-x * x) * (0.5 - HALF_SQRT_PI * x * float(special.erfcx(x)))
    return 0.5 * math.exp(-x * x) - HALF_SQRT_PI * x * float(special.erfc(x))


def per_path_expected_energy_closed_form(
    gain_model: ScaledGaussianGainModel,
    aoa_model: TriangularAoaModel,
) -> float:
    """
    Замкнутая форма интеграла sigma^2(gamma) p(gamma).

    При d = theta - xi, E(x) = exp(-x^2/varsigma^2), F(x) = erf(x/varsigma):

        I = Lambda varsigma / (2 beta^2) * { varsigma [E(beta+d) + E(beta-d) - 2E(d)]
            + sqrt(pi) [(beta+d) F(beta+d) + (beta-d) F(beta-d) - 2d F(d)] }

    Вычисляется как вторая разность Psi(x) = int_x^inf (y - x) exp(-y^2) dy
    в точках a - b, a, a + b (a = |d| / varsigma, b = beta / varsigma):

        I = Lambda / b^2 * [Psi(a + b) - 2 Psi(a) + Psi(a - b)]

    Psi через erfcx не теряет точность при |d| >> varsigma. При
    b * max(1, a) < SERIES_THRESHOLD вторая разность сокращается, и
    используется ряд по моментам до b^8.

    Вывод и отличия от печатного выражения - docs/upper_bound.md.
    """
    if aoa_model.is_degenerate:
        return sigma_squared(gain_model, aoa_model.theta)

    vs = gain_model.varsigma
    a = abs(aoa_model.theta - gain_model.xi) / vs
    b = aoa_model.beta / vs
    if b * max(1.0, a) < SERIES_THRESHOLD:
        return _expected_energy_series(gain_model, aoa_model)

    second_difference = _tail_second_integral(a + b) - 2.0 * _tail_second_integral(a) + _tail_second_integral(a - b)
    return gain_model.lambda_ * second_difference / (b * b)


def _upper_bound(total_energy: float, snr: SnrLike) -> float:
    return math.log2(1.0 + 3.0 * _rho(snr) * RAYLEIGH_ENERGY_FACTOR * total_energy)


def capacity_upper_bound_closed_form(
    aoa_specs: Sequence[AoaModel],
    gain_model: ScaledGaussianGainModel,
    snr: SnrLike,
) -> float:
    """
    Верхняя граница Йенсена log2(1 + 3 rho kappa sum I_i) в замкнутой форме.

    kappa = RAYLEIGH_ENERGY_FACTOR: E[h^2] = kappa sigma^2 для плотности Рэлея.

    Raises:
        ValidationException: Нет путей или плотность угла не треугольная
    """
    if not aoa_specs:
        raise ValidationException("Нужен хотя бы один путь")
    if not all(isinstance(spec, TriangularAoaModel) for spec in aoa_specs):
        raise ValidationException("Замкнутая форма границы определена только для треугольной плотности угла")
    total = sum(per_path_expected_energy_closed_form(gain_model, spec) for spec in aoa_specs)
    return _upper_bound(total, snr)


def capacity_upper_bound_quadrature(
    aoa_specs: Sequence[AoaModel],
    gain_model: ScaledGaussianGainModel,
    snr: SnrLike,
) -> float:
    """Верхняя граница Йенсена, интегралы I_i вычислены квадратурой."""
    if not aoa_specs:
        raise ValidationException("Нужен хотя бы один путь")
    total = sum(per_path_expected_energy(gain_model, spec) for spec in aoa_specs)
    return _upper_bound(total, snr)


def check_jensen_dominance(estimate: CapacityEstimate, upper_bound: float, sigmas: float = 3.0) -> None:
    """
    Проверка C_MC <= C_UB + sigmas * stderr.

    Raises:
        DominanceViolationException: Оценка превышает границу
    """
    if estimate.mean > upper_bound + sigmas * estimate.std_error:
        message = (
            f"Оценка Монте-Карло {estimate.mean:.6f} превышает верхнюю границу "
            f"{upper_bound:.6f} + {sigmas} * {estimate.std_error:.2e}"
        )
        logger.error(message)
        raise DominanceViolationException(message)


class CapacityService:
    """Мгновенная и эргодическая емкость, верхняя граница Йенсена."""

    capacity_from_energies = staticmethod(capacity_from_energies)
    instantaneous_capacity_vector = staticmethod(instantaneous_capacity_vector)
    instantaneous_capacity_siso = staticmethod(instantaneous_capacity_siso)
    capacity_samples = staticmethod(capacity_samples)
    ergodic_capacity_mc = staticmethod(ergodic_capacity_mc)
    per_path_expected_energy = staticmethod(per_path_expected_energy)
    per_path_expected_energy_closed_form = staticmethod(per_path_expected_energy_closed_form)
    capacity_upper_bound_closed_form = staticmethod(capacity_upper_bound_closed_form)
    capacity_upper_bound_quadrature = staticmethod(capacity_upper_bound_quadrature)
    check_jensen_dominance = staticmethod(check_jensen_dominance)
