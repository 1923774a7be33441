"""
Сервис проведения экспериментов.

Связывает трассировку, подгонку карты масштаба и расчет емкости:
одна рабочая точка, развертка по оси, сравнение приемников по ОСШ
и сравнение плотностей угла прихода.
"""

import asyncio
from typing import List, Optional, Sequence, Tuple

from loguru import logger
from pydantic import ValidationError

from app.core.exceptions import ChannelSimException, ExperimentException, ValidationException
from app.models.base import BaseModel
from app.models.capacity import CapacityEstimate, ReceiverKind, SnrSpec
from app.models.channel import RAYLEIGH_ENERGY_FACTOR, ScaledGaussianGainModel, TriangularAoaModel, TruncatedKind
from app.models.fitting import FitResult
from app.models.geometry import Eigenray, Scenario
from app.schemas.experiment import (
    AoaComparisonRow,
    AoaModelKind,
    CapacityRow,
    ExperimentConfig,
    GainMode,
    SnrReference,
    SweepAxis,
)
from app.services.capacity_service import CapacityService
from app.services.channel_service import AoaModel, ChannelService
from app.services.fitting_service import FittingService
from app.services.ray_service import RayService
from config.settings import settings

DEFAULT_COMPARE_SNR_DB = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)

_TRUNCATED_KINDS = {
    AoaModelKind.GAUSSIAN: TruncatedKind.GAUSSIAN,
    AoaModelKind.LAPLACIAN: TruncatedKind.LAPLACIAN,
}


class ChannelSetup(BaseModel):
    """Подготовленный канал одной рабочей точки."""

    scenario: Scenario
    aoa_specs: Tuple[AoaModel, ...]
    delays: Tuple[float, ...]
    gain_model: ScaledGaussianGainModel
    fit: Optional[FitResult] = None

    @property
    def is_triangular(self) -> bool:
        """Все пути с треугольной плотностью угла."""
        return all(isinstance(spec, TriangularAoaModel) for spec in self.aoa_specs)


def build_aoa_models(
    kind: AoaModelKind,
    thetas: Sequence[float],
    betas: Sequence[float],
) -> List[AoaModel]:
    """
    Плотности угла прихода путей.

    Усеченные плотности получают ту же моду и дисперсию, что треугольная
    с полушириной beta.
    """
    triangular = [TriangularAoaModel(theta=theta, beta=beta) for theta, beta in zip(thetas, betas)]
    if kind == AoaModelKind.TRIANGULAR:
        return triangular
    return [ChannelService.matched_truncated_model(model, _TRUNCATED_KINDS[kind]) for model in triangular]


class ExperimentService:
    """Сервис для расчета емкости по конфигурации эксперимента."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.trials = config.capacity.trials or settings.DEFAULT_TRIALS
        self.seed = config.capacity.seed if config.capacity.seed is not None else settings.DEFAULT_SEED
        self.n_bins = config.gain.n_bins or settings.DEFAULT_BINS

    def scenario_with(self, **updates) -> Scenario:
        """Сценарий конфигурации с заменой полей (с валидацией)."""
        data = self.config.scenario.model_dump()
        data.update(updates)
        try:
            return Scenario.model_validate(data)
        except ValidationError as e:
            raise ValidationException(f"Недопустимый сценарий: {e.errors()[0]['msg']}")

    def trace(self, scenario: Optional[Scenario] = None, n_rays: Optional[int] = None) -> List[Eigenray]:
        """
        Трассировка сценария.

        Порядок отражений повышается, если его не хватает для n_rays лучей.
        """
        scenario = scenario or self.config.scenario
        n_rays = n_rays or self.config.channel.n_rays
        if n_rays is not None:
            order = RayService.required_bounce_order(n_rays)
            if order > scenario.max_bounce_order:
                logger.warning(f"Порядок отражений повышен с {scenario.max_bounce_order} до {order} для {n_rays} лучей")
                scenario = scenario.model_copy(update={"max_bounce_order": order})
        rays = RayService.trace_image_method(scenario)
        logger.info(f"Трассировка завершена: {len(rays)} лучей, R={scenario.range_m} м, f={scenario.frequency_hz} Гц")
        return rays

    def fit(self, rays: Sequence[Eigenray]) -> FitResult:
        """Биннинг лучей и подгонка карты масштаба."""
        result = FittingService.fit_scaled_gaussian(FittingService.bin_gain_vs_aoa(rays, self.n_bins))
        if not result.converged:
            logger.warning("Подгонка карты масштаба не сошлась, используются лучшие найденные параметры")
        return result

    def prepare_channel(
        self,
        scenario: Optional[Scenario] = None,
        n_rays: Optional[int] = None,
        aoa_model: Optional[AoaModelKind] = None,
    ) -> ChannelSetup:
        """
        Лучи, модели угла прихода и карта масштаба для рабочей точки.

        Args:
            scenario: Сценарий (по умолчанию из конфигурации)
            n_rays: Число путей (по умолчанию из конфигурации или все лучи)
            aoa_model: Плотность угла прихода (по умолчанию channel.aoa_model)
        """
        scenario = scenario or self.config.scenario
        n_rays = n_rays or self.config.channel.n_rays
        aoa_model = aoa_model or self.config.channel.aoa_model
        rays = self.trace(scenario, n_rays)

        fit_result = None
        if self.config.gain.mode == GainMode.EXPLICIT:
            gain_model = self.config.gain.explicit_model()
        else:
            fit_result = self.fit(rays)
            gain_model = fit_result.model

        paths = RayService.truncate_rays(rays, n_rays) if n_rays is not None else rays
        betas = self.config.channel.beta_for(len(paths))
        aoa_specs = build_aoa_models(aoa_model, [ray.aoa for ray in paths], betas)
        _, delays = RayService.eigenrays_to_aoa_specs(paths, 0.0)
        return ChannelSetup(
            scenario=scenario,
            aoa_specs=tuple(aoa_specs),
            delays=tuple(delays),
            gain_model=gain_model,
            fit=fit_result,
        )

    def resolve_snr(self, setup: ChannelSetup, snr_db: Optional[float] = None) -> Tuple[SnrSpec, ScaledGaussianGainModel]:
        """
        ОСШ и карта масштаба с учетом отсчета ОСШ.

        transmit: rho = P_tx / Omega_N (или из snr_db) к абсолютным энергиям.
        path: карта масштаба нормируется так, что Lambda = 1 / kappa.
        """
        capacity = self.config.capacity
        snr_db = snr_db if snr_db is not None else capacity.snr_db
        if capacity.snr_reference == SnrReference.PATH:
            if snr_db is None:
                raise ValidationException("Для capacity.snr_reference=path нужно задать capacity.snr_db")
            gain_model = setup.gain_model.scaled(1.0 / (RAYLEIGH_ENERGY_FACTOR * setup.gain_model.lambda_))
            return SnrSpec.from_db(snr_db), gain_model
        if snr_db is None:
            return SnrSpec.from_scenario(setup.scenario, capacity.tx_power), setup.gain_model
        return SnrSpec.from_db(snr_db), setup.gain_model

    def estimate(self, setup: ChannelSetup, snr_db: Optional[float] = None, receiver: ReceiverKind = ReceiverKind.VECTOR) -> CapacityEstimate:
        """Эргодическая емкость одного приемника методом Монте-Карло."""
        snr, gain_model = self.resolve_snr(setup, snr_db)
        return CapacityService.ergodic_capacity_mc(
            aoa_specs=setup.aoa_specs,
            delays=setup.delays,
            gain_model=gain_model,
            snr=snr,
            trials=self.trials,
            seed=self.seed,
            receiver=receiver,
        )

    def evaluate(self, setup: ChannelSetup, snr_db: Optional[float] = None, axis_value: Optional[float] = None) -> CapacityRow:
        """
        Емкость векторного и скалярного приемников и верхняя граница в одной точке.

        Замкнутая форма границы считается только для треугольной плотности,
        иначе c_ub_closed = None.
        """
        snr, gain_model = self.resolve_snr(setup, snr_db)
        vector = self.estimate(setup, snr_db, ReceiverKind.VECTOR)
        siso = self.estimate(setup, snr_db, ReceiverKind.SISO)
        closed = None
        if setup.is_triangular:
            closed = CapacityService.capacity_upper_bound_closed_form(setup.aoa_specs, gain_model, snr)
        return CapacityRow(
            axis_value=axis_value,
            c_mc_vector=vector.mean,
            c_mc_stderr=vector.std_error,
            c_mc_siso=siso.mean,
            c_ub_closed=closed,
            c_ub_quadrature=CapacityService.capacity_upper_bound_quadrature(setup.aoa_specs, gain_model, snr),
            snr_db=snr.db,
            n_paths=len(setup.aoa_specs),
            lambda_=gain_model.lambda_,
            xi_rad=gain_model.xi,
            varsigma_rad=gain_model.varsigma,
        )

    def evaluate_sweep_point(self, axis: SweepAxis, value: float, shared: Optional[ChannelSetup]) -> List[CapacityRow]:
        """
        Одна точка развертки.

        Для осей кроме snr_db точка считается при каждом ОСШ из
        capacity.snr_db_values, если сетка задана.
        """
        if axis == SweepAxis.SNR_DB:
            return [self.evaluate(shared, snr_db=value, axis_value=value)]
        if axis == SweepAxis.N_RAYS:
            n_rays = int(value)
            setup = shared.model_copy(
                update={"aoa_specs": shared.aoa_specs[:n_rays], "delays": shared.delays[:n_rays]}
            )
        else:
            setup = self.prepare_channel(self.scenario_with(**{axis.value: value}))
        snr_values = self.config.capacity.snr_db_values or [None]
        return [self.evaluate(setup, snr_db=snr_db, axis_value=value) for snr_db in snr_values]

    async def run_trace(self) -> List[Eigenray]:
        """Трассировка сценария конфигурации."""
        rays = await asyncio.to_thread(self.trace)
        if self.config.channel.n_rays is not None:
            rays = RayService.truncate_rays(rays, self.config.channel.n_rays)
        return rays

    async def run_fit(self, rays: Optional[Sequence[Eigenray]] = None) -> FitResult:
        """Подгонка карты масштаба по заданным или трассированным лучам."""
        if rays is None:
            rays = await asyncio.to_thread(self.trace)
        return await asyncio.to_thread(self.fit, rays)

    async def run_capacity(self) -> CapacityRow:
        """Одна рабочая точка."""
        setup = await asyncio.to_thread(self.prepare_channel)
        row = await asyncio.to_thread(self.evaluate, setup)
        logger.info(f"Емкость: вектор {row.c_mc_vector:.4f}, SISO {row.c_mc_siso:.4f}, граница {row.c_ub_quadrature:.4f}")
        return row

    async def run_sweep(self) -> List[CapacityRow]:
        """
        Развертка по оси конфигурации.

        Точки считаются параллельно (не больше MAX_WORKERS одновременно),
        строки возвращаются в порядке значений оси, внутри точки - в
        порядке сетки ОСШ.

        Raises:
            ExperimentException: Ошибка в точке развертки (с указанием точки)
        """
        sweep = self.config.sweep
        if sweep is None:
            raise ExperimentException("В конфигурации не задана развертка (sweep.axis, sweep.values)")

        shared = None
        if sweep.axis == SweepAxis.SNR_DB:
            shared = await asyncio.to_thread(self.prepare_channel)
        elif sweep.axis == SweepAxis.N_RAYS:
            # Общий набор лучей и одна карта масштаба для всех точек
            shared = await asyncio.to_thread(self.prepare_channel, None, int(max(sweep.values)))

        semaphore = asyncio.Semaphore(settings.MAX_WORKERS)

        async def run_point(value: float) -> List[CapacityRow]:
            async with semaphore:
                try:
                    rows = await asyncio.to_thread(self.evaluate_sweep_point, sweep.axis, value, shared)
                except ChannelSimException as e:
                    logger.error(f"Ошибка в точке развертки {sweep.axis.value}={value}: {e.message}")
                    raise ExperimentException(f"Точка развертки {sweep.axis.value}={value}: {e.message}")
                logger.info(f"Точка развертки {sweep.axis.value}={value} готова: C={rows[0].c_mc_vector:.4f}")
                return rows

        points = await asyncio.gather(*(run_point(value) for value in sweep.values))
        return [row for rows in points for row in rows]

    def compare_snr_values(self, snr_db_values: Optional[Sequence[float]] = None) -> List[float]:
        """Сетка ОСШ для сравнений."""
        return list(snr_db_values or self.config.capacity.snr_db_values or DEFAULT_COMPARE_SNR_DB)

    async def run_compare(self, snr_db_values: Optional[Sequence[float]] = None) -> List[CapacityRow]:
        """
        Векторный приемник, скалярный приемник и верхняя граница по сетке ОСШ.

        Raises:
            DominanceViolationException: Оценка превышает границу больше чем на 3 стандартные ошибки
        """
        values = self.compare_snr_values(snr_db_values)
        setup = await asyncio.to_thread(self.prepare_channel)
        rows = await asyncio.gather(
            *(asyncio.to_thread(self.evaluate, setup, value, value) for value in values)
        )
        for row in rows:
            estimate = CapacityEstimate(mean=row.c_mc_vector, std_error=row.c_mc_stderr, trials=self.trials)
            bounds = [bound for bound in (row.c_ub_closed, row.c_ub_quadrature) if bound is not None]
            CapacityService.check_jensen_dominance(estimate, min(bounds))
        logger.info(f"Сравнение приемников: {len(rows)} значений ОСШ, граница Йенсена выполнена")
        return list(rows)

    def compare_aoa_point(self, setups: Sequence[ChannelSetup], snr_db: float) -> AoaComparisonRow:
        """Емкость векторного приемника при треугольной, гауссовой и лапласовой плотностях."""
        triangular, gaussian, laplacian = (self.estimate(setup, snr_db) for setup in setups)
        difference = max(
            abs(other.mean - triangular.mean) / triangular.mean if triangular.mean > 0 else 0.0
            for other in (gaussian, laplacian)
        )
        return AoaComparisonRow(
            snr_db=snr_db,
            c_mc_triangular=triangular.mean,
            c_mc_gaussian=gaussian.mean,
            c_mc_laplacian=laplacian.mean,
            c_mc_stderr=max(triangular.std_error, gaussian.std_error, laplacian.std_error),
            max_relative_difference=difference,
            n_paths=len(setups[0].aoa_specs),
        )

    async def run_compare_aoa_models(self, snr_db_values: Optional[Sequence[float]] = None) -> List[AoaComparisonRow]:
        """
        Треугольная плотность угла прихода против усеченных гауссовой и лапласовой.

        Все три канала строятся по одним лучам и одной карте масштаба;
        усеченные плотности имеют ту же моду и дисперсию, что треугольная.
        """
        values = self.compare_snr_values(snr_db_values)
        triangular = await asyncio.to_thread(self.prepare_channel, None, None, AoaModelKind.TRIANGULAR)
        thetas = [spec.theta for spec in triangular.aoa_specs]
        betas = [spec.beta for spec in triangular.aoa_specs]
        setups = [triangular] + [
            triangular.model_copy(update={"aoa_specs": tuple(build_aoa_models(kind, thetas, betas))})
            for kind in (AoaModelKind.GAUSSIAN, AoaModelKind.LAPLACIAN)
        ]
        rows = await asyncio.gather(
            *(asyncio.to_thread(self.compare_aoa_point, setups, value) for value in values)
        )
        worst = max(row.max_relative_difference for row in rows)
        logger.info(f"Сравнение плотностей угла: {len(rows)} значений ОСШ, наибольшее отличие {worst:.3%}")
        return list(rows)
