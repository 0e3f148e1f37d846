"""
Генератор сценариев по протоколу эксперимента с перекрёстком.

Перекрёсток моделируется тремя прямыми ветками A, B, C, сходящимися
в позиции 0. RSU расставляются вдоль веток, машины проезжают центр
перекрёстка в случайные моменты 10-минутного отрезка и уезжают по своей ветке.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParametersError
from .models import (
    Branch,
    ChannelParams,
    EnergyParams,
    MapDemand,
    Rsu,
    Scenario,
    Vehicle,
)
from .utils import miles, proportional_split

logger = logging.getLogger(__name__)

BRANCHES = (Branch.A, Branch.B, Branch.C)
DEFAULT_BRANCH_SPLIT = (95, 94, 62)
# Слои Lane/Road (10 MB) и Semantic (50 MB) на милю маршрута
BASIC_MB_PER_MILE = 60.0


@dataclass(frozen=True)
class GeneratorParams:
    """Диапазоны и значения по умолчанию для генерации сценария."""

    # RSU
    rsu_count: int = 60
    coverage_radius_m: float = 100.0
    spacing_range_m: tuple[float, float] = (50.0, 150.0)
    lane_offset_range_m: tuple[float, float] = (20.0, 70.0)
    bandwidth_range: tuple[float, float] = (1000.0, 2000.0)
    tx_power_range_w: tuple[float, float] = (20.0, 40.0)

    # Канал
    path_loss_exponent: float = 2.5
    fading_gain: float = 1.0
    noise_psd: float = 0.3
    reference_distance_m: float = 10.0
    renormalize_contention: bool = False

    # Энергия
    rx_power_w: float = 10.0
    rx_energy_per_mb_j: float = 85.0
    drive_rate_range: tuple[float, float] = (0.15, 0.25)
    energy_range_kwh: tuple[float, float] = (5.0, 5.0)

    # Машины
    vehicle_count: int = 251
    branch_split: tuple[int, int, int] = DEFAULT_BRANCH_SPLIT
    segment_duration_s: float = 600.0
    speed_range_mps: tuple[float, float] = (10.0, 30.0)
    demand_full_mb: float = 100_000.0
    basic_mb_per_mile: float = BASIC_MB_PER_MILE

    meeting_probability: float = 0.005
    time_step_s: float = 0.1

    def check(self) -> None:
        """
        Проверяет, что диапазоны непусты и не нарушают инварианты типов.

        Raises:
            InvalidParametersError: При первом найденном нарушении
        """
        if self.rsu_count < 1:
            raise InvalidParametersError("rsu_count must be >= 1")
        if self.vehicle_count < 0:
            raise InvalidParametersError("vehicle_count must be >= 0")
        if self.coverage_radius_m <= 0:
            raise InvalidParametersError("coverage_radius_m must be > 0")
        ranges = {
            "spacing_range_m": self.spacing_range_m,
            "lane_offset_range_m": self.lane_offset_range_m,
            "bandwidth_range": self.bandwidth_range,
            "tx_power_range_w": self.tx_power_range_w,
            "drive_rate_range": self.drive_rate_range,
            "speed_range_mps": self.speed_range_mps,
        }
        for name, (low, high) in ranges.items():
            if not 0 < low <= high:
                raise InvalidParametersError(
                    f"{name}=({low}, {high}) must satisfy 0 < low <= high"
                )
        low_offset, high_offset = self.lane_offset_range_m
        if high_offset >= self.coverage_radius_m:
            raise InvalidParametersError(
                f"lane offsets up to {high_offset} m never fit inside "
                f"coverage radius {self.coverage_radius_m} m"
            )
        low_energy, high_energy = self.energy_range_kwh
        if not 0 <= low_energy <= high_energy:
            raise InvalidParametersError(
                "energy_range_kwh must satisfy 0 <= low <= high"
            )
        if len(self.branch_split) != 3 or min(self.branch_split) < 0:
            raise InvalidParametersError("branch_split needs three weights >= 0")
        if sum(self.branch_split) <= 0:
            raise InvalidParametersError("branch_split must not be all zeros")
        positive = {
            "path_loss_exponent": self.path_loss_exponent,
            "fading_gain": self.fading_gain,
            "noise_psd": self.noise_psd,
            "reference_distance_m": self.reference_distance_m,
            "rx_power_w": self.rx_power_w,
            "segment_duration_s": self.segment_duration_s,
            "demand_full_mb": self.demand_full_mb,
            "basic_mb_per_mile": self.basic_mb_per_mile,
            "time_step_s": self.time_step_s,
        }
        for name, value in positive.items():
            if not value > 0:
                raise InvalidParametersError(f"{name} must be > 0")
        if self.rx_energy_per_mb_j < 0:
            raise InvalidParametersError("rx_energy_per_mb_j must be >= 0")
        if not 0 < self.meeting_probability < 1:
            raise InvalidParametersError("meeting_probability must be in (0, 1)")


def _uniform(rng: np.random.Generator, bounds: tuple[float, float], size: int):
    low, high = bounds
    return rng.uniform(low, high, size)


def _place_rsus(params: GeneratorParams, rng: np.random.Generator) -> list[Rsu]:
    per_branch = proportional_split(params.rsu_count, (1, 1, 1))
    rsus: list[Rsu] = []
    for branch, count in zip(BRANCHES, per_branch):
        spacing = _uniform(rng, params.spacing_range_m, count)
        positions = np.cumsum(spacing)
        offsets = _uniform(rng, params.lane_offset_range_m, count)
        bandwidths = _uniform(rng, params.bandwidth_range, count)
        powers = _uniform(rng, params.tx_power_range_w, count)
        for i in range(count):
            rsus.append(
                Rsu(
                    id=len(rsus),
                    position_m=float(positions[i]),
                    lane_offset_m=float(offsets[i]),
                    coverage_radius_m=params.coverage_radius_m,
                    bandwidth=float(bandwidths[i]),
                    tx_power_max_w=float(powers[i]),
                    branch=branch,
                )
            )
    return rsus


def _branch_lengths_km(rsus: list[Rsu], radius_m: float) -> dict[Branch, float]:
    """Длина ветки: от перекрёстка до выхода из зоны последнего RSU."""
    lengths = {}
    for branch in BRANCHES:
        positions = [r.position_m for r in rsus if r.branch == branch]
        lengths[branch] = (max(positions, default=0.0) + radius_m) / 1000.0
    return lengths


def _spawn_vehicles(
    params: GeneratorParams,
    rng: np.random.Generator,
    route_km: dict[Branch, float],
) -> list[Vehicle]:
    count = params.vehicle_count
    per_branch = proportional_split(count, params.branch_split) if count else [0, 0, 0]
    labels = [b for b, n in zip(BRANCHES, per_branch) for _ in range(n)]
    branches = [labels[i] for i in rng.permutation(count)]
    entries = np.sort(rng.uniform(0.0, params.segment_duration_s, count))
    speeds = _uniform(rng, params.speed_range_mps, count)
    drive_rates = _uniform(rng, params.drive_rate_range, count)
    energies = _uniform(rng, params.energy_range_kwh, count)

    vehicles = []
    for i in range(count):
        branch = branches[i]
        length_km = route_km[branch]
        basic = min(params.basic_mb_per_mile * miles(length_km), params.demand_full_mb)
        vehicles.append(
            Vehicle(
                id=i,
                entry_time_s=float(entries[i]),
                speed_mps=float(speeds[i]),
                branch=branch,
                energy_remaining_kwh=float(energies[i]),
                route_length_km=length_km,
                demand=MapDemand(full_mb=params.demand_full_mb, basic_mb=basic),
                drive_rate_kwh_per_km=float(drive_rates[i]),
            )
        )
    return vehicles


def generate_scenario(params: GeneratorParams, seed: int) -> Scenario:
    """
    Генерирует сценарий; результат — чистая функция от (params, seed).

    Raises:
        InvalidParametersError: Если диапазоны пусты или нарушают инварианты
    """
    params.check()
    if seed < 0:
        raise InvalidParametersError("seed must be a non-negative integer")
    rng = np.random.default_rng(seed)

    rsus = _place_rsus(params, rng)
    route_km = _branch_lengths_km(rsus, params.coverage_radius_m)
    vehicles = _spawn_vehicles(params, rng, route_km)

    scenario = Scenario(
        rsus=tuple(rsus),
        vehicles=tuple(vehicles),
        channel=ChannelParams(
            path_loss_exponent=params.path_loss_exponent,
            fading_gain=params.fading_gain,
            noise_psd=params.noise_psd,
            reference_distance_m=params.reference_distance_m,
            renormalize_contention=params.renormalize_contention,
        ),
        energy=EnergyParams(
            drive_rate_kwh_per_km=float(np.mean(params.drive_rate_range)),
            rx_power_w=params.rx_power_w,
            rx_energy_per_mb_j=params.rx_energy_per_mb_j,
        ),
        meeting_probability=params.meeting_probability,
        seed=seed,
        time_step_s=params.time_step_s,
    )
    logger.debug("Generated %r", scenario)
    return scenario
