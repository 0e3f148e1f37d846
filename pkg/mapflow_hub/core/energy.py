"""
Учёт энергии: движение, приём данных и проверка бюджета машины.
"""
from enum import IntEnum

from .exceptions import InvalidParametersError, StalledLinkError
from .models import AllocationPlan, EnergyParams, Vehicle
from .utils import JOULES_PER_KWH


class Verdict(IntEnum):
    """Вердикт энергетической проверки; больше — лучше."""
    STRANDED = 0
    DEGRADE_TO_BASIC = 1
    FEASIBLE = 2


def drive_energy(rate_kwh_per_km: float, distance_km: float) -> float:
    """Энергия движения в кВт·ч: расход на км × пробег."""
    if rate_kwh_per_km < 0 or distance_km < 0:
        raise InvalidParametersError("drive rate and distance must be >= 0")
    return rate_kwh_per_km * distance_km


def rx_energy(
    data_mb: float,
    rate_mb_s: float,
    rx_power_w: float,
    per_mb_j: float = 0.0,
) -> float:
    """
    Энергия приёма в джоулях: P_rx · M / R (+ per_mb_j · M).

    Raises:
        StalledLinkError: Если скорость канала нулевая
    """
    if data_mb == 0:
        return 0.0
    if rate_mb_s <= 0:
        raise StalledLinkError(data_mb)
    return rx_power_w * (data_mb / rate_mb_s) + per_mb_j * data_mb


def vehicle_drive_rate(vehicle: Vehicle, params: EnergyParams) -> float:
    if vehicle.drive_rate_kwh_per_km is not None:
        return vehicle.drive_rate_kwh_per_km
    return params.drive_rate_kwh_per_km


def route_drive_energy(vehicle: Vehicle, params: EnergyParams) -> float:
    """∫E ds по маршруту машины."""
    return drive_energy(vehicle_drive_rate(vehicle, params), vehicle.route_length_km)


def plan_rx_joules(
    plan: AllocationPlan, demand_mb: float, params: EnergyParams
) -> float:
    """
    Энергия приёма всего объёма demand_mb с эффективной скоростью плана.

    Эффективная скорость — delivered / total_time. Если план доставляет весь
    объём, результат совпадает с суммой rx_energy по задействованным RSU.
    """
    if demand_mb <= 0:
        return 0.0
    if plan.total_time_s <= 0 or plan.delivered_mb <= 0:
        raise StalledLinkError(demand_mb)
    effective_rate = plan.delivered_mb / plan.total_time_s
    return rx_energy(
        demand_mb, effective_rate, params.rx_power_w, params.rx_energy_per_mb_j
    )


def energy_feasible(
    vehicle: Vehicle, plan_rx_joules: float, params: EnergyParams
) -> Verdict:
    """
    Трёхзначная проверка бюджета W_j^car.

    STRANDED — энергии не хватает даже на движение по маршруту;
    FEASIBLE — движение плюс приём полной карты строго меньше бюджета;
    иначе DEGRADE_TO_BASIC — машина переходит на базовые слои карты.
    """
    budget = vehicle.energy_remaining_kwh
    drive = route_drive_energy(vehicle, params)
    if drive > budget:
        return Verdict.STRANDED
    if drive + plan_rx_joules / JOULES_PER_KWH < budget:
        return Verdict.FEASIBLE
    return Verdict.DEGRADE_TO_BASIC
