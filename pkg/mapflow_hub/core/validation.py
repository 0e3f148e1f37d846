"""
Проверка инвариантов сценария.

Нарушения возвращаются как данные (список строк с указанием места),
а не выбрасываются: так загрузчик может показать все проблемы сразу.
"""
from collections import Counter

from .models import Branch, ChannelParams, EnergyParams, Rsu, Scenario, Vehicle


def _rsu_violations(rsu: Rsu) -> list[str]:
    where = f"rsu[{rsu.id}]"
    problems = []
    if not rsu.coverage_radius_m > 0:
        problems.append(f"{where}: coverage_radius_m must be > 0")
    if not 0 <= rsu.lane_offset_m < rsu.coverage_radius_m:
        problems.append(
            f"{where}: lane_offset_m={rsu.lane_offset_m} must be in "
            f"[0, coverage_radius_m={rsu.coverage_radius_m})"
        )
    if not rsu.bandwidth > 0:
        problems.append(f"{where}: bandwidth must be > 0")
    if not rsu.tx_power_max_w > 0:
        problems.append(f"{where}: tx_power_max_w must be > 0")
    if not isinstance(rsu.branch, Branch):
        problems.append(f"{where}: branch must be one of A, B, C")
    return problems


def _vehicle_violations(vehicle: Vehicle) -> list[str]:
    where = f"vehicle[{vehicle.id}]"
    problems = []
    if not vehicle.speed_mps > 0:
        problems.append(f"{where}: speed_mps must be > 0")
    if not vehicle.energy_remaining_kwh >= 0:
        problems.append(f"{where}: energy_remaining_kwh must be >= 0")
    if not vehicle.route_length_km > 0:
        problems.append(f"{where}: route_length_km must be > 0")
    if not 0 < vehicle.demand.basic_mb <= vehicle.demand.full_mb:
        problems.append(
            f"{where}: demand must satisfy 0 < basic_mb <= full_mb "
            f"(basic={vehicle.demand.basic_mb}, full={vehicle.demand.full_mb})"
        )
    drive_rate = vehicle.drive_rate_kwh_per_km
    if drive_rate is not None and not drive_rate > 0:
        problems.append(f"{where}: drive_rate_kwh_per_km must be > 0")
    rx_cap = vehicle.rx_bandwidth_mb_s
    if rx_cap is not None and not rx_cap > 0:
        problems.append(f"{where}: rx_bandwidth_mb_s must be > 0")
    if not isinstance(vehicle.branch, Branch):
        problems.append(f"{where}: branch must be one of A, B, C")
    return problems


def _channel_violations(channel: ChannelParams) -> list[str]:
    problems = []
    if not channel.path_loss_exponent > 0:
        problems.append("channel: path_loss_exponent must be > 0")
    if not channel.fading_gain > 0:
        problems.append("channel: fading_gain must be > 0")
    if not channel.noise_psd > 0:
        problems.append("channel: noise_psd must be > 0")
    if not channel.reference_distance_m > 0:
        problems.append("channel: reference_distance_m must be > 0")
    default_cap = channel.rx_bandwidth_default
    if default_cap is not None and not default_cap > 0:
        problems.append("channel: rx_bandwidth_default must be > 0")
    return problems


def _energy_violations(energy: EnergyParams) -> list[str]:
    problems = []
    if not energy.drive_rate_kwh_per_km > 0:
        problems.append("energy: drive_rate_kwh_per_km must be > 0")
    if not energy.rx_power_w > 0:
        problems.append("energy: rx_power_w must be > 0")
    if not energy.rx_energy_per_mb_j >= 0:
        problems.append("energy: rx_energy_per_mb_j must be >= 0")
    return problems


def _duplicates(ids: list[int], kind: str) -> list[str]:
    return [
        f"{kind}[{item_id}]: id is used {count} times"
        for item_id, count in sorted(Counter(ids).items())
        if count > 1
    ]


def validate_scenario(scenario: Scenario) -> list[str]:
    """
    Возвращает все нарушенные инварианты сценария.

    Пустой список означает корректный сценарий.
    """
    violations: list[str] = []
    for rsu in scenario.rsus:
        violations.extend(_rsu_violations(rsu))
    violations.extend(_duplicates([r.id for r in scenario.rsus], "rsu"))
    for vehicle in scenario.vehicles:
        violations.extend(_vehicle_violations(vehicle))
    violations.extend(_duplicates([v.id for v in scenario.vehicles], "vehicle"))
    violations.extend(_channel_violations(scenario.channel))
    violations.extend(_energy_violations(scenario.energy))
    if not 0 < scenario.meeting_probability < 1:
        violations.append(
            f"scenario: meeting_probability={scenario.meeting_probability} "
            "must be in (0, 1)"
        )
    if not scenario.time_step_s > 0:
        violations.append("scenario: time_step_s must be > 0")
    return violations
