"""
Оценочные калькуляторы раздачи карты через V2V.

Замкнутые формулы: время контакта встречных и попутных машин, объём за
контакт, скорость DSRC-канала, размер парка и пробег, необходимый для
получения G мегабайт. Расстояния в метрах, скорости в м/с, данные в MB.
"""
import math
from dataclasses import dataclass
from typing import Optional

from .exceptions import (
    InfeasibleError,
    InfiniteContactError,
    InvalidParametersError,
    UndefinedContactError,
)


@dataclass(frozen=True)
class V2vQuery:
    """
    Параметры оценки V2V-передачи.

    Attributes:
        range_m: Дальность связи r
        lateral_offset_m: Расстояние d между машинами поперёк движения
        speed1_mps: v1
        speed2_mps: v2
        rate_mb_s: Скорость передачи R
        total_data_mb: Объём карты G
        reverse_lane_count: m — машин на встречной полосе за время t
        observation_time_s: t
    """
    range_m: float
    lateral_offset_m: float
    speed1_mps: float
    speed2_mps: float
    rate_mb_s: float = 0.0
    total_data_mb: float = 1.0
    reverse_lane_count: int = 0
    observation_time_s: float = 0.0

    def __post_init__(self):
        # d = r допускается: касательный контакт даёт нулевое время
        if not 0 <= self.lateral_offset_m <= self.range_m:
            raise InvalidParametersError(
                f"lateral offset {self.lateral_offset_m} must be in [0, {self.range_m}]"
            )
        if self.speed1_mps < 0 or self.speed2_mps < 0:
            raise InvalidParametersError("speeds must be >= 0")
        if self.total_data_mb <= 0:
            raise InvalidParametersError("total_data_mb must be > 0")


def contact_time_opposite(q: V2vQuery) -> float:
    """Время контакта встречных машин: 2·√(r² − d²) / (v1 + v2)."""
    closing = q.speed1_mps + q.speed2_mps
    if closing <= 0:
        raise UndefinedContactError()
    chord_sq = q.range_m ** 2 - q.lateral_offset_m ** 2
    if chord_sq <= 0:
        return 0.0
    return 2.0 * math.sqrt(chord_sq) / closing


def contact_time_same_direction(q: V2vQuery) -> float:
    """Время контакта попутных машин: 2r / |v1 − v2|."""
    relative = abs(q.speed1_mps - q.speed2_mps)
    if relative == 0:
        raise InfiniteContactError(q.speed1_mps)
    return 2.0 * q.range_m / relative


def contact_capacity(contact_time_s: float, rate_mb_s: float) -> float:
    """Объём данных за контакт: C = T·R."""
    if contact_time_s < 0 or rate_mb_s < 0:
        raise InvalidParametersError("contact time and rate must be >= 0")
    return contact_time_s * rate_mb_s


def dsrc_rate(
    bandwidth: float,
    distance_factor: float,
    tx_power_w: float,
    fading_gain: float,
    noise_psd: float,
) -> float:
    """Скорость DSRC-канала: B·log2(1 + D·P_s·|h| / N_0)."""
    if bandwidth <= 0 or noise_psd <= 0:
        raise InvalidParametersError("bandwidth and noise_psd must be > 0")
    ratio = distance_factor * tx_power_w * abs(fading_gain) / noise_psd
    return bandwidth * math.log2(1.0 + ratio)


def vehicles_needed(total_data_mb: float, c_max_mb: float) -> int:
    """Число машин ⌈G / C_max⌉, чтобы парк целиком перевёз G."""
    if c_max_mb <= 0:
        raise InvalidParametersError("C_max must be > 0")
    return math.ceil(total_data_mb / c_max_mb)


def meeting_probability(
    vehicle_count: float, range_m: float, speed_mps: float, window_s: float
) -> float:
    """Вероятность участия встречных машин min(1, m·r / (v·t))."""
    travelled = speed_mps * window_s
    if travelled <= 0:
        raise InvalidParametersError("v·t must be > 0")
    return min(1.0, vehicle_count * range_m / travelled)


def v2v_distance_required(
    vehicle_count: float, speed_mps: float, contact_time_s: float, probability: float
) -> float:
    """Пробег Num·v·T / p, нужный для получения всей карты."""
    if probability <= 0:
        raise InfeasibleError("meeting probability is 0: the transfer never completes")
    return vehicle_count * speed_mps * contact_time_s / probability


def v2v_report(q: V2vQuery, bandwidth: Optional[float] = None) -> dict[str, object]:
    """
    Сводка всех калькуляторов для одного запроса (для CLI).

    Значения, которые не определены для запроса, представлены строкой
    с причиной, а не числом.
    """
    report: dict[str, object] = {}
    try:
        contact = contact_time_opposite(q)
    except UndefinedContactError:
        contact = None
        report["contact_time"] = "undefined"
    else:
        report["contact_time"] = contact
    try:
        report["contact_time_same_direction"] = contact_time_same_direction(q)
    except InfiniteContactError:
        report["contact_time_same_direction"] = "infinite contact"

    if contact is None:
        return report

    capacity = contact_capacity(contact, q.rate_mb_s)
    report["capacity_mb"] = capacity
    # C_max = T·B, если полоса задана; иначе T·R
    divisor = capacity
    if bandwidth is not None:
        divisor = contact_capacity(contact, bandwidth)
        report["c_max_mb"] = divisor
    if divisor <= 0:
        report["vehicles_needed"] = "infeasible"
        return report
    needed = vehicles_needed(q.total_data_mb, divisor)
    report["vehicles_needed"] = needed

    if q.observation_time_s > 0 and q.speed1_mps > 0:
        probability = meeting_probability(
            q.reverse_lane_count, q.range_m, q.speed1_mps, q.observation_time_s
        )
        report["meeting_probability"] = probability
        try:
            report["distance_required_m"] = v2v_distance_required(
                needed, q.speed1_mps, contact, probability
            )
        except InfeasibleError:
            report["distance_required_m"] = "infeasible"
    return report
