"""
Модель downlink-канала RSU → машина.

Скорость по формуле Шеннона с затуханием (d/d₀)^-σ, помехи от машин,
одновременно обслуживаемых тем же RSU, пуассоновское распределение
числа таких машин и окно контакта машины с зоной покрытия.

Соглашение: k — число машин у RSU, включая рассматриваемую (k = 1 — одна).
Мощность передачи всегда P_max^B: управление мощностью не моделируется.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.stats import poisson

from .exceptions import InvalidParametersError, SingularGeometryError
from .models import ChannelParams, Rsu, Vehicle


@dataclass(frozen=True)
class LinkContext:
    """
    Контекст одного канала.

    Attributes:
        rsu: Передающий RSU
        vehicle: Принимающая машина (None — без ограничения полосы приёма)
        distance_m: Представительное расстояние d_{i,j}
        concurrent_vehicles: k, включая саму машину
        interferer_distances_m: Расстояния k−1 мешающих машин; если не заданы,
            все они находятся на расстоянии distance_m
    """
    rsu: Rsu
    vehicle: Optional[Vehicle]
    distance_m: float
    concurrent_vehicles: int = 1
    interferer_distances_m: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.concurrent_vehicles < 1:
            raise InvalidParametersError("concurrent_vehicles must be >= 1")
        if self.interferer_distances_m is not None and (
            len(self.interferer_distances_m) != self.concurrent_vehicles - 1
        ):
            raise InvalidParametersError(
                "interferer_distances_m must list exactly k - 1 distances"
            )

    @classmethod
    def between(
        cls, rsu: Rsu, vehicle: Optional[Vehicle], concurrent_vehicles: int = 1
    ) -> "LinkContext":
        """Канал с расстоянием, равным смещению RSU от полосы."""
        return cls(
            rsu=rsu,
            vehicle=vehicle,
            distance_m=rsu.lane_offset_m,
            concurrent_vehicles=concurrent_vehicles,
        )


def received_power(distance_m: float, tx_power_w: float, ch: ChannelParams) -> float:
    """Принятая мощность (d/d₀)^-σ · P · |h1|."""
    if distance_m <= 0:
        raise SingularGeometryError(distance_m)
    relative = distance_m / ch.reference_distance_m
    return relative ** (-ch.path_loss_exponent) * tx_power_w * abs(ch.fading_gain)


def link_bandwidth(rsu: Rsu, vehicle: Optional[Vehicle], ch: ChannelParams) -> float:
    """Полоса канала: полоса RSU, ограниченная полосой приёма машины."""
    cap = vehicle.rx_bandwidth_mb_s if vehicle is not None else None
    if cap is None:
        cap = ch.rx_bandwidth_default
    return rsu.bandwidth if cap is None else min(rsu.bandwidth, cap)


def spectral_efficiency(ctx: LinkContext, ch: ChannelParams) -> float:
    """log2(1 + SINR) без множителя полосы."""
    power = ctx.rsu.tx_power_max_w
    signal = received_power(ctx.distance_m, power, ch)
    if ctx.interferer_distances_m is None:
        interference = (ctx.concurrent_vehicles - 1) * signal
    else:
        interference = sum(
            received_power(d, power, ch) for d in ctx.interferer_distances_m
        )
    return math.log2(1.0 + signal / (ch.noise_psd + interference))


def downlink_rate(ctx: LinkContext, ch: ChannelParams) -> float:
    """Скорость downlink в MB/s с учётом k − 1 мешающих машин."""
    return link_bandwidth(ctx.rsu, ctx.vehicle, ch) * spectral_efficiency(ctx, ch)


def concurrency_pmf(m: int, p: float, k: int) -> float:
    """P(X = k) = e^{−mp}(mp)^k / k! — число машин у одного RSU."""
    if m < 0 or not 0 <= p <= 1:
        raise InvalidParametersError("need m >= 0 and p in [0, 1]")
    if k < 0:
        return 0.0
    mean = m * p
    if mean == 0:
        return 1.0 if k == 0 else 0.0
    return float(poisson.pmf(k, mean))


@lru_cache(maxsize=4096)
def _expected_efficiency(
    distance_m: float,
    tx_power_w: float,
    ch: ChannelParams,
    m: int,
    p: float,
    renormalize: bool,
) -> float:
    signal = received_power(distance_m, tx_power_w, ch)
    ks = np.arange(1, m)
    weights = poisson.pmf(ks, m * p)
    # k − 1 гипотетических помех на расстоянии самой машины
    efficiency = np.log2(1.0 + signal / (ch.noise_psd + (ks - 1) * signal))
    total = float(np.dot(weights, efficiency))
    if renormalize:
        mass = float(weights.sum())
        return total / mass if mass > 0 else float(efficiency[0])
    return total


def expected_rate(
    ctx: LinkContext,
    ch: ChannelParams,
    m: int,
    p: float,
    renormalize: Optional[bool] = None,
) -> float:
    """
    Ожидаемая скорость Σ_{k=1}^{m−1} P(X=k)·R(X=k).

    Для m = 1 возвращается скорость без помех. Усечённая сумма не
    нормируется, если renormalize не включён (явно или в ChannelParams).
    """
    if m <= 1:
        solo = LinkContext(ctx.rsu, ctx.vehicle, ctx.distance_m)
        return downlink_rate(solo, ch)
    if renormalize is None:
        renormalize = ch.renormalize_contention
    efficiency = _expected_efficiency(
        ctx.distance_m, ctx.rsu.tx_power_max_w, ch, int(m), float(p), bool(renormalize)
    )
    return link_bandwidth(ctx.rsu, ctx.vehicle, ch) * efficiency


def contact_window(rsu: Rsu, vehicle: Vehicle) -> float:
    """
    Время T_i пребывания машины в зоне покрытия: 2·√(r² − d²) / v.

    Если полоса не пересекает круг покрытия, окно нулевое.
    """
    if vehicle.speed_mps <= 0:
        raise InvalidParametersError("vehicle speed must be > 0")
    return 2.0 * rsu.half_chord_m / vehicle.speed_mps
