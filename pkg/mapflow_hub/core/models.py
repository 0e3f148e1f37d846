"""
Модели данных симулятора раздачи HD-карт.

Содержит RSU, транспортные средства, параметры канала и энергии, сценарий
и план распределения с методами сериализации в JSON-совместимые словари.

Единицы: объёмы данных в мегабайтах (MB), скорости передачи в MB/s,
расстояния в метрах, энергия в кВт·ч (кроме энергии приёма, в джоулях).
Все типы неизменяемы после создания; проверка инвариантов вынесена
в validation.validate_scenario, чтобы некорректные данные можно было
загрузить и получить полный список нарушений.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional


class Branch(str, Enum):
    """Ветка перекрёстка, на которой расположены RSU и едут машины."""
    A = "A"
    B = "B"
    C = "C"

    @classmethod
    def parse(cls, label: str) -> "Branch":
        """Разбирает метку ветки; ValueError для неизвестной метки."""
        return cls(label.strip().upper())


@dataclass(frozen=True)
class Rsu:
    """
    Придорожный узел (RSU).

    Attributes:
        id: Уникальный идентификатор
        position_m: Позиция вдоль ветки от центра перекрёстка
        lane_offset_m: Перпендикулярное расстояние d_{i,j} до полосы
        coverage_radius_m: Радиус покрытия r
        bandwidth: Полоса downlink в MB/s
        tx_power_max_w: Максимальная мощность передачи P_max^B
        branch: Ветка перекрёстка
    """
    id: int
    position_m: float
    lane_offset_m: float
    coverage_radius_m: float
    bandwidth: float
    tx_power_max_w: float
    branch: Branch

    @property
    def half_chord_m(self) -> float:
        """Половина хорды, которую полоса проходит внутри круга покрытия."""
        squared = self.coverage_radius_m ** 2 - self.lane_offset_m ** 2
        return math.sqrt(squared) if squared > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "position_m": self.position_m,
            "lane_offset_m": self.lane_offset_m,
            "coverage_radius_m": self.coverage_radius_m,
            "bandwidth": self.bandwidth,
            "tx_power_max_w": self.tx_power_max_w,
            "branch": self.branch.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Rsu":
        return cls(
            id=int(data["id"]),
            position_m=float(data["position_m"]),
            lane_offset_m=float(data["lane_offset_m"]),
            coverage_radius_m=float(data["coverage_radius_m"]),
            bandwidth=float(data["bandwidth"]),
            tx_power_max_w=float(data["tx_power_max_w"]),
            branch=Branch.parse(data["branch"]),
        )


@dataclass(frozen=True)
class MapDemand:
    """Потребность машины в данных карты: полная (M_j) и базовая (M_basic)."""
    full_mb: float
    basic_mb: float

    def to_dict(self) -> dict:
        return {"full_mb": self.full_mb, "basic_mb": self.basic_mb}

    @classmethod
    def from_dict(cls, data: dict) -> "MapDemand":
        return cls(full_mb=float(data["full_mb"]), basic_mb=float(data["basic_mb"]))


@dataclass(frozen=True)
class Vehicle:
    """
    Движущийся потребитель данных карты.

    Attributes:
        id: Уникальный идентификатор
        entry_time_s: Момент проезда центра перекрёстка (позиция 0)
        speed_mps: Постоянная скорость v
        branch: Ветка, по которой машина уезжает от перекрёстка
        energy_remaining_kwh: Остаток энергии W_j^car
        route_length_km: Длина маршрута L_j
        demand: Потребность в данных
        drive_rate_kwh_per_km: Собственный расход на км (иначе берётся из EnergyParams)
        rx_bandwidth_mb_s: Ограничение полосы приёма машины (необязательно)
    """
    id: int
    entry_time_s: float
    speed_mps: float
    branch: Branch
    energy_remaining_kwh: float
    route_length_km: float
    demand: MapDemand
    drive_rate_kwh_per_km: Optional[float] = None
    rx_bandwidth_mb_s: Optional[float] = None

    def with_demand(self, full_mb: float) -> "Vehicle":
        """Копия машины с новой полной потребностью (базовая сохраняется)."""
        basic = min(self.demand.basic_mb, full_mb)
        return replace(self, demand=MapDemand(full_mb=full_mb, basic_mb=basic))

    def with_energy(self, energy_kwh: float) -> "Vehicle":
        return replace(self, energy_remaining_kwh=energy_kwh)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "entry_time_s": self.entry_time_s,
            "speed_mps": self.speed_mps,
            "branch": self.branch.value,
            "energy_remaining_kwh": self.energy_remaining_kwh,
            "route_length_km": self.route_length_km,
            "demand": self.demand.to_dict(),
            "drive_rate_kwh_per_km": self.drive_rate_kwh_per_km,
            "rx_bandwidth_mb_s": self.rx_bandwidth_mb_s,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Vehicle":
        drive_rate = data.get("drive_rate_kwh_per_km")
        rx_bandwidth = data.get("rx_bandwidth_mb_s")
        return cls(
            id=int(data["id"]),
            entry_time_s=float(data["entry_time_s"]),
            speed_mps=float(data["speed_mps"]),
            branch=Branch.parse(data["branch"]),
            energy_remaining_kwh=float(data["energy_remaining_kwh"]),
            route_length_km=float(data["route_length_km"]),
            demand=MapDemand.from_dict(data["demand"]),
            drive_rate_kwh_per_km=None if drive_rate is None else float(drive_rate),
            rx_bandwidth_mb_s=None if rx_bandwidth is None else float(rx_bandwidth),
        )


@dataclass(frozen=True)
class ChannelParams:
    """
    Параметры радиоканала (формула Шеннона с затуханием и помехами).

    Attributes:
        path_loss_exponent: σ
        fading_gain: |h1|
        noise_psd: N_0 (в единицах принятой мощности)
        rx_bandwidth_default: Ограничение полосы приёма по умолчанию
        reference_distance_m: d₀, затухание считается как (d/d₀)^-σ
        renormalize_contention: Нормировать усечённую сумму Пуассона
    """
    path_loss_exponent: float = 2.5
    fading_gain: float = 1.0
    noise_psd: float = 0.3
    rx_bandwidth_default: Optional[float] = None
    reference_distance_m: float = 1.0
    renormalize_contention: bool = False

    def to_dict(self) -> dict:
        return {
            "path_loss_exponent": self.path_loss_exponent,
            "fading_gain": self.fading_gain,
            "noise_psd": self.noise_psd,
            "rx_bandwidth_default": self.rx_bandwidth_default,
            "reference_distance_m": self.reference_distance_m,
            "renormalize_contention": self.renormalize_contention,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChannelParams":
        default_bw = data.get("rx_bandwidth_default")
        return cls(
            path_loss_exponent=float(data["path_loss_exponent"]),
            fading_gain=float(data["fading_gain"]),
            noise_psd=float(data["noise_psd"]),
            rx_bandwidth_default=None if default_bw is None else float(default_bw),
            reference_distance_m=float(data.get("reference_distance_m", 1.0)),
            renormalize_contention=bool(data.get("renormalize_contention", False)),
        )


@dataclass(frozen=True)
class EnergyParams:
    """Параметры энергопотребления: расход на км, мощность и цена приёма."""
    drive_rate_kwh_per_km: float = 0.2
    rx_power_w: float = 10.0
    rx_energy_per_mb_j: float = 0.0

    def to_dict(self) -> dict:
        return {
            "drive_rate_kwh_per_km": self.drive_rate_kwh_per_km,
            "rx_power_w": self.rx_power_w,
            "rx_energy_per_mb_j": self.rx_energy_per_mb_j,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnergyParams":
        return cls(
            drive_rate_kwh_per_km=float(data["drive_rate_kwh_per_km"]),
            rx_power_w=float(data["rx_power_w"]),
            rx_energy_per_mb_j=float(data.get("rx_energy_per_mb_j", 0.0)),
        )


@dataclass(frozen=True)
class Scenario:
    """
    Сценарий: RSU на трёх ветках, трасса машин и глобальные параметры.

    Attributes:
        rsus: Набор RSU
        vehicles: Набор машин
        channel: Параметры канала
        energy: Параметры энергии
        meeting_probability: p — вероятность встречи двух машин у одного RSU
        seed: Зерно, из которого получен сценарий
        time_step_s: Шаг дискретной симуляции
    """
    rsus: tuple[Rsu, ...]
    vehicles: tuple[Vehicle, ...]
    channel: ChannelParams = field(default_factory=ChannelParams)
    energy: EnergyParams = field(default_factory=EnergyParams)
    meeting_probability: float = 0.005
    seed: int = 0
    time_step_s: float = 0.1

    def __post_init__(self):
        # Списки из JSON/тестов приводятся к кортежам, чтобы сценарий был неизменяемым
        object.__setattr__(self, "rsus", tuple(self.rsus))
        object.__setattr__(self, "vehicles", tuple(self.vehicles))

    @property
    def fleet_size(self) -> int:
        """m — число машин в сценарии."""
        return len(self.vehicles)

    def branch_rsus(self, branch: Branch) -> list[Rsu]:
        """RSU ветки в порядке, в котором их встречает машина."""
        return sorted(
            (r for r in self.rsus if r.branch == branch),
            key=lambda r: (r.position_m, r.id),
        )

    def with_vehicles(self, vehicles: Iterable[Vehicle]) -> "Scenario":
        return replace(self, vehicles=tuple(vehicles))

    def with_uniform_demand(
        self, full_mb: float, energy_kwh: Optional[float] = None
    ) -> "Scenario":
        """Копия сценария, где у всех машин одинаковая полная потребность."""
        vehicles = []
        for vehicle in self.vehicles:
            updated = vehicle.with_demand(full_mb)
            if energy_kwh is not None:
                updated = updated.with_energy(energy_kwh)
            vehicles.append(updated)
        return self.with_vehicles(vehicles)

    # --- Методы сериализации для JSON ---
    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "time_step_s": self.time_step_s,
            "meeting_probability": self.meeting_probability,
            "channel": self.channel.to_dict(),
            "energy": self.energy.to_dict(),
            "rsus": [r.to_dict() for r in self.rsus],
            "vehicles": [v.to_dict() for v in self.vehicles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        return cls(
            rsus=tuple(Rsu.from_dict(r) for r in data.get("rsus", [])),
            vehicles=tuple(Vehicle.from_dict(v) for v in data.get("vehicles", [])),
            channel=ChannelParams.from_dict(data["channel"]),
            energy=EnergyParams.from_dict(data["energy"]),
            meeting_probability=float(data["meeting_probability"]),
            seed=int(data["seed"]),
            time_step_s=float(data.get("time_step_s", 0.1)),
        )

    def __repr__(self):
        return (
            f"Scenario(seed={self.seed}, rsus={len(self.rsus)}, "
            f"vehicles={len(self.vehicles)})"
        )


@dataclass(frozen=True)
class PlanEntry:
    """
    Одна позиция плана: RSU, флаг участия c_i^j, время t_i^j и доля α_i.

    rate_mb_s и window_s сохраняются для пересчёта энергии и проверки
    ограничения t_i^j ≤ T_i.
    """
    rsu_id: int
    engaged: bool
    time_s: float
    data_mb: float
    fraction: float
    rate_mb_s: float
    window_s: float

    def to_dict(self) -> dict:
        return {
            "rsu_id": self.rsu_id,
            "engaged": int(self.engaged),
            "time_s": self.time_s,
            "data_mb": self.data_mb,
            "fraction": self.fraction,
            "rate_mb_s": self.rate_mb_s,
            "window_s": self.window_s,
        }


@dataclass(frozen=True)
class AllocationPlan:
    """
    План распределения передачи одной машины по RSU.

    Attributes:
        vehicle_id: Машина (None для плана, построенного вне сценария)
        entries: Упорядоченные позиции плана
        total_time_s: Σ t_i^j
        delivered_mb: Объём, который план доставляет
        demand_mb: Запрошенный объём (полный или базовый)
        degraded: True, если вместо полной потребности взята базовая
    """
    vehicle_id: Optional[int]
    entries: tuple[PlanEntry, ...]
    total_time_s: float
    delivered_mb: float
    demand_mb: float
    degraded: bool = False

    @property
    def engaged_entries(self) -> list[PlanEntry]:
        return [e for e in self.entries if e.engaged]

    @property
    def rsus_used(self) -> list[int]:
        return [e.rsu_id for e in self.entries if e.engaged]

    def for_vehicle(self, vehicle_id: int, degraded: bool = False) -> "AllocationPlan":
        return replace(self, vehicle_id=vehicle_id, degraded=degraded)

    def to_dict(self) -> dict:
        return {
            "vehicle_id": self.vehicle_id,
            "entries": [e.to_dict() for e in self.entries],
            "total_time_s": self.total_time_s,
            "delivered_mb": self.delivered_mb,
            "demand_mb": self.demand_mb,
            "degraded": self.degraded,
        }

    def __repr__(self):
        return (
            f"AllocationPlan(vehicle={self.vehicle_id}, rsus={self.rsus_used}, "
            f"time={self.total_time_s:.3f}s, delivered={self.delivered_mb:.1f}MB)"
        )
