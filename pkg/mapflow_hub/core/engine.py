"""
Дискретная по времени симуляция раздачи карты.

Машины движутся по веткам с постоянной скоростью, каналы с RSU открываются
по плану политики, а фактическая скорость каждого канала в шаге зависит
от числа машин, одновременно задействованных у того же RSU.
"""
from __future__ import annotations

import json
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .channel import LinkContext, link_bandwidth, spectral_efficiency
from .energy import route_drive_energy
from .exceptions import InvalidParametersError
from .models import AllocationPlan, Rsu, Scenario, Vehicle
from .scheduler import FleetPlan, Policy, PolicyKind, plan_fleet, pta_engagement
from .utils import JOULES_PER_KWH, derive_seed, format_float

logger = logging.getLogger(__name__)

VEHICLE_COLUMNS = (
    "algorithm",
    "seed",
    "vehicle_id",
    "completed",
    "degraded",
    "stranded",
    "demand_mb",
    "delivered_mb",
    "transmission_time_s",
    "rsus_used",
    "energy_used_kwh",
    "anomalies",
)

# Относительный допуск, при котором потребность считается выполненной
_DONE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VehicleRecord:
    """Итог симуляции одной машины."""
    vehicle_id: int
    completed: bool
    delivered_mb: float
    demand_mb: float
    transmission_time_s: float
    rsus_used: tuple[int, ...]
    degraded: bool
    stranded: bool
    energy_used_kwh: float
    completion_time_s: Optional[float] = None
    anomalies: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "vehicle_id": self.vehicle_id,
            "completed": self.completed,
            "delivered_mb": self.delivered_mb,
            "demand_mb": self.demand_mb,
            "transmission_time_s": self.transmission_time_s,
            "rsus_used": list(self.rsus_used),
            "degraded": self.degraded,
            "stranded": self.stranded,
            "energy_used_kwh": self.energy_used_kwh,
            "completion_time_s": self.completion_time_s,
            "anomalies": list(self.anomalies),
        }


@dataclass(frozen=True)
class SimResult:
    """
    Результат одного прогона сценария.

    Attributes:
        algorithm: Метка политики (etdm, oa, pta:0.7)
        seed: Зерно сценария
        time_step_s: Шаг симуляции
        start_time_s: Начало сетки шагов; шаг n покрывает
            [start + n·Δ, start + (n+1)·Δ)
        contention: False, если помехи отключены (k = 1 для всех каналов)
        records: Записи машин по возрастанию id
        access_counts: Число разных машин, получивших данные от RSU
            (все RSU сценария, включая нулевые)
        occupancy_log: rsu_id → {шаг: k} только для шагов с k > 0
    """
    algorithm: str
    seed: int
    time_step_s: float
    start_time_s: float
    contention: bool
    records: tuple[VehicleRecord, ...]
    access_counts: dict[int, int]
    occupancy_log: dict[int, dict[int, int]] = field(default_factory=dict, repr=False)

    def occupancy(self, rsu_id: int, step: int) -> int:
        """Число машин, задействованных у RSU в данном шаге."""
        return self.occupancy_log.get(rsu_id, {}).get(step, 0)

    def step_at(self, time_s: float) -> int:
        return math.floor((time_s - self.start_time_s) / self.time_step_s)

    def record(self, vehicle_id: int) -> VehicleRecord:
        for rec in self.records:
            if rec.vehicle_id == vehicle_id:
                return rec
        raise KeyError(vehicle_id)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "time_step_s": self.time_step_s,
            "contention": self.contention,
            "records": [r.to_dict() for r in self.records],
            "access_counts": {str(k): v for k, v in sorted(self.access_counts.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def vehicle_rows(self) -> list[list[str]]:
        """Строки детального CSV: по одной на машину, в порядке VEHICLE_COLUMNS."""
        rows = []
        for rec in self.records:
            rows.append(
                [
                    self.algorithm,
                    str(self.seed),
                    str(rec.vehicle_id),
                    str(int(rec.completed)),
                    str(int(rec.degraded)),
                    str(int(rec.stranded)),
                    format_float(rec.demand_mb),
                    format_float(rec.delivered_mb),
                    format_float(rec.transmission_time_s),
                    ";".join(str(r) for r in rec.rsus_used),
                    format_float(rec.energy_used_kwh),
                    ";".join(rec.anomalies),
                ]
            )
        return rows

    def __repr__(self):
        done = sum(r.completed for r in self.records)
        return (
            f"SimResult(algorithm={self.algorithm}, seed={self.seed}, "
            f"completed={done}/{len(self.records)})"
        )


@dataclass(frozen=True)
class _Link:
    """
    Канал машины с RSU.

    До planned_end_s канал работает по плану, после него и до end_s
    только добирает недостачу машины. У OA и PTA planned_end_s = end_s.
    """
    vehicle_id: int
    rsu: Rsu
    start_s: float
    end_s: float
    planned_end_s: float
    planned_mb: float = 0.0
    rate_mb_s: float = 0.0

    def planned_overlap(self, low: float, high: float) -> float:
        return max(min(high, self.planned_end_s) - max(low, self.start_s), 0.0)

    def reserve_overlap(self, low: float, high: float) -> float:
        begin = max(low, self.planned_end_s, self.start_s)
        return max(min(high, self.end_s) - begin, 0.0)


@dataclass
class _VehicleState:
    vehicle: Vehicle
    demand_mb: float
    energy_left_j: float
    degraded: bool = False
    delivered_mb: float = 0.0
    air_time_s: float = 0.0
    rx_joules: float = 0.0
    done: bool = False
    completion_time_s: Optional[float] = None
    rsu_data: dict[int, float] = field(default_factory=dict)
    anomalies: list[str] = field(default_factory=list)
    # Недостача относительно уже закрытых плановых отрезков
    deficit_mb: float = 0.0
    planned_got: dict[int, float] = field(default_factory=dict)
    closed: set[int] = field(default_factory=set)

    @property
    def remaining_mb(self) -> float:
        return self.demand_mb - self.delivered_mb

    @property
    def behind(self) -> bool:
        return self.deficit_mb > self.demand_mb * _DONE_TOLERANCE


def _chord_midpoint(rsu: Rsu, vehicle: Vehicle) -> float:
    """Момент, когда машина ближе всего к RSU."""
    return vehicle.entry_time_s + rsu.position_m / vehicle.speed_mps


def _vehicle_links(
    scenario: Scenario,
    vehicle: Vehicle,
    plan: AllocationPlan,
    policy: Policy,
    rsus: dict[int, Rsu],
) -> list[_Link]:
    """
    Интервалы каналов машины.

    ETDM открывает канал на плановое t_i, симметрично относительно середины
    хорды. Если из-за конкуренции RSU отдал меньше плана, канал продлевается
    до конца хорды, а затем недостачу добирают незадействованные RSU ветки;
    t_i при этом не превышает T_i. OA и PTA держат канал всё окно покрытия
    (PTA только у RSU, выбранных маской), пока потребность не выполнена.
    """
    links = []
    if policy.kind is PolicyKind.ETDM:
        for entry in plan.entries:
            if entry.window_s <= 0 or entry.rate_mb_s <= 0:
                continue
            rsu = rsus[entry.rsu_id]
            mid = _chord_midpoint(rsu, vehicle)
            chord_end = mid + entry.window_s / 2.0
            if entry.engaged:
                half = entry.time_s / 2.0
                start, planned_end = mid - half, mid + half
            else:
                start = planned_end = mid - entry.window_s / 2.0
            links.append(
                _Link(
                    vehicle.id,
                    rsu,
                    start,
                    chord_end,
                    planned_end,
                    planned_mb=entry.data_mb if entry.engaged else 0.0,
                    rate_mb_s=entry.rate_mb_s,
                )
            )
        return links

    entries = plan.entries
    if policy.kind is PolicyKind.PTA:
        mask = pta_engagement(
            len(entries), policy.q, derive_seed(scenario.seed, vehicle.id)
        )
    else:
        mask = [True] * len(entries)
    for entry, allowed in zip(entries, mask):
        if not allowed or entry.window_s <= 0:
            continue
        rsu = rsus[entry.rsu_id]
        mid = _chord_midpoint(rsu, vehicle)
        half = entry.window_s / 2.0
        links.append(_Link(vehicle.id, rsu, mid - half, mid + half, mid + half))
    return links


def _reserve_choice(
    state: _VehicleState, links: list[_Link], low: float, high: float
) -> Optional[_Link]:
    """Канал, которым машина добирает недостачу в шаге: самый быстрый по плану."""
    if not state.behind:
        return None
    candidates = [link for link in links if link.reserve_overlap(low, high) > 0]
    if not candidates:
        return None
    return min(candidates, key=lambda link: (-link.rate_mb_s, link.rsu.id))


class _RateTable:
    """Кэш log2(1 + SINR) по (RSU, k)."""

    def __init__(self, scenario: Scenario):
        self._channel = scenario.channel
        self._efficiency: dict[tuple[int, int], float] = {}

    def rate(self, rsu: Rsu, vehicle: Vehicle, k: int) -> float:
        key = (rsu.id, k)
        if key not in self._efficiency:
            ctx = LinkContext.between(rsu, vehicle, k)
            self._efficiency[key] = spectral_efficiency(ctx, self._channel)
        return link_bandwidth(rsu, vehicle, self._channel) * self._efficiency[key]


def _initial_states(
    scenario: Scenario, fleet: FleetPlan
) -> dict[int, _VehicleState]:
    states = {}
    for vehicle in sorted(scenario.vehicles, key=lambda v: v.id):
        vp = fleet.plans[vehicle.id]
        drive = route_drive_energy(vehicle, scenario.energy)
        state = _VehicleState(
            vehicle=vehicle,
            demand_mb=vp.demand_mb,
            energy_left_j=max(vehicle.energy_remaining_kwh - drive, 0.0)
            * JOULES_PER_KWH,
            degraded=vp.degraded,
        )
        if vp.stranded:
            state.done = True
            state.anomalies.append("stranded")
        if vp.insufficient:
            state.anomalies.append("insufficient_capacity")
        states[vehicle.id] = state
    return states


def run_scenario(
    scenario: Scenario,
    policy: Policy,
    *,
    contention: bool = True,
    time_step_s: Optional[float] = None,
) -> SimResult:
    """
    Прогоняет сценарий под выбранной политикой.

    Каждый шаг интегрируется точно по пересечению шага с интервалом канала;
    k у RSU — число каналов, активных у него в этом шаге. Передача
    останавливается, когда потребность выполнена, окно закончилось или
    бюджет приёма исчерпан. Результат — чистая функция входов.

    Args:
        scenario: Проверенный сценарий
        policy: etdm, oa или pta:<q>
        contention: False — k = 1 для всех каналов
        time_step_s: Шаг симуляции (по умолчанию из сценария)
    """
    dt = scenario.time_step_s if time_step_s is None else time_step_s
    if not dt > 0:
        raise InvalidParametersError("time_step_s must be > 0")

    fleet = plan_fleet(scenario, policy)
    rsus = {r.id: r for r in scenario.rsus}
    states = _initial_states(scenario, fleet)

    links: list[_Link] = []
    for vid, state in states.items():
        vp = fleet.plans[vid]
        if vp.plan is None:
            continue
        links.extend(_vehicle_links(scenario, state.vehicle, vp.plan, policy, rsus))
    links.sort(key=lambda link: (link.start_s, link.vehicle_id, link.rsu.id))

    rates = _RateTable(scenario)
    energy = scenario.energy
    occupancy_log: dict[int, dict[int, int]] = defaultdict(dict)
    # Сетка шагов начинается с первого планового отрезка
    scheduled = [link.start_s for link in links if link.planned_end_s > link.start_s]
    start = min(scheduled, default=links[0].start_s if links else 0.0)
    horizon = max((link.end_s for link in links), default=start)

    active: list[_Link] = []
    pending = 0
    step = 0
    while pending < len(links) or active:
        low = start + step * dt
        high = low + dt
        if low >= horizon:
            break
        while pending < len(links) and links[pending].start_s < high:
            active.append(links[pending])
            pending += 1
        active = [
            link for link in active
            if link.end_s > low and not states[link.vehicle_id].done
        ]
        if not active:
            if pending >= len(links):
                break
            # Пропуск шагов без каналов
            step = max(step + 1, math.floor((links[pending].start_s - start) / dt))
            continue

        by_vehicle: dict[int, list[_Link]] = defaultdict(list)
        for link in active:
            by_vehicle[link.vehicle_id].append(link)

        # (канал, плановое время, время добора) для каналов, работающих в шаге
        usage: list[tuple[_Link, float, float]] = []
        for vid, own in by_vehicle.items():
            reserve = _reserve_choice(states[vid], own, low, high)
            for link in own:
                planned = link.planned_overlap(low, high)
                extra = link.reserve_overlap(low, high) if link is reserve else 0.0
                if planned > 0 or extra > 0:
                    usage.append((link, planned, extra))
        counts = Counter(link.rsu.id for link, _, _ in usage)
        for rsu_id, k in counts.items():
            occupancy_log[rsu_id][step] = k

        used_by: dict[int, list[tuple[_Link, float, float]]] = defaultdict(list)
        for piece in usage:
            used_by[piece[0].vehicle_id].append(piece)

        for vid in sorted(used_by):
            state = states[vid]
            pieces = []
            for link, planned, extra in used_by[vid]:
                k = counts[link.rsu.id] if contention else 1
                rate = rates.rate(link.rsu, state.vehicle, k)
                if extra > 0 and rate * extra > state.deficit_mb:
                    extra = state.deficit_mb / rate
                begin = max(low, link.start_s if planned > 0 else link.planned_end_s)
                pieces.append(
                    (link, begin, planned + extra, rate * planned, rate * extra)
                )
            data = sum(p[3] + p[4] for p in pieces)
            joules = sum(
                energy.rx_power_w * overlap
                + energy.rx_energy_per_mb_j * (planned_mb + extra_mb)
                for _, _, overlap, planned_mb, extra_mb in pieces
            )
            scale = 1.0
            finished = False
            exhausted = False
            if data > 0 and data >= (
                state.remaining_mb - state.demand_mb * _DONE_TOLERANCE
            ):
                scale = min(state.remaining_mb / data, 1.0)
                finished = True
            if joules * scale > state.energy_left_j:
                scale = state.energy_left_j / joules if joules > 0 else 0.0
                finished = False
                exhausted = True

            for link, _, overlap, planned_mb, extra_mb in pieces:
                mb = (planned_mb + extra_mb) * scale
                if mb > 0:
                    state.rsu_data[link.rsu.id] = (
                        state.rsu_data.get(link.rsu.id, 0.0) + mb
                    )
                state.planned_got[link.rsu.id] = (
                    state.planned_got.get(link.rsu.id, 0.0) + planned_mb * scale
                )
                state.deficit_mb -= extra_mb * scale
                state.air_time_s += overlap * scale
            state.delivered_mb += data * scale
            state.rx_joules += joules * scale
            state.energy_left_j = max(state.energy_left_j - joules * scale, 0.0)

            if finished:
                state.delivered_mb = state.demand_mb
                state.done = True
                state.completion_time_s = max(
                    begin + overlap * scale for _, begin, overlap, _, _ in pieces
                )
            elif exhausted:
                state.done = True
                state.anomalies.append("energy_exhausted")

        # Плановые отрезки, закончившиеся в шаге, переносят недобор в недостачу
        for link in active:
            state = states[link.vehicle_id]
            if (
                link.planned_mb > 0
                and link.planned_end_s <= high
                and link.rsu.id not in state.closed
            ):
                state.closed.add(link.rsu.id)
                got = state.planned_got.get(link.rsu.id, 0.0)
                state.deficit_mb += link.planned_mb - got
        step += 1

    records = []
    access: Counter = Counter()
    for vid, state in states.items():
        stranded = fleet.plans[vid].stranded
        met = state.delivered_mb >= state.demand_mb * (1 - _DONE_TOLERANCE)
        if not stranded and not met and "energy_exhausted" not in state.anomalies:
            state.anomalies.append("window_exit")
        used = tuple(rid for rid, mb in state.rsu_data.items() if mb > 0)
        access.update(used)
        drive = 0.0 if stranded else route_drive_energy(state.vehicle, energy)
        records.append(
            VehicleRecord(
                vehicle_id=vid,
                completed=met and not state.degraded and not stranded,
                delivered_mb=min(state.delivered_mb, state.demand_mb),
                demand_mb=state.demand_mb,
                transmission_time_s=state.air_time_s,
                rsus_used=used,
                degraded=state.degraded,
                stranded=stranded,
                energy_used_kwh=drive + state.rx_joules / JOULES_PER_KWH,
                completion_time_s=state.completion_time_s,
                anomalies=tuple(state.anomalies),
            )
        )

    result = SimResult(
        algorithm=policy.label,
        seed=scenario.seed,
        time_step_s=dt,
        start_time_s=start,
        contention=contention,
        records=tuple(records),
        access_counts={rid: access.get(rid, 0) for rid in sorted(rsus)},
        occupancy_log=dict(occupancy_log),
    )
    logger.info(
        "Simulated %s seed=%s: %d/%d vehicles completed",
        policy.label,
        scenario.seed,
        sum(r.completed for r in records),
        len(records),
    )
    return result
