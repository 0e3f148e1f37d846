"""
Распределение передачи карты по RSU.

ETDM — жадное решение дробного рюкзака: RSU сортируются по убыванию
ожидаемой скорости, окна заполняются целиком, последнее задействованное
RSU получает дробный остаток. OA и PTA — базовые политики: все встреченные
RSU по порядку либо каждое с вероятностью q. Оракул перебирает вершины
допустимого множества и служит эталоном оптимальности в тестах.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .channel import LinkContext, contact_window, expected_rate
from .energy import Verdict, energy_feasible, plan_rx_joules, route_drive_energy
from .exceptions import (
    InsufficientCapacityError,
    InvalidParametersError,
    SingularGeometryError,
    UnknownAlgorithmError,
)
from .models import AllocationPlan, PlanEntry, Scenario, Vehicle
from .utils import derive_seed

logger = logging.getLogger(__name__)

ORACLE_MAX_OFFERS = 8
# Относительная погрешность, в пределах которой ёмкость считается достаточной
CAPACITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RsuOffer:
    """Предложение RSU для машины: ожидаемая скорость R^g_{i,j} и окно T_i."""
    rsu_id: int
    expected_rate_mb_s: float
    window_s: float

    def __post_init__(self):
        if self.expected_rate_mb_s < 0 or self.window_s < 0:
            raise InvalidParametersError(
                f"offer {self.rsu_id}: rate and window must be >= 0"
            )

    @property
    def capacity_mb(self) -> float:
        return self.expected_rate_mb_s * self.window_s


class PolicyKind(str, Enum):
    ETDM = "etdm"
    OA = "oa"
    PTA = "pta"


@dataclass(frozen=True)
class Policy:
    """Алгоритм распределения: etdm, oa или pta с вероятностью q."""
    kind: PolicyKind
    q: Optional[float] = None

    def __post_init__(self):
        text = self.kind.value if self.q is None else f"{self.kind.value}:{self.q}"
        if self.kind is PolicyKind.PTA:
            if self.q is None or not 0 <= self.q <= 1:
                raise UnknownAlgorithmError(text, "q must be in [0, 1]")
        elif self.q is not None:
            raise UnknownAlgorithmError(text, "only pta takes a probability")

    @classmethod
    def parse(cls, text: str) -> "Policy":
        """
        Разбирает строку алгоритма.

        Examples:
            >>> Policy.parse("pta:0.7").q
            0.7
            >>> Policy.parse("ETDM").label
            'etdm'
        """
        name, _, arg = text.strip().lower().partition(":")
        try:
            kind = PolicyKind(name)
        except ValueError:
            raise UnknownAlgorithmError(text) from None
        if kind is PolicyKind.PTA:
            try:
                q = float(arg)
            except ValueError:
                raise UnknownAlgorithmError(text, "pta needs pta:<q>") from None
            if not 0 <= q <= 1:
                raise UnknownAlgorithmError(text, "q must be in [0, 1]")
            return cls(kind, q)
        if arg:
            raise UnknownAlgorithmError(text, "only pta takes a probability")
        return cls(kind)

    @property
    def label(self) -> str:
        if self.kind is PolicyKind.PTA:
            return f"pta:{self.q:g}"
        return self.kind.value

    def __str__(self):
        return self.label


ETDM = Policy(PolicyKind.ETDM)
OA = Policy(PolicyKind.OA)


# --- Построение плана ---

def _fill(
    demand_mb: float,
    ordered: Sequence[RsuOffer],
    allowed: Optional[Sequence[bool]] = None,
) -> tuple[list[float], float]:
    """Заполняет окна по порядку; возвращает времена и недоставленный остаток."""
    remaining = demand_mb
    times = []
    for index, offer in enumerate(ordered):
        usable = allowed is None or allowed[index]
        if not usable or remaining <= 0 or offer.expected_rate_mb_s <= 0:
            times.append(0.0)
            continue
        if offer.capacity_mb >= remaining:
            times.append(remaining / offer.expected_rate_mb_s)
            remaining = 0.0
        else:
            times.append(offer.window_s)
            remaining -= offer.capacity_mb
    return times, max(remaining, 0.0)


def _make_plan(
    demand_mb: float, ordered: Sequence[RsuOffer], times: Sequence[float]
) -> AllocationPlan:
    data = [t * o.expected_rate_mb_s for t, o in zip(times, ordered)]
    delivered = sum(data)
    entries = tuple(
        PlanEntry(
            rsu_id=offer.rsu_id,
            engaged=t > 0,
            time_s=t,
            data_mb=d,
            fraction=d / delivered if delivered > 0 else 0.0,
            rate_mb_s=offer.expected_rate_mb_s,
            window_s=offer.window_s,
        )
        for offer, t, d in zip(ordered, times, data)
    )
    return AllocationPlan(
        vehicle_id=None,
        entries=entries,
        total_time_s=sum(times),
        delivered_mb=delivered,
        demand_mb=demand_mb,
    )


def _finish(
    demand_mb: float,
    ordered: Sequence[RsuOffer],
    allowed: Optional[Sequence[bool]] = None,
) -> AllocationPlan:
    if demand_mb <= 0:
        raise InvalidParametersError("demand must be > 0")
    times, shortfall = _fill(demand_mb, ordered, allowed)
    plan = _make_plan(demand_mb, ordered, times)
    if shortfall > demand_mb * CAPACITY_TOLERANCE:
        raise InsufficientCapacityError(plan.delivered_mb, demand_mb, plan)
    return plan


# --- ETDM ---

@dataclass
class SortStats:
    """Счётчик сравнений при сортировке предложений."""
    comparisons: int = 0


class _CountingKey:
    __slots__ = ("key", "stats")

    def __init__(self, key: tuple, stats: SortStats):
        self.key = key
        self.stats = stats

    def __lt__(self, other: "_CountingKey") -> bool:
        self.stats.comparisons += 1
        return self.key < other.key


def _rate_order(offer: RsuOffer) -> tuple[float, int]:
    # По убыванию скорости, при равенстве по возрастанию id
    return (-offer.expected_rate_mb_s, offer.rsu_id)


def etdm_single(
    demand_mb: float,
    offers: Iterable[RsuOffer],
    stats: Optional[SortStats] = None,
) -> AllocationPlan:
    """
    ETDM для одной машины: одна сортировка и один линейный проход.

    Raises:
        InsufficientCapacityError: Σ R·T < demand; внутри — план на максимум
    """
    if stats is None:
        ordered = sorted(offers, key=_rate_order)
    else:
        ordered = sorted(offers, key=lambda o: _CountingKey(_rate_order(o), stats))
    return _finish(demand_mb, ordered)


# --- Базовые политики ---

def oa_allocate(demand_mb: float, encounters: Sequence[RsuOffer]) -> AllocationPlan:
    """OA: передача с каждым встреченным RSU по порядку встречи."""
    return _finish(demand_mb, list(encounters))


def pta_engagement(count: int, q: float, seed: int) -> list[bool]:
    """Маска участия PTA: каждое RSU независимо с вероятностью q."""
    if not 0 <= q <= 1:
        raise InvalidParametersError("q must be in [0, 1]")
    draws = np.random.default_rng(seed).random(count)
    return [bool(x < q) for x in draws]


def pta_allocate(
    demand_mb: float, encounters: Sequence[RsuOffer], q: float, rng_seed: int
) -> AllocationPlan:
    """PTA: как OA, но каждое встреченное RSU задействуется с вероятностью q."""
    encounters = list(encounters)
    mask = pta_engagement(len(encounters), q, rng_seed)
    return _finish(demand_mb, encounters, mask)


def allocate(
    policy: Policy, demand_mb: float, offers: Sequence[RsuOffer], seed: int = 0
) -> AllocationPlan:
    """Единая точка вызова распределителя по политике."""
    if policy.kind is PolicyKind.ETDM:
        return etdm_single(demand_mb, offers)
    if policy.kind is PolicyKind.OA:
        return oa_allocate(demand_mb, offers)
    return pta_allocate(demand_mb, offers, policy.q, seed)


# --- Оракул ---

def oracle_min_time(
    demand_mb: float, offers: Sequence[RsuOffer], resolution: float = 1e-3
) -> float:
    """
    Минимальное Σ t_i перебором.

    Каждое предложение либо не используется, либо насыщается (t = T),
    либо (не более одного) получает дробный остаток, округлённый вверх
    до сетки resolution. Ошибка относительно точного оптимума не больше
    resolution × число предложений.
    """
    offers = list(offers)
    if len(offers) > ORACLE_MAX_OFFERS:
        raise InvalidParametersError(
            f"oracle handles at most {ORACLE_MAX_OFFERS} offers"
        )
    if resolution <= 0:
        raise InvalidParametersError("resolution must be > 0")
    total = sum(o.capacity_mb for o in offers)
    if total < demand_mb * (1 - CAPACITY_TOLERANCE):
        raise InsufficientCapacityError(total, demand_mb)
    if demand_mb <= 0:
        return 0.0

    best = math.inf
    indices = range(len(offers))
    for size in range(len(offers) + 1):
        for saturated in itertools.combinations(indices, size):
            full_time = sum(offers[i].window_s for i in saturated)
            if full_time >= best:
                continue
            residue = demand_mb - sum(offers[i].capacity_mb for i in saturated)
            if residue <= demand_mb * 1e-12:
                best = full_time
                continue
            for j in indices:
                offer = offers[j]
                if j in saturated or offer.expected_rate_mb_s <= 0:
                    continue
                needed = residue / offer.expected_rate_mb_s
                if needed > offer.window_s * (1 + 1e-12):
                    continue
                tail = min(math.ceil(needed / resolution) * resolution, offer.window_s)
                best = min(best, full_time + tail)
    return best


# --- План для машин сценария ---

def build_offers(scenario: Scenario, vehicle: Vehicle) -> list[RsuOffer]:
    """Предложения RSU ветки машины в порядке встречи."""
    offers = []
    for rsu in scenario.branch_rsus(vehicle.branch):
        try:
            rate = expected_rate(
                LinkContext.between(rsu, vehicle),
                scenario.channel,
                scenario.fleet_size,
                scenario.meeting_probability,
            )
        except SingularGeometryError:
            logger.warning("RSU %s sits on the lane (offset 0); skipped", rsu.id)
            continue
        offers.append(RsuOffer(rsu.id, rate, contact_window(rsu, vehicle)))
    return offers


@dataclass(frozen=True)
class VehiclePlan:
    """
    Результат планирования одной машины.

    plan отсутствует только у машин, которым не хватает энергии на маршрут.
    shortfall_mb > 0 означает нехватку ёмкости RSU (план частичный).
    """
    vehicle_id: int
    verdict: Verdict
    plan: Optional[AllocationPlan]
    demand_mb: float
    shortfall_mb: float = 0.0

    @property
    def stranded(self) -> bool:
        return self.verdict is Verdict.STRANDED

    @property
    def degraded(self) -> bool:
        return self.verdict is Verdict.DEGRADE_TO_BASIC

    @property
    def insufficient(self) -> bool:
        return self.shortfall_mb > 0

    @property
    def complete(self) -> bool:
        return self.plan is not None and not self.insufficient


def _allocate_partial(
    policy: Policy, demand_mb: float, offers: Sequence[RsuOffer], seed: int
) -> tuple[AllocationPlan, float]:
    try:
        return allocate(policy, demand_mb, offers, seed), 0.0
    except InsufficientCapacityError as error:
        return error.plan, demand_mb - error.max_deliverable_mb


def plan_vehicle(
    scenario: Scenario,
    vehicle: Vehicle,
    policy: Policy,
    offers: Optional[Sequence[RsuOffer]] = None,
) -> VehiclePlan:
    """
    Энергетическая проверка и распределение для одной машины.

    Сначала строится план для полной карты; если бюджет не выдерживает
    движение вместе с приёмом, план перестраивается для базовых слоёв.
    """
    if offers is None:
        offers = build_offers(scenario, vehicle)
    demand = vehicle.demand
    budget = vehicle.energy_remaining_kwh
    if route_drive_energy(vehicle, scenario.energy) > budget:
        return VehiclePlan(vehicle.id, Verdict.STRANDED, None, demand.full_mb)

    seed = derive_seed(scenario.seed, vehicle.id)
    plan, shortfall = _allocate_partial(policy, demand.full_mb, offers, seed)
    rx_joules = (
        plan_rx_joules(plan, demand.full_mb, scenario.energy)
        if plan.delivered_mb > 0
        else 0.0
    )
    verdict = energy_feasible(vehicle, rx_joules, scenario.energy)
    if verdict is Verdict.FEASIBLE:
        return VehiclePlan(
            vehicle.id, verdict, plan.for_vehicle(vehicle.id), demand.full_mb, shortfall
        )

    plan, shortfall = _allocate_partial(policy, demand.basic_mb, offers, seed)
    return VehiclePlan(
        vehicle.id,
        verdict,
        plan.for_vehicle(vehicle.id, degraded=True),
        demand.basic_mb,
        shortfall,
    )


@dataclass(frozen=True)
class FleetPlan:
    """Планы всех машин (по возрастанию id) и makespan = max Σ t."""
    policy: Policy
    plans: dict[int, VehiclePlan] = field(default_factory=dict)

    @property
    def makespan_s(self) -> float:
        times = [vp.plan.total_time_s for vp in self.plans.values() if vp.plan]
        return max(times, default=0.0)

    def completed_times(self) -> dict[int, float]:
        return {
            vid: vp.plan.total_time_s for vid, vp in self.plans.items() if vp.complete
        }

    def stranded_ids(self) -> list[int]:
        return [vid for vid, vp in self.plans.items() if vp.stranded]

    def insufficient_ids(self) -> list[int]:
        return [vid for vid, vp in self.plans.items() if vp.insufficient]


def plan_fleet(scenario: Scenario, policy: Policy) -> FleetPlan:
    """
    Планирует все машины сценария независимо.

    Подзадачи машин не зависят друг от друга; результат собирается
    по возрастанию id машины.
    """
    plans = {}
    for vehicle in sorted(scenario.vehicles, key=lambda v: v.id):
        plans[vehicle.id] = plan_vehicle(scenario, vehicle, policy)
    fleet = FleetPlan(policy, plans)
    logger.debug(
        "Planned %d vehicles with %s: makespan %.3f s, stranded %d, short %d",
        len(plans),
        policy.label,
        fleet.makespan_s,
        len(fleet.stranded_ids()),
        len(fleet.insufficient_ids()),
    )
    return fleet


def etdm_multi(scenario: Scenario) -> FleetPlan:
    """ETDM для всего парка; makespan — максимум Σ t по машинам."""
    return plan_fleet(scenario, ETDM)
