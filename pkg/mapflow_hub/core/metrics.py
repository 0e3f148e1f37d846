"""
Агрегация результатов симуляции в метрики оценки.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .engine import SimResult
from .utils import format_float

REPORT_COLUMNS = (
    "algorithm",
    "seed",
    "vehicles",
    "demand_mb",
    "makespan_s",
    "min_time_s",
    "mean_time_s",
    "mean_rsus_per_vehicle",
    "hit_rate_variance",
    "completed",
    "degraded",
    "stranded",
    "delivered_mb",
)


def hit_rate_variance(
    access_counts: Sequence[int] | Mapping[int, int],
) -> Optional[float]:
    """
    Популяционная дисперсия долей обращений к RSU.

    Доля RSU — count_i / Σ counts; в вектор входят и RSU без обращений.
    None, если обращений не было вовсе.

    Examples:
        >>> hit_rate_variance([3, 3, 3])
        0.0
        >>> round(hit_rate_variance([4, 0, 0]), 4)
        0.2222
    """
    if isinstance(access_counts, Mapping):
        access_counts = [access_counts[k] for k in sorted(access_counts)]
    counts = np.asarray(access_counts, dtype=float)
    total = counts.sum()
    if counts.size == 0 or total <= 0:
        return None
    return float(np.var(counts / total))


@dataclass(frozen=True)
class MetricsReport:
    """
    Сводка по набору прогонов одного семейства сценариев.

    Статистики времени считаются по машинам, завершившим полную передачу;
    если таких нет, они равны None.
    """
    algorithm: str
    seed: Optional[int]
    vehicles: int
    demand_mb: Optional[float]
    makespan_s: Optional[float]
    min_time_s: Optional[float]
    mean_time_s: Optional[float]
    mean_rsus_per_vehicle: Optional[float]
    hit_rate_variance: Optional[float]
    completed: int
    degraded: int
    stranded: int
    delivered_mb: float
    times_s: tuple[float, ...] = ()
    rsus_per_vehicle: tuple[int, ...] = ()
    access_counts: dict[int, int] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return self.vehicles == 0

    def to_row(self) -> list[str]:
        """Строка CSV-отчёта в порядке REPORT_COLUMNS."""
        return [
            self.algorithm,
            "" if self.seed is None else str(self.seed),
            str(self.vehicles),
            format_float(self.demand_mb),
            format_float(self.makespan_s),
            format_float(self.min_time_s),
            format_float(self.mean_time_s),
            format_float(self.mean_rsus_per_vehicle),
            format_float(self.hit_rate_variance, precision=9),
            str(self.completed),
            str(self.degraded),
            str(self.stranded),
            format_float(self.delivered_mb),
        ]


EMPTY_REPORT = MetricsReport(
    algorithm="",
    seed=None,
    vehicles=0,
    demand_mb=None,
    makespan_s=None,
    min_time_s=None,
    mean_time_s=None,
    mean_rsus_per_vehicle=None,
    hit_rate_variance=None,
    completed=0,
    degraded=0,
    stranded=0,
    delivered_mb=0.0,
)


def _single_value(values: set):
    return next(iter(values)) if len(values) == 1 else None


def summarize(results: Sequence[SimResult]) -> MetricsReport:
    """
    Сводит результаты прогонов в один отчёт.

    Обращения к RSU складываются по всем прогонам. Колонки seed и
    demand_mb заполняются, только если они одинаковы во всех прогонах.
    """
    if not results:
        return EMPTY_REPORT

    records = [rec for result in results for rec in result.records]
    completed = [rec for rec in records if rec.completed]
    times = tuple(rec.transmission_time_s for rec in completed)
    rsus_used = tuple(len(rec.rsus_used) for rec in completed)

    access: Counter = Counter()
    for result in results:
        access.update(result.access_counts)
    access_counts = {rid: access[rid] for rid in sorted(access)}

    algorithms = {r.algorithm for r in results}
    return MetricsReport(
        algorithm="+".join(sorted(algorithms)),
        seed=_single_value({r.seed for r in results}),
        vehicles=len(records),
        demand_mb=_single_value(
            {rec.demand_mb for rec in records if not rec.degraded and not rec.stranded}
        ),
        makespan_s=max(times) if times else None,
        min_time_s=min(times) if times else None,
        mean_time_s=float(np.mean(times)) if times else None,
        mean_rsus_per_vehicle=float(np.mean(rsus_used)) if rsus_used else None,
        hit_rate_variance=hit_rate_variance(access_counts),
        completed=len(completed),
        degraded=sum(rec.degraded for rec in records),
        stranded=sum(rec.stranded for rec in records),
        delivered_mb=sum(rec.delivered_mb for rec in records),
        times_s=times,
        rsus_per_vehicle=rsus_used,
        access_counts=access_counts,
    )
