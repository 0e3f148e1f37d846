"""
Координатор свипов: прогон сценария по сетке объёмов карты или
по числу машин для набора алгоритмов.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np

from ..core.engine import run_scenario
from ..core.exceptions import InvalidParametersError
from ..core.metrics import summarize
from ..core.models import Scenario
from ..core.scheduler import Policy
from ..core.utils import derive_seed
from .config import SweepConfig

logger = logging.getLogger(__name__)

# Ключ для зерна выборки машин в свипе по трафику
TRAFFIC_SUBSET_KEY = 0x7EAF


def grid(start: float, stop: float, step: float) -> list[float]:
    """
    Точки start, start + step, ..., не превосходящие stop.

    Examples:
        >>> grid(140, 160, 10)
        [140.0, 150.0, 160.0]
        >>> grid(5, 5, 1)
        [5.0]
    """
    if step <= 0:
        raise InvalidParametersError("step must be > 0")
    if start > stop:
        raise InvalidParametersError("from must be <= to")
    count = math.floor((stop - start) / step + 1e-9) + 1
    return [float(start + i * step) for i in range(count)]


def traffic_subset(scenario: Scenario, count: int) -> Scenario:
    """
    Сценарий с count машинами, выбранными без повторений по зерну сценария.

    Выборки вложены: меньшая всегда является началом одной и той же
    перестановки, так что точки свипа отличаются только добавленными машинами.
    """
    vehicles = sorted(scenario.vehicles, key=lambda v: v.id)
    if not 1 <= count <= len(vehicles):
        raise InvalidParametersError(
            f"vehicle count {count} must be in [1, {len(vehicles)}]"
        )
    rng = np.random.default_rng(derive_seed(scenario.seed, TRAFFIC_SUBSET_KEY))
    order = rng.permutation(len(vehicles))[:count]
    chosen = sorted(int(i) for i in order)
    return scenario.with_vehicles(vehicles[i] for i in chosen)


def _run_point(task: tuple) -> tuple[int, int, list[str]]:
    point_index, algo_index, scenario, policy, time_step_s = task
    result = run_scenario(scenario, policy, time_step_s=time_step_s)
    return point_index, algo_index, summarize([result]).to_row()


class SweepRunner:
    """Выполняет свипы последовательно или в пуле процессов."""

    def __init__(self, config: Optional[SweepConfig] = None):
        self.config = config or SweepConfig()

    def _execute(self, tasks: list[tuple]) -> list[list[str]]:
        workers = max(1, self.config.WORKERS)
        logger.info("Running %d sweep tasks with %d worker(s)", len(tasks), workers)
        if workers == 1 or len(tasks) <= 1:
            outcomes = [_run_point(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(_run_point, tasks))
        # Порядок строк не зависит от порядка завершения задач
        outcomes.sort(key=lambda item: (item[0], item[1]))
        return [row for _, _, row in outcomes]

    @staticmethod
    def _policies(algorithms: Sequence[Policy]) -> list[Policy]:
        if not algorithms:
            raise InvalidParametersError("at least one algorithm is required")
        return list(algorithms)

    def sweep_volume(
        self,
        scenario: Scenario,
        algorithms: Sequence[Policy],
        from_mb: Optional[float] = None,
        to_mb: Optional[float] = None,
        step_mb: Optional[float] = None,
        energy_kwh: Optional[float] = None,
    ) -> list[list[str]]:
        """Строка отчёта на каждую пару (объём карты, алгоритм)."""
        cfg = self.config
        policies = self._policies(algorithms)
        points = grid(
            cfg.VOLUME_FROM_MB if from_mb is None else from_mb,
            cfg.VOLUME_TO_MB if to_mb is None else to_mb,
            cfg.VOLUME_STEP_MB if step_mb is None else step_mb,
        )
        energy = cfg.VOLUME_ENERGY_KWH if energy_kwh is None else energy_kwh
        tasks = []
        for point_index, demand_mb in enumerate(points):
            variant = scenario.with_uniform_demand(demand_mb, energy)
            for algo_index, policy in enumerate(policies):
                tasks.append(
                    (point_index, algo_index, variant, policy, cfg.TIME_STEP_S)
                )
        return self._execute(tasks)

    def sweep_traffic(
        self,
        scenario: Scenario,
        algorithms: Sequence[Policy],
        from_n: Optional[int] = None,
        to_n: Optional[int] = None,
        step_n: Optional[int] = None,
    ) -> list[list[str]]:
        """Строка отчёта на каждую пару (число машин, алгоритм)."""
        cfg = self.config
        policies = self._policies(algorithms)
        start = cfg.TRAFFIC_FROM if from_n is None else from_n
        stop = cfg.TRAFFIC_TO if to_n is None else to_n
        step = cfg.TRAFFIC_STEP if step_n is None else step_n
        if start < 1:
            raise InvalidParametersError("vehicle count must start at >= 1")
        counts = [int(n) for n in grid(start, stop, step)]
        tasks = []
        for point_index, count in enumerate(counts):
            variant = traffic_subset(scenario, count)
            for algo_index, policy in enumerate(policies):
                tasks.append(
                    (point_index, algo_index, variant, policy, cfg.TIME_STEP_S)
                )
        return self._execute(tasks)
