"""
Прикладные сервисы с логированием операций.
Связывают ядро симулятора с хранилищем и используются CLI.
"""
from typing import Optional, Sequence

from ..decorators import log_action
from ..infra.settings import SettingsLoader
from ..infra.storage import ScenarioStorage
from ..sweep_service.config import SweepConfig
from ..sweep_service.runner import SweepRunner
from .engine import VEHICLE_COLUMNS, SimResult, run_scenario
from .exceptions import ScenarioValidationError
from .generator import GeneratorParams, generate_scenario
from .metrics import REPORT_COLUMNS, MetricsReport, summarize
from .models import Scenario
from .scheduler import Policy, PolicyKind
from .validation import validate_scenario


def parse_algorithm(text: str, default_q: Optional[float] = None) -> Policy:
    """
    Разбирает строку алгоритма; голое "pta" получает вероятность из настроек.
    """
    if text.strip().lower() == PolicyKind.PTA.value:
        q = SettingsLoader().pta_default_q if default_q is None else default_q
        return Policy(PolicyKind.PTA, q)
    return Policy.parse(text)


def ensure_valid(scenario: Scenario) -> Scenario:
    violations = validate_scenario(scenario)
    if violations:
        raise ScenarioValidationError(violations)
    return scenario


class ScenarioService:
    """Сервис генерации и загрузки сценариев."""

    def __init__(self, storage: Optional[ScenarioStorage] = None):
        self.storage = storage or ScenarioStorage()

    @log_action(action_type="GENERATE", verbose=True)
    def generate(
        self,
        params: GeneratorParams,
        seed: int,
        path: Optional[str] = None,
    ) -> Scenario:
        """Генерирует сценарий и, если указан путь, сохраняет его в JSON."""
        scenario = generate_scenario(params, seed)
        if path is not None:
            self.storage.save_scenario(scenario, path)
        return scenario

    @log_action(action_type="LOAD", verbose=True)
    def load(self, path: str, trace: Optional[str] = None) -> Scenario:
        """
        Загружает и проверяет сценарий.

        Если задана CSV-трасса, машины сценария заменяются машинами трассы.
        """
        scenario = self.storage.load_scenario(path)
        if trace is not None:
            scenario = scenario.with_vehicles(self.storage.load_trace(trace))
        return ensure_valid(scenario)


class SimulationService:
    """Сервис прогонов и свипов."""

    def __init__(self, storage: Optional[ScenarioStorage] = None):
        self.storage = storage or ScenarioStorage()
        self.settings = SettingsLoader()

    @log_action(action_type="RUN", verbose=True)
    def run(
        self,
        scenario: Scenario,
        algorithm: Policy,
        contention: bool = True,
        time_step_s: Optional[float] = None,
    ) -> tuple[SimResult, MetricsReport]:
        result = run_scenario(
            scenario, algorithm, contention=contention, time_step_s=time_step_s
        )
        return result, summarize([result])

    def _runner(self, workers: Optional[int], time_step_s: Optional[float]):
        config = SweepConfig(
            VOLUME_ENERGY_KWH=self.settings.volume_sweep_energy_kwh,
            WORKERS=self.settings.sweep_workers if workers is None else workers,
            TIME_STEP_S=time_step_s,
        )
        return SweepRunner(config)

    @log_action(action_type="SWEEP_VOLUME")
    def sweep_volume(
        self,
        scenario: Scenario,
        algorithms: Sequence[Policy],
        from_mb: Optional[float] = None,
        to_mb: Optional[float] = None,
        step_mb: Optional[float] = None,
        energy_kwh: Optional[float] = None,
        workers: Optional[int] = None,
        time_step_s: Optional[float] = None,
    ) -> list[list[str]]:
        runner = self._runner(workers, time_step_s)
        return runner.sweep_volume(
            scenario, algorithms, from_mb, to_mb, step_mb, energy_kwh
        )

    @log_action(action_type="SWEEP_TRAFFIC")
    def sweep_traffic(
        self,
        scenario: Scenario,
        algorithms: Sequence[Policy],
        from_n: Optional[int] = None,
        to_n: Optional[int] = None,
        step_n: Optional[int] = None,
        workers: Optional[int] = None,
        time_step_s: Optional[float] = None,
    ) -> list[list[str]]:
        runner = self._runner(workers, time_step_s)
        return runner.sweep_traffic(scenario, algorithms, from_n, to_n, step_n)

    # --- Запись отчётов ---
    def append_report(self, report: MetricsReport, path: str) -> None:
        self.storage.write_rows(path, REPORT_COLUMNS, [report.to_row()], append=True)

    def write_report_rows(self, rows: list[list[str]], path: str) -> None:
        self.storage.write_rows(path, REPORT_COLUMNS, rows)

    def write_detail(self, result: SimResult, path: str) -> None:
        self.storage.write_rows(path, VEHICLE_COLUMNS, result.vehicle_rows())
