"""
Конфигурация свипов: диапазоны объёма карты и плотности трафика.
"""
from dataclasses import dataclass, field

DEFAULT_ALGORITHMS = ("etdm", "oa", "pta:0.3", "pta:0.5", "pta:0.7")


@dataclass
class SweepConfig:
    """Параметры свипов по объёму данных и по числу машин."""

    # Объём карты, MB (140G → 300G с шагом 10G)
    VOLUME_FROM_MB: float = 140_000.0
    VOLUME_TO_MB: float = 300_000.0
    VOLUME_STEP_MB: float = 10_000.0
    # Бюджет энергии каждой машины в свипе по объёму
    VOLUME_ENERGY_KWH: float = 5.0

    # Число машин (10 → 250 с шагом 10)
    TRAFFIC_FROM: int = 10
    TRAFFIC_TO: int = 250
    TRAFFIC_STEP: int = 10

    ALGORITHMS: tuple[str, ...] = field(default_factory=lambda: DEFAULT_ALGORITHMS)

    # Процессы пула; при 1 выполнение последовательное
    WORKERS: int = 1
    # Шаг симуляции; None означает шаг из сценария
    TIME_STEP_S: float | None = None
