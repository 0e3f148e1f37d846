"""
Singleton для загрузки и доступа к настройкам проекта.

Источники в порядке возрастания приоритета: значения по умолчанию,
config.json в рабочей директории, переменные окружения MAPFLOW_*
(в том числе из файла .env).
"""
import json
import logging
import os
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

ENV_PREFIX = "MAPFLOW_"

DEFAULT_CONFIG = {
    "DATA_DIR": "data",
    "LOG_FILE": "logs/actions.log",
    "LOG_LEVEL": "INFO",
    "TIME_STEP_S": 0.1,
    "SWEEP_WORKERS": 1,
    "VOLUME_SWEEP_ENERGY_KWH": 5.0,
    "PTA_DEFAULT_Q": 0.7,
}


class SingletonMeta(type):
    """
    Метакласс для реализации паттерна Singleton.

    Потокобезопасность не нужна: настройки читаются в главном процессе CLI,
    а процессы пула получают значения аргументами.
    """
    _instances = {}

    def __call__(cls, *args, **kwargs):
        if cls not in cls._instances:
            instance = super().__call__(*args, **kwargs)
            cls._instances[cls] = instance
        return cls._instances[cls]

    def reset(cls):
        """Сбрасывает экземпляр (используется в тестах)."""
        cls._instances.pop(cls, None)


class SettingsLoader(metaclass=SingletonMeta):
    """
    Singleton для управления конфигурацией приложения.

    Ключи конфигурации:
    - DATA_DIR: директория сценариев и отчётов
    - LOG_FILE, LOG_LEVEL: файл и уровень логирования
    - TIME_STEP_S: шаг симуляции по умолчанию
    - SWEEP_WORKERS: число процессов для свипов
    - VOLUME_SWEEP_ENERGY_KWH: бюджет энергии машин в свипе по объёму
    - PTA_DEFAULT_Q: вероятность для PTA, если она не указана
    """

    def __init__(self, config_path: str = "config.json", env_file: str = ".env"):
        self._config_path = config_path
        self._env_file = env_file
        self._config: dict[str, Any] = {}
        self.reload()

    def reload(self):
        """
        Перезагружает конфигурацию.

        Нечитаемый config.json молча заменяется значениями по умолчанию;
        некорректные числовые значения окружения пропускаются с предупреждением.
        """
        config = dict(DEFAULT_CONFIG)
        try:
            config_file = Path(self._config_path)
            if config_file.exists():
                with open(config_file, "r", encoding="utf-8") as f:
                    file_config = json.load(f)
                if isinstance(file_config, dict):
                    config.update(file_config)
        except (OSError, json.JSONDecodeError):
            config = dict(DEFAULT_CONFIG)

        load_dotenv(self._env_file, override=False)
        for key, default in DEFAULT_CONFIG.items():
            raw = os.getenv(ENV_PREFIX + key)
            if raw is None:
                continue
            if isinstance(default, str):
                config[key] = raw
                continue
            try:
                config[key] = type(default)(raw)
            except ValueError:
                logger.warning("Ignoring %s%s=%r: not a number", ENV_PREFIX, key, raw)
        self._config = config

    def get(self, key: str, default: Any = None) -> Any:
        return self._config.get(key, default)

    @property
    def data_dir(self) -> str:
        return self.get("DATA_DIR")

    @property
    def log_file(self) -> str:
        return self.get("LOG_FILE")

    @property
    def log_level(self) -> str:
        return self.get("LOG_LEVEL")

    @property
    def time_step_s(self) -> float:
        return float(self.get("TIME_STEP_S"))

    @property
    def sweep_workers(self) -> int:
        return int(self.get("SWEEP_WORKERS"))

    @property
    def volume_sweep_energy_kwh(self) -> float:
        return float(self.get("VOLUME_SWEEP_ENERGY_KWH"))

    @property
    def pta_default_q(self) -> float:
        return float(self.get("PTA_DEFAULT_Q"))
