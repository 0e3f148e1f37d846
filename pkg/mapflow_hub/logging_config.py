"""
Конфигурация системы логирования для Mapflow Hub.

Настраивает форматы логов, уровни, ротацию файлов и обработчики.
"""
import logging
import logging.handlers
from pathlib import Path

ACTIONS_LOGGER = "mapflow.actions"
_MAX_BYTES = 10 * 1024 * 1024


def _rotating_handler(log_file: str, formatter: logging.Formatter) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        filename=log_file,
        maxBytes=_MAX_BYTES,
        backupCount=5,
        encoding="utf-8",
    )
    handler.setFormatter(formatter)
    return handler


def setup_logging(log_file: str = "logs/actions.log", log_level: str = "INFO"):
    """
    Настраивает единую систему логирования для всего приложения.

    Корневой логгер пишет в файл с ротацией и в консоль (только WARNING и
    выше). Логгер аудита mapflow.actions пишет только в файл.
    """
    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    numeric_level = getattr(logging, log_level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    # Повторный вызов не должен дублировать обработчики
    if root_logger.hasHandlers():
        root_logger.handlers.clear()

    file_formatter = logging.Formatter(
        "%(asctime)s %(levelname)s %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    console_formatter = logging.Formatter("%(message)s")

    file_handler = _rotating_handler(log_file, file_formatter)
    file_handler.setLevel(numeric_level)
    root_logger.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING)
    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    # Ошибки аудита не выводятся в консоль: CLI сообщает о них сам
    actions_logger = logging.getLogger(ACTIONS_LOGGER)
    actions_logger.propagate = False
    actions_logger.setLevel(numeric_level)
    actions_logger.handlers.clear()
    actions_logger.addHandler(_rotating_handler(log_file, file_formatter))

    actions_logger.info("Logging initialized: file=%s level=%s", log_file, log_level)
