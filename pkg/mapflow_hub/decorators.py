"""
Декораторы для логирования и аудита операций.

Содержит декоратор @log_action для трассировки ключевых операций
сервиса: генерации сценария, прогона, свипов и загрузки файлов.
"""
import functools
import logging
import time
from typing import Any, Callable

logger = logging.getLogger("mapflow.actions")

# Аргументы, которые попадают в строку аудита, если переданы по имени
_AUDITED_KWARGS = ("seed", "algorithm", "algorithms", "path", "demand_mb", "workers")


def _describe(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def _summary(result: Any) -> str:
    """Краткое описание результата для подробного режима."""
    if isinstance(result, (list, tuple)):
        return f"items={len(result)}"
    if hasattr(result, "records"):
        done = sum(r.completed for r in result.records)
        return f"completed={done}/{len(result.records)}"
    if hasattr(result, "vehicles"):
        return f"vehicles={len(result.vehicles)} rsus={len(result.rsus)}"
    return type(result).__name__


def log_action(action_type: str, verbose: bool = False) -> Callable:
    """
    Декоратор для логирования операций сервиса.

    Пишет одну строку в логгер mapflow.actions: тип операции, ключевые
    аргументы, время выполнения и result=OK либо result=ERROR с типом и
    текстом исключения. Исключение пробрасывается дальше.
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            details = [
                f"{name}={_describe(kwargs[name])}"
                for name in _AUDITED_KWARGS
                if kwargs.get(name) is not None
            ]
            started = time.perf_counter()

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                elapsed_ms = (time.perf_counter() - started) * 1000
                log_parts = [
                    action_type,
                    *details,
                    f"elapsed_ms={elapsed_ms:.1f}",
                    "result=ERROR",
                    f"error_type={type(e).__name__}",
                    f"error_message='{e}'",
                ]
                logger.error(" ".join(log_parts))
                raise

            elapsed_ms = (time.perf_counter() - started) * 1000
            log_msg = " ".join(
                [action_type, *details, f"elapsed_ms={elapsed_ms:.1f}", "result=OK"]
            )
            if verbose:
                log_msg += f" | {_summary(result)}"
            logger.info(log_msg)
            return result

        return wrapper
    return decorator
