"""
Пользовательские исключения для симулятора раздачи HD-карт.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .models import AllocationPlan


class BaseMapflowError(Exception):
    """Базовое исключение для всех ошибок приложения."""
    pass


class InvalidParametersError(BaseMapflowError, ValueError):
    """Выбрасывается, если параметры генератора или запроса противоречат инвариантам."""
    pass


class ScenarioValidationError(BaseMapflowError):
    """Сценарий не прошёл проверку; содержит полный список нарушений."""
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        preview = "; ".join(self.violations[:3])
        more = len(self.violations) - 3
        if more > 0:
            preview += f"; ... (+{more})"
        super().__init__(f"Сценарий некорректен: {preview}")


class TraceParseError(BaseMapflowError):
    """Ошибка разбора CSV-трассы с указанием строки и колонки."""
    def __init__(self, line: int, column: str, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column '{column}': {message}")


# --- Геометрия контакта ---

class UndefinedContactError(BaseMapflowError):
    """Встречное движение с нулевой суммарной скоростью: контакт не определён."""
    def __init__(self):
        super().__init__("contact time undefined: v1 + v2 = 0")


class InfiniteContactError(BaseMapflowError):
    """Попутное движение с равными скоростями: контакт бесконечен."""
    def __init__(self, speed: float):
        self.speed = speed
        super().__init__(f"infinite contact: both vehicles run at {speed} m/s")


class InfeasibleError(BaseMapflowError):
    """Передача невозможна (например, нулевая вероятность встречи)."""
    pass


class SingularGeometryError(BaseMapflowError):
    """Нулевое расстояние до RSU: затухание d^-σ расходится."""
    def __init__(self, distance_m: float):
        self.distance_m = distance_m
        super().__init__(f"singular geometry: distance {distance_m} m")


class StalledLinkError(BaseMapflowError):
    """Канал с нулевой скоростью: время приёма бесконечно."""
    def __init__(self, data_mb: float):
        self.data_mb = data_mb
        super().__init__(f"stalled link: cannot receive {data_mb} MB at 0 MB/s")


# --- Планировщик ---

class InsufficientCapacityError(BaseMapflowError):
    """
    Суммарная ёмкость окон контакта меньше требуемого объёма.

    Содержит план для максимально доставляемого объёма, чтобы движок мог
    учесть частичную доставку.
    """
    def __init__(
        self,
        max_deliverable_mb: float,
        demand_mb: float,
        plan: AllocationPlan | None = None,
    ):
        self.max_deliverable_mb = max_deliverable_mb
        self.demand_mb = demand_mb
        self.plan = plan
        super().__init__(
            f"Недостаточно ёмкости: доступно {max_deliverable_mb:.4f} MB, "
            f"требуется {demand_mb:.4f} MB"
        )


class UnknownAlgorithmError(BaseMapflowError, ValueError):
    """Строка алгоритма не распознана (ожидается etdm, oa или pta:<q>)."""
    def __init__(self, text: str, reason: str = "expected etdm, oa or pta:<q>"):
        self.text = text
        super().__init__(f"Неизвестный алгоритм '{text}': {reason}")


# --- Инфраструктура ---

class StorageError(BaseMapflowError):
    """Ошибка чтения или записи файлов сценариев и отчётов."""
    pass
