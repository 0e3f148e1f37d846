"""
Utility helpers for Mapflow Hub.

Вспомогательные функции для разбора объёмов данных, получения
производных зерён, форматирования чисел и пропорционального деления.
"""
import math
import re
from typing import Optional, Sequence

import numpy as np

MB_PER_GB = 1000.0
KM_PER_MILE = 1.609344
JOULES_PER_KWH = 3.6e6

_VOLUME_RE = re.compile(
    r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([GgMm]?)[Bb]?\s*$"
)


def parse_data_volume(text: str) -> float:
    """
    Переводит запись объёма в мегабайты.

    Суффикс G означает гигабайты (десятичные, 1G = 1000 MB), суффикс M
    или его отсутствие — мегабайты.

    Examples:
        >>> parse_data_volume("190G")
        190000.0
        >>> parse_data_volume("512")
        512.0
        >>> parse_data_volume("2.5GB")
        2500.0
    """
    match = _VOLUME_RE.match(str(text))
    if not match:
        raise ValueError(f"Неверный формат объёма данных: '{text}'")
    value = float(match.group(1))
    if match.group(2).upper() == "G":
        value *= MB_PER_GB
    return value


def derive_seed(seed: int, *keys: int) -> int:
    """
    Детерминированно выводит независимое 64-битное зерно из базового.

    Examples:
        >>> derive_seed(1, 7) == derive_seed(1, 7)
        True
        >>> derive_seed(1, 7) != derive_seed(1, 8)
        True
    """
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *keys])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def proportional_split(total: int, weights: Sequence[float]) -> list[int]:
    """
    Делит целое total пропорционально весам (метод наибольших остатков).

    Examples:
        >>> proportional_split(251, (95, 94, 62))
        [95, 94, 62]
        >>> proportional_split(50, (95, 94, 62))
        [19, 19, 12]
    """
    weight_sum = float(sum(weights))
    if total < 0 or weight_sum <= 0:
        raise ValueError("Сумма и веса должны быть положительными")
    quotas = [total * w / weight_sum for w in weights]
    shares = [math.floor(q) for q in quotas]
    remainder = total - sum(shares)
    # При равных остатках выигрывает более ранняя позиция
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - shares[i]), i))
    for index in order[:remainder]:
        shares[index] += 1
    return shares


def format_float(value: Optional[float], precision: int = 6) -> str:
    """
    Форматирует число для CSV; None превращается в пустую ячейку.

    Examples:
        >>> format_float(7.0)
        '7.000000'
        >>> format_float(None)
        ''
    """
    if value is None:
        return ""
    return f"{value:.{precision}f}"


def miles(km: float) -> float:
    """Переводит километры в мили."""
    return km / KM_PER_MILE
