"""
Разбор и запись CSV-трассы машин.

Обязательный заголовок:
    vehicle_id,entry_time_s,speed_mps,branch,energy_kwh,demand_full_mb,demand_basic_mb
За ним могут идти необязательные колонки (в указанном порядке, любой префикс):
    route_length_km,drive_rate_kwh_per_km,rx_bandwidth_mb_s
"""
import csv
import io
from typing import Callable, Iterable, Optional

from .exceptions import TraceParseError
from .models import Branch, MapDemand, Vehicle

TRACE_COLUMNS = (
    "vehicle_id",
    "entry_time_s",
    "speed_mps",
    "branch",
    "energy_kwh",
    "demand_full_mb",
    "demand_basic_mb",
)
OPTIONAL_COLUMNS = ("route_length_km", "drive_rate_kwh_per_km", "rx_bandwidth_mb_s")
DEFAULT_ROUTE_LENGTH_KM = 2.0


def _check_header(header: list[str]) -> list[str]:
    columns = [c.strip() for c in header]
    base = list(TRACE_COLUMNS)
    extra = columns[len(base):]
    if columns[: len(base)] != base or extra != list(OPTIONAL_COLUMNS[: len(extra)]):
        expected = ",".join(TRACE_COLUMNS)
        raise TraceParseError(1, "header", f"expected '{expected}[,optional...]'")
    return columns


def _convert(
    raw: str, line: int, column: str, cast: Callable[[str], object]
) -> object:
    try:
        return cast(raw.strip())
    except ValueError:
        raise TraceParseError(line, column, f"cannot parse '{raw}'") from None


def _optional_float(row: dict, column: str, line: int) -> Optional[float]:
    raw = row.get(column)
    if raw is None or not raw.strip():
        return None
    return _convert(raw, line, column, float)


def parse_trace(
    csv_text: str, route_length_km: float = DEFAULT_ROUTE_LENGTH_KM
) -> list[Vehicle]:
    """
    Разбирает CSV-трассу в список машин в порядке строк файла.

    Args:
        csv_text: Содержимое файла
        route_length_km: Длина маршрута для строк без колонки route_length_km

    Raises:
        TraceParseError: Некорректный заголовок, строка или метка ветки
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise TraceParseError(1, "header", "file is empty") from None
    columns = _check_header(header)

    vehicles = []
    for cells in reader:
        line = reader.line_num
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(columns):
            raise TraceParseError(
                line, "row", f"expected {len(columns)} fields, got {len(cells)}"
            )
        row = dict(zip(columns, cells))
        branch = _convert(row["branch"], line, "branch", Branch.parse)
        route = _optional_float(row, "route_length_km", line)
        vehicles.append(
            Vehicle(
                id=_convert(row["vehicle_id"], line, "vehicle_id", int),
                entry_time_s=_convert(row["entry_time_s"], line, "entry_time_s", float),
                speed_mps=_convert(row["speed_mps"], line, "speed_mps", float),
                branch=branch,
                energy_remaining_kwh=_convert(
                    row["energy_kwh"], line, "energy_kwh", float
                ),
                route_length_km=route_length_km if route is None else route,
                demand=MapDemand(
                    full_mb=_convert(
                        row["demand_full_mb"], line, "demand_full_mb", float
                    ),
                    basic_mb=_convert(
                        row["demand_basic_mb"], line, "demand_basic_mb", float
                    ),
                ),
                drive_rate_kwh_per_km=_optional_float(
                    row, "drive_rate_kwh_per_km", line
                ),
                rx_bandwidth_mb_s=_optional_float(row, "rx_bandwidth_mb_s", line),
            )
        )
    return vehicles


def _cell(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def serialize_trace(vehicles: Iterable[Vehicle]) -> str:
    """Записывает машины в CSV-трассу с полным набором колонок."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS + OPTIONAL_COLUMNS)
    for v in vehicles:
        writer.writerow(
            [
                v.id,
                repr(v.entry_time_s),
                repr(v.speed_mps),
                v.branch.value,
                repr(v.energy_remaining_kwh),
                repr(v.demand.full_mb),
                repr(v.demand.basic_mb),
                repr(v.route_length_km),
                _cell(v.drive_rate_kwh_per_km),
                _cell(v.rx_bandwidth_mb_s),
            ]
        )
    return buffer.getvalue()
