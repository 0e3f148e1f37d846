from pathlib import Path

import pytest
from conftest import make_vehicle

from mapflow_hub.core.exceptions import TraceParseError
from mapflow_hub.core.models import Branch
from mapflow_hub.core.trace import TRACE_COLUMNS, parse_trace, serialize_trace

HEADER = ",".join(TRACE_COLUMNS)


def test_single_row():
    text = f"{HEADER}\n7,12.5,16.7,A,5.0,190000,60000\n"
    [vehicle] = parse_trace(text)
    assert vehicle.id == 7
    assert vehicle.entry_time_s == 12.5
    assert vehicle.speed_mps == 16.7
    assert vehicle.branch is Branch.A
    assert vehicle.energy_remaining_kwh == 5.0
    assert vehicle.demand.full_mb == 190000.0
    assert vehicle.demand.basic_mb == 60000.0
    assert vehicle.route_length_km == 2.0
    assert vehicle.drive_rate_kwh_per_km is None


def test_header_only_is_empty():
    assert parse_trace(HEADER + "\n") == []


def test_blank_lines_are_skipped():
    text = f"{HEADER}\n\n1,0,10,B,5,100,10\n\n"
    assert [v.id for v in parse_trace(text)] == [1]


def test_unknown_branch_reports_line_and_column():
    text = f"{HEADER}\n1,0,10,A,5,100,10\n2,0,10,D,5,100,10\n"
    with pytest.raises(TraceParseError) as info:
        parse_trace(text)
    assert info.value.line == 3
    assert info.value.column == "branch"


def test_bad_number():
    text = f"{HEADER}\n1,zero,10,A,5,100,10\n"
    with pytest.raises(TraceParseError) as info:
        parse_trace(text)
    assert info.value.column == "entry_time_s"


def test_wrong_field_count():
    with pytest.raises(TraceParseError):
        parse_trace(f"{HEADER}\n1,0,10,A,5,100\n")


def test_wrong_header():
    with pytest.raises(TraceParseError) as info:
        parse_trace("id,time\n1,2\n")
    assert info.value.line == 1


def test_empty_file():
    with pytest.raises(TraceParseError):
        parse_trace("")


def test_optional_columns_prefix():
    text = f"{HEADER},route_length_km,drive_rate_kwh_per_km\n4,1,20,C,5,100,10,3.5,\n"
    [vehicle] = parse_trace(text)
    assert vehicle.route_length_km == 3.5
    assert vehicle.drive_rate_kwh_per_km is None


def test_route_length_keyword():
    [vehicle] = parse_trace(f"{HEADER}\n1,0,10,A,5,100,10\n", route_length_km=7.0)
    assert vehicle.route_length_km == 7.0


def test_serialized_trace_parses_back():
    vehicles = [
        make_vehicle(0, entry_time_s=0.1, drive_rate_kwh_per_km=0.17),
        make_vehicle(1, branch=Branch.C, rx_bandwidth_mb_s=25.0),
    ]
    assert parse_trace(serialize_trace(vehicles)) == vehicles


def test_bundled_sample_trace():
    path = Path(__file__).resolve().parents[1] / "data" / "sample_trace.csv"
    vehicles = parse_trace(path.read_text(encoding="utf-8"))
    assert [v.id for v in vehicles] == [0, 1, 2, 3]
    assert {v.branch for v in vehicles} == {Branch.A, Branch.B, Branch.C}
    assert all(v.demand.basic_mb < v.demand.full_mb for v in vehicles)
