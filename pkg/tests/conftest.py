import logging
import logging.handlers

import pytest

from mapflow_hub.core.models import (
    Branch,
    ChannelParams,
    EnergyParams,
    MapDemand,
    Rsu,
    Scenario,
    Vehicle,
)
from mapflow_hub.infra.settings import SettingsLoader

# Канал с d₀ = 10 м и малым шумом: скорости порядка десятков MB/s
TEST_CHANNEL = ChannelParams(
    noise_psd=0.01, reference_distance_m=10.0, renormalize_contention=True
)
TEST_ENERGY = EnergyParams(drive_rate_kwh_per_km=0.2, rx_power_w=10.0)


def make_rsu(
    rsu_id=0,
    position_m=200.0,
    lane_offset_m=60.0,
    coverage_radius_m=100.0,
    bandwidth=10.0,
    tx_power_max_w=10.0,
    branch=Branch.A,
):
    return Rsu(
        id=rsu_id,
        position_m=position_m,
        lane_offset_m=lane_offset_m,
        coverage_radius_m=coverage_radius_m,
        bandwidth=bandwidth,
        tx_power_max_w=tx_power_max_w,
        branch=branch,
    )


def make_vehicle(
    vehicle_id=0,
    entry_time_s=0.0,
    speed_mps=20.0,
    branch=Branch.A,
    energy_kwh=1000.0,
    route_length_km=2.0,
    full_mb=100.0,
    basic_mb=10.0,
    **extra,
):
    return Vehicle(
        id=vehicle_id,
        entry_time_s=entry_time_s,
        speed_mps=speed_mps,
        branch=branch,
        energy_remaining_kwh=energy_kwh,
        route_length_km=route_length_km,
        demand=MapDemand(full_mb=full_mb, basic_mb=basic_mb),
        **extra,
    )


def make_scenario(rsus, vehicles, **kwargs):
    kwargs.setdefault("channel", TEST_CHANNEL)
    kwargs.setdefault("energy", TEST_ENERGY)
    kwargs.setdefault("meeting_probability", 0.005)
    kwargs.setdefault("seed", 3)
    return Scenario(rsus=tuple(rsus), vehicles=tuple(vehicles), **kwargs)


@pytest.fixture
def small_scenario():
    """Одна ветка с тремя RSU и двумя машинами, разнесёнными во времени."""
    rsus = [
        make_rsu(0, position_m=200.0, lane_offset_m=60.0),
        make_rsu(1, position_m=500.0, lane_offset_m=30.0, bandwidth=15.0),
        make_rsu(2, position_m=800.0, lane_offset_m=45.0),
    ]
    vehicles = [
        make_vehicle(0, entry_time_s=0.0),
        make_vehicle(1, entry_time_s=200.0, speed_mps=15.0),
    ]
    return make_scenario(rsus, vehicles)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Настройки, данные и логи каждого теста живут во временной директории."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("MAPFLOW_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setenv("MAPFLOW_LOG_FILE", str(tmp_path / "logs" / "actions.log"))
    SettingsLoader.reset()
    yield
    SettingsLoader.reset()
    for name in ("", "mapflow.actions"):
        logger = logging.getLogger(name or None)
        for handler in list(logger.handlers):
            ours = isinstance(handler, logging.handlers.RotatingFileHandler)
            if ours or type(handler) is logging.StreamHandler:
                logger.removeHandler(handler)
                handler.close()
