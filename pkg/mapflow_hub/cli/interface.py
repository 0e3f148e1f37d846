"""
Консольный интерфейс Mapflow Hub.
Единственная точка входа для пользовательских команд.

Команды: generate, run, sweep-volume, sweep-traffic, feasibility.
"""
import argparse
import csv
import sys
from dataclasses import replace
from typing import Optional, Sequence

from prettytable import PrettyTable

from ..core.exceptions import BaseMapflowError, ScenarioValidationError
from ..core.feasibility import V2vQuery, v2v_report
from ..core.generator import GeneratorParams
from ..core.metrics import REPORT_COLUMNS, MetricsReport
from ..core.usecases import ScenarioService, SimulationService, parse_algorithm
from ..core.utils import parse_data_volume
from ..infra.settings import SettingsLoader
from ..logging_config import setup_logging
from ..sweep_service.config import SweepConfig


def _error(message: str) -> int:
    print(f" Ошибка: {message}", file=sys.stderr)
    return 1


def _algorithm(text: str):
    return parse_algorithm(text)


_algorithm.__name__ = "algorithm"


def _algorithm_list(text: str):
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("empty algorithm list")
    return [parse_algorithm(item) for item in items]


_algorithm_list.__name__ = "algorithm list"


def _volume(text: str) -> float:
    return parse_data_volume(text)


_volume.__name__ = "data volume"


def _write_csv_stdout(rows: list[list[str]]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    writer.writerows(rows)


def _summary_table(report: MetricsReport) -> PrettyTable:
    table = PrettyTable()
    table.field_names = ["Метрика", "Значение"]
    table.align["Метрика"] = "l"
    table.align["Значение"] = "r"
    for name, value in zip(REPORT_COLUMNS, report.to_row()):
        table.add_row([name, value or "—"])
    return table


# --- Обработчики команд ---

def handle_generate(args) -> int:
    """Обработчик команды generate."""
    params = GeneratorParams()
    overrides = {
        "vehicle_count": args.vehicles,
        "rsu_count": args.rsus,
        "demand_full_mb": args.demand,
        "meeting_probability": args.meeting_probability,
        "time_step_s": args.step_s,
    }
    if args.renormalize:
        overrides["renormalize_contention"] = True
    if args.energy is not None:
        overrides["energy_range_kwh"] = (args.energy, args.energy)
    if args.speed_min is not None or args.speed_max is not None:
        low, high = params.speed_range_mps
        overrides["speed_range_mps"] = (
            low if args.speed_min is None else args.speed_min,
            high if args.speed_max is None else args.speed_max,
        )
    params = replace(params, **{k: v for k, v in overrides.items() if v is not None})
    try:
        scenario = ScenarioService().generate(params, seed=args.seed, path=args.out)
    except BaseMapflowError as e:
        return _error(str(e))
    print(
        f" Сценарий сохранён: {args.out} "
        f"(RSU: {len(scenario.rsus)}, машин: {len(scenario.vehicles)}, "
        f"seed={args.seed})"
    )
    return 0


def handle_run(args) -> int:
    """Обработчик команды run."""
    simulation = SimulationService()
    try:
        scenario = ScenarioService().load(path=args.scenario, trace=args.trace)
        result, report = simulation.run(
            scenario,
            algorithm=args.algorithm,
            contention=not args.no_contention,
            time_step_s=args.step_s,
        )
        if args.out:
            simulation.append_report(report, args.out)
        if args.detail:
            simulation.write_detail(result, args.detail)
        if args.json:
            simulation.storage.write_text(args.json, result.to_json() + "\n")
    except ScenarioValidationError as e:
        for violation in e.violations:
            print(f"   - {violation}", file=sys.stderr)
        return _error("сценарий не прошёл проверку")
    except BaseMapflowError as e:
        return _error(str(e))

    print(f" Прогон {args.algorithm.label} для сценария {args.scenario}:")
    print(_summary_table(report))
    anomalies = sum(bool(rec.anomalies) for rec in result.records)
    if anomalies:
        print(f"   Машин с аномалиями: {anomalies} (подробности в --detail)")
    return 0


def _emit_rows(simulation: SimulationService, rows, out: Optional[str]) -> None:
    if out:
        simulation.write_report_rows(rows, out)
        print(f" Записано строк: {len(rows)} → {out}")
    else:
        _write_csv_stdout(rows)


def handle_sweep_volume(args) -> int:
    """Обработчик команды sweep-volume."""
    simulation = SimulationService()
    try:
        scenario = ScenarioService().load(path=args.scenario)
        rows = simulation.sweep_volume(
            scenario,
            algorithms=args.algorithms,
            from_mb=args.from_mb,
            to_mb=args.to_mb,
            step_mb=args.step_mb,
            energy_kwh=args.energy,
            workers=args.workers,
            time_step_s=args.step_s,
        )
        _emit_rows(simulation, rows, args.out)
    except BaseMapflowError as e:
        return _error(str(e))
    return 0


def handle_sweep_traffic(args) -> int:
    """Обработчик команды sweep-traffic."""
    simulation = SimulationService()
    try:
        scenario = ScenarioService().load(path=args.scenario)
        rows = simulation.sweep_traffic(
            scenario,
            algorithms=args.algorithms,
            from_n=args.from_n,
            to_n=args.to_n,
            step_n=args.step_n,
            workers=args.workers,
            time_step_s=args.step_s,
        )
        _emit_rows(simulation, rows, args.out)
    except BaseMapflowError as e:
        return _error(str(e))
    return 0


def handle_feasibility(args) -> int:
    """Обработчик команды feasibility: печатает key=value."""
    try:
        query = V2vQuery(
            range_m=args.range,
            lateral_offset_m=args.offset,
            speed1_mps=args.v1,
            speed2_mps=args.v2,
            rate_mb_s=args.rate,
            total_data_mb=args.data,
            reverse_lane_count=args.reverse_count,
            observation_time_s=args.time,
        )
        report = v2v_report(query, bandwidth=args.bandwidth)
    except BaseMapflowError as e:
        return _error(str(e))
    for key, value in report.items():
        text = repr(value) if isinstance(value, float) else str(value)
        print(f"{key}={text}")
    return 0


# --- Разбор аргументов ---

def build_parser() -> argparse.ArgumentParser:
    settings = SettingsLoader()
    parser = argparse.ArgumentParser(
        prog="project",
        description="Симулятор раздачи HD-карт через придорожные узлы (RSU)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="сгенерировать сценарий")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="путь к JSON-сценарию")
    gen.add_argument("--vehicles", type=int)
    gen.add_argument("--rsus", type=int)
    gen.add_argument("--demand", type=_volume, help="полная потребность, например 100G")
    gen.add_argument("--energy", type=float, help="бюджет энергии машин, кВт·ч")
    gen.add_argument("--speed-min", type=float)
    gen.add_argument("--speed-max", type=float)
    gen.add_argument("--meeting-probability", type=float)
    gen.add_argument("--step-s", type=float)
    gen.add_argument(
        "--renormalize",
        action="store_true",
        help="нормировать усечённую сумму Пуассона в ожидаемой скорости",
    )
    gen.set_defaults(handler=handle_generate)

    run = sub.add_parser("run", help="прогнать сценарий одним алгоритмом")
    run.add_argument("scenario")
    run.add_argument("algorithm", type=_algorithm, help="etdm, oa или pta:<q>")
    run.add_argument("--out", help="CSV-отчёт (строка дописывается)")
    run.add_argument("--detail", help="CSV со строкой на каждую машину")
    run.add_argument("--json", help="полный результат в JSON")
    run.add_argument("--trace", help="CSV-трасса машин вместо машин сценария")
    run.add_argument("--step-s", type=float)
    run.add_argument(
        "--no-contention", action="store_true", help="k = 1 для всех каналов"
    )
    run.set_defaults(handler=handle_run)

    sweep = SweepConfig()
    algorithms_default = ",".join(sweep.ALGORITHMS)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario")
    common.add_argument(
        "--algorithms", type=_algorithm_list, default=algorithms_default
    )
    common.add_argument("--workers", type=int, default=settings.sweep_workers)
    common.add_argument("--out", help="CSV-отчёт (иначе стандартный вывод)")
    common.add_argument("--step-s", type=float)

    vol = sub.add_parser("sweep-volume", parents=[common], help="свип по объёму карты")
    vol.add_argument(
        "--from", dest="from_mb", type=_volume, default=sweep.VOLUME_FROM_MB
    )
    vol.add_argument("--to", dest="to_mb", type=_volume, default=sweep.VOLUME_TO_MB)
    vol.add_argument(
        "--step", dest="step_mb", type=_volume, default=sweep.VOLUME_STEP_MB
    )
    vol.add_argument(
        "--energy", type=float, default=settings.volume_sweep_energy_kwh
    )
    vol.set_defaults(handler=handle_sweep_volume)

    traffic = sub.add_parser(
        "sweep-traffic", parents=[common], help="свип по числу машин"
    )
    traffic.add_argument("--from", dest="from_n", type=int, default=sweep.TRAFFIC_FROM)
    traffic.add_argument("--to", dest="to_n", type=int, default=sweep.TRAFFIC_TO)
    traffic.add_argument("--step", dest="step_n", type=int, default=sweep.TRAFFIC_STEP)
    traffic.set_defaults(handler=handle_sweep_traffic)

    feas = sub.add_parser("feasibility", help="оценки для V2V-передачи")
    feas.add_argument("--range", type=float, required=True, help="дальность r, м")
    feas.add_argument("--offset", type=float, required=True, help="смещение d, м")
    feas.add_argument("--v1", type=float, required=True)
    feas.add_argument("--v2", type=float, required=True)
    feas.add_argument("--rate", type=float, default=0.0, help="скорость R, MB/s")
    feas.add_argument("--data", type=_volume, default="1", help="объём карты G")
    feas.add_argument("--reverse-count", type=int, default=0)
    feas.add_argument("--time", type=float, default=0.0, help="время наблюдения t, с")
    feas.add_argument("--bandwidth", type=float, help="B для C_max = T·B")
    feas.set_defaults(handler=handle_feasibility)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Главная функция: разбирает аргументы и вызывает обработчик."""
    settings = SettingsLoader()
    setup_logging(log_file=settings.log_file, log_level=settings.log_level)
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
