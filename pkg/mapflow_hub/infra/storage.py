"""
Чтение и запись файлов: JSON-сценарии, CSV-трассы и CSV-отчёты.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Sequence

from ..core.exceptions import StorageError
from ..core.models import Scenario, Vehicle
from ..core.trace import parse_trace, serialize_trace
from .settings import SettingsLoader

logger = logging.getLogger(__name__)


class ScenarioStorage:
    """
    Доступ к файлам сценариев и отчётов.

    Голые имена файлов разрешаются от DATA_DIR, остальные пути используются
    как есть. Любая ошибка ввода-вывода превращается в StorageError.
    """

    def __init__(self, data_dir: str | Path | None = None):
        if data_dir is None:
            data_dir = SettingsLoader().data_dir
        self.data_dir = Path(data_dir)

    def resolve(self, path: str | Path) -> Path:
        """Голое имя файла кладётся в DATA_DIR, путь с директорией не меняется."""
        path = Path(path)
        if path.is_absolute() or path.parent != Path("."):
            return path
        return self.data_dir / path

    def _read_text(self, path: Path) -> str:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return f.read()
        except OSError as e:
            raise StorageError(f"Ошибка чтения файла {path}: {e}") from e

    def write_text(self, path: str | Path, text: str, mode: str = "w") -> None:
        path = self.resolve(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, mode, encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            raise StorageError(f"Ошибка записи в файл {path}: {e}") from e

    # --- Сценарии ---
    def load_scenario(self, path: str | Path) -> Scenario:
        """Загружает сценарий из JSON без проверки инвариантов."""
        full_path = self.resolve(path)
        text = self._read_text(full_path)
        try:
            return Scenario.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise StorageError(f"Файл {full_path} не является JSON: {e}") from e
        except (KeyError, TypeError, ValueError) as e:
            raise StorageError(f"Некорректный сценарий в {full_path}: {e!r}") from e

    def save_scenario(self, scenario: Scenario, path: str | Path) -> Path:
        full_path = self.resolve(path)
        text = json.dumps(scenario.to_dict(), indent=2, ensure_ascii=False)
        self.write_text(full_path, text + "\n")
        logger.debug("Saved %r to %s", scenario, full_path)
        return full_path

    # --- Трассы ---
    def load_trace(self, path: str | Path, **kwargs) -> list[Vehicle]:
        """Читает CSV-трассу; ошибки разбора (TraceParseError) пробрасываются."""
        return parse_trace(self._read_text(self.resolve(path)), **kwargs)

    def save_trace(self, vehicles: Iterable[Vehicle], path: str | Path) -> Path:
        full_path = self.resolve(path)
        self.write_text(full_path, serialize_trace(vehicles))
        return full_path

    # --- Отчёты ---
    def write_rows(
        self,
        path: str | Path,
        header: Sequence[str],
        rows: Iterable[Sequence[str]],
        append: bool = False,
    ) -> Path:
        """
        Пишет CSV. В режиме append заголовок пишется, только если файла
        ещё нет или он пуст.
        """
        full_path = self.resolve(path)
        new_file = not full_path.exists() or full_path.stat().st_size == 0
        try:
            full_path.parent.mkdir(parents=True, exist_ok=True)
            with open(
                full_path, "a" if append else "w", encoding="utf-8", newline=""
            ) as f:
                writer = csv.writer(f, lineterminator="\n")
                if not append or new_file:
                    writer.writerow(header)
                writer.writerows(rows)
        except OSError as e:
            raise StorageError(f"Ошибка записи в файл {full_path}: {e}") from e
        return full_path
