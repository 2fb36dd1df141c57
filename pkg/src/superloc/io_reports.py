"""I/O des rapports : JSON d'entrée (représentations, racines), JSON de sortie et export tableur."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import pandas as pd

from superloc.config import SuperlocError

SUPPORTED_EXPORT_EXTENSIONS = (".csv", ".xlsx", ".ods")


class ReportFileError(SuperlocError):
    """Erreur de lecture ou d'écriture d'un fichier (absent, JSON invalide, format non supporté)."""


def _get_engine(path: Path) -> str | None:
    suffix = path.suffix.lower()
    if suffix == ".xlsx":
        return "openpyxl"
    if suffix in (".ods", ".odt"):
        return "odf"
    return None


def load_json(filepath: str | Path) -> dict[str, Any]:
    path = Path(filepath)
    if not path.exists():
        raise ReportFileError(f"Fichier introuvable: {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ReportFileError(f"JSON invalide dans {path}: {e}") from e
    except OSError as e:
        raise ReportFileError(f"Impossible de lire le fichier {path}: {e}") from e
    if not isinstance(data, dict):
        raise ReportFileError(f"{path}: objet JSON attendu")
    return data


def dump_json(payload: Mapping[str, Any]) -> str:
    """Sérialisation stable : clés triées, même sortie pour la même graine."""
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2)


def report_frame(rows: Sequence[Mapping[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(list(rows))


def render_table(rows: Sequence[Mapping[str, Any]]) -> str:
    if not rows:
        return "(aucune ligne)"
    return report_frame(rows).to_string(index=False)


def save_spreadsheet(
    filepath: str | Path,
    dataframes: dict[str, pd.DataFrame],
    *,
    index: bool = False,
) -> None:
    path = Path(filepath)
    engine = _get_engine(path)
    if engine is None:
        raise ReportFileError(f"Format de sortie non supporté: {path.suffix.lower()}")
    try:
        with pd.ExcelWriter(path, engine=engine) as writer:
            for sheet_name, df in dataframes.items():
                df.to_excel(writer, sheet_name=str(sheet_name)[:31], index=index)
    except ImportError as e:
        module = "odfpy" if engine == "odf" else "openpyxl"
        raise ReportFileError(f"Export {path.suffix} requis: pip install {module}") from e
    except OSError as e:
        raise ReportFileError(f"Impossible d'écrire {path}: {e}") from e


def save_output(
    filepath: str | Path,
    dataframes: dict[str, pd.DataFrame],
    *,
    index: bool = False,
    csv_separator: str = ";",
) -> None:
    """CSV (première table) ou classeur .xlsx / .ods (une feuille par table)."""
    path = Path(filepath)
    if not dataframes:
        raise ReportFileError("Aucune donnee a exporter.")
    if path.suffix.lower() == ".csv":
        df = next(iter(dataframes.values()))
        try:
            df.to_csv(path, index=index, sep=csv_separator)
        except OSError as e:
            raise ReportFileError(f"Impossible d'écrire {path}: {e}") from e
        return
    save_spreadsheet(path, dataframes, index=index)
