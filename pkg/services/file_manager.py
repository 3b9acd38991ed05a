"""
File manager for report emission and output-directory housekeeping
"""
import json
import logging
import math
import shutil
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from core.codec import PowerTrace
from models.report import REPORT_TABLES, Report
from utils.config import config

logger = logging.getLogger(__name__)

FLOAT_DIGITS = 9


def _canonical(value: Any) -> Any:
    """Plain JSON types; floats rounded, non-finite floats as null"""
    if isinstance(value, dict):
        return {str(k): _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        rounded = round(value, FLOAT_DIGITS)
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, np.ndarray):
        return _canonical(value.tolist())
    if isinstance(value, bytes):
        return value.hex()
    return value


def canonical_json(data: Union[Report, Dict[str, Any]]) -> str:
    """Byte-stable JSON text: sorted keys, rounded floats, trailing newline"""
    if isinstance(data, Report):
        data = data.to_dict()
    return json.dumps(_canonical(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class FileManager:
    """Writes reports and CSV tables under the output directory"""

    def __init__(self, base_path: Optional[Union[str, Path]] = None):
        self.base_path = Path(base_path) if base_path is not None else config.get_output_dir()

    def default_report_path(self, scenario_name: str, seed: int, fmt: str) -> Path:
        suffix = ".json" if fmt == "json" else ""
        return self.base_path / f"{scenario_name}_seed{seed}{suffix}"

    def write_report(self, report: Report, output_path: Optional[Path] = None, fmt: str = "json") -> Path:
        """
        Emit a report

        Args:
            report: run report
            output_path: JSON file, or directory for CSV tables (default under base_path)
            fmt: ``json`` or ``csv``

        Returns:
            Path written

        Raises:
            OSError: the destination cannot be written
        """
        if fmt not in config.SUPPORTED_REPORT_FORMATS:
            raise ValueError(f"unsupported report format {fmt!r}")
        if output_path is None:
            output_path = self.default_report_path(report.scenario["name"], report.scenario["seed"], fmt)
        output_path = Path(output_path)

        if fmt == "json":
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(canonical_json(report), encoding="utf-8")
        else:
            self.write_csv_tables(report, output_path)
        logger.info(f"Saved report: {output_path}")
        return output_path

    def write_csv_tables(self, report: Report, directory: Path) -> List[Path]:
        """One CSV per report table plus a one-row summary"""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for name in REPORT_TABLES:
            rows = _canonical(report.table(name))
            path = directory / f"{name}.csv"
            pd.DataFrame(rows).to_csv(path, index=False)
            written.append(path)
        summary = dict(_canonical(report.summary))
        summary.update({f"scenario_{k}": v for k, v in _canonical(report.scenario).items()})
        path = directory / "summary.csv"
        pd.DataFrame([summary]).reindex(sorted(summary), axis=1).to_csv(path, index=False)
        written.append(path)
        return written

    @staticmethod
    def rows_frame(rows: Iterable[Dict[str, Any]], columns: Optional[List[str]] = None) -> pd.DataFrame:
        return pd.DataFrame(_canonical(list(rows)), columns=columns)

    def write_rows_csv(self, rows: Iterable[Dict[str, Any]], output_path: Path,
                       columns: Optional[List[str]] = None) -> Path:
        """Sweep / BER tables"""
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        df = self.rows_frame(rows, columns)
        df.to_csv(output_path, index=False)
        logger.info(f"Exported {len(df)} row(s) to CSV: {output_path}")
        return output_path

    def export_power_trace_csv(self, trace: PowerTrace, output_path: Path) -> Path:
        """Monitor trace as (time_s, level_dbm) rows"""
        df = pd.DataFrame({"time_s": trace.times(), "level_dbm": trace.levels})
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        df.round(FLOAT_DIGITS + 3).to_csv(output_path, index=False)
        return output_path

    def get_file_info(self, file_path: Path) -> Dict[str, Any]:
        """Get file information"""
        try:
            stat = file_path.stat()
            return {
                'file_name': file_path.name,
                'file_path': str(file_path),
                'file_size': stat.st_size,
                'modified_time': stat.st_mtime,
            }
        except OSError as e:
            logger.error(f"Error getting file info for {file_path}: {e}")
            return {}

    def cleanup_old_reports(self, days_to_keep: int = 30) -> int:
        """
        Delete reports (files or CSV directories) older than days_to_keep

        Returns:
            Number of entries deleted
        """
        if not self.base_path.exists():
            return 0
        deleted_count = 0
        cutoff = datetime.now().timestamp() - days_to_keep * 24 * 60 * 60
        try:
            for entry in self.base_path.iterdir():
                if entry.stat().st_mtime >= cutoff:
                    continue
                if entry.is_dir():
                    shutil.rmtree(entry)
                else:
                    entry.unlink()
                deleted_count += 1
                logger.info(f"Deleted old report: {entry}")
        except OSError as e:
            logger.error(f"Error during cleanup: {e}")
        return deleted_count

    def get_storage_stats(self) -> Dict[str, Any]:
        """Get output-directory statistics"""
        stats = {'json_reports': 0, 'csv_directories': 0, 'total_files': 0, 'total_size': 0}
        if not self.base_path.exists():
            return stats
        try:
            for entry in self.base_path.iterdir():
                if entry.is_dir():
                    stats['csv_directories'] += 1
                elif entry.suffix == '.json':
                    stats['json_reports'] += 1
            for file_path in self.base_path.rglob('*'):
                if file_path.is_file():
                    stats['total_files'] += 1
                    stats['total_size'] += file_path.stat().st_size
        except OSError as e:
            logger.error(f"Error getting storage stats: {e}")
        return stats
