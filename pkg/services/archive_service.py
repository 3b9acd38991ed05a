"""
Run archive: stores report summaries in the SQL database and lists them back
"""
import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from sqlalchemy.exc import SQLAlchemyError

from core.exceptions import SwiptSecurityError
from models.report import Report
from models.run_record import AuthRecord, RunRecord, RunStatus
from services.file_manager import canonical_json
from utils.database import DatabaseManager, db_manager

logger = logging.getLogger(__name__)


class ArchiveError(SwiptSecurityError):
    """Archive database unavailable or write failed"""


class ArchiveService:
    def __init__(self, database: Optional[DatabaseManager] = None):
        self.db = database or db_manager

    def archive_run(self, report: Report, report_path: Optional[Path] = None) -> int:
        """
        Store one run and its identification windows

        Returns:
            Archive id of the new run

        Raises:
            ArchiveError: database failure
        """
        digest = hashlib.sha256(canonical_json(report).encode("utf-8")).hexdigest()
        summary = report.summary
        try:
            self.db.create_tables()
            with self.db.get_session() as session:
                record = RunRecord(
                    scenario_name=report.scenario["name"],
                    seed=report.scenario["seed"],
                    report_digest=digest,
                    report_path=str(report_path) if report_path else None,
                    status=RunStatus.COMPLETED,
                    security_layer=int(bool(report.scenario["security_layer"])),
                    auth_windows=summary["auth_windows"],
                    auth_accepted=summary["auth_accepted"],
                    frames_received=summary["frames_received"],
                    adversarial_accepted=summary["adversarial_accepted"],
                    collisions=summary["collisions"],
                    mean_dynamic_range_db=summary["mean_dynamic_range_db"],
                )
                for event in report.auth_events:
                    record.auth_records.append(AuthRecord(
                        time_s=event["time_s"],
                        node_id=event["node"],
                        source=event["source"],
                        strategy=event["strategy"],
                        carrier_hz=event["carrier_hz"],
                        verdict=event["verdict"],
                        score=event["score"],
                        dynamic_range_db=event["dynamic_range_db"],
                    ))
                session.add(record)
                session.flush()
                run_id = record.id
        except SQLAlchemyError as e:
            raise ArchiveError(f"archive write failed: {e}") from e
        logger.info(f"✓ Archived run {run_id} ({report.scenario['name']}, seed {report.scenario['seed']})")
        return run_id

    def list_runs(self, limit: int = 20, scenario_name: Optional[str] = None) -> List[Dict[str, Any]]:
        """Most recent runs first"""
        try:
            self.db.create_tables()
            with self.db.get_session() as session:
                query = session.query(RunRecord)
                if scenario_name:
                    query = query.filter(RunRecord.scenario_name == scenario_name)
                runs = query.order_by(RunRecord.id.desc()).limit(limit).all()
                # convert to dict to avoid detached-instance access
                return [{
                    'id': r.id,
                    'scenario': r.scenario_name,
                    'seed': r.seed,
                    'status': r.status.value,
                    'auth_accepted': r.auth_accepted,
                    'auth_windows': r.auth_windows,
                    'adversarial_accepted': r.adversarial_accepted,
                    'collisions': r.collisions,
                    'digest': (r.report_digest or '')[:12],
                    'created_at': r.created_at.isoformat() if r.created_at else '',
                } for r in runs]
        except SQLAlchemyError as e:
            raise ArchiveError(f"archive read failed: {e}") from e
