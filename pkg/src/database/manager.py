import logging

import pandas as pd
from sqlalchemy import create_engine, select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import sessionmaker

from .models import Base, CheckRecord, RunRecord

logger = logging.getLogger(__name__)


class ResultStore:
    def __init__(self, connection_string: str):
        self.engine = create_engine(connection_string)
        self.Session = sessionmaker(bind=self.engine)
        logger.info("ResultStore initialized.")

    def create_tables(self):
        Base.metadata.create_all(self.engine)
        logger.info("Result tables checked/created successfully.")

    def get_run(self, run_id: str) -> RunRecord | None:
        with self.Session() as session:
            return session.execute(select(RunRecord).where(RunRecord.id == run_id)).scalar_one_or_none()

    def record_run(self, manifest: dict) -> bool:
        """Insert a run row from a manifest dict; a repeated run id is replaced."""
        with self.Session() as session:
            try:
                existing = session.get(RunRecord, manifest["run_id"])
                if existing is not None:
                    session.delete(existing)
                    session.flush()
                session.add(
                    RunRecord(
                        id=manifest["run_id"],
                        tool_version=manifest["tool_version"],
                        command=manifest["command"],
                        seed=manifest.get("seed"),
                        graph_hash=manifest.get("graph_hash"),
                        rng=manifest.get("rng"),
                        tolerances=manifest.get("tolerances"),
                        outputs=manifest.get("outputs"),
                    )
                )
                session.commit()
                logger.info(f"Recorded run {manifest['run_id'][:12]} ({manifest['command']}).")
                return True
            except Exception as e:
                logger.error(f"Error recording run {manifest.get('run_id')}: {e}")
                session.rollback()
                return False

    def bulk_insert(self, model_class, rows: list[dict]) -> bool:
        """All rows in one transaction; on any failure nothing is kept and False is returned."""
        if not rows:
            return True
        table = model_class.__tablename__
        with self.Session() as session:
            try:
                session.bulk_insert_mappings(model_class, rows)
                session.commit()
            except SQLAlchemyError as e:
                session.rollback()
                logger.error(f"Insert of {len(rows)} rows into {table} rolled back: {e}")
                return False
        logger.info(f"Inserted {len(rows)} rows into {table}.")
        return True

    def discard_run(self, run_id: str) -> None:
        with self.Session() as session:
            run = session.get(RunRecord, run_id)
            if run is not None:
                session.delete(run)
                session.commit()
                logger.warning(f"Discarded run {run_id[:12]} from the result store.")

    def record_checks(self, run_id: str, suite: str, checks: pd.DataFrame) -> bool:
        """Checks frame columns: check, passed and optionally value, bound, residual."""
        rows = []
        for record in checks.to_dict("records"):
            rows.append(
                {
                    "run_id": run_id,
                    "suite": suite,
                    "check": str(record["check"]),
                    "passed": bool(record["passed"]),
                    "value": _maybe_float(record.get("value")),
                    "bound": _maybe_float(record.get("bound")),
                    "residual": _maybe_float(record.get("residual")),
                }
            )
        return self.bulk_insert(CheckRecord, rows)

    def checks_frame(self, run_id: str | None = None) -> pd.DataFrame:
        stmt = select(CheckRecord)
        if run_id is not None:
            stmt = stmt.where(CheckRecord.run_id == run_id)
        return pd.read_sql(stmt, self.engine)


def _maybe_float(value):
    if value is None or pd.isna(value):
        return None
    return float(value)
