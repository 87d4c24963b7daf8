"""Registry of runs in a SQL database (sqlite by default)."""

import logging
from datetime import datetime, timezone
from typing import Optional

from sqlalchemy import DateTime, Float, Integer, String, create_engine, select
from sqlalchemy.orm import DeclarativeBase, Mapped, Session, mapped_column

from ..config.settings import settings
from ..models.flow_state import ExecutionStatus

logger = logging.getLogger(__name__)


class Base(DeclarativeBase):
    pass


class RunRow(Base):
    """One invocation of a CLI command."""

    __tablename__ = "runs"

    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    run_hash: Mapped[str] = mapped_column(String(64), index=True)
    config_hash: Mapped[str] = mapped_column(String(64))
    command: Mapped[str] = mapped_column(String(32))
    status: Mapped[str] = mapped_column(String(32))
    path: Mapped[str] = mapped_column(String(1024))
    created_at: Mapped[datetime] = mapped_column(DateTime(timezone=True))
    finished_at: Mapped[Optional[datetime]] = mapped_column(DateTime(timezone=True), nullable=True)
    wall_time: Mapped[Optional[float]] = mapped_column(Float, nullable=True)


class RunRegistry:
    """Start, finish and look up runs."""

    def __init__(self, database_url: Optional[str] = None):
        """Initialize the registry and create the table if needed.

        Args:
            database_url: SQLAlchemy URL, settings.database_url if unset
        """
        self.engine = create_engine(database_url or settings.database_url)
        Base.metadata.create_all(self.engine)

    def start(self, run_hash: str, config_hash: str, command: str, path: str) -> int:
        with Session(self.engine) as session:
            row = RunRow(
                run_hash=run_hash,
                config_hash=config_hash,
                command=command,
                status=ExecutionStatus.RUNNING.value,
                path=path,
                created_at=datetime.now(timezone.utc),
            )
            session.add(row)
            session.commit()
            return row.id

    def finish(self, run_id: int, status: ExecutionStatus, wall_time: float) -> None:
        with Session(self.engine) as session:
            row = session.get(RunRow, run_id)
            if row is None:
                logger.warning(f"Run {run_id} is not registered")
                return
            row.status = ExecutionStatus(status).value
            row.finished_at = datetime.now(timezone.utc)
            row.wall_time = wall_time
            session.commit()

    def completed(self, run_hash: str) -> Optional[RunRow]:
        """Latest completed run with this hash, if any."""
        query = (
            select(RunRow)
            .where(RunRow.run_hash == run_hash)
            .where(RunRow.status == ExecutionStatus.COMPLETED.value)
            .order_by(RunRow.id.desc())
        )
        with Session(self.engine) as session:
            row = session.scalars(query).first()
            if row is not None:
                session.expunge(row)
            return row

    def list_runs(self, limit: int = 20) -> list[RunRow]:
        query = select(RunRow).order_by(RunRow.id.desc()).limit(limit)
        with Session(self.engine) as session:
            rows = list(session.scalars(query))
            for row in rows:
                session.expunge(row)
            return rows
