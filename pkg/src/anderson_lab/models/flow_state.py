"""State carried by an experiment flow while it runs."""

from datetime import datetime, timezone
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field

from .run import CheckResult


class ExecutionStatus(str, Enum):
    """Execution status of an experiment flow."""

    INITIALIZED = "initialized"
    RUNNING = "running"
    COMPLETED = "completed"
    REUSED = "reused"
    CHECK_FAILED = "check_failed"
    FAILED = "failed"


class FlowState(BaseModel):
    """Progress and outputs of one CLI command."""

    command: str
    run_hash: str
    config_hash: str
    execution_status: ExecutionStatus = ExecutionStatus.INITIALIZED
    run_dir: Optional[str] = None
    warnings: list[str] = Field(default_factory=list)
    errors: list[str] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list)
    records: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)
    started_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    updated_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
