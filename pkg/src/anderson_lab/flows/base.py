"""Common driver of the experiment flows behind the CLI commands."""

import logging
import platform
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import numpy as np
import scipy

from .. import __version__
from ..config.loader import config_hash, run_hash
from ..models.flow_state import ExecutionStatus, FlowState
from ..models.run import CheckResult, RunConfig, RunManifest
from ..storage.artifacts import RunStore
from ..storage.registry import RunRegistry

logger = logging.getLogger(__name__)

PACKAGE_LOGGER = "anderson_lab"


class WarningCollector(logging.Handler):
    """Keeps the text of every WARNING the package logs during a run."""

    def __init__(self) -> None:
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.messages.append(record.getMessage())


def versions() -> dict[str, str]:
    return {
        "anderson_lab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


class ExperimentFlow:
    """One CLI command run against a run directory.

    Subclasses set `command` and implement `run`, writing artifacts through `self.store`
    and results into `self.state`. `kickoff` handles reuse, the registry, warnings and
    the manifest.
    """

    command = ""

    def __init__(
        self,
        config: RunConfig,
        root: Optional[Path] = None,
        registry: Optional[RunRegistry] = None,
        workers: int = 1,
        reuse: bool = True,
    ):
        """Initialize the flow.

        Args:
            config: Validated run configuration
            root: Output root; config.output.directory or settings.output_root if unset
            registry: Run registry; runs are not registered if unset
            workers: Process pool size for independent rungs
            reuse: Skip the run when a completed run with the same hash is on disk
        """
        self.config = config
        digest = run_hash(config, self.command)
        self.state = FlowState(
            command=self.command, run_hash=digest, config_hash=config_hash(config)
        )
        self.store = RunStore(digest, root if root is not None else config.output.directory)
        self.state.run_dir = str(self.store.path)
        self.registry = registry
        self.workers = workers
        self.reuse = reuse

    def run(self) -> None:
        raise NotImplementedError

    @property
    def eps_list(self) -> list[float]:
        return list(self.config.noise.eps)

    def add_check(
        self, name: str, value: float, threshold: float, passed: bool, detail: str = ""
    ) -> None:
        self.state.checks.append(
            CheckResult(name=name, passed=passed, value=value, threshold=threshold, detail=detail)
        )

    def _reusable(self) -> bool:
        if not self.reuse or self.registry is None:
            return False
        return self.registry.completed(self.state.run_hash) is not None and self.store.is_complete()

    def kickoff(self) -> dict[str, Any]:
        """Run the flow (or reuse a completed run) and write the manifest.

        Returns:
            Status summary

        Raises:
            AndersonLabError: Whatever the flow raises; the run is registered as failed
        """
        if self._reusable():
            manifest = self.store.read_manifest()
            self.state.execution_status = ExecutionStatus.REUSED
            self.state.warnings = manifest.warnings
            self.state.artifacts = manifest.artifacts
            self.state.records = manifest.records
            self.state.checks = [CheckResult(**c) for c in manifest.records.get("checks", [])]
            logger.info(f"Reusing completed run {self.state.run_hash} at {self.store.path}")
            return self.get_status()

        run_id = None
        if self.registry is not None:
            run_id = self.registry.start(
                self.state.run_hash, self.state.config_hash, self.command, str(self.store.path)
            )
        collector = WarningCollector()
        package_logger = logging.getLogger(PACKAGE_LOGGER)
        package_logger.addHandler(collector)
        self.state.execution_status = ExecutionStatus.RUNNING
        started = time.perf_counter()
        try:
            self.run()
        except Exception as e:
            self.state.errors.append(str(e))
            self.state.execution_status = ExecutionStatus.FAILED
            if self.registry is not None and run_id is not None:
                self.registry.finish(run_id, ExecutionStatus.FAILED, time.perf_counter() - started)
            raise
        finally:
            package_logger.removeHandler(collector)
        wall_time = time.perf_counter() - started

        self.state.warnings.extend(collector.messages)
        failed = [c.name for c in self.state.checks if not c.passed]
        self.state.execution_status = (
            ExecutionStatus.CHECK_FAILED if failed else ExecutionStatus.COMPLETED
        )
        if self.state.checks:
            self.state.records["checks"] = [c.model_dump(mode="json") for c in self.state.checks]
        manifest = RunManifest(
            config_hash=self.state.config_hash,
            run_hash=self.state.run_hash,
            command=self.command,
            config=self.config,
            versions=versions(),
            wall_time=wall_time,
            warnings=self.state.warnings,
            records=self.state.records,
        )
        self.store.write_manifest(manifest)
        self.state.artifacts = sorted(set(self.store.artifacts) | {"manifest.json"})
        self.state.updated_at = datetime.now(timezone.utc)
        if self.registry is not None and run_id is not None:
            self.registry.finish(run_id, self.state.execution_status, wall_time)
        logger.info(f"{self.command} finished in {wall_time:.2f}s: {self.store.path}")
        return self.get_status()

    def get_status(self) -> dict[str, Any]:
        """Get current flow status.

        Returns:
            Current state summary
        """
        return {
            "command": self.command,
            "execution_status": self.state.execution_status.value,
            "run_hash": self.state.run_hash,
            "run_dir": self.state.run_dir,
            "artifacts": len(self.state.artifacts),
            "warnings": len(self.state.warnings),
            "checks_failed": [c.name for c in self.state.checks if not c.passed],
            "errors": self.state.errors,
            "updated_at": self.state.updated_at.isoformat(),
        }
