"""Filesystem-backed async jobs over the run pipeline.

Jobs execute on a bounded thread pool; the registry is append-only and
lock-guarded, records move Queued -> Running -> Done/Failed and never
back.  Each job owns a directory under the runs root holding the config
copy, the report, and a log of what happened, so a planning session
survives process restarts as plain files.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

from .pipeline import RunConfig, StageError, config_to_dict, run, write_outputs
from .report import ReportBundle

QUEUED = "Queued"
RUNNING = "Running"
DONE = "Done"
FAILED = "Failed"

_ORDER = {QUEUED: 0, RUNNING: 1, DONE: 2, FAILED: 2}


class UnknownJobError(KeyError):
    pass


class JobNotReadyError(RuntimeError):
    pass


@dataclass
class JobRecord:
    job_id: str
    state: str = QUEUED
    solved_scenarios: int = 0
    total_scenarios: int = 0
    error: str | None = None
    submitted_at: float = 0.0
    started_at: float | None = None
    finished_at: float | None = None

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["schema_version"] = 1
        doc["progress"] = {"solved": self.solved_scenarios, "total": self.total_scenarios}
        return doc


class JobManager:
    def __init__(self, runs_dir, max_workers: int = 2):
        self.runs_dir = str(runs_dir)
        os.makedirs(self.runs_dir, exist_ok=True)
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._lock = threading.Lock()
        self._records: dict[str, JobRecord] = {}
        self._reports: dict[str, ReportBundle] = {}
        self._seq = 0

    # -- orchestration ops ---------------------------------------------------

    def submit_job(self, config: RunConfig) -> str:
        with self._lock:
            self._seq += 1
            job_id = f"job-{self._seq:06d}"
            self._records[job_id] = JobRecord(job_id=job_id, submitted_at=time.time())
        job_dir = os.path.join(self.runs_dir, job_id)
        os.makedirs(job_dir, exist_ok=True)
        with open(os.path.join(job_dir, "config.json"), "w", encoding="utf-8") as fh:
            json.dump(config_to_dict(config), fh, indent=2, sort_keys=True, default=str)
        self._pool.submit(self._execute, job_id, config)
        return job_id

    def job_status(self, job_id: str) -> JobRecord:
        with self._lock:
            record = self._records.get(job_id)
            if record is None:
                raise UnknownJobError(job_id)
            return JobRecord(**asdict(record))

    def job_result(self, job_id: str) -> ReportBundle:
        record = self.job_status(job_id)
        if record.state == FAILED:
            raise JobNotReadyError(f"job {job_id} failed: {record.error}")
        if record.state != DONE:
            raise JobNotReadyError(f"job {job_id} not ready (state {record.state})")
        return self._reports[job_id]

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)

    # -- internals -------------------------------------------------------------

    def _transition(self, job_id: str, state: str, **updates) -> None:
        with self._lock:
            record = self._records[job_id]
            if _ORDER[state] < _ORDER[record.state]:
                raise RuntimeError(f"job {job_id}: illegal transition {record.state} -> {state}")
            record.state = state
            for key, value in updates.items():
                setattr(record, key, value)

    def _progress(self, job_id: str, solved: int, total: int) -> None:
        with self._lock:
            record = self._records[job_id]
            record.solved_scenarios = max(record.solved_scenarios, solved)
            record.total_scenarios = max(record.total_scenarios, total)

    def _execute(self, job_id: str, config: RunConfig) -> None:
        job_dir = os.path.join(self.runs_dir, job_id)
        log_path = os.path.join(job_dir, "log.txt")
        self._transition(job_id, RUNNING, started_at=time.time())
        try:
            output = run(config, progress=lambda s, t: self._progress(job_id, s, t))
            write_outputs(output, job_dir)
            with self._lock:
                self._reports[job_id] = output.report
            self._transition(job_id, DONE, finished_at=time.time(),
                             solved_scenarios=output.scenarios.num_scenarios,
                             total_scenarios=output.scenarios.num_scenarios)
            with open(log_path, "a", encoding="utf-8") as fh:
                fh.write("done\n")
        except Exception as exc:
            stage = exc.stage if isinstance(exc, StageError) else "internal"
            message = f"[{stage}] {exc}"
            self._transition(job_id, FAILED, finished_at=time.time(), error=message)
            with open(log_path, "a", encoding="utf-8") as fh:
                fh.write(message + "\n")
