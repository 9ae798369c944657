"""Local HTTP facade over the job manager, consumed by the planner UI.

  POST /jobs          run config JSON -> {"job_id": ...}
  GET  /jobs/{id}     job record (state + progress)
  GET  /jobs/{id}/report   report JSON once Done
  GET  /meta/cases    the four named case presets

Every payload carries schema_version.  Paths inside a submitted config
resolve against the server's data directory, so browser clients only
ever name bundled inputs.  The service binds locally; there is no
authentication layer.
"""

from __future__ import annotations

import os
from contextlib import asynccontextmanager
from dataclasses import asdict

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .jobs import JobManager, JobNotReadyError, UnknownJobError
from .pipeline import config_from_dict
from .report import report_to_dict
from .scenario import CASE_PRESETS

SCHEMA_VERSION = 1


def _resolve(path: str | None, data_dir: str | None) -> str | None:
    if path is None or data_dir is None or os.path.isabs(path):
        return path
    return os.path.join(data_dir, path)


def create_app(runs_dir: str = "runs", data_dir: str | None = None,
               max_workers: int = 2) -> FastAPI:
    manager = JobManager(runs_dir, max_workers=max_workers)

    @asynccontextmanager
    async def lifespan(_app):
        yield
        manager.shutdown()

    app = FastAPI(title="ventalloc planner service", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    app.state.manager = manager

    @app.post("/jobs")
    def submit(payload: dict = Body(...)):
        doc = dict(payload)
        for key in ("instance_path", "forecast_path", "scenarios_path"):
            if doc.get(key):
                doc[key] = _resolve(doc[key], data_dir)
        try:
            config = config_from_dict(doc)
        except (ValueError, TypeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        job_id = manager.submit_job(config)
        return {"schema_version": SCHEMA_VERSION, "job_id": job_id}

    @app.get("/jobs/{job_id}")
    def status(job_id: str):
        try:
            return manager.job_status(job_id).to_dict()
        except UnknownJobError:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")

    @app.get("/jobs/{job_id}/report")
    def report(job_id: str):
        try:
            bundle = manager.job_result(job_id)
        except UnknownJobError:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        except JobNotReadyError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return report_to_dict(bundle)

    @app.get("/meta/cases")
    def cases():
        return {
            "schema_version": SCHEMA_VERSION,
            "cases": [asdict(spec) for spec in CASE_PRESETS.values()],
        }

    return app
