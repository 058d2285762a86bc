"""FastAPI application: synchronous verify/oracle/analyze, jobbed search.

Searches run on a background thread per job (workers beyond one fork
processes from there), so submission returns immediately and clients poll
job state. Candidate payloads are capped; full records live in the job's
output directory when one was requested.
"""

import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..analysis import (
    brute_force_min,
    bundled_table,
    conjecture_ratio,
    crossover_table,
    load_table,
    table_stats,
)
from ..errors import PseudosieveError
from ..search import (
    Candidate,
    build_search_config,
    minima_by_level,
    run_search,
    verify_value,
)
from ..wheel import CUBE, SQUARE, parse_moduli_config
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    CandidateOut,
    CrossoverRowOut,
    HealthResponse,
    JobCreatedResponse,
    JobResultsResponse,
    JobStatusResponse,
    LevelRowOut,
    OracleRequest,
    OracleResponse,
    SearchJobRequest,
    StatsOut,
    TableRowOut,
    VerifyRequest,
    VerifyResponse,
)

CANDIDATE_PAYLOAD_CAP = 10_000


@dataclass
class _Job:
    job_id: str
    request: SearchJobRequest
    state: str = "queued"
    done: int = 0
    total: int = 0
    found: int = 0
    error: str | None = None
    candidates: list[Candidate] = field(default_factory=list)


class JobManager:
    """Owns job state; every mutation happens under one lock."""

    def __init__(self):
        self._jobs: dict[str, _Job] = {}
        self._lock = threading.Lock()

    def submit(self, request: SearchJobRequest) -> _Job:
        job = _Job(job_id=uuid.uuid4().hex[:12], request=request)
        with self._lock:
            self._jobs[job.job_id] = job
        thread = threading.Thread(target=self._run, args=(job,), daemon=True)
        thread.start()
        return job

    def get(self, job_id: str) -> _Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"no job {job_id}")
        return job

    def snapshot(self) -> list[_Job]:
        with self._lock:
            return list(self._jobs.values())

    def _run(self, job: _Job) -> None:
        req = job.request
        try:
            moduli = (
                parse_moduli_config(req.moduli_text) if req.moduli_text else req.moduli
            )
            kwargs = {}
            if req.block_cap is not None:
                kwargs["block_cap"] = req.block_cap
            config = build_search_config(
                req.mode,
                req.p_max,
                req.x_lo,
                req.x_hi,
                workers=req.workers,
                moduli=moduli,
                checkpoint_path=req.checkpoint_path,
                output_dir=req.output_dir,
                **kwargs,
            )

            def progress(done: int, total: int, found: int) -> None:
                with self._lock:
                    job.done, job.total, job.found = done, total, found

            with self._lock:
                job.state = "running"
            candidates = run_search(config, resume=req.resume, progress=progress)
            with self._lock:
                job.candidates = candidates
                job.found = len(candidates)
                job.state = "done"
        except Exception as exc:  # noqa: BLE001 - surfaced through job state
            with self._lock:
                job.error = f"{type(exc).__name__}: {exc}"
                job.state = "failed"


def create_app() -> FastAPI:
    app = FastAPI(title="pseudosieve", version=__version__)
    manager = JobManager()

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        try:
            result = verify_value(req.mode, req.value, req.p_max)
        except PseudosieveError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return VerifyResponse(mode=req.mode, value=str(req.value), p_max=req.p_max, result=result)

    @app.post("/oracle", response_model=OracleResponse)
    def oracle(req: OracleRequest) -> OracleResponse:
        try:
            minimum = brute_force_min(req.mode, req.p_max, req.bound)
        except (PseudosieveError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return OracleResponse(
            mode=req.mode,
            p_max=req.p_max,
            bound=str(req.bound),
            minimum=str(minimum) if minimum is not None else None,
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
        try:
            records = load_table(req.table_text)
            ratios = [conjecture_ratio(r) for r in records]
            kind = records[0].kind
            response = AnalyzeResponse(
                kind=kind,
                rows=[
                    TableRowOut(n=r.n, prime=r.prime, value=str(r.value), ratio=c)
                    for r, c in zip(records, ratios)
                ],
                stats=_stats_out(ratios),
            )
            if req.crossover:
                if req.crossover_text:
                    other = load_table(req.crossover_text)
                else:
                    other = bundled_table(CUBE if kind == SQUARE else SQUARE)
                squares = records if kind == SQUARE else other
                cubes = records if kind == CUBE else other
                pairs = crossover_table(squares, cubes)
                response.crossover = [CrossoverRowOut(n=n, ratio=r) for n, r in pairs]
                if pairs:
                    response.crossover_stats = _stats_out([r for _, r in pairs])
        except PseudosieveError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return response

    @app.post("/search/jobs", response_model=JobCreatedResponse, status_code=202)
    def submit_search(req: SearchJobRequest) -> JobCreatedResponse:
        job = manager.submit(req)
        return JobCreatedResponse(job_id=job.job_id, state=job.state)

    @app.get("/search/jobs", response_model=list[JobStatusResponse])
    def list_jobs() -> list[JobStatusResponse]:
        return [_status(job) for job in manager.snapshot()]

    @app.get("/search/jobs/{job_id}", response_model=JobStatusResponse)
    def job_status(job_id: str) -> JobStatusResponse:
        return _status(manager.get(job_id))

    @app.get("/search/jobs/{job_id}/results", response_model=JobResultsResponse)
    def job_results(job_id: str) -> JobResultsResponse:
        job = manager.get(job_id)
        if job.state != "done":
            raise HTTPException(status_code=409, detail=f"job {job_id} is {job.state}")
        cands = job.candidates
        levels = minima_by_level(cands, job.request.p_max)
        return JobResultsResponse(
            job_id=job.job_id,
            minimum=str(min(c.x for c in cands)) if cands else None,
            levels=[LevelRowOut(p=p, x=str(x)) for p, x in levels],
            count=len(cands),
            candidates=[
                CandidateOut(x=str(c.x), t_p=str(c.t_p), t_n=str(c.t_n), verified_p=c.verified_p)
                for c in cands[:CANDIDATE_PAYLOAD_CAP]
            ],
            truncated=len(cands) > CANDIDATE_PAYLOAD_CAP,
        )

    return app


def _status(job: _Job) -> JobStatusResponse:
    return JobStatusResponse(
        job_id=job.job_id,
        state=job.state,
        done=job.done,
        total=job.total,
        found=job.found,
        error=job.error,
    )


def _stats_out(values) -> StatsOut:
    lo, hi, mean = table_stats(values)
    return StatsOut(count=len(values), min=lo, max=hi, mean=mean)


app = create_app()
