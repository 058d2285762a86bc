"""Request/response models.

Search values routinely exceed 64 bits, so big integers are accepted as JSON
numbers or strings and always returned as strings; JSON consumers in other
languages would otherwise silently round them.
"""

from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, Field


def _to_int(v):
    if isinstance(v, str):
        return int(v.strip(), 10)
    return v


BigInt = Annotated[int, BeforeValidator(_to_int)]
Mode = Literal["square", "cube"]


class HealthResponse(BaseModel):
    status: str
    version: str


class VerifyRequest(BaseModel):
    mode: Mode
    value: BigInt
    p_max: int = Field(ge=2)


class VerifyResponse(BaseModel):
    mode: Mode
    value: str
    p_max: int
    result: bool


class OracleRequest(BaseModel):
    mode: Mode
    p_max: int = Field(ge=2)
    bound: BigInt


class OracleResponse(BaseModel):
    mode: Mode
    p_max: int
    bound: str
    minimum: str | None


class AnalyzeRequest(BaseModel):
    table_text: str
    crossover: bool = False
    crossover_text: str | None = None


class TableRowOut(BaseModel):
    n: int
    prime: int
    value: str
    ratio: float


class StatsOut(BaseModel):
    count: int
    min: float
    max: float
    mean: float


class CrossoverRowOut(BaseModel):
    n: int
    ratio: float


class AnalyzeResponse(BaseModel):
    kind: Mode
    rows: list[TableRowOut]
    stats: StatsOut
    crossover: list[CrossoverRowOut] | None = None
    crossover_stats: StatsOut | None = None


class SearchJobRequest(BaseModel):
    mode: Mode
    p_max: int = Field(ge=2)
    x_lo: BigInt
    x_hi: BigInt
    workers: int = Field(default=1, ge=1)
    block_cap: int | None = Field(default=None, ge=1)
    moduli: Literal["auto", "production"] = "auto"
    moduli_text: str | None = None
    checkpoint_path: str | None = None
    output_dir: str | None = None
    resume: bool = False


class JobCreatedResponse(BaseModel):
    job_id: str
    state: str


class JobStatusResponse(BaseModel):
    job_id: str
    state: Literal["queued", "running", "done", "failed"]
    done: int
    total: int
    found: int
    error: str | None = None


class LevelRowOut(BaseModel):
    p: int
    x: str


class CandidateOut(BaseModel):
    x: str
    t_p: str
    t_n: str
    verified_p: int


class JobResultsResponse(BaseModel):
    job_id: str
    minimum: str | None
    levels: list[LevelRowOut]
    count: int
    candidates: list[CandidateOut]
    truncated: bool
