"""HTTP facade over the inference pipeline.

Exposes the request/response-shaped operations — single-pair direction
inference, the gradient self-check, and small synchronous synthetic
benchmarks — for multi-client use. Long file-producing sweeps over the
real pair collection stay on the CLI.

Run with: uvicorn hsicsens.service:app
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import __version__
from .bench import auc_vs_nmax_table, run_benchmark
from .causal import infer_direction
from .dataset import GeneratorSpec, PairedDataset, synthetic_suite
from .errors import DegenerateData, DegeneratePair, HsicsensError
from .regression import RegressorSpec
from .sensitivity import gradient_selfcheck

app = FastAPI(title="hsicsens", version=__version__)


class HsicInfo(BaseModel):
    statistic: float
    n: int
    sigma_x: float
    sigma_y: float


class InferRequest(BaseModel):
    x: list[float] = Field(min_length=10)
    y: list[float] = Field(min_length=10)
    regressor: Literal["random_forest", "kernel_ridge"] = "random_forest"
    seed: int = 0

    @model_validator(mode="after")
    def _same_length(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")
        return self


class InferResponse(BaseModel):
    n: int
    seed: int
    regressor: str
    direction_c: str
    direction_cs: str
    score_c: float
    score_cs: float
    hsic_forward: HsicInfo
    hsic_backward: HsicInfo
    sens_forward_x: float
    sens_forward_r: float
    sens_backward_y: float
    sens_backward_r: float


class GradcheckRequest(BaseModel):
    sizes: list[int] = [2, 4, 8, 16]
    dims: list[int] = [1, 2]
    instances_per_case: int = 3
    seed: int = 0
    tolerance: float = 1e-4


class GradcheckResponse(BaseModel):
    passed: bool
    worst_rel_error: float
    tolerance: float
    instances: int


class SyntheticBenchRequest(BaseModel):
    pairs: int = Field(default=8, ge=1, le=100)
    n: int = Field(default=200, ge=10, le=2000)
    noise: float = 0.1
    mechanism: Literal["linear", "cubic", "exp_decay"] = "cubic"
    n_max: int = Field(default=200, ge=10)
    realizations: int = Field(default=1, ge=1, le=10)
    regressor: Literal["random_forest", "kernel_ridge"] = "random_forest"
    seed: int = 0


class AucEntry(BaseModel):
    n_max: int
    criterion: str
    mean_auc: float
    std_auc: float
    realizations: int


class SyntheticBenchResponse(BaseModel):
    records: int
    failed_records: int
    weighted_accuracy_c: float
    weighted_accuracy_cs: float
    auc_table: list[AucEntry]
    seed: int


def _bad_request(exc: Exception) -> HTTPException:
    if isinstance(exc, (DegenerateData, DegeneratePair)):
        return HTTPException(status_code=400, detail=f"degenerate data: {exc}")
    return HTTPException(status_code=400, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/infer", response_model=InferResponse)
def infer(request: InferRequest) -> InferResponse:
    pair = PairedDataset(
        id="request",
        x=np.asarray(request.x, dtype=float)[:, None],
        y=np.asarray(request.y, dtype=float)[:, None],
    )
    spec = RegressorSpec(kind=request.regressor, seed=request.seed)
    try:
        verdict = infer_direction(pair, spec)
    except HsicsensError as exc:
        raise _bad_request(exc) from None
    return InferResponse(
        n=pair.n,
        seed=request.seed,
        regressor=request.regressor,
        direction_c=verdict.direction_c,
        direction_cs=verdict.direction_cs,
        score_c=verdict.score_c,
        score_cs=verdict.score_cs,
        hsic_forward=HsicInfo(**vars(verdict.hsic_forward)),
        hsic_backward=HsicInfo(**vars(verdict.hsic_backward)),
        sens_forward_x=verdict.sens_forward_x,
        sens_forward_r=verdict.sens_forward_r,
        sens_backward_y=verdict.sens_backward_y,
        sens_backward_r=verdict.sens_backward_r,
    )


@app.post("/gradcheck", response_model=GradcheckResponse)
def gradcheck(request: GradcheckRequest) -> GradcheckResponse:
    report = gradient_selfcheck(
        sizes=tuple(request.sizes),
        dims=tuple(request.dims),
        instances_per_case=request.instances_per_case,
        seed=request.seed,
        tolerance=request.tolerance,
    )
    return GradcheckResponse(**vars(report))


def _weighted_accuracy(records, criterion: str) -> float:
    usable = [
        (rec.correct_c if criterion == "c" else rec.correct_cs, rec.weight)
        for rec in records
        if rec.error is None
    ]
    total = sum(w for _, w in usable)
    if total == 0:
        return 0.0
    return sum(w for correct, w in usable if correct) / total


@app.post("/bench/synthetic", response_model=SyntheticBenchResponse)
def bench_synthetic(request: SyntheticBenchRequest) -> SyntheticBenchResponse:
    gen = GeneratorSpec(mechanism=request.mechanism, noise=request.noise, n=request.n)
    pairs = synthetic_suite(request.pairs, gen, request.seed)
    spec = RegressorSpec(kind=request.regressor, seed=request.seed)
    records = run_benchmark(
        pairs, [request.n_max], request.realizations, spec, request.seed
    )
    table = auc_vs_nmax_table(records)
    return SyntheticBenchResponse(
        records=len(records),
        failed_records=sum(1 for rec in records if rec.error is not None),
        weighted_accuracy_c=_weighted_accuracy(records, "c"),
        weighted_accuracy_cs=_weighted_accuracy(records, "cs"),
        auc_table=[AucEntry(**vars(row)) for row in table],
        seed=request.seed,
    )
