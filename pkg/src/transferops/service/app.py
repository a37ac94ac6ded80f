"""FastAPI service wrapping the core package.

Every endpoint is a pure function of its request body; identical requests
produce identical responses.  Mathematical negatives are 200s with
outcome="fail"; malformed inputs are 400s; schema violations are 422s.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..cpmaps import InternalConsistencyError
from . import ops
from .models import (
    ClassifyResponse,
    CorrespondenceResponse,
    CpAnalyzeResponse,
    EnumerateRegularResponse,
    FixtureListResponse,
    GraphRequest,
    IdealsResponse,
    LambdaCheckResponse,
    MatrixRequest,
    QuiverResponse,
    RepresentResponse,
)


def create_app():
    app = FastAPI(title="transferops", version=__version__)

    def run(fn, *args):
        try:
            return fn(*args)
        except ops.InputError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except InternalConsistencyError as exc:
            raise HTTPException(status_code=500, detail=f"internal consistency: {exc}")

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/graph/classify", response_model=ClassifyResponse)
    def graph_classify(req: GraphRequest):
        return run(ops.graph_classify, req)

    @app.post("/graph/check-lambda", response_model=LambdaCheckResponse)
    def graph_check_lambda(req: GraphRequest):
        return run(ops.graph_check_lambda, req)

    @app.post("/graph/ideals", response_model=IdealsResponse)
    def graph_ideals(req: GraphRequest):
        return run(ops.graph_ideals, req)

    @app.post("/graph/represent", response_model=RepresentResponse)
    def graph_represent(req: GraphRequest):
        return run(ops.graph_represent, req)

    @app.post("/cp/analyze", response_model=CpAnalyzeResponse)
    def cp_analyze(req: MatrixRequest):
        return run(ops.cp_analyze, req)

    @app.post("/cp/quiver", response_model=QuiverResponse)
    def cp_quiver(req: MatrixRequest):
        return run(ops.cp_quiver, req)

    @app.post("/cp/correspondence", response_model=CorrespondenceResponse)
    def cp_correspondence(req: MatrixRequest):
        return run(ops.cp_correspondence, req)

    @app.post("/exel/enumerate-regular", response_model=EnumerateRegularResponse)
    def exel_enumerate_regular(req: MatrixRequest):
        return run(ops.exel_enumerate_regular, req)

    @app.get("/fixtures", response_model=FixtureListResponse)
    def fixtures_list():
        return run(ops.fixtures_list)

    return app


app = create_app()
