"""Service operations: the one place requests turn into core calls.

Both the HTTP endpoints and the CLI are thin clients of these functions, so
their outputs are byte-identical for identical inputs.  Input problems raise
InputError; mathematical negatives come back as outcome="fail" with a
witness, never as exceptions.
"""

from __future__ import annotations

from .. import exel, fixtures, reps
from ..cpmaps import (
    MatrixDocumentError,
    PositiveMapMatrix,
    Subalgebra,
    faithfulness_report,
    gns_kernel,
    is_conditional_expectation,
    multiplicative_domain,
    op_norm,
    quiver,
    quiver_to_map,
)
from ..correspondence import (
    compact_operator_frame,
    gns_correspondence,
    katsura_ideal,
    quiver_dimension_check,
)
from ..graphs import GraphDocumentError, WeightSystem, check_lambda_conditions, load_graph
from ..linalg import format_rational
from .models import (
    ClassifyResponse,
    CorrespondenceResponse,
    CpAnalyzeResponse,
    EnumerateRegularResponse,
    FixtureInfo,
    FixtureListResponse,
    GraphRequest,
    IdealsResponse,
    LambdaCheckResponse,
    MatrixRequest,
    QuiverResponse,
    RepresentResponse,
)


class InputError(ValueError):
    """Bad documents, unknown fixtures, missing weights: exit-code-1 stuff."""


def _resolve_graph(req: GraphRequest):
    if req.fixture is not None:
        try:
            doc = fixtures.GRAPH_DOCS[req.fixture]
        except KeyError:
            raise InputError(f"unknown graph fixture {req.fixture!r}")
    else:
        doc = req.document.to_plain()
    try:
        g, ws = load_graph(doc, allow_float=req.allow_float)
    except GraphDocumentError as exc:
        raise InputError(str(exc))
    if req.lambda_mode == "uniform":
        ws = WeightSystem.uniform(g)
    elif req.lambda_mode != "embedded":
        raise InputError("lambda_mode must be 'embedded' or 'uniform'")
    return g, ws


def _need_weights(g, ws):
    if ws is None:
        if not g.edges:
            return WeightSystem({})
        raise InputError("this operation needs edge weights (embed them or use uniform)")
    if not ws.covers(g):
        raise InputError("weights missing for some edges")
    return ws


def _resolve_matrix(req: MatrixRequest):
    if req.fixture is not None:
        try:
            return fixtures.matrix_fixture(req.fixture)
        except KeyError:
            raise InputError(f"unknown matrix fixture {req.fixture!r}")
    try:
        return PositiveMapMatrix.from_json(req.matrix)
    except (MatrixDocumentError, ValueError) as exc:
        raise InputError(str(exc))


def graph_classify(req: GraphRequest) -> ClassifyResponse:
    g, ws = _resolve_graph(req)
    ws = _need_weights(g, ws)
    cls = exel.classify_system(g, ws, req.depth)
    data = cls.to_json()
    return ClassifyResponse(outcome="pass" if cls.is_exel_system else "fail", **data)


def graph_check_lambda(req: GraphRequest) -> LambdaCheckResponse:
    g, ws = _resolve_graph(req)
    ws = _need_weights(g, ws)
    rep = check_lambda_conditions(g, ws, budget=req.budget)
    data = rep.to_json()
    outcome = "fail" if rep.verdict.startswith("fails") else "pass"
    return LambdaCheckResponse(outcome=outcome, **data)


def graph_ideals(req: GraphRequest) -> IdealsResponse:
    g, ws = _resolve_graph(req)
    ws = _need_weights(g, ws)
    report = exel.compute_ideals(g, ws, req.depth)
    span = exel.covariance_span_check(g, max(req.depth, 1))
    data = report.to_json()
    return IdealsResponse(
        outcome="pass" if span.equal else "fail",
        covariance_span=span.to_json(),
        **data,
    )


def graph_represent(req: GraphRequest) -> RepresentResponse:
    g, ws = _resolve_graph(req)
    ws = _need_weights(g, ws)
    if g.is_acyclic():
        rep = reps.boundary_representation(g)
    else:
        rep = reps.truncated_representation(g, req.depth)
    pi_report = reps.partial_isometry_report(rep, ws)
    corner = exel.classify_system(g, ws, min(req.depth, 3)).is_corner
    verification = reps.verify_representation(
        rep, ws, req.depth, corner=corner, strict=False
    )
    u = reps.build_u(rep, ws)
    ok = verification.all_passed()
    return RepresentResponse(
        outcome="pass" if ok else "fail",
        representation=rep.to_json(),
        u_matrix=[[repr(x) for x in row] for row in u],
        partial_isometry=pi_report.to_json(),
        verification=verification.to_json(),
        gauge_grading=reps.gauge_grading_check(),
    )


def cp_analyze(req: MatrixRequest) -> CpAnalyzeResponse:
    m = _resolve_matrix(req)
    md = multiplicative_domain(m)
    out = CpAnalyzeResponse(
        outcome="pass",
        points=m.n,
        norm=format_rational(op_norm(m)),
        gns_kernel_support=list(gns_kernel(m).zero_columns),
        multiplicative_domain=md.to_json(),
    )
    if req.subalgebra is not None:
        try:
            sub = Subalgebra(m.n, tuple(tuple(sorted(b)) for b in req.subalgebra))
        except MatrixDocumentError as exc:
            raise InputError(str(exc))
        out.faithfulness = faithfulness_report(m, sub.support()).to_json()
        out.conditional_expectation = is_conditional_expectation(m, sub).to_json()
    return out


def cp_quiver(req: MatrixRequest) -> QuiverResponse:
    m = _resolve_matrix(req)
    q = quiver(m)
    rt = quiver_to_map(q).rows == m.rows
    return QuiverResponse(outcome="pass" if rt else "fail", quiver=q.to_json(), roundtrip_exact=rt)


def cp_correspondence(req: MatrixRequest) -> CorrespondenceResponse:
    m = _resolve_matrix(req)
    corr = gns_correspondence(m)
    qd = quiver_dimension_check(m)
    frame = compact_operator_frame(corr)
    return CorrespondenceResponse(
        outcome="pass",
        dimension=corr.dimension(),
        surviving_pairs=[list(p) for p in corr.surviving],
        left_kernel_support=list(corr.left_kernel_support()),
        quiver_dimension=qd.to_json(),
        katsura_support=list(katsura_ideal(m).support),
        compact_frame=frame.to_json(),
    )


def exel_enumerate_regular(req: MatrixRequest) -> EnumerateRegularResponse:
    m = _resolve_matrix(req)
    try:
        result = exel.enumerate_regular_endomorphisms(m)
    except ValueError as exc:
        raise InputError(str(exc))
    data = result.to_json()
    return EnumerateRegularResponse(
        outcome="pass" if result.status == "ok" else "fail",
        **data,
    )


def fixtures_list() -> FixtureListResponse:
    return FixtureListResponse(
        outcome="pass",
        fixtures=[FixtureInfo(**item) for item in fixtures.corpus_listing()],
    )
