"""Pydantic request/response models for the HTTP service and the CLI.

Requests carry either an inline document or a fixture name; responses are
deterministic JSON-serializable reports with an `outcome` field the thin
clients map to exit codes ("pass" -> 0, "fail" -> 2).
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator


class EdgeDoc(BaseModel):
    id: str
    src: str
    rng: str
    # floats are admitted by the schema but rejected downstream unless the
    # request sets allow_float (exact-rationals design decision)
    lam: Optional[str | int | float] = Field(default=None, alias="lambda")

    model_config = {"populate_by_name": True}


class GraphDocument(BaseModel):
    vertices: list[str]
    edges: list[EdgeDoc]

    def to_plain(self):
        edges = []
        for e in self.edges:
            d = {"id": e.id, "src": e.src, "rng": e.rng}
            if e.lam is not None:
                d["lambda"] = e.lam
            edges.append(d)
        return {"vertices": list(self.vertices), "edges": edges}


class GraphRequest(BaseModel):
    document: Optional[GraphDocument] = None
    fixture: Optional[str] = None
    lambda_mode: str = "embedded"  # "embedded" or "uniform"
    depth: int = 3
    budget: int = 10000
    allow_float: bool = False

    @model_validator(mode="after")
    def _one_source(self):
        if (self.document is None) == (self.fixture is None):
            raise ValueError("exactly one of document/fixture is required")
        return self


class MatrixRequest(BaseModel):
    matrix: Optional[list[list[str | int]]] = None
    fixture: Optional[str] = None
    subalgebra: Optional[list[list[int]]] = None  # blocks, for cp analyze

    @model_validator(mode="after")
    def _one_source(self):
        if (self.matrix is None) == (self.fixture is None):
            raise ValueError("exactly one of matrix/fixture is required")
        return self


class Report(BaseModel):
    outcome: str  # "pass" or "fail"
    data: dict[str, Any]


class ClassifyResponse(BaseModel):
    outcome: str
    is_exel: bool
    is_regular: bool
    is_corner: bool
    witness: Optional[dict] = None
    normalization_on_emitters: bool
    normalization_all_vertices: bool
    depth: int
    details: dict


class LambdaCheckResponse(BaseModel):
    outcome: str
    linf: Optional[bool]
    c0: Optional[bool]
    sup: Optional[str]
    verdict: str
    budget: Optional[int]
    exhausted: bool
    details: dict


class IdealsResponse(BaseModel):
    outcome: str
    n_l: list[dict] = Field(alias="N_L")
    n_l_perp: list[dict] = Field(alias="N_L_perp")
    j_xl: list[dict] = Field(alias="J_XL")
    intersection: list[dict]
    depth: int
    brute_force_checked: bool
    covariance_span: dict

    model_config = {"populate_by_name": True}


class RepresentResponse(BaseModel):
    outcome: str
    representation: dict
    u_matrix: list[list[str]]  # exact radical entries, printed
    partial_isometry: dict
    verification: dict
    gauge_grading: list[dict]


class CpAnalyzeResponse(BaseModel):
    outcome: str
    points: int
    norm: str
    gns_kernel_support: list[int]
    multiplicative_domain: dict
    faithfulness: Optional[dict] = None
    conditional_expectation: Optional[dict] = None


class QuiverResponse(BaseModel):
    outcome: str
    quiver: dict
    roundtrip_exact: bool


class CorrespondenceResponse(BaseModel):
    outcome: str
    dimension: int
    surviving_pairs: list[list[int]]
    left_kernel_support: list[int]
    quiver_dimension: dict
    katsura_support: list[int]
    compact_frame: dict


class EnumerateRegularResponse(BaseModel):
    outcome: str
    status: str
    count: int
    endomorphisms: list[list[list[str]]]
    corner_count: int
    corner_endomorphisms: list[list[list[str]]]
    reason: Optional[str] = None


class FixtureInfo(BaseModel):
    name: str
    kind: str
    seed: Optional[int] = None


class FixtureListResponse(BaseModel):
    outcome: str
    fixtures: list[FixtureInfo]
