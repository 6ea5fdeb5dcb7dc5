"""
Pydantic schemas for DualGraphLens: documents, reports and HTTP models
"""

from typing import Annotated, Any, Literal

from pydantic import BaseModel, Field

GRAPH_FORMAT = "dualgraph/1"
CERTIFICATE_FORMAT = "dualgraph-certificate/1"

Identifier = Annotated[str, Field(pattern=r"^[A-Za-z0-9_]+$")]


# Graph documents
class VertexDecl(BaseModel):
    id: Identifier
    label: str | None = None
    multiplicity: int | None = Field(default=None, ge=1)


class EdgeDecl(BaseModel):
    id: Identifier
    u: Identifier
    v: Identifier


class GraphDocument(BaseModel):
    """Structured mirror of the line-oriented graph format"""

    format: Literal["dualgraph/1"] = GRAPH_FORMAT
    vertices: list[VertexDecl] = Field(default_factory=list)
    edges: list[EdgeDecl] = Field(default_factory=list)


# Certificates
class MappingDocument(BaseModel):
    vertices: dict[str, str] = Field(default_factory=dict)
    darts: dict[str, str] = Field(default_factory=dict)


class ExpandStep(BaseModel):
    op: Literal["expand"] = "expand"
    at: str
    new_vertex: str
    edge: str


class SubdivideStep(BaseModel):
    op: Literal["subdivide"] = "subdivide"
    dart: str
    new_vertex: str
    edges: tuple[str, str]


class RelabelStep(BaseModel):
    op: Literal["relabel"] = "relabel"
    vertices: dict[str, str] = Field(default_factory=dict)
    darts: dict[str, str] = Field(default_factory=dict)


StepDocument = Annotated[ExpandStep | SubdivideStep | RelabelStep, Field(discriminator="op")]


class CertificateDocument(BaseModel):
    format: Literal["dualgraph-certificate/1"] = CERTIFICATE_FORMAT
    seq1: list[StepDocument] = Field(default_factory=list)
    seq2: list[StepDocument] = Field(default_factory=list)
    final_iso: MappingDocument = Field(default_factory=MappingDocument)


class CorpusManifest(BaseModel):
    """Index of the fixture corpus: group name -> fixture file names"""

    format: Literal["dualgraph-corpus/1"] = "dualgraph-corpus/1"
    groups: dict[str, list[str]] = Field(default_factory=dict)


# Analysis results
class RealizationSummary(BaseModel):
    betti: int
    is_tree: bool
    core_vertices: int
    core_edges: int
    reduced_vertices: int
    reduced_edges: int
    reduced_degrees: dict[str, int] = Field(default_factory=dict)


class DecisionReport(BaseModel):
    command: str
    answer: bool | None = None
    details: dict[str, Any] = Field(default_factory=dict)


class CriterionResult(BaseModel):
    """Outcome of one acceptance criterion in corpus-check"""

    name: str
    passed: bool
    checked: int = 0
    failures: list[str] = Field(default_factory=list)
    seconds: float = 0.0


class CorpusReport(BaseModel):
    passed: bool
    seed: int
    results: list[CriterionResult] = Field(default_factory=list)


# HTTP request models
class GraphRequest(BaseModel):
    graph: str = Field(description="Graph in the line-oriented text format")


class GraphPairRequest(BaseModel):
    first: str
    second: str


class VerifyRequest(BaseModel):
    first: str
    second: str
    certificate: CertificateDocument


class BlowupRequest(BaseModel):
    graph: str | None = Field(default=None, description="Divisor configuration; initial config when absent")
    script: str


class MonomialRequest(BaseModel):
    weights: list[str] = Field(description="Rational weights such as '1/2'")
    polynomial: str
    generators: list[str] | None = None


class IteratedRequest(BaseModel):
    order: list[int] = Field(description="1-based variable indices, stage order")
    arity: int = Field(ge=1)
    polynomial: str


class RetractRequest(BaseModel):
    multiplicities: tuple[int, int]
    values: tuple[str, str]


# Response models
class GraphResponse(BaseModel):
    graph: str | None
    summary: RealizationSummary | None = None


class ValueResponse(BaseModel):
    value: str


class HealthResponse(BaseModel):
    status: str
    version: str
    uptime: float
    fixtures: int = Field(..., description="Graphs in the loaded fixture corpus, 0 if it failed to load")
    isomorphism_max_vertices: int


class ErrorResponse(BaseModel):
    error: str
    details: str | None = None
    code: int | None = None
