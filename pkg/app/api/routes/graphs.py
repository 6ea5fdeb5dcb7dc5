"""
Graph endpoints - structure checks, cores, reduced forms and equivalence decisions
"""

from fastapi import APIRouter, Request
from slowapi import Limiter
from slowapi.util import get_remote_address

from app.analyzers.graph_core import betti, core, validate
from app.analyzers.modifications import certify, verify
from app.analyzers.topo import equivalent, homeomorphic, realization_summary, reduce
from app.core.config import settings
from app.models.schemas import (
    DecisionReport,
    GraphPairRequest,
    GraphRequest,
    GraphResponse,
    VerifyRequest,
)
from app.services.graph_io import (
    certificate_from_document,
    certificate_to_document,
    parse_graph,
    serialize_graph_text,
)

router = APIRouter()
limiter = Limiter(key_func=get_remote_address)


@router.post("/validate", response_model=DecisionReport)
async def validate_graph(graph_request: GraphRequest) -> DecisionReport:
    """Check the Serre graph invariants; violations are reported, not raised"""
    loaded = parse_graph(graph_request.graph)
    violations = validate(loaded.graph)
    return DecisionReport(
        command="validate",
        answer=not violations,
        details={"violations": violations, "dual_graph": loaded.config is not None},
    )


@router.post("/core", response_model=GraphResponse)
async def graph_core(graph_request: GraphRequest) -> GraphResponse:
    """Core of the graph; ``graph`` is null for trees"""
    g = parse_graph(graph_request.graph).graph
    c = core(g)
    return GraphResponse(
        graph=None if c is None else serialize_graph_text(c),
        summary=realization_summary(g),
    )


@router.post("/reduce", response_model=GraphResponse)
async def reduced_form(graph_request: GraphRequest) -> GraphResponse:
    g = parse_graph(graph_request.graph).graph
    return GraphResponse(graph=serialize_graph_text(reduce(g).graph), summary=realization_summary(g))


@router.post("/homeomorphic", response_model=DecisionReport)
async def homeomorphic_graphs(pair: GraphPairRequest) -> DecisionReport:
    g1, g2 = parse_graph(pair.first).graph, parse_graph(pair.second).graph
    return DecisionReport(command="homeo", answer=homeomorphic(g1, g2))


@router.post("/equivalent", response_model=DecisionReport)
async def equivalent_graphs(pair: GraphPairRequest) -> DecisionReport:
    """Equivalence of resolution dual graphs: cores empty or homeomorphic"""
    g1, g2 = parse_graph(pair.first).graph, parse_graph(pair.second).graph
    return DecisionReport(
        command="equiv",
        answer=equivalent(g1, g2),
        details={"betti": [betti(g1), betti(g2)]},
    )


@router.post("/certify", response_model=DecisionReport)
@limiter.limit(settings.RATE_LIMIT)
async def certify_equivalence(request: Request, pair: GraphPairRequest) -> DecisionReport:
    """
    Certificate of equivalence: two modification sequences and a final isomorphism.

    ``answer`` is false and no certificate is returned for non-equivalent graphs.
    """
    g1, g2 = parse_graph(pair.first).graph, parse_graph(pair.second).graph
    cert = certify(g1, g2)
    if cert is None:
        return DecisionReport(command="certify", answer=False)
    return DecisionReport(
        command="certify",
        answer=True,
        details={"length": cert.length, "certificate": certificate_to_document(cert).model_dump()},
    )


@router.post("/verify", response_model=DecisionReport)
async def verify_certificate(verify_request: VerifyRequest) -> DecisionReport:
    g1 = parse_graph(verify_request.first).graph
    g2 = parse_graph(verify_request.second).graph
    cert = certificate_from_document(verify_request.certificate)
    return DecisionReport(command="verify", answer=verify(g1, g2, cert))
