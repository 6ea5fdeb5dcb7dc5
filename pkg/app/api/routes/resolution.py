"""
Resolution endpoints - blow-up scripts on weighted dual graphs
"""

from fastapi import APIRouter

from app.analyzers.resolution import apply_script, link_is_tree
from app.analyzers.topo import realization_summary
from app.models.schemas import BlowupRequest, DecisionReport
from app.services.graph_io import parse_blowup_script, parse_graph, serialize_config

router = APIRouter()


@router.post("/blowup", response_model=DecisionReport)
async def blow_up(blowup_request: BlowupRequest) -> DecisionReport:
    """Apply a free/satellite script; starts from a single curve of multiplicity 1 when no graph is given"""
    start = None
    if blowup_request.graph is not None:
        start = parse_graph(blowup_request.graph).require_config()
    cfg = apply_script(start, parse_blowup_script(blowup_request.script))
    return DecisionReport(
        command="blowup",
        answer=link_is_tree(cfg),
        details={
            "graph": serialize_config(cfg),
            "multiplicity": dict(cfg.multiplicity),
            "summary": realization_summary(cfg.graph).model_dump(),
        },
    )
