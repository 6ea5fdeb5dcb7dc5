"""
Valuation endpoints - monomial and iterated valuations, the pi map, skeleton retraction
"""

from fastapi import APIRouter

from app.analyzers.valuations import (
    IteratedOrderSpec,
    eval_iterated,
    eval_monomial,
    maximal_ideal,
    pi_of_iterated,
    pi_of_monomial,
    retract_to_skeleton,
)
from app.models.schemas import IteratedRequest, MonomialRequest, RetractRequest, ValueResponse
from app.services.graph_io import format_value, parse_polynomial, parse_rational, parse_weights

router = APIRouter()


def _iterated_spec(body: IteratedRequest) -> IteratedOrderSpec:
    # requests number variables from 1
    return IteratedOrderSpec(tuple(i - 1 for i in body.order), body.arity)


@router.post("/evaluate", response_model=ValueResponse)
async def evaluate(body: MonomialRequest | IteratedRequest) -> ValueResponse:
    if isinstance(body, MonomialRequest):
        beta = parse_weights(body.weights)
        f = parse_polynomial(body.polynomial, beta.arity)
        return ValueResponse(value=format_value(eval_monomial(beta, f)))
    f = parse_polynomial(body.polynomial, body.arity)
    return ValueResponse(value=format_value(eval_iterated(_iterated_spec(body), f)))


@router.post("/pi", response_model=ValueResponse)
async def pi_image(body: MonomialRequest | IteratedRequest) -> ValueResponse:
    """Value of the normalized semivaluation pi(nu) on the polynomial"""
    if isinstance(body, MonomialRequest):
        beta = parse_weights(body.weights)
        f = parse_polynomial(body.polynomial, beta.arity)
        gens = (
            [parse_polynomial(g, beta.arity) for g in body.generators]
            if body.generators
            else maximal_ideal(beta.arity)
        )
        return ValueResponse(value=format_value(pi_of_monomial(beta, f, gens)))
    f = parse_polynomial(body.polynomial, body.arity)
    return ValueResponse(value=format_value(pi_of_iterated(_iterated_spec(body), f)))


@router.post("/retract", response_model=ValueResponse)
async def retract(body: RetractRequest) -> ValueResponse:
    """Skeleton parameter t of the values (s1, s2) on an edge with multiplicities (b1, b2)"""
    b1, b2 = body.multiplicities
    s1, s2 = (parse_rational(s) for s in body.values)
    return ValueResponse(value=format_value(retract_to_skeleton(b1, b2, s1, s2)))
