"""
Sequence routes: built-in families, property reports and A/B quotients.
"""
import logging
import math
from typing import Any

from fastapi import APIRouter, HTTPException

from app.exceptions import WeightSequenceError
from app.http.requests import ABRequest, ABResponse, FamilyRequest, PropertyResponse, PropsRequest, SequenceInput, SequenceResponse
from app.models import WeightSequence
from app.services.codecs import to_payload
from app.services.condition_b import log_ab
from app.services.growth_props import property_table
from app.services.sequences import family, from_log_quotients, parse_family

logger = logging.getLogger(__name__)
router = APIRouter()


def json_safe(obj: Any) -> Any:
    """Plain payload with non-finite reals replaced by None."""
    obj = to_payload(obj)
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(x) for x in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def resolve_sequence(source: SequenceInput) -> WeightSequence:
    try:
        if source.family is not None:
            return family(parse_family(source.family, source.horizon))
        return from_log_quotients(source.lam, name=source.name)
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))


def _sequence_response(ws: WeightSequence) -> SequenceResponse:
    return SequenceResponse(
        name=ws.name,
        horizon=ws.horizon,
        lam=json_safe(ws.lam.tolist()),
        normalized=ws.is_normalized,
        log_convex=ws.is_log_convex,
    )


@router.post("/family", response_model=SequenceResponse, response_model_by_alias=True)
async def build_family(request: FamilyRequest):
    text = f"{request.kind.value}:{request.params}" if request.params else request.kind.value
    try:
        ws = family(parse_family(text, request.horizon))
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return _sequence_response(ws)


@router.post("/resolve", response_model=SequenceResponse, response_model_by_alias=True)
async def resolve(source: SequenceInput):
    return _sequence_response(resolve_sequence(source))


@router.post("/props")
async def properties(request: PropsRequest):
    ws = resolve_sequence(request.sequence)
    try:
        table = property_table(ws, request.Q, request.tail_fraction)
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return {name: PropertyResponse(**json_safe(report)) for name, report in table.items()}


@router.post("/ab", response_model=ABResponse)
async def ab_quotients(request: ABRequest):
    ws = resolve_sequence(request.sequence)
    try:
        log_a, log_b = log_ab(ws, request.k, request.l)
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return ABResponse(**json_safe({"k": request.k, "l": request.l, "logA": log_a, "logB": log_b}))
