"""
Solid hull/core routes: block statistics of a coefficient prefix along a verified certificate.
"""
import logging

from fastapi import APIRouter, HTTPException

from app.exceptions import WeightSequenceError
from app.http.controllers.sequences import json_safe, resolve_sequence
from app.http.requests import BlocksRequest, BlocksResponse
from app.models import NormKind
from app.services.codecs import certificate_from_file, coefficients_from_file
from app.services.disk import disk_block_stats
from app.services.hull_core import block_stats

logger = logging.getLogger(__name__)
router = APIRouter()


@router.post("/blocks", response_model=BlocksResponse)
async def blocks(request: BlocksRequest):
    ws = resolve_sequence(request.sequence)
    cert = certificate_from_file(request.certificate)
    coeffs = coefficients_from_file(request.coefficients)
    stats = disk_block_stats if request.disk else block_stats
    try:
        report = stats(ws, cert, request.c, coeffs, forward_shift=request.forward_shift)
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    payload = json_safe(report)
    if request.norm == NormKind.HULL:
        for row in payload["rows"]:
            row["log_core"] = None
    elif request.norm == NormKind.CORE:
        for row in payload["rows"]:
            row["log_hull"] = None
    return BlocksResponse(**payload)
