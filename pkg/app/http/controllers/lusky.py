"""
Lusky-number routes: greedy search and certificate verification, entire or disk case.
"""
import logging

from fastapi import APIRouter, HTTPException

from app.exceptions import WeightSequenceError
from app.http.controllers.sequences import json_safe, resolve_sequence
from app.http.requests import CertificateResponse, SearchRequest, VerifyRequest, VerifyResponse
from app.models import FailureTrace, WeightSequence
from app.services.codecs import certificate_from_file
from app.services.condition_b import ABOracle, search_lusky, verify_certificate
from app.services.disk import disk_oracle

logger = logging.getLogger(__name__)
router = APIRouter()


def _oracle(ws: WeightSequence, disk: bool) -> ABOracle:
    return disk_oracle(ws) if disk else ABOracle.entire(ws)


@router.post("/search", response_model=CertificateResponse)
async def search(request: SearchRequest):
    ws = resolve_sequence(request.sequence)
    try:
        result = search_lusky(
            _oracle(ws, request.disk),
            request.horizon or ws.horizon,
            request.logb,
            request.logK,
            a1=request.a1,
            gap_max=request.gap_max,
        )
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    if isinstance(result, FailureTrace):
        logger.info("Lusky search on %s stuck at a_%d = %d", ws.name, result.stuck_j, result.stuck_a)
        return CertificateResponse(found=False, failure=json_safe(result))
    return CertificateResponse(found=True, certificate=json_safe(result))


@router.post("/verify", response_model=VerifyResponse)
async def verify(request: VerifyRequest):
    ws = resolve_sequence(request.sequence)
    try:
        check = verify_certificate(_oracle(ws, request.disk), certificate_from_file(request.certificate))
    except WeightSequenceError as e:
        raise HTTPException(status_code=422, detail=str(e))
    return VerifyResponse(**json_safe(check))
