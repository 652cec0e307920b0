# Request/response schemas (Pydantic). Re-export for convenience.
from app.http.requests.schemas import (
    ABRequest,
    ABResponse,
    BlockRowResponse,
    BlocksRequest,
    BlocksResponse,
    CertificateFile,
    CertificateResponse,
    CoefficientFile,
    FamilyRequest,
    PropertyResponse,
    PropsRequest,
    SearchRequest,
    SequenceFile,
    SequenceInput,
    SequenceResponse,
    VerifyRequest,
    VerifyResponse,
    WeightGridFile,
)

__all__ = [
    "ABRequest",
    "ABResponse",
    "BlockRowResponse",
    "BlocksRequest",
    "BlocksResponse",
    "CertificateFile",
    "CertificateResponse",
    "CoefficientFile",
    "FamilyRequest",
    "PropertyResponse",
    "PropsRequest",
    "SearchRequest",
    "SequenceFile",
    "SequenceInput",
    "SequenceResponse",
    "VerifyRequest",
    "VerifyResponse",
    "WeightGridFile",
]
