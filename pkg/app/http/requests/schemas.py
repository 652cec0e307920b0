"""
Pydantic schemas for the JSON file formats and for request/response validation (Http/Requests).
"""
import math
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, validator

from app.models import FamilyKind, NormKind, Verdict


def _parse_real(value):
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("-inf", "-infinity"):
            return -math.inf
        raise ValueError(f"only the literal '-inf' is allowed as a string, got {value!r}")
    return value


# File formats
class SequenceFile(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str = "sequence"
    horizon: int = Field(..., ge=1)
    lam: List[float] = Field(..., alias="lambda")

    @validator("lam")
    def validate_length(cls, v, values):
        horizon = values.get("horizon")
        if horizon is not None and len(v) != horizon:
            raise ValueError(f"lambda has {len(v)} entries but horizon is {horizon}")
        return v


class WeightGridFile(BaseModel):
    logt: List[float]
    logv: List[float]
    normalized: Optional[bool] = None

    @validator("logv")
    def validate_shape(cls, v, values):
        logt = values.get("logt")
        if logt is not None and len(v) != len(logt):
            raise ValueError(f"logv has {len(v)} entries but logt has {len(logt)}")
        return v


class CertificateFile(BaseModel):
    sequence: str
    horizon: Optional[int] = Field(None, ge=1)
    a: List[int] = Field(..., min_length=2)
    logb: float
    logK: float
    rows: List[Tuple[float, float]] = []

    @validator("a")
    def validate_increasing(cls, v):
        if any(y <= x for x, y in zip(v, v[1:])):
            raise ValueError("Lusky numbers must be strictly increasing")
        if v[0] < 1:
            raise ValueError("a_1 must be >= 1")
        return v


class CoefficientFile(BaseModel):
    logabs: List[float] = Field(..., min_length=1)

    @validator("logabs", pre=True)
    def parse_minus_inf(cls, v):
        if not isinstance(v, list):
            raise ValueError("logabs must be a list")
        return [_parse_real(x) for x in v]

    @validator("logabs")
    def validate_entries(cls, v):
        for i, x in enumerate(v):
            if math.isnan(x) or x == math.inf:
                raise ValueError(f"logabs[{i}] = {x!r}; entries must be finite or -inf")
        return v


# Requests
class SequenceInput(BaseModel):
    """Either a family string such as 'qgevrey:2' or an explicit lambda array."""
    model_config = ConfigDict(populate_by_name=True)

    family: Optional[str] = None
    horizon: Optional[int] = Field(None, ge=1)
    name: str = "sequence"
    lam: Optional[List[float]] = Field(None, alias="lambda")

    @validator("lam", always=True)
    def validate_source(cls, v, values):
        if (values.get("family") is None) == (v is None):
            raise ValueError("give exactly one of 'family' (with 'horizon') or 'lambda'")
        if values.get("family") is not None and values.get("horizon") is None:
            raise ValueError("'family' needs a 'horizon'")
        return v


class FamilyRequest(BaseModel):
    kind: FamilyKind
    params: str = ""
    horizon: int = Field(..., ge=1)


class PropsRequest(BaseModel):
    sequence: SequenceInput
    Q: int = Field(2, ge=2)
    tail_fraction: Optional[float] = Field(None, gt=0, le=1)


class ABRequest(BaseModel):
    sequence: SequenceInput
    k: int = Field(..., ge=1)
    l: int = Field(..., ge=2)

    @validator("l")
    def validate_order(cls, v, values):
        k = values.get("k")
        if k is not None and v <= k:
            raise ValueError("l must exceed k")
        return v


class SearchRequest(BaseModel):
    sequence: SequenceInput
    logb: float
    logK: float
    a1: int = Field(1, ge=1)
    gap_max: Optional[int] = Field(None, ge=2)
    horizon: Optional[int] = Field(None, ge=1)
    disk: bool = False


class VerifyRequest(BaseModel):
    sequence: SequenceInput
    certificate: CertificateFile
    disk: bool = False


class BlocksRequest(BaseModel):
    sequence: SequenceInput
    certificate: CertificateFile
    coefficients: CoefficientFile
    c: float = Field(1.0, gt=0)
    norm: NormKind = NormKind.BOTH
    forward_shift: bool = False
    disk: bool = False


# Responses
class SequenceResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    horizon: int
    lam: List[float] = Field(..., alias="lambda")
    normalized: bool
    log_convex: bool


class PropertyResponse(BaseModel):
    property: str
    statistic: Optional[float]
    window: Tuple[int, int]
    verdict: Verdict
    witness: Optional[Tuple[float, float]] = None
    note: str = ""


class ABResponse(BaseModel):
    k: int
    l: int
    logA: Optional[float]
    logB: Optional[float]


class CertificateResponse(BaseModel):
    found: bool
    certificate: Optional[dict] = None
    failure: Optional[dict] = None


class VerifyResponse(BaseModel):
    ok: bool
    rows: List[Tuple[Optional[float], Optional[float]]]
    first_failure: Optional[int]
    max_gap: int
    solid: bool
    stale_rows: List[int] = []


class BlockRowResponse(BaseModel):
    j: int
    a_j: int
    a_j1: int
    log_hull: Optional[float]
    log_core: Optional[float]


class BlocksResponse(BaseModel):
    rows: List[BlockRowResponse]
    sup_hull: Optional[float]
    sup_core: Optional[float]
    slope_hull: Optional[float]
    slope_core: Optional[float]
    hull_bounded: Verdict
    core_bounded: Verdict
