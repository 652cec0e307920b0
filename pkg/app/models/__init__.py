"""
Domain types for weight sequences, weight functions, Lusky-number certificates and block reports.
All type and enum definitions live here for simplicity and to avoid circular imports.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


# Enums
class Verdict(str, enum.Enum):
    HOLDS = "holds-on-horizon"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


class Violation(str, enum.Enum):
    A_LOW = "A-low"
    A_HIGH = "A-high"
    B_LOW = "B-low"
    B_HIGH = "B-high"
    HORIZON = "horizon"


class FamilyKind(str, enum.Enum):
    GEVREY = "gevrey"
    HARMONIC = "harmonic"
    QGEVREY = "qgevrey"
    QALPHA = "qalpha"
    STEPS = "steps"
    STEPS_GEOMETRIC = "steps-geometric"
    STEPS_DYADIC = "steps-dyadic"
    AJEXAMPLE = "ajexample"


class CombineMode(str, enum.Enum):
    PRODUCT = "product"
    QUOTIENT = "quotient"


class RamifyMode(str, enum.Enum):
    ROOT = "root"    # u(t) = v(t^(1/r))^r
    POWER = "power"  # v^r(t) = v(t^r)


class NormKind(str, enum.Enum):
    HULL = "hull"
    CORE = "core"
    BOTH = "both"


# Sequences
@dataclass(frozen=True, eq=False)
class WeightSequence:
    """
    Finite-horizon weight sequence stored by its log-quotients.

    lam[p-1] = log mu_p for p = 1..P (mu_0 = 1 is implicit); logM[p] = log M_p with logM[0] = 0.
    Validity flags are computed, never enforced.
    """
    name: str
    lam: np.ndarray
    logM: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lam = _frozen_array(self.lam)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "logM", _frozen_array(np.concatenate(([0.0], np.cumsum(lam)))))

    @property
    def horizon(self) -> int:
        return int(self.lam.shape[0])

    @property
    def is_normalized(self) -> bool:
        return bool(self.lam[0] >= 0.0)

    @property
    def is_log_convex(self) -> bool:
        return bool(np.all(np.diff(self.lam) >= 0.0))


@dataclass(frozen=True, eq=False)
class DeltaSeq:
    """
    Increments δ_p = λ_p - λ_{p-1}.

    residual holds the exact rounding error of each difference so that the inverse
    transform reproduces λ bit for bit; it is zero for user-supplied increments.
    """
    delta: np.ndarray
    residual: Optional[np.ndarray] = None
    name: str = "delta"

    def __post_init__(self):
        object.__setattr__(self, "delta", _frozen_array(self.delta))
        if self.residual is not None:
            object.__setattr__(self, "residual", _frozen_array(self.residual))

    @property
    def horizon(self) -> int:
        return int(self.delta.shape[0])


@dataclass(frozen=True)
class FamilySpec:
    kind: FamilyKind
    horizon: int
    s: Optional[float] = None
    q: Optional[float] = None
    alpha: Optional[float] = None
    Q: Optional[int] = None
    D: Optional[float] = None
    base: Optional[float] = None
    b: Optional[Tuple[int, ...]] = None
    logc: Optional[Tuple[float, ...]] = None
    gaps: Optional[str] = None
    C: Optional[float] = None
    blocks: Optional[int] = None


# Weight functions
@dataclass(frozen=True, eq=False)
class WeightFunctionGrid:
    """Sampled log v on a sorted log t grid; log v must be non-increasing."""
    logt: np.ndarray
    logv: np.ndarray
    normalized: bool = False
    convex_checked: bool = False
    rapid_decay_checked: bool = False

    def __post_init__(self):
        object.__setattr__(self, "logt", _frozen_array(self.logt))
        object.__setattr__(self, "logv", _frozen_array(self.logv))

    def logv_at(self, x) -> np.ndarray:
        """Linear interpolation of log v in ln t."""
        return np.interp(x, self.logt, self.logv)

    def omega_at(self, x) -> np.ndarray:
        return -self.logv_at(x)


@dataclass(frozen=True)
class RamificationRow:
    logt: float           # ln t
    omega_m: float        # ω_M(t^r)
    omega_p: float        # ω_{P^{M,r}}(t)
    ratio: float
    sigma_m: int          # Σ_M(t^r)
    sigma_p: int          # Σ_{P^{M,r}}(t)


@dataclass(frozen=True)
class RamificationReport:
    r: int
    rows: Tuple[RamificationRow, ...]
    max_ratio_deviation: float
    ratio_is_one: bool
    ratio_is_r_squared: bool
    counting_relation_holds: bool
    note: str


@dataclass(frozen=True)
class WeightABResult:
    t_k: float
    t_l: float
    logA: float
    logB: float
    sequence_form_deviation: Optional[float] = None


@dataclass(frozen=True)
class SandwichReport:
    logA: float
    max_lower_violation: float
    samples: int


# Growth properties
@dataclass(frozen=True)
class PropertyReport:
    property: str
    statistic: float
    window: Tuple[int, int]
    verdict: Verdict
    witness: Optional[Tuple[float, float]] = None
    note: str = ""


@dataclass(frozen=True)
class ComparisonReport:
    """forward: ws1 ≼ ws2, backward: ws2 ≼ ws1."""
    forward: PropertyReport
    backward: PropertyReport
    equivalent: Verdict


# Condition (b)
@dataclass(frozen=True)
class LuskyCertificate:
    sequence: str
    horizon: int
    a: Tuple[int, ...]
    logb: float
    logK: float
    rows: Tuple[Tuple[float, float], ...]

    @property
    def gaps(self) -> Tuple[int, ...]:
        return tuple(int(y - x) for x, y in zip(self.a, self.a[1:]))


@dataclass(frozen=True)
class FailureCandidate:
    gap: int
    logA: Optional[float]
    logB: Optional[float]
    violation: Violation


@dataclass(frozen=True)
class FailureTrace:
    sequence: str
    stuck_j: int
    stuck_a: int
    a: Tuple[int, ...]
    candidates: Tuple[FailureCandidate, ...]
    best: Optional[FailureCandidate] = None


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    rows: Tuple[Tuple[float, float], ...]
    first_failure: Optional[int]
    max_gap: int
    solid: bool
    stale_rows: Tuple[int, ...] = ()


@dataclass(frozen=True)
class NecessaryReport:
    ok: bool
    min_gap: int
    partial_sums: Tuple[float, ...]
    slope: float
    trend: str  # "divergent" | "convergent" | "rejected"
    note: str = ""


# Hulls and cores
@dataclass(frozen=True, eq=False)
class CoefficientPrefix:
    """log|b_l| for l = 0..N; -inf encodes b_l = 0."""
    logabs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "logabs", _frozen_array(self.logabs))

    @property
    def length(self) -> int:
        return int(self.logabs.shape[0])


@dataclass(frozen=True)
class BlockRow:
    j: int
    a_j: int
    a_j1: int
    log_hull: float
    log_core: float


@dataclass(frozen=True)
class BlockReport:
    rows: Tuple[BlockRow, ...]
    sup_hull: float
    sup_core: float
    slope_hull: float
    slope_core: float
    hull_bounded: Verdict
    core_bounded: Verdict


@dataclass(frozen=True)
class DiskMaxRow:
    p: int
    k_p: float
    logr: float
    logv: float
