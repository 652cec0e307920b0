"""
Regularity condition (b): the block expressions A_M(k, l), B_M(k, l) in quotient and
increment form, greedy search and verification of Lusky numbers, the admissibility
tests and the construction of a sequence realizing a prescribed chain.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import (
    CertificateMismatchError,
    GridBoundaryError,
    HorizonExceededError,
    ParameterError,
    RapidDecayError,
)
from app.models import (
    CertificateCheck,
    DeltaSeq,
    FailureCandidate,
    FailureTrace,
    LuskyCertificate,
    NecessaryReport,
    Violation,
    WeightSequence,
)
from app.services.sequences import from_deltas, interpolate

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def check_pair(horizon: int, k: int, l: int) -> Tuple[int, int]:
    if int(k) != k or int(l) != l:
        raise ParameterError(f"k and l must be integers, got k={k}, l={l}")
    k, l = int(k), int(l)
    if k < 1 or k >= l:
        raise ParameterError(f"need 1 <= k < l, got k={k}, l={l}")
    if l + 1 > horizon:
        raise HorizonExceededError(f"A(k, l) needs mu_{l + 1} but the horizon is {horizon}")
    return k, l


def log_ab(ws: WeightSequence, k: int, l: int) -> Tuple[float, float]:
    """
    logA = (l-k) λ_{l+1} - Σ_{i=k+1}^{l} λ_i,  logB = Σ_{i=k+1}^{l} λ_i - (l-k) λ_{k+1}.

    Both sums are taken over differences against the anchor quotient, which keeps long
    horizons free of cancellation in log M.
    """
    k, l = check_pair(ws.horizon, k, l)
    block = ws.lam[k:l]
    log_a = float(np.sum(ws.lam[l] - block))
    log_b = float(np.sum(block - ws.lam[k]))
    return log_a, log_b


def log_ab_delta(ds: DeltaSeq, k: int, l: int) -> Tuple[float, float]:
    """
    logA = (l-k) δ_{l+1} + Σ_{i=1}^{l-k-1} i δ_{k+1+i},
    logB = (l-k) Σ_{i=k+2}^{l} δ_i - Σ_{i=1}^{l-k-1} i δ_{k+1+i}.
    """
    k, l = check_pair(ds.horizon, k, l)
    inner = ds.delta[k + 1:l]  # δ_{k+2}..δ_l
    weighted = float(np.dot(np.arange(1, l - k, dtype=float), inner))
    log_a = (l - k) * float(ds.delta[l]) + weighted
    log_b = (l - k) * float(np.sum(inner)) - weighted
    return log_a, log_b


def qgevrey_ab(q: float, delta: int) -> Tuple[float, float]:
    """Closed form for M_p = q^{p^2}: (Δ(Δ+1) ln q, Δ(Δ-1) ln q), independent of k."""
    return delta * (delta + 1) * math.log(q), delta * (delta - 1) * math.log(q)


class ABOracle:
    """
    (k, l) -> (logA, logB) bound to one named sequence, so certificates can be checked
    against the sequence they were issued for.
    """

    def __init__(self, name: str, horizon: Optional[int], evaluate: Callable[[int, int], Tuple[float, float]]):
        self.name = name
        self.horizon = horizon
        self._evaluate = evaluate

    def __call__(self, k: int, l: int) -> Tuple[float, float]:
        return self._evaluate(k, l)

    @classmethod
    def entire(cls, ws: WeightSequence) -> "ABOracle":
        return cls(ws.name, ws.horizon, lambda k, l: log_ab(ws, k, l))

    def __repr__(self):
        return f"ABOracle(name={self.name!r}, horizon={self.horizon})"


def _classify(log_a: float, log_b: float, logb: float, logK: float) -> Optional[Violation]:
    lo = logb - settings.EXACT_TOL * max(1.0, abs(logb))
    hi = logK + settings.EXACT_TOL * max(1.0, abs(logK))
    if log_a < lo:
        return Violation.A_LOW
    if log_a > hi:
        return Violation.A_HIGH
    if log_b < lo:
        return Violation.B_LOW
    if log_b > hi:
        return Violation.B_HIGH
    return None


def _band_distance(c: FailureCandidate, logb: float, logK: float) -> float:
    if c.logA is None or c.logB is None:
        return math.inf
    return max(0.0, logb - min(c.logA, c.logB), max(c.logA, c.logB) - logK)


def search_lusky(
    oracle: ABOracle,
    horizon: int,
    logb: float,
    logK: float,
    a1: int = 1,
    gap_max: Optional[int] = None,
):
    """
    Greedy chain: from a_j take the smallest gap g in 2..gap_max with both logA and logB
    in [logb, logK]. Stops with a certificate once the next anchor a_{j+1} + 1 would pass
    the horizon; a dead end returns a FailureTrace (no backtracking).
    """
    gap_max = settings.GAP_MAX if gap_max is None else int(gap_max)
    if not logb > LN2:
        raise ParameterError(f"logb must exceed ln 2 (b > 2), got {logb}")
    if logK < logb:
        raise ParameterError(f"logK must be >= logb, got logK={logK}, logb={logb}")
    if int(a1) != a1 or a1 < 1:
        raise ParameterError(f"a1 must be a positive integer, got {a1}")
    if gap_max < 2:
        raise ParameterError(f"gap_max must be >= 2, got {gap_max}")
    if oracle.horizon is not None and horizon > oracle.horizon:
        raise HorizonExceededError(f"search horizon {horizon} exceeds the horizon {oracle.horizon} of {oracle.name}")

    a: List[int] = [int(a1)]
    rows: List[Tuple[float, float]] = []
    while a[-1] + 3 <= horizon:
        k = a[-1]
        candidates: List[FailureCandidate] = []
        accepted = None
        for gap in range(2, gap_max + 1):
            l = k + gap
            if l + 1 > horizon:
                candidates.append(FailureCandidate(gap=gap, logA=None, logB=None, violation=Violation.HORIZON))
                continue
            try:
                log_a, log_b = oracle(k, l)
            except (HorizonExceededError, GridBoundaryError, RapidDecayError) as e:
                logger.debug("search %s: (%d, %d) not evaluable: %s", oracle.name, k, l, e)
                candidates.append(FailureCandidate(gap=gap, logA=None, logB=None, violation=Violation.HORIZON))
                continue
            violation = _classify(log_a, log_b, logb, logK)
            if violation is None:
                accepted = (l, log_a, log_b)
                break
            candidates.append(FailureCandidate(gap=gap, logA=log_a, logB=log_b, violation=violation))

        if accepted is not None:
            a.append(accepted[0])
            rows.append((accepted[1], accepted[2]))
            continue
        if any(c.violation == Violation.HORIZON for c in candidates):
            logger.warning(
                "search %s: chain truncated by the horizon at a_%d = %d (%d blocks certified)",
                oracle.name, len(a), k, len(rows),
            )
            break
        best = min(candidates, key=lambda c: _band_distance(c, logb, logK)) if candidates else None
        logger.info("search %s: dead end at a_%d = %d", oracle.name, len(a), k)
        return FailureTrace(
            sequence=oracle.name,
            stuck_j=len(a),
            stuck_a=k,
            a=tuple(a),
            candidates=tuple(candidates),
            best=best,
        )

    logger.debug("search %s: certificate with %d blocks", oracle.name, len(rows))
    return LuskyCertificate(
        sequence=oracle.name,
        horizon=int(horizon),
        a=tuple(a),
        logb=float(logb),
        logK=float(logK),
        rows=tuple(rows),
    )


def _gaps_bounded(gaps: Sequence[int]) -> bool:
    """No growth of the gaps over the last third of the chain."""
    cut = (2 * len(gaps)) // 3
    if cut == 0:
        return True
    return max(gaps[cut:]) <= max(gaps[:cut])


def _same_value(stored: float, fresh: float) -> bool:
    if math.isnan(fresh):
        return math.isnan(stored)
    tol = settings.EXACT_TOL
    return math.isclose(stored, fresh, rel_tol=tol, abs_tol=tol)


def verify_certificate(oracle: ABOracle, cert: LuskyCertificate) -> CertificateCheck:
    """
    Re-evaluate every row of the chain. Rows stored in the certificate must match the
    recomputed ones; a stale row counts as a failure at its index.
    """
    if not cert.logb > LN2:
        raise ParameterError(f"certificate logb must exceed ln 2 (b > 2), got {cert.logb}")
    if cert.sequence != oracle.name:
        raise CertificateMismatchError(
            f"certificate refers to {cert.sequence!r} but the oracle evaluates {oracle.name!r}"
        )
    if oracle.horizon is not None and cert.a and cert.a[-1] + 1 > oracle.horizon:
        raise HorizonExceededError(
            f"certificate needs mu_{cert.a[-1] + 1} but {oracle.name} stops at {oracle.horizon}"
        )
    rows: List[Tuple[float, float]] = []
    first_failure = None
    for j, (k, l) in enumerate(zip(cert.a, cert.a[1:]), start=1):
        if l - k < 2:
            rows.append((math.nan, math.nan))
            if first_failure is None:
                first_failure = j
            continue
        log_a, log_b = oracle(k, l)
        rows.append((log_a, log_b))
        if first_failure is None and _classify(log_a, log_b, cert.logb, cert.logK) is not None:
            first_failure = j
    stale: List[int] = []
    if cert.rows:
        if len(cert.rows) != len(rows):
            raise CertificateMismatchError(
                f"certificate stores {len(cert.rows)} rows but its chain has {len(rows)} blocks"
            )
        stale = [
            j
            for j, ((sa, sb), (ra, rb)) in enumerate(zip(cert.rows, rows), start=1)
            if not (_same_value(sa, ra) and _same_value(sb, rb))
        ]
        if stale:
            logger.warning("certificate for %s: stored rows %s differ from the recomputed values", cert.sequence, stale)
            first_failure = min(stale[0], first_failure) if first_failure is not None else stale[0]
    gaps = list(cert.gaps)
    max_gap = max(gaps) if gaps else 0
    if first_failure is not None:
        logger.info("certificate for %s fails at row %d", cert.sequence, first_failure)
    return CertificateCheck(
        ok=first_failure is None,
        rows=tuple(rows),
        first_failure=first_failure,
        max_gap=max_gap,
        solid=_gaps_bounded(gaps),
        stale_rows=tuple(stale),
    )


def certificate_for_chain(oracle: ABOracle, a: Sequence[int], logb: float, logK: float) -> LuskyCertificate:
    """Certificate for a prescribed chain, rows evaluated by the oracle; pass it to verify_certificate."""
    a = [int(x) for x in a]
    if len(a) < 2:
        raise ParameterError("chain needs at least two entries")
    rows = tuple(oracle(k, l) if l - k >= 2 else (math.nan, math.nan) for k, l in zip(a, a[1:]))
    return LuskyCertificate(
        sequence=oracle.name,
        horizon=oracle.horizon if oracle.horizon is not None else a[-1] + 1,
        a=tuple(a),
        logb=float(logb),
        logK=float(logK),
        rows=rows,
    )


def forward_shift(cert: LuskyCertificate, s: int) -> LuskyCertificate:
    """Drop the first s entries of the chain; the tail is again a certificate."""
    if s < 0 or s >= len(cert.a):
        raise ParameterError(f"shift must lie in [0, {len(cert.a) - 1}], got {s}")
    return LuskyCertificate(
        sequence=cert.sequence,
        horizon=cert.horizon,
        a=cert.a[s:],
        logb=cert.logb,
        logK=cert.logK,
        rows=cert.rows[s:],
    )


def necessary_check(a: Sequence[int]) -> NecessaryReport:
    """
    Gaps must be >= 2 and Σ 1/(a_{j+1} - a_j) must diverge. Divergence is judged by the
    slope of the partial sums against log of the count over the second half of the chain.
    """
    a = [int(x) for x in a]
    if len(a) < 2:
        raise ParameterError("chain needs at least two entries")
    gaps = np.diff(np.asarray(a))
    if np.any(gaps <= 0):
        raise ParameterError(f"chain must be strictly increasing (violated at j={int(np.argmax(gaps <= 0)) + 1})")
    partial = np.cumsum(1.0 / gaps)
    min_gap = int(np.min(gaps))
    if min_gap < 2:
        j = int(np.argmax(gaps < 2)) + 1
        return NecessaryReport(
            ok=False,
            min_gap=min_gap,
            partial_sums=tuple(float(x) for x in partial),
            slope=math.nan,
            trend="rejected",
            note=f"gap a_{j + 1} - a_{j} = {int(gaps[j - 1])} < 2",
        )
    n = np.arange(1, partial.shape[0] + 1, dtype=float)
    half = partial.shape[0] // 2
    if partial.shape[0] - half < 2:
        return NecessaryReport(
            ok=True,
            min_gap=min_gap,
            partial_sums=tuple(float(x) for x in partial),
            slope=math.nan,
            trend="inconclusive",
            note="too few gaps to judge the reciprocal-gap series",
        )
    slope = float(np.polyfit(np.log(n[half:]), partial[half:], 1)[0])
    divergent = slope >= 0.5
    return NecessaryReport(
        ok=divergent,
        min_gap=min_gap,
        partial_sums=tuple(float(x) for x in partial),
        slope=slope,
        trend="divergent" if divergent else "convergent",
    )


def chain_subsample(a: Sequence[int], indices: Sequence[int]) -> List[int]:
    """(a_{i})_{i in indices}, 1-based."""
    if any(i < 1 or i > len(a) for i in indices):
        raise ParameterError(f"subsample indices must lie in [1, {len(a)}]")
    return [int(a[i - 1]) for i in indices]


def qgevrey_chain(c: int, count: int, a1: int = 1) -> List[int]:
    """a_j = c (j - 1) + a1."""
    return [c * (j - 1) + a1 for j in range(1, count + 1)]


def harmonic_chain(c: int, shift: int, j_from: int, j_to: int) -> List[int]:
    """a_j = c (j + shift)^2 for j_from <= j <= j_to."""
    return [c * (j + shift) ** 2 for j in range(j_from, j_to + 1)]


def build_from_lusky(a: Sequence[int], C: float, horizon: int) -> WeightSequence:
    """
    Two-spike increments per block: δ_{a_j+2} = δ_{a_{j+1}+1} = C/(a_{j+1} - a_j + 1), zero
    elsewhere. Gives logA = C and logB = (g-1) C/(g+1) on every block.
    """
    if not C >= 3:
        raise ParameterError(f"C must be >= 3, got {C}")
    a = [int(x) for x in a]
    if len(a) < 2:
        raise ParameterError("chain needs at least two entries")
    for j, (x, y) in enumerate(zip(a, a[1:]), start=1):
        if y - x < 2:
            raise ParameterError(f"gap a_{j + 1} - a_{j} = {y - x} < 2")
    if a[0] < 1:
        raise ParameterError(f"a_1 must be >= 1, got {a[0]}")
    if horizon < a[-1] + 2:
        raise HorizonExceededError(f"horizon {horizon} must be at least a_J + 2 = {a[-1] + 2}")
    delta = np.zeros(int(horizon))
    for x, y in zip(a, a[1:]):
        d = C / (y - x + 1)
        delta[x + 1] = d  # δ_{a_j+2}
        delta[y] = d      # δ_{a_{j+1}+1}
    return from_deltas(DeltaSeq(delta=delta), name=f"ajexample:C={C:g}")


def uniform_delta_sufficient(d1: float, d2: float, C1: float, C2: float) -> bool:
    """Sufficient condition for (b) when d1 <= δ_p <= d2 and gaps lie in [C1, C2]."""
    if not (0 <= d1 <= d2):
        raise ParameterError(f"need 0 <= d1 <= d2, got d1={d1}, d2={d2}")
    if not (2 <= C1 <= C2):
        raise ParameterError(f"need 2 <= C1 <= C2, got C1={C1}, C2={C2}")
    first = 2 <= d1 * C1 * (1 + C1)
    second = 1 + d2 * C2 * (C2 - 1) / 2 <= d1 * C1 * (C1 - 1)
    return bool(first and second)


def stretch_check(ws: WeightSequence, r: int, cert: LuskyCertificate) -> bool:
    """The chain (r a_j) certifies P^{M,r} with the same A, B values."""
    if cert.sequence != ws.name:
        raise CertificateMismatchError(f"certificate refers to {cert.sequence!r}, not {ws.name!r}")
    if cert.a[-1] + 1 > ws.horizon:
        raise HorizonExceededError(f"certificate needs mu_{cert.a[-1] + 1} but {ws.name} stops at {ws.horizon}")
    stretched = interpolate(ws, r)
    for k, l in zip(cert.a, cert.a[1:]):
        base = log_ab(ws, k, l)
        other = log_ab(stretched, r * k, r * l)
        for x, y in zip(base, other):
            if abs(x - y) > settings.EXACT_TOL * max(1.0, abs(x)):
                logger.info("stretch r=%d breaks at (%d, %d): %r vs %r", r, k, l, base, other)
                return False
    return True
