"""
Unit-disk case: weights v_{M,D^c}(r) = exp(-ω_M(1/(1 - c r))) on 0 <= r < 1/c.

The maximizer of r^k v(r) lands on the kink (1 - 1/μ_{p+1})/c exactly at the anchors
k_p = p(μ_{p+1} - 1); the disk A/B expressions are evaluated there.
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.exceptions import (
    DegenerateQuotientError,
    HorizonExceededError,
    InconsistencyError,
    NotLogConvexError,
    ParameterError,
)
from app.models import BlockReport, CoefficientPrefix, DiskMaxRow, LuskyCertificate, WeightSequence
from app.services.assoc_weight import omega_log
from app.services.condition_b import ABOracle, check_pair
from app.services.hull_core import evaluate_blocks, log_c, require_verified

logger = logging.getLogger(__name__)

DISK_SUFFIX = "@disk"


def _require_disk(ws: WeightSequence) -> None:
    if not (ws.is_log_convex and ws.is_normalized):
        raise NotLogConvexError(f"{ws.name}: the disk weight needs a normalized log-convex sequence")
    if ws.horizon < 2 or not ws.lam[1] > 0.0:
        raise DegenerateQuotientError(f"{ws.name}: the disk weight needs mu_2 > 1")


def _log_one_minus_inverse(lam: float) -> float:
    """log(1 - 1/μ) from λ = log μ, without forming μ."""
    if not lam > 0.0:
        raise DegenerateQuotientError(f"quotient mu = exp({lam!r}) must exceed 1 (k_p would vanish)")
    if lam < math.log(2.0):
        return math.log(-math.expm1(-lam))
    return math.log1p(-math.exp(-lam))


def _log_mu_minus_one(lam: float) -> float:
    return lam + _log_one_minus_inverse(lam)


def _anchor(p: int, lam: float) -> float:
    """k_p = p (μ_{p+1} - 1) from λ_{p+1}."""
    log_k = math.log(p) + _log_mu_minus_one(lam)
    if log_k > settings.OVERFLOW_LOG:
        raise ParameterError(f"k_{p} = exp({log_k!r}) overflows double precision")
    return math.exp(log_k)


def disk_geometry(ws: WeightSequence, c: float, p: int) -> DiskMaxRow:
    _require_disk(ws)
    logc = log_c(c)
    if int(p) != p or p < 1:
        raise ParameterError(f"p must be a positive integer, got {p}")
    p = int(p)
    if p + 1 > ws.horizon:
        raise HorizonExceededError(f"disk row p={p} needs mu_{p + 1} but the horizon is {ws.horizon}")
    lam = float(ws.lam[p])
    k_p = _anchor(p, lam)
    logr = _log_one_minus_inverse(lam) - logc
    logv = float(ws.logM[p + 1] - (p + 1) * lam)

    # r = k_p / (c (k_p + p))
    via_s = -math.log1p(p / k_p) - logc
    if abs(via_s - logr) > 1e-12 * max(1.0, abs(logr)):
        raise InconsistencyError(f"disk row p={p}: s_(k_p,p,c) = {via_s!r} but log r = {logr!r}")
    return DiskMaxRow(p=p, k_p=k_p, logr=logr, logv=logv)


def disk_geometry_table(ws: WeightSequence, c: float, p_range: Iterable[int]) -> List[DiskMaxRow]:
    return [disk_geometry(ws, c, p) for p in p_range]


def _log_objective(ws: WeightSequence, k: float, log_r: float, log_t: float) -> float:
    """k ln r - ω_M(t) with t = 1/(1 - c r)."""
    return k * log_r - float(omega_log(ws, log_t))


def disk_maximizer(ws: WeightSequence, c: float, k: float) -> float:
    """
    Maximizer of r^k v_{M,D^c}(r) on (0, 1/c).

    On the piece μ_p <= 1/(1 - c r) < μ_{p+1} the stationary point is s_{k,p,c} = k/(c(k+p)),
    admissible when p(μ_p - 1) <= k <= p(μ_{p+1} - 1); otherwise the maximum sits on a kink
    (1 - 1/μ_p)/c. log r^k v is concave in r, so the best candidate is the maximizer.
    """
    _require_disk(ws)
    logc = log_c(c)
    if not k >= 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    lam = ws.lam
    lam1 = float(lam[0])
    if lam1 > 0.0 and k <= math.expm1(lam1):
        return math.exp(_log_one_minus_inverse(lam1) - logc)
    if k == 0:
        # μ_1 = 1: v is strictly decreasing from r = 0
        return 0.0

    P = ws.horizon
    log_k = math.log(k)
    if log_k > math.log(P - 1) + _log_mu_minus_one(float(lam[-1])):
        raise HorizonExceededError(
            f"k = {k!r} lies beyond k_(P-1) = (P-1)(mu_P - 1); the maximizer needs quotients past the horizon {P}"
        )
    best: Optional[Tuple[float, float]] = None

    def consider(log_r: float, log_t: float) -> None:
        nonlocal best
        value = _log_objective(ws, k, log_r, log_t)
        if best is None or value > best[0]:
            best = (value, log_r)

    for p in range(1, P):
        upper = math.log(p) + _log_mu_minus_one(float(lam[p]))
        lower = math.log(p) + _log_mu_minus_one(float(lam[p - 1])) if lam[p - 1] > 0.0 else -math.inf
        if lower <= log_k <= upper:
            log_t = min(math.log1p(k / p), float(lam[p]))
            consider(-math.log1p(p / k) - logc, log_t)
    for p in range(1, P + 1):
        lp = float(lam[p - 1])
        if lp > 0.0:
            consider(_log_one_minus_inverse(lp) - logc, lp)

    return math.exp(best[1])


def disk_log_ab(ws: WeightSequence, p: int, q: int) -> Tuple[float, float]:
    """
    Closed forms at the anchors k_p, k_q:

      log A_D = k_p [ln(μ_{p+1}-1) - ln(μ_{q+1}-1)] + (k_p + q) λ_{q+1} - (p μ_{p+1} + 1) λ_{p+1} - Σ_{i=p+2}^{q} λ_i
      log B_D = k_q [ln(μ_{q+1}-1) - ln(μ_{p+1}-1)] + (k_q + p + 1) λ_{p+1} + Σ_{i=p+2}^{q} λ_i - q μ_{q+1} λ_{q+1}

    Both are independent of c. The k λ terms cancel against ln(μ - 1) = λ + ln(1 - 1/μ), so the
    anchors only multiply differences of ln(1 - 1/μ).
    """
    _require_disk(ws)
    p, q = check_pair(ws.horizon, p, q)
    lp, lq = float(ws.lam[p]), float(ws.lam[q])
    dp, dq = _log_one_minus_inverse(lp), _log_one_minus_inverse(lq)
    kp, kq = _anchor(p, lp), _anchor(q, lq)
    inner = float(np.sum(ws.lam[p + 1:q]))
    log_a = kp * (dp - dq) + q * lq - (p + 1) * lp - inner
    log_b = kq * (dq - dp) + (p + 1) * lp + inner - q * lq
    return log_a, log_b


def disk_log_ab_direct(ws: WeightSequence, p: int, q: int, c: float = 1.0) -> Tuple[float, float]:
    """k_p (log r_p - log r_q) + log v(r_p) - log v(r_q), and symmetrically for B."""
    p, q = check_pair(ws.horizon, p, q)
    rp = disk_geometry(ws, c, p)
    rq = disk_geometry(ws, c, q)
    log_a = rp.k_p * (rp.logr - rq.logr) + rp.logv - rq.logv
    log_b = rq.k_p * (rq.logr - rp.logr) + rq.logv - rp.logv
    return log_a, log_b


def disk_oracle(ws: WeightSequence) -> ABOracle:
    """(p, q) -> disk (log A_D, log B_D); certificates issued by it are tagged with DISK_SUFFIX."""
    _require_disk(ws)
    return ABOracle(f"{ws.name}{DISK_SUFFIX}", ws.horizon, lambda p, q: disk_log_ab(ws, p, q))


def disk_block_stats(
    ws: WeightSequence,
    cert: LuskyCertificate,
    c: float,
    coeffs: CoefficientPrefix,
    forward_shift: bool = False,
) -> BlockReport:
    """Block statistics with radius (1 - 1/μ_{a_j+1})/c in place of μ_{a_j+1}/c."""
    logc = log_c(c)
    require_verified(disk_oracle(ws), cert)

    def log_radius(m: int) -> float:
        return _log_one_minus_inverse(float(ws.lam[m - 1])) - logc

    return evaluate_blocks(ws, cert, coeffs, log_radius, forward_shift)
