"""
Solid hull and solid core statistics of coefficient sequences against a certified pair
(weight sequence, Lusky numbers), entire case.

Every block (a_j, a_{j+1}] contributes

    log prefactor_j + ½ logsumexp(2 (log|b_l| + l ρ_j))     (hull, ℓ² per block)
    log prefactor_j +   logsumexp(   log|b_l| + l ρ_j )     (core, ℓ¹ per block)

with prefactor_j = M_m / μ_m^m and ρ_j = log(μ_m / c) at the anchor m = a_j + 1.
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, List, Optional

import numpy as np
from scipy.special import logsumexp

from app.config import settings
from app.exceptions import CertificateMismatchError, ParameterError
from app.models import BlockReport, BlockRow, CoefficientPrefix, LuskyCertificate, Verdict, WeightSequence
from app.services.assoc_weight import omega_log
from app.services.condition_b import ABOracle, verify_certificate

logger = logging.getLogger(__name__)


def log_c(c: float) -> float:
    if not c > 0 or not math.isfinite(c):
        raise ParameterError(f"c must be a positive real, got {c}")
    return math.log(c)


def require_verified(oracle: ABOracle, cert: LuskyCertificate) -> None:
    check = verify_certificate(oracle, cert)
    if check.stale_rows:
        raise CertificateMismatchError(
            f"certificate for {cert.sequence!r} stores rows {list(check.stale_rows)} that differ from the recomputed values"
        )
    if not check.ok:
        raise CertificateMismatchError(
            f"certificate for {cert.sequence!r} is not verified: block {check.first_failure} "
            f"leaves [b, K] = [exp({cert.logb!r}), exp({cert.logK!r})]"
        )


def reweight(coeffs: CoefficientPrefix, c_from: float, c_to: float) -> CoefficientPrefix:
    """b_l -> (c_to / c_from)^l b_l, the map carrying the c_from statistics to c_to."""
    shift = log_c(c_to) - log_c(c_from)
    l = np.arange(coeffs.length, dtype=float)
    return CoefficientPrefix(logabs=coeffs.logabs + l * shift)


def _tail_verdict(js: np.ndarray, stats: np.ndarray):
    """(slope, verdict) of the statistic against j over the last third of the finite rows."""
    finite = np.isfinite(stats)
    if not np.any(finite):
        return 0.0, Verdict.HOLDS
    js, stats = js[finite], stats[finite]
    n = stats.shape[0]
    if n < 2:
        return math.nan, Verdict.INCONCLUSIVE
    start = n - max(2, n // 3)
    slope = float(np.polyfit(js[start:], stats[start:], 1)[0])
    return slope, Verdict.HOLDS if slope < settings.TAIL_SLOPE_THRESHOLD else Verdict.FAILS


def evaluate_blocks(
    ws: WeightSequence,
    cert: LuskyCertificate,
    coeffs: CoefficientPrefix,
    log_radius: Callable[[int], float],
    forward_shift: bool = False,
) -> BlockReport:
    """
    Block statistics for every block covered by the coefficient prefix. log_radius(m) gives
    ρ at the anchor m; forward_shift moves the anchor to a_{j+1} + 1.
    """
    a = cert.a
    if len(a) < 2:
        raise ParameterError("certificate has no block")
    N = coeffs.length - 1
    need = a[min(2, len(a) - 1)]
    if N < need:
        raise ParameterError(
            f"coefficient prefix ends at l = {N} but the first blocks need coefficients up to l = {need}"
        )
    rows: List[BlockRow] = []
    for j, (x, y) in enumerate(zip(a, a[1:]), start=1):
        if y > N:
            break
        m = (y if forward_shift else x) + 1
        prefactor = float(ws.logM[m] - m * ws.lam[m - 1])
        l = np.arange(x + 1, y + 1)
        terms = coeffs.logabs[l]
        keep = np.isfinite(terms)
        if not np.any(keep):
            rows.append(BlockRow(j=j, a_j=x, a_j1=y, log_hull=-math.inf, log_core=-math.inf))
            continue
        vals = terms[keep] + l[keep] * log_radius(m)
        log_hull = prefactor + 0.5 * float(logsumexp(2.0 * vals))
        log_core = prefactor + float(logsumexp(vals))
        rows.append(BlockRow(j=j, a_j=x, a_j1=y, log_hull=log_hull, log_core=log_core))

    js = np.array([r.j for r in rows], dtype=float)
    hull = np.array([r.log_hull for r in rows])
    core = np.array([r.log_core for r in rows])
    slope_hull, hull_bounded = _tail_verdict(js, hull)
    slope_core, core_bounded = _tail_verdict(js, core)
    logger.debug("%s: %d blocks evaluated (prefix N = %d)", cert.sequence, len(rows), N)
    return BlockReport(
        rows=tuple(rows),
        sup_hull=float(np.max(hull)),
        sup_core=float(np.max(core)),
        slope_hull=slope_hull,
        slope_core=slope_core,
        hull_bounded=hull_bounded,
        core_bounded=core_bounded,
    )


def block_stats(
    ws: WeightSequence,
    cert: LuskyCertificate,
    c: float,
    coeffs: CoefficientPrefix,
    forward_shift: bool = False,
    oracle: Optional[ABOracle] = None,
) -> BlockReport:
    logc = log_c(c)
    require_verified(oracle or ABOracle.entire(ws), cert)
    return evaluate_blocks(ws, cert, coeffs, lambda m: float(ws.lam[m - 1]) - logc, forward_shift)


def core_sup_grid(ws: WeightSequence, c: float, coeffs: CoefficientPrefix, logr_grid: Iterable[float]) -> float:
    """max over the grid of log(v_{M,c}(r) Σ_j |b_j| r^j), with v_{M,c}(r) = exp(-ω_M(c r))."""
    logc = log_c(c)
    x = np.asarray(list(logr_grid), dtype=float)
    if x.size == 0:
        raise ParameterError("logr grid is empty")
    j = np.flatnonzero(np.isfinite(coeffs.logabs))
    if j.size == 0:
        return -math.inf
    series = logsumexp(coeffs.logabs[j][None, :] + np.outer(x, j), axis=1)
    return float(np.max(series - omega_log(ws, x + logc)))


def coeff_class_bound(ws: WeightSequence, c: float, coeffs: CoefficientPrefix) -> float:
    """log of the smallest D with |b_j| <= D c^j / M_j for j <= min(N, P)."""
    logc = log_c(c)
    top = min(coeffs.length - 1, ws.horizon)
    j = np.arange(top + 1)
    return float(np.max(coeffs.logabs[: top + 1] + ws.logM[: top + 1] - j * logc))
