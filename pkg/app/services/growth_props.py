"""
Growth and regularity conditions of weight sequences on a finite horizon:
normalization, log-convexity, (slc), (dc), (mg), (β₁), (β₃), (γ₁), the order ≼ and
the (omega6) inequality for ω_M.

Asymptotic conditions cannot be decided from a prefix; each report carries the statistic,
the index window it was computed on and a verdict "at horizon".
"""
from __future__ import annotations

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import ParameterError
from app.models import ComparisonReport, PropertyReport, Verdict, WeightSequence
from app.services.assoc_weight import omega_log

logger = logging.getLogger(__name__)

DEFAULT_H_CANDIDATES = (1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0, 32.0, 64.0)


def _bounded_trend(values: np.ndarray, first_index: int = 1) -> Tuple[Verdict, int, float]:
    """
    "Bounded on the horizon": the running max is reached before the last decile, up to
    BOUNDED_SLACK nats. Returns (verdict, index of the max, max).
    """
    n = values.shape[0]
    i_max = int(np.argmax(values))
    top = float(values[i_max])
    cut = max(1, int(math.floor(0.9 * n)))
    if cut >= n:
        return Verdict.INCONCLUSIVE, first_index + i_max, top
    early = float(np.max(values[:cut]))
    verdict = Verdict.HOLDS if top <= early + settings.BOUNDED_SLACK else Verdict.FAILS
    return verdict, first_index + i_max, top


def _monotone(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) >= 0.0))


def structural_checks(ws: WeightSequence) -> List[PropertyReport]:
    P = ws.horizon
    lam = ws.lam
    p = np.arange(1, P + 1, dtype=float)
    reports = []

    reports.append(
        PropertyReport(
            property="normalized",
            statistic=float(lam[0]),
            window=(1, 1),
            verdict=Verdict.HOLDS if lam[0] >= 0.0 else Verdict.FAILS,
            witness=None if lam[0] >= 0.0 else (1.0, float(lam[0])),
        )
    )

    steps = np.diff(lam)
    if np.all(steps >= 0.0):
        reports.append(PropertyReport("log-convex", float(np.min(steps)) if steps.size else 0.0, (1, P), Verdict.HOLDS))
    else:
        i = int(np.argmax(steps < 0.0))
        reports.append(
            PropertyReport("log-convex", float(steps[i]), (1, P), Verdict.FAILS, witness=(float(i + 2), float(lam[i + 1])))
        )

    strong = lam - np.log(p)
    strong_steps = np.diff(strong)
    tol = settings.EXACT_TOL * max(1.0, float(np.max(np.abs(strong))))
    if np.all(strong_steps >= -tol):
        reports.append(PropertyReport("slc", float(np.min(strong_steps)) if strong_steps.size else 0.0, (1, P), Verdict.HOLDS))
    else:
        i = int(np.argmax(strong_steps < -tol))
        reports.append(
            PropertyReport("slc", float(strong_steps[i]), (1, P), Verdict.FAILS, witness=(float(i + 2), float(strong[i + 1])))
        )

    per_index = lam / p
    verdict, idx, top = _bounded_trend(per_index)
    reports.append(
        PropertyReport(
            property="dc",
            statistic=top,
            window=(1, P),
            verdict=verdict,
            witness=(float(idx), top) if verdict == Verdict.FAILS else None,
            note="statistic max lambda_p/p; ln D >= statistic on the horizon",
        )
    )

    growth = ws.logM[1:] / p
    limit_verdict = Verdict.HOLDS if growth[-1] > growth[0] and _monotone(growth[P // 2:]) else Verdict.INCONCLUSIVE
    reports.append(
        PropertyReport(
            property="lc-limit",
            statistic=float(growth[-1]),
            window=(1, P),
            verdict=limit_verdict,
            note="log M_p / p increasing on the horizon",
        )
    )
    return reports


def _liminf_report(name: str, sums: np.ndarray, window: Tuple[int, int], threshold: float) -> PropertyReport:
    """min over the tail window compared with threshold, inconclusive near it for a non-monotone tail."""
    i_min = int(np.argmin(sums))
    stat = float(sums[i_min])
    band = settings.INCONCLUSIVE_BAND * max(abs(threshold), 1.0)
    if stat > threshold:
        verdict = Verdict.HOLDS
    else:
        verdict = Verdict.FAILS
    if abs(stat - threshold) <= band and not _monotone(sums):
        verdict = Verdict.INCONCLUSIVE
    witness = (float(window[0] + i_min), stat) if verdict == Verdict.FAILS else None
    return PropertyReport(
        property=name,
        statistic=stat,
        window=window,
        verdict=verdict,
        witness=witness,
        note=f"liminf of sum_(p<l<=Qp) delta_l against {threshold:.17g}",
    )


def asymptotic_stats(ws: WeightSequence, Q: int = 2, tail_fraction: Optional[float] = None) -> List[PropertyReport]:
    tail_fraction = settings.TAIL_FRACTION if tail_fraction is None else tail_fraction
    if int(Q) != Q or Q < 2:
        raise ParameterError(f"Q must be an integer >= 2, got {Q}")
    if not 0 < tail_fraction <= 1:
        raise ParameterError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    P = ws.horizon
    Q = int(Q)
    lam = ws.lam
    reports = []

    # (mg): Σ_{l=p+1}^{2p} δ_l = λ_{2p} - λ_p on p = 1..P/2
    half = P // 2
    if half < 1:
        raise ParameterError(f"horizon {P} too small for the (mg) window")
    p = np.arange(1, half + 1)
    mg = lam[2 * p - 1] - lam[p - 1]
    verdict, idx, top = _bounded_trend(mg)
    reports.append(
        PropertyReport(
            property="mg",
            statistic=top,
            window=(1, half),
            verdict=verdict,
            witness=(float(idx), top) if verdict == Verdict.FAILS else None,
            note="max of lambda_2p - lambda_p; ln C >= statistic on the horizon",
        )
    )

    # (β₁), (β₃): liminf of λ_{Qp} - λ_p over the tail of p = 1..P/Q
    top_p = P // Q
    if top_p < 1:
        raise ParameterError(f"window empty: horizon {P} < Q = {Q}")
    start = max(1, int(math.floor((1.0 - tail_fraction) * top_p)) + 1)
    p = np.arange(start, top_p + 1)
    sums = lam[Q * p - 1] - lam[p - 1]
    reports.append(_liminf_report("beta1", sums, (start, top_p), math.log(Q)))
    reports.append(_liminf_report("beta3", sums, (start, top_p), 0.0))

    # (γ₁): (μ_j / j) Σ_{k=j}^{P} 1/μ_k on j = 1..P/2, series truncated at P
    j = np.arange(1, half + 1)
    tail_sums = np.logaddexp.accumulate((-lam)[::-1])[::-1]
    log_stat = lam[j - 1] - np.log(j) + tail_sums[j - 1]
    stat = np.exp(log_stat)
    verdict, idx, top = _bounded_trend(stat)
    # discarded tail Σ_{k>P} 1/μ_k is bounded by (P - j + 1)/μ_P at j = 1
    error_bar = float(np.exp(math.log(P) - lam[-1]))
    if error_bar > settings.BOUNDED_SLACK:
        logger.warning("%s: (gamma1) truncation error bar %.3g exceeds slack", ws.name, error_bar)
    reports.append(
        PropertyReport(
            property="gamma1",
            statistic=top,
            window=(1, half),
            verdict=verdict,
            witness=(float(idx), top) if verdict == Verdict.FAILS else None,
            note=f"series truncated at P; error bar {error_bar:.3g}",
        )
    )
    return reports


def _relation(ws1: WeightSequence, ws2: WeightSequence) -> PropertyReport:
    P = ws1.horizon
    j = np.arange(1, P + 1, dtype=float)
    stat = (ws1.logM[1:] - ws2.logM[1:]) / j
    verdict, idx, top = _bounded_trend(stat)
    return PropertyReport(
        property=f"{ws1.name} <= {ws2.name}",
        statistic=top,
        window=(1, P),
        verdict=verdict,
        witness=(float(idx), top) if verdict == Verdict.FAILS else None,
        note=f"tail trend {float(stat[-1] - stat[int(0.9 * (P - 1))]):.6g}",
    )


def compare_sequences(ws1: WeightSequence, ws2: WeightSequence) -> ComparisonReport:
    """forward: sup_j (M1_j / M2_j)^{1/j} bounded; backward: the converse."""
    if ws1.horizon != ws2.horizon:
        raise ParameterError(f"horizon mismatch: {ws1.horizon} vs {ws2.horizon}")
    forward = _relation(ws1, ws2)
    backward = _relation(ws2, ws1)
    if forward.verdict == Verdict.HOLDS and backward.verdict == Verdict.HOLDS:
        equivalent = Verdict.HOLDS
    elif Verdict.FAILS in (forward.verdict, backward.verdict):
        equivalent = Verdict.FAILS
    else:
        equivalent = Verdict.INCONCLUSIVE
    return ComparisonReport(forward=forward, backward=backward, equivalent=equivalent)


def omega6_check(
    ws: WeightSequence,
    H_candidates: Sequence[float] = DEFAULT_H_CANDIDATES,
    logt_samples: Optional[Iterable[float]] = None,
) -> PropertyReport:
    """Smallest H among the candidates with 2ω(t) <= ω(Ht) + H at every sample ln t."""
    candidates = sorted(float(h) for h in H_candidates)
    if not candidates or candidates[0] < 1:
        raise ParameterError("H candidates must be non-empty and >= 1")
    if logt_samples is None:
        top = float(ws.lam[-1]) - math.log(candidates[-1])
        logt = np.linspace(0.0, max(top, 0.0), 200)
    else:
        logt = np.asarray(list(logt_samples), dtype=float)
    omega = omega_log(ws, logt)
    failure = None
    for H in candidates:
        lhs = 2.0 * omega
        rhs = omega_log(ws, logt + math.log(H)) + H
        bad = np.flatnonzero(lhs > rhs + settings.EXACT_TOL * np.maximum(1.0, np.abs(rhs)))
        if bad.size == 0:
            return PropertyReport(
                property="omega6",
                statistic=H,
                window=(0, int(logt.shape[0])),
                verdict=Verdict.HOLDS,
                note="smallest candidate H",
            )
        i = int(bad[-1])
        failure = (float(logt[i]), float(lhs[i] - rhs[i]))
    return PropertyReport(
        property="omega6",
        statistic=math.inf,
        window=(0, int(logt.shape[0])),
        verdict=Verdict.FAILS,
        witness=failure,
        note=f"no candidate up to H = {candidates[-1]:g} works; witness is (ln t, excess) for the largest H",
    )


def property_table(ws: WeightSequence, Q: int = 2, tail_fraction: Optional[float] = None) -> Dict[str, PropertyReport]:
    """structural and asymptotic reports keyed by property name."""
    reports = structural_checks(ws) + asymptotic_stats(ws, Q, tail_fraction)
    return {r.property: r for r in reports}
