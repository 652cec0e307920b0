"""
Named reproduction scenarios. Each returns a JSON-ready summary with an "ok" flag; the
CLI exits 0 exactly when ok is true.
"""
from __future__ import annotations

import logging
import math
from typing import Any, Callable, Dict, List

import numpy as np

from app.exceptions import RapidDecayError
from app.models import (
    CoefficientPrefix,
    FailureTrace,
    FamilyKind,
    FamilySpec,
    LuskyCertificate,
    Verdict,
    WeightSequence,
)
from app.services.assoc_weight import (
    conjugate_maximizers,
    conjugate_sequence,
    make_grid,
    ramification_check,
    sandwich_check,
    weight_from_sequence,
)
from app.services.condition_b import (
    ABOracle,
    build_from_lusky,
    certificate_for_chain,
    chain_subsample,
    harmonic_chain,
    log_ab,
    necessary_check,
    qgevrey_ab,
    search_lusky,
    stretch_check,
    verify_certificate,
)
from app.services.disk import disk_geometry, disk_log_ab, disk_log_ab_direct, disk_maximizer
from app.services.growth_props import property_table
from app.services.hull_core import block_stats, reweight
from app.services.sequences import dyadic_steps, family, from_log_quotients, geometric_steps, lusky_chain

logger = logging.getLogger(__name__)

SEARCH_LOGB = 1.0
SEARCH_LOGK = 10.0
COUNTEREXAMPLE_HORIZON = 2 ** 12


def _rel(x: float, y: float) -> float:
    return abs(x - y) / max(1.0, abs(y))


def qgevrey_certificate(q: float = 2.0, horizon: int = 500) -> LuskyCertificate:
    ws = family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=horizon, q=q))
    result = search_lusky(ABOracle.entire(ws), horizon, SEARCH_LOGB, SEARCH_LOGK)
    if isinstance(result, FailureTrace):
        raise AssertionError(f"q-Gevrey search failed at a_{result.stuck_j} = {result.stuck_a}")
    return result


def prop_qgevrey() -> Dict[str, Any]:
    worst = 0.0
    for q in (2.0, 3.0):
        ws = family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=200, q=q))
        for delta in range(2, 7):
            expected = qgevrey_ab(q, delta)
            for k in range(1, 51):
                got = log_ab(ws, k, k + delta)
                worst = max(worst, _rel(got[0], expected[0]), _rel(got[1], expected[1]))
    ws = family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=500, q=2.0))
    cert = qgevrey_certificate()
    check = verify_certificate(ABOracle.entire(ws), cert)
    gaps = set(cert.gaps)
    return {
        "ok": worst <= 1e-9 and gaps == {2} and check.ok and check.solid,
        "max_relative_error": worst,
        "gaps": sorted(gaps),
        "blocks": len(cert.rows),
        "verified": check.ok,
        "solid": check.solid,
    }


def prop_ajexample(gaps: str = "linear", C: float = 3.0, blocks: int = 30) -> Dict[str, Any]:
    a = lusky_chain(gaps, blocks)
    ws = build_from_lusky(a, C, a[-1] + 2)
    oracle = ABOracle.entire(ws)
    cert = certificate_for_chain(oracle, a, SEARCH_LOGB, C)
    check = verify_certificate(oracle, cert)
    worst = max(abs(ra - C) for ra, _ in check.rows)
    return {
        "ok": check.ok and worst <= 1e-12,
        "sequence": ws.name,
        "a": list(a),
        "max_logA_deviation": worst,
        "verified": check.ok,
        "first_failure": check.first_failure,
    }


def prop_harmonic() -> Dict[str, Any]:
    ws = family(FamilySpec(kind=FamilyKind.HARMONIC, horizon=2200, s=1.0))
    a = harmonic_chain(1, 5, 4, 40)
    rows = [log_ab(ws, k, l) for k, l in zip(a, a[1:])]
    lo = min(min(r) for r in rows)
    hi = max(max(r) for r in rows)
    return {"ok": lo >= 1.0 and hi <= 8.0, "min": lo, "max": hi, "blocks": len(rows)}


def _counterexample(ws: WeightSequence) -> Dict[str, Any]:
    result = search_lusky(ABOracle.entire(ws), ws.horizon, SEARCH_LOGB, SEARCH_LOGK)
    if not isinstance(result, FailureTrace):
        return {"ok": False, "sequence": ws.name, "note": "search returned a certificate"}
    rechecked = all(
        c.logA is None or (_rel(c.logA, log_ab(ws, result.stuck_a, result.stuck_a + c.gap)[0]) <= 1e-12)
        for c in result.candidates
    )
    return {
        "ok": rechecked,
        "sequence": ws.name,
        "a": list(result.a),
        "stuck_j": result.stuck_j,
        "stuck_a": result.stuck_a,
        "best": None if result.best is None else {
            "gap": result.best.gap,
            "logA": result.best.logA,
            "logB": result.best.logB,
            "violation": result.best.violation.value,
        },
    }


def cex_qalpha() -> Dict[str, Any]:
    return _counterexample(family(FamilySpec(kind=FamilyKind.QALPHA, horizon=COUNTEREXAMPLE_HORIZON, q=2.0, alpha=3.0)))


def cex_whatcanhappencor() -> Dict[str, Any]:
    return _counterexample(geometric_steps(2, 2.0, COUNTEREXAMPLE_HORIZON))


def cex_whatcanhappen1() -> Dict[str, Any]:
    return _counterexample(dyadic_steps(3.0, COUNTEREXAMPLE_HORIZON))


def _ramification_inputs() -> List[WeightSequence]:
    return [
        from_log_quotients(np.arange(1, 201, dtype=float), name="linear"),
        family(FamilySpec(kind=FamilyKind.GEVREY, horizon=200, s=1.0)),
        family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=200, q=2.0)),
    ]


def lemma_ramification() -> Dict[str, Any]:
    cases = []
    for ws in _ramification_inputs():
        for r in (2, 3):
            top = float(ws.lam[-1]) / r
            logt = np.linspace(0.3 * top, 0.9 * top, 20) + 1e-3
            rep = ramification_check(ws, r, logt)
            cases.append({
                "sequence": ws.name,
                "r": r,
                "max_ratio_deviation": rep.max_ratio_deviation,
                "ratio_is_one": rep.ratio_is_one,
                "counting_relation_holds": rep.counting_relation_holds,
                "note": rep.note,
            })
    ok = all(c["ratio_is_one"] and c["counting_relation_holds"] and "DISCREPANCY" in c["note"] for c in cases)
    return {"ok": ok, "cases": cases}


def lemma_stretch() -> Dict[str, Any]:
    ws = family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=500, q=2.0))
    cert = qgevrey_certificate()
    a = lusky_chain("linear", 30)
    aj = build_from_lusky(a, 3.0, a[-1] + 2)
    aj_cert = certificate_for_chain(ABOracle.entire(aj), a, SEARCH_LOGB, 3.0)
    results = {}
    for r in (2, 3):
        results[f"{ws.name} r={r}"] = stretch_check(ws, r, cert)
        results[f"{aj.name} r={r}"] = stretch_check(aj, r, aj_cert)
    return {"ok": all(results.values()), "checks": results}


def conjugate_gevrey() -> Dict[str, Any]:
    ws = family(FamilySpec(kind=FamilyKind.GEVREY, horizon=200000, s=1.0))
    w = weight_from_sequence(ws, np.linspace(-1.0, 12.0, 10000))
    conj = conjugate_sequence(w, 50, name="conjugate:gevrey:1")
    err = float(np.max(np.abs(conj.logM[1:] - ws.logM[1:51])))
    sandwich = sandwich_check(w, conj, np.linspace(-1.0, float(conj.lam[-1]), 400))

    a = 3.5
    logt = np.linspace(-8.0, 8.0, 4001)
    polynomial = make_grid(logt, -a * np.log1p(np.exp(logt)))
    first_failure = None
    try:
        conjugate_maximizers(polynomial, 6)
    except RapidDecayError as e:
        first_failure = e.p
    return {
        "ok": err <= 1e-6 and sandwich.logA <= 1e-6 and first_failure is not None and first_failure > a,
        "max_abs_error": err,
        "sandwich_logA": sandwich.logA,
        "polynomial_weight_a": a,
        "polynomial_first_failure_p": first_failure,
    }


def disk_dual_path() -> Dict[str, Any]:
    ws = from_log_quotients(np.arange(1, 14, dtype=float) * math.log(2.0), name="mu=2^p")
    worst = 0.0
    for p in range(1, 13):
        for q in range(p + 1, 13):
            formula = disk_log_ab(ws, p, q)
            direct = disk_log_ab_direct(ws, p, q)
            worst = max(worst, _rel(formula[0], direct[0]), _rel(formula[1], direct[1]))
    far = from_log_quotients(np.arange(1, 56, dtype=float) * math.log(2.0), name="mu=2^p")
    for p in (10, 20, 30, 40, 50):
        formula = disk_log_ab(far, p, p + 1)
        direct = disk_log_ab_direct(far, p, p + 1)
        worst = max(worst, _rel(formula[0], direct[0]), _rel(formula[1], direct[1]))
    hand = 3 * math.log(3 / 7) + 5 * math.log(2)
    log_a12 = disk_log_ab(ws, 1, 2)[0]

    interleaved = True
    for p in range(1, 10):
        lo, hi = disk_geometry(ws, 1.0, p), disk_geometry(ws, 1.0, p + 1)
        for k in np.linspace(lo.k_p, hi.k_p, 7)[1:-1]:
            r = disk_maximizer(ws, 1.0, float(k))
            if not (math.exp(lo.logr) * (1 - 1e-12) <= r <= math.exp(hi.logr) * (1 + 1e-12)):
                interleaved = False
    return {
        "ok": worst <= 1e-9 and abs(log_a12 - hand) <= 1e-12 and interleaved,
        "max_relative_error": worst,
        "logA_1_2": log_a12,
        "expected_logA_1_2": hand,
        "interleaving": interleaved,
    }


def hull_core_sandwich(samples: int = 100, seed: int = 7) -> Dict[str, Any]:
    ws = family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=500, q=2.0))
    cert = qgevrey_certificate()
    rng = np.random.default_rng(seed)
    worst_gap = 0.0
    worst_shift = 0.0
    bound = 0.5 * math.log(2.0)
    for _ in range(samples):
        coeffs = CoefficientPrefix(logabs=rng.uniform(-5.0, 5.0, size=61) - np.arange(61) ** 2 * math.log(2.0))
        base = block_stats(ws, cert, 1.0, coeffs)
        shifted = block_stats(ws, cert, 2.5, reweight(coeffs, 1.0, 2.5))
        for r, s in zip(base.rows, shifted.rows):
            diff = r.log_core - r.log_hull
            worst_gap = max(worst_gap, diff - bound, -diff)
            worst_shift = max(worst_shift, _rel(s.log_hull, r.log_hull), _rel(s.log_core, r.log_core))
    return {
        "ok": worst_gap <= 1e-9 and worst_shift <= 1e-9,
        "samples": samples,
        "max_sandwich_violation": worst_gap,
        "max_c_shift_deviation": worst_shift,
    }


def necessary_subsample() -> Dict[str, Any]:
    cert = qgevrey_certificate()
    full = necessary_check(cert.a)
    indices = [2 ** j for j in range(int(math.log2(len(cert.a))) + 1)]
    sub = necessary_check(chain_subsample(cert.a, indices))
    rejected = necessary_check([1, 2, 4, 6])
    return {
        "ok": full.trend == "divergent" and sub.trend == "convergent" and rejected.trend == "rejected",
        "full_trend": full.trend,
        "full_slope": full.slope,
        "subsample_trend": sub.trend,
        "subsample_slope": sub.slope,
        "gap_one_trend": rejected.trend,
    }


def property_classes() -> Dict[str, Any]:
    expected = {
        "qgevrey:2": (family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=1000, q=2.0)),
                      {"beta1": Verdict.HOLDS, "dc": Verdict.HOLDS, "mg": Verdict.FAILS}),
        "gevrey:2": (family(FamilySpec(kind=FamilyKind.GEVREY, horizon=1000, s=2.0)),
                     {"slc": Verdict.HOLDS, "mg": Verdict.HOLDS, "gamma1": Verdict.HOLDS}),
        "steps-geometric:2,2": (geometric_steps(2, 2.0, COUNTEREXAMPLE_HORIZON),
                                {"beta1": Verdict.HOLDS, "dc": Verdict.HOLDS, "mg": Verdict.FAILS}),
        "steps-dyadic:3": (dyadic_steps(3.0, COUNTEREXAMPLE_HORIZON),
                           {"mg": Verdict.HOLDS, "beta1": Verdict.HOLDS}),
    }
    observed = {}
    ok = True
    for label, (ws, wanted) in expected.items():
        table = property_table(ws)
        observed[label] = {name: table[name].verdict.value for name in wanted}
        ok = ok and all(table[name].verdict == v for name, v in wanted.items())
    return {"ok": ok, "verdicts": observed}


SCENARIOS: Dict[str, Callable[..., Dict[str, Any]]] = {
    "prop-qgevrey": prop_qgevrey,
    "prop-ajexample": prop_ajexample,
    "prop-harmonic": prop_harmonic,
    "cex-qalpha": cex_qalpha,
    "cex-whatcanhappencor": cex_whatcanhappencor,
    "cex-whatcanhappen1": cex_whatcanhappen1,
    "lemma-ramification": lemma_ramification,
    "lemma-stretch": lemma_stretch,
    "conjugate-gevrey": conjugate_gevrey,
    "disk-dual-path": disk_dual_path,
    "hull-core-sandwich": hull_core_sandwich,
    "necessary-subsample": necessary_subsample,
    "property-classes": property_classes,
}


def run_scenario(name: str, **kwargs) -> Dict[str, Any]:
    if name not in SCENARIOS:
        raise KeyError(name)
    logger.info("Running scenario %s", name)
    summary = {"scenario": name}
    summary.update(SCENARIOS[name](**kwargs))
    if not summary["ok"]:
        logger.warning("Scenario %s did not reproduce", name)
    return summary
