"""
Weight sequences in log domain: construction, increments, the built-in families and
the algebra (powers, products/quotients, r-interpolation).
"""
from __future__ import annotations

import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import HorizonExceededError, NonFiniteError, ParameterError
from app.models import CombineMode, DeltaSeq, FamilyKind, FamilySpec, WeightSequence

logger = logging.getLogger(__name__)


def from_log_quotients(lam: Iterable[float], name: str = "sequence") -> WeightSequence:
    """Build a WeightSequence from λ_1..λ_P (nats). Flags are computed, not enforced."""
    arr = np.asarray(list(lam) if not isinstance(lam, np.ndarray) else lam, dtype=float)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ParameterError("lambda must be a non-empty one-dimensional array")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        idx = int(bad[0])
        raise NonFiniteError(idx + 1, float(arr[idx]))
    return WeightSequence(name=name, lam=arr)


def _two_sum(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    s = x + y
    bb = s - x
    err = (x - (s - bb)) + (y - bb)
    return s, err


def to_deltas(ws: WeightSequence) -> DeltaSeq:
    previous = np.concatenate(([0.0], ws.lam[:-1]))
    delta, residual = _two_sum(ws.lam, -previous)
    return DeltaSeq(delta=delta, residual=residual, name=ws.name)


def from_deltas(ds: DeltaSeq, allow_non_lc: bool = False, name: Optional[str] = None) -> WeightSequence:
    """
    Inverse of to_deltas. Negative increments leave the LC set and are rejected unless
    allow_non_lc is set.
    """
    delta = ds.delta
    bad = np.flatnonzero(~np.isfinite(delta))
    if bad.size:
        idx = int(bad[0])
        raise NonFiniteError(idx + 1, float(delta[idx]))
    negative = np.flatnonzero(delta < 0.0)
    if negative.size and not allow_non_lc:
        raise ParameterError(
            f"delta_{int(negative[0]) + 1} = {float(delta[negative[0]])!r} is negative; "
            "pass allow_non_lc to build a non-log-convex sequence"
        )
    if ds.residual is None:
        return WeightSequence(name=name or ds.name, lam=np.cumsum(delta))

    lam = np.empty_like(delta)
    prev = 0.0
    for i, (d, e) in enumerate(zip(delta.tolist(), ds.residual.tolist())):
        hi = prev + d
        bb = hi - prev
        lo = (prev - (hi - bb)) + (d - bb)
        prev = hi + (lo + e)
        lam[i] = prev
    return WeightSequence(name=name or ds.name, lam=lam)


# Families

def _indices(horizon: int) -> np.ndarray:
    if horizon < 1:
        raise ParameterError(f"horizon must be a positive integer, got {horizon}")
    if horizon > settings.MAX_HORIZON:
        raise HorizonExceededError(f"horizon {horizon} exceeds MAX_HORIZON={settings.MAX_HORIZON}")
    return np.arange(1, horizon + 1, dtype=float)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def block_steps(b: Sequence[int], logc: Sequence[float], horizon: int, name: str = "steps") -> WeightSequence:
    """λ_p = log c_j for b_j <= p < b_{j+1}; the last block runs to the horizon."""
    _indices(horizon)
    b = [int(x) for x in b]
    logc = [float(x) for x in logc]
    _require(len(b) == len(logc) and len(b) >= 2, "b and c generators need equal length >= 2")
    _require(b[0] == 1, f"b_1 must be 1, got {b[0]}")
    _require(all(y > x for x, y in zip(b, b[1:])), "b generator must be strictly increasing")
    _require(all(y > x for x, y in zip(logc, logc[1:])), "c generator must be strictly increasing")
    _require(all(math.isfinite(x) for x in logc), "c generator must be positive and finite")
    if horizon < b[1]:
        raise ParameterError(
            f"horizon {horizon} too small to contain one full block (first block ends at {b[1] - 1})"
        )
    p = np.arange(1, horizon + 1)
    block = np.searchsorted(np.asarray(b), p, side="right") - 1
    return WeightSequence(name=name, lam=np.asarray(logc)[block])


def geometric_steps(Q: int, D: float, horizon: int) -> WeightSequence:
    """b_1 = 1, b_{j+1} = Q b_j and c_j = D^{b_j}."""
    _require(int(Q) == Q and Q >= 2, f"Q must be an integer >= 2, got {Q}")
    _require(D > 1, f"D must exceed 1, got {D}")
    b = [1]
    while b[-1] <= horizon:
        b.append(b[-1] * int(Q))
    logc = [x * math.log(D) for x in b]
    return block_steps(b, logc, horizon, name=f"steps-geometric:{Q:g},{D:g}")


def dyadic_steps(base: float, horizon: int) -> WeightSequence:
    """μ_p = base^i for 2^i <= p < 2^{i+1}."""
    _require(base > 1, f"base must exceed 1, got {base}")
    b = [1]
    while b[-1] <= horizon:
        b.append(b[-1] * 2)
    logc = [i * math.log(base) for i in range(len(b))]
    return block_steps(b, logc, horizon, name=f"steps-dyadic:{base:g}")


def lusky_chain(gaps: str, blocks: int, a1: int = 1) -> List[int]:
    """a_1 = a1, a_{j+1} = a_j + g_j with g_j = j + 2 (linear) or 2 (constant)."""
    if gaps not in ("linear", "constant"):
        raise ParameterError(f"gaps must be 'linear' or 'constant', got {gaps!r}")
    _require(blocks >= 1, "blocks must be positive")
    a = [int(a1)]
    for j in range(1, blocks + 1):
        a.append(a[-1] + (j + 2 if gaps == "linear" else 2))
    return a


def family(spec: FamilySpec) -> WeightSequence:
    """Build one of the named families up to spec.horizon."""
    kind = FamilyKind(spec.kind)
    if kind == FamilyKind.GEVREY:
        _require(spec.s is not None and spec.s > 0, "Gevrey needs s > 0")
        p = _indices(spec.horizon)
        ws = WeightSequence(name=f"gevrey:{spec.s:g}", lam=spec.s * np.log(p))
    elif kind == FamilyKind.HARMONIC:
        _require(spec.s is not None and spec.s > 0, "HarmonicGevrey needs s > 0")
        p = _indices(spec.horizon)
        ws = WeightSequence(name=f"harmonic:{spec.s:g}", lam=spec.s * np.cumsum(1.0 / p))
    elif kind == FamilyKind.QGEVREY:
        _require(spec.q is not None and spec.q > 1, "QGevrey needs q > 1")
        p = _indices(spec.horizon)
        ws = WeightSequence(name=f"qgevrey:{spec.q:g}", lam=(2.0 * p - 1.0) * math.log(spec.q))
    elif kind == FamilyKind.QALPHA:
        _require(spec.q is not None and spec.q > 1, "QAlphaGevrey needs q > 1")
        _require(spec.alpha is not None and spec.alpha > 2, "QAlphaGevrey needs alpha > 2")
        p = _indices(spec.horizon)
        lam = (np.power(p, spec.alpha) - np.power(p - 1.0, spec.alpha)) * math.log(spec.q)
        ws = WeightSequence(name=f"qalpha:{spec.q:g},{spec.alpha:g}", lam=lam)
    elif kind == FamilyKind.STEPS:
        _require(spec.b is not None and spec.logc is not None, "BlockSteps needs b and c generators")
        ws = block_steps(spec.b, spec.logc, spec.horizon)
    elif kind == FamilyKind.STEPS_GEOMETRIC:
        _require(spec.Q is not None and spec.D is not None, "geometric BlockSteps needs Q and D")
        ws = geometric_steps(spec.Q, spec.D, spec.horizon)
    elif kind == FamilyKind.STEPS_DYADIC:
        _require(spec.base is not None, "dyadic BlockSteps needs a base")
        ws = dyadic_steps(spec.base, spec.horizon)
    else:
        from app.services.condition_b import build_from_lusky

        a = lusky_chain(spec.gaps or "linear", spec.blocks or 30)
        ws = build_from_lusky(a, spec.C if spec.C is not None else 3.0, spec.horizon)
    logger.debug("Built family %s with horizon %d", ws.name, ws.horizon)
    return ws


def parse_family(text: str, horizon: int) -> FamilySpec:
    """Parse 'kind:params', e.g. 'qgevrey:2', 'qalpha:2,3', 'steps-geometric:2,2', 'ajexample:linear,3,30'."""
    kind_text, _, params_text = text.strip().partition(":")
    try:
        kind = FamilyKind(kind_text.lower())
    except ValueError:
        choices = ", ".join(k.value for k in FamilyKind if k != FamilyKind.STEPS)
        raise ParameterError(f"unknown family {kind_text!r}; expected one of {choices}")
    params = [x.strip() for x in params_text.split(",") if x.strip()]
    try:
        if kind in (FamilyKind.GEVREY, FamilyKind.HARMONIC):
            return FamilySpec(kind=kind, horizon=horizon, s=float(params[0]))
        if kind == FamilyKind.QGEVREY:
            return FamilySpec(kind=kind, horizon=horizon, q=float(params[0]))
        if kind == FamilyKind.QALPHA:
            return FamilySpec(kind=kind, horizon=horizon, q=float(params[0]), alpha=float(params[1]))
        if kind == FamilyKind.STEPS_GEOMETRIC:
            return FamilySpec(kind=kind, horizon=horizon, Q=int(params[0]), D=float(params[1]))
        if kind == FamilyKind.STEPS_DYADIC:
            return FamilySpec(kind=kind, horizon=horizon, base=float(params[0]))
        if kind == FamilyKind.AJEXAMPLE:
            gaps = params[0] if params else "linear"
            C = float(params[1]) if len(params) > 1 else 3.0
            blocks = int(params[2]) if len(params) > 2 else 30
            return FamilySpec(kind=kind, horizon=horizon, gaps=gaps, C=C, blocks=blocks)
    except (IndexError, ValueError):
        raise ParameterError(f"malformed parameters for family {kind.value!r}: {params_text!r}")
    raise ParameterError(f"family {kind.value!r} cannot be given on the command line; use a sequence file")


# Algebra

def power_scale(ws: WeightSequence, s: float) -> WeightSequence:
    """The s-th power M^s: λ'_p = s λ_p."""
    if not s > 0:
        raise ParameterError(f"power s must be positive, got {s}")
    return WeightSequence(name=f"{ws.name}^{s:g}", lam=s * ws.lam)


def combine(ws1: WeightSequence, ws2: WeightSequence, mode: CombineMode = CombineMode.PRODUCT) -> WeightSequence:
    if ws1.horizon != ws2.horizon:
        raise ParameterError(f"horizon mismatch: {ws1.horizon} vs {ws2.horizon}")
    mode = CombineMode(mode)
    if mode == CombineMode.PRODUCT:
        return WeightSequence(name=f"({ws1.name})*({ws2.name})", lam=ws1.lam + ws2.lam)
    result = WeightSequence(name=f"({ws1.name})/({ws2.name})", lam=ws1.lam - ws2.lam)
    if not (result.is_log_convex and result.is_normalized):
        logger.info("Quotient %s leaves the LC set (flags recomputed)", result.name)
    return result


def interpolate(ws: WeightSequence, r: int) -> WeightSequence:
    """
    r-interpolating sequence P^{M,r}: the quotient μ_{k+1} is replaced by r copies of its
    r-th root, so that logM'_{rj} = logM_j.
    """
    if int(r) != r or r < 1:
        raise ParameterError(f"r must be a positive integer, got {r}")
    r = int(r)
    if r * ws.horizon > settings.MAX_HORIZON:
        raise HorizonExceededError(
            f"interpolated horizon {r * ws.horizon} exceeds MAX_HORIZON={settings.MAX_HORIZON}"
        )
    if r == 1:
        return ws
    return WeightSequence(name=f"{ws.name}|r={r}", lam=np.repeat(ws.lam / r, r))
