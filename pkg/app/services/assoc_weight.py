"""
Associated weight functions: ω_M, h_M and the counting function Σ_M of a weight sequence,
the ramification identities, and the passage from a sampled weight v to its associated
weight sequence M^v (a discrete Legendre-Fenchel conjugate in log coordinates).
"""
from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.exceptions import (
    GridBoundaryError,
    HorizonExceededError,
    InconsistencyError,
    NotLogConvexError,
    ParameterError,
    RapidDecayError,
)
from app.models import (
    RamificationReport,
    RamificationRow,
    RamifyMode,
    SandwichReport,
    WeightABResult,
    WeightFunctionGrid,
    WeightSequence,
)
from app.services.sequences import interpolate

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQ = (3 - math.sqrt(5)) / 2


# ω_M, h_M, Σ_M

def _require_lc(ws: WeightSequence) -> None:
    if not ws.is_log_convex:
        raise NotLogConvexError(f"{ws.name}: lambda must be non-decreasing to evaluate omega by quotients")
    if not ws.is_normalized:
        raise NotLogConvexError(f"{ws.name}: lambda_1 must be >= 0 (normalized sequence)")


def omega_log(ws: WeightSequence, logt) -> np.ndarray:
    """
    ω_M at t = exp(logt), vectorized: 0 up to μ_1, then j_t ln t - log M_{j_t} with
    j_t = #{p : λ_p <= ln t} found by binary search on λ.
    """
    _require_lc(ws)
    x = np.asarray(logt, dtype=float)
    beyond = x > ws.lam[-1]
    if np.any(beyond):
        worst = float(np.max(x[beyond]))
        raise HorizonExceededError(
            f"{ws.name}: ln t = {worst!r} exceeds lambda_P = {float(ws.lam[-1])!r}; "
            f"omega is only determined up to mu_P at horizon {ws.horizon}"
        )
    j = np.searchsorted(ws.lam, x, side="right")
    return np.where(j == 0, 0.0, j * x - ws.logM[j])


def omega_eval(ws: WeightSequence, t: float) -> float:
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    return float(omega_log(ws, math.log(t)))


def omega_brute(ws: WeightSequence, t: float) -> float:
    """Direct sup over 0 <= p <= P of p ln t - log M_p."""
    p = np.arange(ws.horizon + 1)
    return float(np.max(p * math.log(t) - ws.logM))


def h_eval(ws: WeightSequence, t: float) -> float:
    """log h_M(t) = -ω_M(1/t)."""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    return -omega_eval(ws, 1.0 / t)


def counting_eval(ws: WeightSequence, t: float) -> int:
    """Σ_M(t) = #{1 <= p <= P : μ_p <= t}."""
    if not t > 0:
        raise ParameterError(f"t must be positive, got {t}")
    return counting_log(ws, math.log(t))


def counting_log(ws: WeightSequence, logt: float) -> int:
    count = int(np.count_nonzero(ws.lam <= logt))
    if count == ws.horizon:
        logger.warning("%s: counting function saturated at horizon %d (ln t = %s)", ws.name, ws.horizon, logt)
    return count


def ramification_check(ws: WeightSequence, r: int, logt_samples: Iterable[float]) -> RamificationReport:
    """
    Compare ω_M(t^r) with ω_{P^{M,r}}(t) and the counting functions on both sides, at the given ln t.

    The ratio is measured, not assumed; the note always records how it relates to the
    expected r^2 scaling.
    """
    ramified = interpolate(ws, r)
    rows = []
    tol = settings.EXACT_TOL
    for logt in logt_samples:
        logt = float(logt)
        om = float(omega_log(ws, r * logt))
        op = float(omega_log(ramified, logt))
        if om == 0.0 and op == 0.0:
            ratio = 1.0
        elif op == 0.0:
            ratio = math.inf
        else:
            ratio = om / op
        rows.append(
            RamificationRow(
                logt=logt,
                omega_m=om,
                omega_p=op,
                ratio=ratio,
                sigma_m=counting_log(ws, r * logt),
                sigma_p=counting_log(ramified, logt),
            )
        )
    deviations = [abs(row.ratio - 1.0) for row in rows]
    max_dev = max(deviations) if deviations else 0.0
    ratio_one = all(d <= tol for d in deviations)
    ratio_r2 = bool(rows) and all(abs(row.ratio - r * r) <= tol * r * r for row in rows)
    counting_ok = all(row.sigma_p == r * row.sigma_m for row in rows)
    observed = rows[0].ratio if rows else float("nan")
    note = (
        f"DISCREPANCY: the r^2 scaling omega_M(t^r) = r^2 * omega_P(t) (factor {r * r}); "
        f"observed ratio omega_M(t^r)/omega_P(t) = {observed:.17g} (max |ratio-1| = {max_dev:.3g}). "
        f"Counting functions satisfy Sigma_P(t) = r * Sigma_M(t^r): {counting_ok}, "
        "the inverse of the r^2 form Sigma_M(t^r) = r * Sigma_P(t)."
    )
    if r != 1 and not ratio_r2:
        logger.warning("%s, r=%d: %s", ws.name, r, note)
    return RamificationReport(
        r=int(r),
        rows=tuple(rows),
        max_ratio_deviation=max_dev,
        ratio_is_one=ratio_one,
        ratio_is_r_squared=ratio_r2,
        counting_relation_holds=counting_ok,
        note=note,
    )


# Sampled weight functions

def _last_slope(logt: np.ndarray, logv: np.ndarray) -> float:
    """Slope of x -> -log v(e^x) on the last grid cell."""
    return float((logv[-2] - logv[-1]) / (logt[-1] - logt[-2]))


def grid_flags(
    logt: np.ndarray, logv: np.ndarray, powers: Iterable[float] = (1.0,)
) -> Tuple[bool, bool, bool]:
    """
    (normalized, x -> -log v(e^x) convex on the grid, k log t + log v(t) decreasing on the
    last grid cell for every k in powers).
    """
    at_or_below_one = logt <= 0.0
    normalized = bool(np.any(at_or_below_one)) and bool(np.all(np.abs(logv[at_or_below_one]) <= 1e-12))
    last = _last_slope(logt, logv)
    rapid = all(k - last < 0.0 for k in powers)
    if logt.shape[0] < 3:
        return normalized, True, rapid
    slopes = np.diff(-logv) / np.diff(logt)
    scale = max(1.0, float(np.max(np.abs(slopes))))
    convex = bool(np.all(np.diff(slopes) >= -settings.EXACT_TOL * scale))
    return normalized, convex, rapid


def make_grid(
    logt: Sequence[float], logv: Sequence[float], powers: Iterable[float] = (1.0,)
) -> WeightFunctionGrid:
    x = np.asarray(logt, dtype=float)
    y = np.asarray(logv, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.shape[0] < 2:
        raise ParameterError("logt and logv must be one-dimensional arrays of equal length >= 2")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ParameterError("logt and logv must be finite")
    if np.any(np.diff(x) <= 0.0):
        raise ParameterError("logt must be strictly increasing")
    if np.any(np.diff(y) > 1e-12 * max(1.0, float(np.max(np.abs(y))))):
        raise ParameterError("logv must be non-increasing along logt")
    normalized, convex, rapid = grid_flags(x, y, list(powers))
    return WeightFunctionGrid(
        logt=x, logv=y, normalized=normalized, convex_checked=convex, rapid_decay_checked=rapid
    )


def weight_from_sequence(ws: WeightSequence, logt: Sequence[float]) -> WeightFunctionGrid:
    """Sample v_M = exp(-ω_M) on the given log t grid."""
    x = np.asarray(logt, dtype=float)
    return make_grid(x, -omega_log(ws, x))


def ramify_weight(w: WeightFunctionGrid, r: float, mode: RamifyMode = RamifyMode.ROOT) -> WeightFunctionGrid:
    """
    root:  u(t) = v(t^{1/r})^r, so log A_u(k, l) = r log A_v(k, l).
    power: v^r(t) = v(t^r), so log A_{v^r}(rk, rl) = log A_v(k, l).
    """
    if not r > 0:
        raise ParameterError(f"r must be positive, got {r}")
    mode = RamifyMode(mode)
    if mode == RamifyMode.ROOT:
        return make_grid(r * w.logt, r * w.logv)
    return make_grid(w.logt / r, w.logv)


def _golden_max(obj: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Golden-section search for the maximizer of a unimodal function on [a, b]."""
    dist = b - a
    if dist <= tol:
        return (a + b) / 2
    n = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = obj(c)
    yd = obj(d)
    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = obj(c)
        else:
            a = c
            c = d
            yc = yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = obj(d)
    return c if yc > yd else d


def maximize_on_grid(w: WeightFunctionGrid, m: float) -> Tuple[float, float]:
    """
    Maximizer (ln t_m, value) of x -> m x + log v(e^x).

    Grid scan then golden-section refinement on the neighbouring cells; on a flat top
    the rightmost maximizer is kept, i.e. t_m = μ_{m+1} for sampled v_M.
    """
    obj = m * w.logt + w.logv
    top = float(np.max(obj))
    near = np.flatnonzero(obj >= top - settings.EXACT_TOL * max(1.0, abs(top)))
    j = int(near[-1])
    last = w.logt.shape[0] - 1
    if j == last:
        raise RapidDecayError(m)
    if j == 0:
        raise GridBoundaryError(f"maximizer for m={m} sits at the left end of the grid (ln t = {float(w.logt[0])!r})")

    def objective(x: float) -> float:
        return m * x + float(w.logv_at(x))

    x_ref = _golden_max(objective, float(w.logt[j - 1]), float(w.logt[j + 1]), settings.GOLDEN_TOL)
    v_ref = objective(x_ref)
    if v_ref > obj[j] + settings.EXACT_TOL * max(1.0, abs(top)):
        return x_ref, v_ref
    return float(w.logt[j]), float(obj[j])


def _check_conjugable(w: WeightFunctionGrid, P: int) -> None:
    if not w.normalized:
        logger.warning("weight grid is not normalized (log v != 0 somewhere on log t <= 0); M^v_0 may differ from 1")
    if not w.convex_checked:
        raise NotLogConvexError("x -> -log v(e^x) is not convex on the grid; M^v would not reproduce v")
    slope = _last_slope(w.logt, w.logv)
    if P >= slope:
        # first integer p with p x + log v(e^x) not decreasing on the last cell
        raise RapidDecayError(max(1, math.ceil(slope)))


def conjugate_maximizers(w: WeightFunctionGrid, P: int) -> Tuple[np.ndarray, np.ndarray]:
    """(log M^v_p, ln t_p) for p = 1..P."""
    if int(P) != P or P < 1:
        raise ParameterError(f"P must be a positive integer, got {P}")
    _check_conjugable(w, int(P))
    logM = np.empty(int(P))
    logt = np.empty(int(P))
    for p in range(1, int(P) + 1):
        logt[p - 1], logM[p - 1] = maximize_on_grid(w, p)
    return logM, logt


def conjugate_sequence(w: WeightFunctionGrid, P: int, name: str = "conjugate") -> WeightSequence:
    """log M^v_p = sup_x (p x + log v(e^x)); λ^v by differencing."""
    logM, _ = conjugate_maximizers(w, P)
    lam = np.diff(np.concatenate(([0.0], logM)))
    ws = WeightSequence(name=name, lam=lam)
    if not ws.is_log_convex:
        logger.warning("%s: conjugate quotients not monotone beyond grid tolerance", name)
    return ws


def sandwich_check(w: WeightFunctionGrid, ws: WeightSequence, logt_samples: Iterable[float]) -> SandwichReport:
    """
    Check ω_{M^v} <= ω^v on the samples and return log A = sup (ω^v - 2 ω_{M^v}),
    the smallest constant with v^2_{M^v} / A <= v.
    """
    x = np.asarray(list(logt_samples), dtype=float)
    omega_v = w.omega_at(x)
    omega_m = omega_log(ws, x)
    excess = omega_m - omega_v
    worst = float(np.max(excess)) if x.size else 0.0
    scale = max(1.0, float(np.max(np.abs(omega_v)))) if x.size else 1.0
    if worst > settings.GRID_TOL * scale:
        i = int(np.argmax(excess))
        raise InconsistencyError(
            f"omega_Mv({float(x[i])!r}) exceeds omega_v by {worst!r}; M^v is not the conjugate of this grid"
        )
    log_a = float(np.max(omega_v - 2.0 * omega_m)) if x.size else 0.0
    return SandwichReport(logA=log_a, max_lower_violation=max(worst, 0.0), samples=int(x.size))


def weight_ab_numeric(
    w: WeightFunctionGrid, k: float, l: float, conjugate: Optional[WeightSequence] = None
) -> WeightABResult:
    """
    log A_v(k, l) = k (ln t_k - ln t_l) + log v(t_k) - log v(t_l) and the symmetric log B_v,
    with t_m the maximizer of t^m v(t).
    """
    if not k < l:
        raise ParameterError(f"need k < l, got k={k}, l={l}")
    xk, _ = maximize_on_grid(w, k)
    xl, _ = maximize_on_grid(w, l)
    vk = float(w.logv_at(xk))
    vl = float(w.logv_at(xl))
    log_a = k * (xk - xl) + vk - vl
    log_b = l * (xl - xk) + vl - vk
    deviation = None
    if conjugate is not None and float(k).is_integer() and float(l).is_integer() and l <= conjugate.horizon:
        ki, li = int(k), int(l)
        sequence_form = (li - ki) * xl - (conjugate.logM[li] - conjugate.logM[ki])
        deviation = abs(log_a - sequence_form)
    return WeightABResult(t_k=math.exp(xk), t_l=math.exp(xl), logA=log_a, logB=log_b, sequence_form_deviation=deviation)

