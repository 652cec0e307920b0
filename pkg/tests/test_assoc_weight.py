import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from app.exceptions import (
    GridBoundaryError,
    HorizonExceededError,
    NotLogConvexError,
    ParameterError,
    RapidDecayError,
)
from app.models import RamifyMode
from app.services.assoc_weight import (
    conjugate_maximizers,
    conjugate_sequence,
    counting_eval,
    h_eval,
    make_grid,
    maximize_on_grid,
    omega_brute,
    omega_log,
    ramification_check,
    ramify_weight,
    sandwich_check,
    weight_ab_numeric,
    weight_from_sequence,
)
from app.services.sequences import family, from_log_quotients, interpolate, parse_family

increments = st.lists(st.floats(min_value=0.0, max_value=3.0, allow_nan=False), min_size=2, max_size=40)


@given(increments, st.floats(min_value=0.0, max_value=1.0))
@hsettings(max_examples=100, deadline=None)
def test_omega_matches_brute_force(deltas, fraction):
    ws = from_log_quotients(np.cumsum(deltas))
    logt = fraction * float(ws.lam[-1])
    assert float(omega_log(ws, logt)) == pytest.approx(omega_brute(ws, math.exp(logt)), abs=1e-9)


def test_omega_vanishes_below_first_quotient():
    ws = from_log_quotients([1.0, 2.0, 3.0])
    assert omega_log(ws, 0.5) == 0.0
    assert omega_log(ws, 1.0) == pytest.approx(0.0)
    # j_t = 2 on [2, 3): 2 x - 3
    assert omega_log(ws, 2.5) == pytest.approx(2.0)


def test_omega_beyond_horizon():
    ws = from_log_quotients([1.0, 2.0])
    with pytest.raises(HorizonExceededError):
        omega_log(ws, 2.5)


def test_omega_needs_log_convex_normalized():
    with pytest.raises(NotLogConvexError):
        omega_log(from_log_quotients([0.0, 2.0, 1.0]), 0.5)
    with pytest.raises(NotLogConvexError):
        omega_log(from_log_quotients([-1.0, 2.0]), 0.5)


def test_h_and_counting():
    ws = from_log_quotients([1.0, 2.0, 3.0])
    assert h_eval(ws, math.exp(-2.5)) == pytest.approx(-2.0)
    assert counting_eval(ws, math.exp(2.1)) == 2
    assert counting_eval(ws, math.exp(0.5)) == 0
    with pytest.raises(ParameterError):
        counting_eval(ws, 0.0)


@pytest.mark.parametrize("spec", ["gevrey:1", "qgevrey:2"])
@pytest.mark.parametrize("r", [2, 3])
def test_ramification_ratio_is_one(spec, r):
    ws = family(parse_family(spec, 200))
    top = float(ws.lam[-1]) / r
    logt = np.linspace(0.3 * top, 0.9 * top, 20) + 1e-3
    report = ramification_check(ws, r, logt)
    assert report.ratio_is_one
    assert not report.ratio_is_r_squared
    assert report.counting_relation_holds
    assert "DISCREPANCY" in report.note
    for row in report.rows:
        assert row.sigma_p == r * row.sigma_m


def test_ramification_samples_beyond_double_range():
    ws = family(parse_family("qgevrey:2", 2000))
    top = float(ws.lam[-1]) / 2
    assert top > 800.0
    logt = np.linspace(750.0, 0.95 * top, 10)
    report = ramification_check(ws, 2, logt)
    assert report.ratio_is_one
    assert report.counting_relation_holds
    assert [row.logt for row in report.rows] == pytest.approx(logt.tolist())


@given(increments, st.integers(min_value=10, max_value=200))
@hsettings(max_examples=100, deadline=None)
def test_omega_is_monotone_and_convex_in_log_t(deltas, samples):
    ws = from_log_quotients(np.cumsum(deltas))
    logt = np.linspace(-1.0, float(ws.lam[-1]), samples)
    omega = omega_log(ws, logt)
    scale = max(1.0, float(np.max(np.abs(omega))))
    assert np.all(np.diff(omega) >= -1e-12 * scale)
    slopes = np.diff(omega) / np.diff(logt)
    assert np.all(np.diff(slopes) >= -1e-9 * max(1.0, float(np.max(np.abs(slopes)))))


@pytest.mark.parametrize("spec", ["gevrey:1", "qgevrey:2", "harmonic:1", "steps-dyadic:2"])
@pytest.mark.parametrize("r", [2, 3, 5])
def test_interpolation_dominates_scaled_omega(spec, r):
    ws = family(parse_family(spec, 300))
    ramified = interpolate(ws, r)
    logt = np.linspace(0.0, float(ramified.lam[-1]), 300)
    lhs = r * omega_log(ws, logt)
    rhs = omega_log(ramified, logt)
    assert np.all(lhs <= rhs + 1e-9 * np.maximum(1.0, np.abs(rhs)))


def test_conjugate_quotients_lie_between_maximizers():
    ws = family(parse_family("gevrey:1", 1000))
    w = weight_from_sequence(ws, np.linspace(-1.0, 6.0, 4000))
    logM, logt = conjugate_maximizers(w, 40)
    lam = np.diff(logM)  # λ^v_{p+1}, p = 1..39
    tol = 1e-6
    assert np.all(logt[:-1] <= lam + tol)
    assert np.all(lam <= logt[1:] + tol)


def test_exponential_weight_has_finite_sandwich_constant():
    # log v(t) = min(0, 1 - t)
    logt = np.arange(-200, 401) / 100.0
    w = make_grid(logt, np.minimum(0.0, 1.0 - np.exp(logt)))
    assert w.normalized and w.convex_checked
    conj = conjugate_sequence(w, 40)
    assert conj.is_normalized and conj.is_log_convex
    report = sandwich_check(w, conj, np.linspace(-1.0, float(conj.lam[-1]), 300))
    assert math.isfinite(report.logA)
    assert 0.0 <= report.logA <= 1.0


def test_grid_validation():
    with pytest.raises(ParameterError):
        make_grid([0.0, 1.0], [0.0])
    with pytest.raises(ParameterError):
        make_grid([0.0, 0.0], [0.0, -1.0])
    with pytest.raises(ParameterError):
        make_grid([0.0, 1.0], [-1.0, 0.0])


def test_sampled_weight_flags():
    ws = family(parse_family("gevrey:1", 1000))
    w = weight_from_sequence(ws, np.linspace(-1.0, 6.0, 500))
    assert w.normalized
    assert w.convex_checked
    assert w.rapid_decay_checked


def test_conjugate_of_gevrey_is_exact():
    ws = family(parse_family("gevrey:1", 200000))
    w = weight_from_sequence(ws, np.linspace(-1.0, 12.0, 10000))
    conj = conjugate_sequence(w, 50)
    np.testing.assert_allclose(conj.logM[1:], ws.logM[1:51], atol=1e-6)
    report = sandwich_check(w, conj, np.linspace(-1.0, float(conj.lam[-1]), 400))
    assert report.logA <= 1e-6
    assert report.samples == 400


def test_polynomial_weight_loses_rapid_decay():
    a = 3.5
    logt = np.linspace(-8.0, 8.0, 4001)
    w = make_grid(logt, -a * np.log1p(np.exp(logt)))
    with pytest.raises(RapidDecayError) as info:
        conjugate_maximizers(w, 6)
    assert info.value.p > a
    assert info.value.p == 4


def test_rapid_decay_flag_covers_every_power():
    logt = np.linspace(-2.0, 4.0, 601)
    logv = -np.exp(logt)
    assert make_grid(logt, logv).rapid_decay_checked
    assert make_grid(logt, logv, powers=range(1, 51)).rapid_decay_checked
    assert not make_grid(logt, logv, powers=range(1, 61)).rapid_decay_checked


def test_conjugate_stops_where_the_grid_stops_decaying():
    logt = np.linspace(-2.0, 4.0, 601)
    w = make_grid(logt, -np.exp(logt))
    conj = conjugate_sequence(w, 40)
    # sup_x (p x - e^x) = p ln p - p
    p = np.arange(1, 41)
    np.testing.assert_allclose(conj.logM[1:], p * np.log(p) - p, atol=1e-3)
    with pytest.raises(RapidDecayError) as info:
        conjugate_maximizers(w, 60)
    assert 50 < info.value.p <= 60


def test_maximizer_on_left_edge():
    w = make_grid([0.0, 1.0, 2.0], [0.0, -5.0, -10.0])
    with pytest.raises(GridBoundaryError):
        maximize_on_grid(w, 1.0)


def test_non_convex_grid_is_not_conjugated():
    w = make_grid([0.0, 1.0, 2.0, 3.0], [0.0, -3.0, -4.0, -10.0])
    assert not w.convex_checked
    with pytest.raises(NotLogConvexError):
        conjugate_sequence(w, 2)


def test_weight_ab_agrees_with_sequence_form():
    ws = family(parse_family("qgevrey:2", 60))
    w = weight_from_sequence(ws, np.linspace(-1.0, float(ws.lam[-1]), 6000))
    conj = conjugate_sequence(w, 20)
    res = weight_ab_numeric(w, 3, 6, conjugate=conj)
    assert res.sequence_form_deviation == pytest.approx(0.0, abs=1e-6)
    assert res.t_k < res.t_l


def test_ramified_weight_scales_ab():
    ws = family(parse_family("qgevrey:2", 60))
    w = weight_from_sequence(ws, np.linspace(-1.0, float(ws.lam[-1]), 6000))
    base = weight_ab_numeric(w, 3, 6)
    root = weight_ab_numeric(ramify_weight(w, 2.0, RamifyMode.ROOT), 3, 6)
    assert root.logA == pytest.approx(2.0 * base.logA, rel=1e-6)
    power = weight_ab_numeric(ramify_weight(w, 2.0, RamifyMode.POWER), 6, 12)
    assert power.logA == pytest.approx(base.logA, rel=1e-6)


def test_weight_ab_needs_order():
    ws = family(parse_family("gevrey:1", 100))
    w = weight_from_sequence(ws, np.linspace(-1.0, 4.0, 100))
    with pytest.raises(ParameterError):
        weight_ab_numeric(w, 3, 3)
