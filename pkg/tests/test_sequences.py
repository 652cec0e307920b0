import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.exceptions import HorizonExceededError, NonFiniteError, ParameterError
from app.models import CombineMode, DeltaSeq, FamilyKind
from app.services.sequences import (
    combine,
    dyadic_steps,
    family,
    from_deltas,
    from_log_quotients,
    geometric_steps,
    interpolate,
    lusky_chain,
    parse_family,
    power_scale,
    to_deltas,
)

lambdas = st.lists(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_subnormal=False), min_size=1, max_size=60)


def test_log_moments_are_partial_sums():
    ws = from_log_quotients([0.5, 1.0, 2.0])
    assert ws.logM.tolist() == pytest.approx([0.0, 0.5, 1.5, 3.5])
    assert ws.horizon == 3
    assert ws.is_normalized and ws.is_log_convex


def test_flags_are_computed_not_enforced():
    ws = from_log_quotients([-1.0, 2.0, 1.0])
    assert not ws.is_normalized
    assert not ws.is_log_convex


def test_non_finite_entry_names_its_index():
    with pytest.raises(NonFiniteError) as info:
        from_log_quotients([0.0, 1.0, math.inf])
    assert info.value.index == 3


def test_empty_lambda_is_rejected():
    with pytest.raises(ParameterError):
        from_log_quotients([])


@given(lambdas)
def test_increments_reproduce_lambda_exactly(values):
    ws = from_log_quotients(values)
    back = from_deltas(to_deltas(ws), allow_non_lc=True)
    assert back.lam.tolist() == ws.lam.tolist()


def test_negative_increment_needs_explicit_opt_in():
    ds = DeltaSeq(delta=np.array([1.0, -0.5]))
    with pytest.raises(ParameterError):
        from_deltas(ds)
    assert from_deltas(ds, allow_non_lc=True).lam.tolist() == [1.0, 0.5]


def test_qgevrey_quotients():
    ws = family(parse_family("qgevrey:2", 10))
    p = np.arange(1, 11)
    np.testing.assert_allclose(ws.lam, (2 * p - 1) * math.log(2.0))
    assert ws.name == "qgevrey:2"


def test_gevrey_and_harmonic():
    gev = family(parse_family("gevrey:1", 5))
    np.testing.assert_allclose(gev.lam, np.log(np.arange(1, 6)))
    har = family(parse_family("harmonic:2", 3))
    np.testing.assert_allclose(har.lam, 2.0 * np.array([1.0, 1.5, 1.5 + 1.0 / 3.0]))


def test_qalpha_requires_alpha_above_two():
    with pytest.raises(ParameterError):
        family(parse_family("qalpha:2,2", 10))
    ws = family(parse_family("qalpha:2,3", 4))
    np.testing.assert_allclose(ws.lam, np.array([1.0, 7.0, 19.0, 37.0]) * math.log(2.0))


def test_geometric_steps_blocks():
    ws = geometric_steps(2, 2.0, 15)
    expected = [1, 2, 2, 4, 4, 4, 4] + [8] * 8
    np.testing.assert_allclose(ws.lam, np.array(expected) * math.log(2.0))


def test_dyadic_steps_blocks():
    ws = dyadic_steps(3.0, 8)
    expected = [0, 1, 1, 2, 2, 2, 2, 3]
    np.testing.assert_allclose(ws.lam, np.array(expected) * math.log(3.0))


def test_steps_horizon_must_hold_a_full_block():
    with pytest.raises(ParameterError):
        family(parse_family("steps-geometric:4,2", 3))


def test_lusky_chain_gaps():
    assert lusky_chain("linear", 3) == [1, 4, 8, 13]
    assert lusky_chain("constant", 3, a1=2) == [2, 4, 6, 8]
    with pytest.raises(ParameterError):
        lusky_chain("quadratic", 3)


def test_ajexample_family_from_string():
    ws = family(parse_family("ajexample:linear,3,5", 40))
    assert ws.name == "ajexample:C=3"
    assert ws.is_log_convex


def test_unknown_family():
    with pytest.raises(ParameterError, match="unknown family"):
        parse_family("lognormal:1", 10)


def test_malformed_family_parameters():
    with pytest.raises(ParameterError, match="malformed"):
        parse_family("qgevrey:abc", 10)


def test_horizon_cap(monkeypatch):
    from app.config import settings

    monkeypatch.setattr(settings, "MAX_HORIZON", 100)
    with pytest.raises(HorizonExceededError):
        family(parse_family("gevrey:1", 101))


def test_power_scale_and_combine():
    ws = from_log_quotients([1.0, 2.0], name="m")
    assert power_scale(ws, 2.0).lam.tolist() == [2.0, 4.0]
    prod = combine(ws, ws)
    assert prod.lam.tolist() == [2.0, 4.0]
    quot = combine(ws, power_scale(ws, 0.5), CombineMode.QUOTIENT)
    assert quot.lam.tolist() == [0.5, 1.0]


def test_combine_horizon_mismatch():
    with pytest.raises(ParameterError):
        combine(from_log_quotients([1.0]), from_log_quotients([1.0, 2.0]))


def test_interpolation_keeps_moments_at_multiples():
    ws = family(parse_family("gevrey:1", 20))
    for r in (2, 3):
        ramified = interpolate(ws, r)
        assert ramified.horizon == r * ws.horizon
        np.testing.assert_allclose(ramified.logM[::r], ws.logM, rtol=1e-12, atol=1e-12)
    assert interpolate(ws, 1) is ws


def test_interpolation_rejects_bad_r():
    ws = from_log_quotients([1.0])
    with pytest.raises(ParameterError):
        interpolate(ws, 0)
    with pytest.raises(ParameterError):
        interpolate(ws, 1.5)


def test_family_kind_values():
    assert FamilyKind("steps-dyadic") == FamilyKind.STEPS_DYADIC
