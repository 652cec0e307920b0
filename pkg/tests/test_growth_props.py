import math

import numpy as np
import pytest

from app.exceptions import ParameterError
from app.models import Verdict
from app.services.growth_props import (
    asymptotic_stats,
    compare_sequences,
    omega6_check,
    property_table,
    structural_checks,
)
from app.services.sequences import family, from_log_quotients, parse_family, power_scale


def _by_name(reports):
    return {r.property: r for r in reports}


def test_property_table_keys():
    table = property_table(family(parse_family("gevrey:2", 100)))
    assert set(table) == {"normalized", "log-convex", "slc", "dc", "lc-limit", "mg", "beta1", "beta3", "gamma1"}


def test_log_convexity_witness():
    reports = _by_name(structural_checks(from_log_quotients([0.0, 2.0, 1.0])))
    assert reports["log-convex"].verdict == Verdict.FAILS
    assert reports["log-convex"].witness == (3.0, 1.0)
    assert reports["normalized"].verdict == Verdict.HOLDS


def test_not_normalized():
    reports = _by_name(structural_checks(from_log_quotients([-0.5, 1.0])))
    assert reports["normalized"].verdict == Verdict.FAILS
    assert reports["normalized"].witness == (1.0, -0.5)


def test_gevrey_is_strongly_log_convex_with_moderate_growth():
    table = property_table(family(parse_family("gevrey:2", 1000)))
    assert table["slc"].verdict == Verdict.HOLDS
    assert table["dc"].verdict == Verdict.HOLDS
    assert table["mg"].verdict == Verdict.HOLDS
    assert table["mg"].statistic == pytest.approx(2 * math.log(2.0))
    assert table["beta3"].verdict == Verdict.HOLDS
    assert table["gamma1"].verdict == Verdict.HOLDS


def test_qgevrey_fails_moderate_growth():
    table = property_table(family(parse_family("qgevrey:2", 1000)))
    assert table["mg"].verdict == Verdict.FAILS
    assert table["mg"].witness is not None
    assert table["dc"].verdict == Verdict.HOLDS
    assert table["beta1"].verdict == Verdict.HOLDS
    assert table["beta1"].window == (251, 500)


def test_asymptotic_parameter_checks():
    ws = family(parse_family("gevrey:1", 50))
    with pytest.raises(ParameterError):
        asymptotic_stats(ws, Q=1)
    with pytest.raises(ParameterError):
        asymptotic_stats(ws, tail_fraction=0.0)
    with pytest.raises(ParameterError):
        asymptotic_stats(from_log_quotients([1.0]))


def test_comparison_order():
    g1 = family(parse_family("gevrey:1", 1000))
    g2 = family(parse_family("gevrey:2", 1000))
    result = compare_sequences(g1, g2)
    assert result.forward.verdict == Verdict.HOLDS
    assert result.backward.verdict == Verdict.FAILS
    assert result.equivalent == Verdict.FAILS
    assert compare_sequences(g1, g1).equivalent == Verdict.HOLDS


def test_comparison_needs_equal_horizons():
    with pytest.raises(ParameterError):
        compare_sequences(family(parse_family("gevrey:1", 10)), family(parse_family("gevrey:1", 11)))


def test_omega6_gevrey_holds():
    report = omega6_check(family(parse_family("gevrey:1", 1000)))
    assert report.verdict == Verdict.HOLDS
    assert report.statistic <= 4.0


def test_omega6_qgevrey_fails():
    report = omega6_check(family(parse_family("qgevrey:2", 1000)))
    assert report.verdict == Verdict.FAILS
    assert math.isinf(report.statistic)
    assert report.witness is not None


def test_omega6_candidates_validated():
    with pytest.raises(ParameterError):
        omega6_check(family(parse_family("gevrey:1", 100)), H_candidates=[0.5])


def test_omega6_samples_given_in_log_t():
    ws = family(parse_family("qgevrey:2", 1000))
    logt = np.linspace(720.0, 1300.0, 30)
    report = omega6_check(ws, logt_samples=logt)
    assert report.verdict == Verdict.FAILS
    assert report.window == (0, 30)
    assert 720.0 <= report.witness[0] <= 1300.0
    assert report.witness[1] > 0.0


@pytest.mark.parametrize(
    "spec", ["gevrey:0.5", "gevrey:1", "gevrey:3", "harmonic:1", "qgevrey:2", "qalpha:2,3", "steps-dyadic:2"]
)
def test_verdict_implications(spec):
    table = property_table(family(parse_family(spec, 1000)))
    if table["beta1"].verdict == Verdict.HOLDS:
        assert table["beta3"].verdict == Verdict.HOLDS
    if table["mg"].verdict == Verdict.HOLDS:
        assert table["dc"].verdict == Verdict.HOLDS


def test_implications_are_not_vacuous():
    verdicts = [property_table(family(parse_family(spec, 1000))) for spec in ("gevrey:1", "qgevrey:2")]
    assert any(t["mg"].verdict == Verdict.HOLDS for t in verdicts)
    assert any(t["beta1"].verdict == Verdict.HOLDS for t in verdicts)


@pytest.mark.parametrize("horizon", [50, 500])
@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_power_dominates_gevrey(horizon, s):
    ws = family(parse_family("gevrey:1", horizon))
    result = compare_sequences(ws, power_scale(ws, s))
    assert result.forward.verdict == Verdict.HOLDS
    assert result.backward.verdict == Verdict.FAILS
    assert result.equivalent == Verdict.FAILS
