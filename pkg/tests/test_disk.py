import math

import numpy as np
import pytest

from app.exceptions import (
    CertificateMismatchError,
    DegenerateQuotientError,
    HorizonExceededError,
    NotLogConvexError,
)
from app.models import CoefficientPrefix, LuskyCertificate
from app.services.condition_b import ABOracle, search_lusky, verify_certificate
from app.services.disk import (
    DISK_SUFFIX,
    disk_block_stats,
    disk_geometry,
    disk_geometry_table,
    disk_log_ab,
    disk_log_ab_direct,
    disk_maximizer,
    disk_oracle,
)
from app.services.sequences import from_log_quotients


def test_hand_computed_first_pair(powers_of_two):
    log_a, _ = disk_log_ab(powers_of_two, 1, 2)
    assert log_a == pytest.approx(3 * math.log(3 / 7) + 5 * math.log(2.0), abs=1e-12)


def test_formula_matches_direct_evaluation(powers_of_two):
    for p in range(1, 13):
        for q in range(p + 1, 13):
            formula = disk_log_ab(powers_of_two, p, q)
            direct = disk_log_ab_direct(powers_of_two, p, q)
            assert formula[0] == pytest.approx(direct[0], rel=1e-9, abs=1e-9)
            assert formula[1] == pytest.approx(direct[1], rel=1e-9, abs=1e-9)


def test_disk_ab_independent_of_c(powers_of_two):
    assert disk_log_ab_direct(powers_of_two, 2, 5, c=3.0) == pytest.approx(disk_log_ab_direct(powers_of_two, 2, 5))


def test_geometry_row(powers_of_two):
    row = disk_geometry(powers_of_two, 1.0, 1)
    assert row.k_p == pytest.approx(3.0)
    assert math.exp(row.logr) == pytest.approx(0.75)
    assert row.logv == pytest.approx(-math.log(2.0))
    scaled = disk_geometry(powers_of_two, 2.0, 1)
    assert math.exp(scaled.logr) == pytest.approx(0.375)


def test_geometry_table_is_increasing(powers_of_two):
    rows = disk_geometry_table(powers_of_two, 1.0, range(1, 12))
    assert [r.p for r in rows] == list(range(1, 12))
    assert all(b.k_p > a.k_p for a, b in zip(rows, rows[1:]))
    assert all(b.logr > a.logr for a, b in zip(rows, rows[1:]))


def test_geometry_beyond_horizon(powers_of_two):
    with pytest.raises(HorizonExceededError):
        disk_geometry(powers_of_two, 1.0, 13)


def test_maximizer_hits_the_anchors(powers_of_two):
    for p in range(1, 11):
        row = disk_geometry(powers_of_two, 1.0, p)
        assert disk_maximizer(powers_of_two, 1.0, row.k_p) == pytest.approx(math.exp(row.logr), rel=1e-9)


def test_maximizers_interleave(powers_of_two):
    for p in range(1, 10):
        lo, hi = disk_geometry(powers_of_two, 1.0, p), disk_geometry(powers_of_two, 1.0, p + 1)
        for k in np.linspace(lo.k_p, hi.k_p, 7)[1:-1]:
            r = disk_maximizer(powers_of_two, 1.0, float(k))
            assert math.exp(lo.logr) * (1 - 1e-12) <= r <= math.exp(hi.logr) * (1 + 1e-12)


def test_maximizer_beyond_horizon(powers_of_two):
    with pytest.raises(HorizonExceededError):
        disk_maximizer(powers_of_two, 1.0, 1e9)


def test_disk_needs_growing_quotients():
    with pytest.raises(DegenerateQuotientError):
        disk_geometry(from_log_quotients([0.0, 0.0, 1.0]), 1.0, 1)
    with pytest.raises(NotLogConvexError):
        disk_geometry(from_log_quotients([1.0, 0.5, 2.0]), 1.0, 1)


def test_disk_search_tags_the_certificate(powers_of_two):
    oracle = disk_oracle(powers_of_two)
    assert oracle.name == "mu=2^p" + DISK_SUFFIX
    result = search_lusky(oracle, powers_of_two.horizon, 1.0, 60.0)
    assert isinstance(result, LuskyCertificate)
    assert result.a == (1, 3, 5, 7, 9, 11)
    assert result.sequence.endswith(DISK_SUFFIX)
    assert verify_certificate(oracle, result).ok
    with pytest.raises(CertificateMismatchError):
        verify_certificate(ABOracle.entire(powers_of_two), result)


def test_disk_blocks_need_a_disk_certificate(powers_of_two):
    entire = ABOracle.entire(powers_of_two)
    cert = LuskyCertificate(sequence=entire.name, horizon=13, a=(1, 3, 5), logb=1.0, logK=10.0, rows=())
    with pytest.raises(CertificateMismatchError):
        disk_block_stats(powers_of_two, cert, 1.0, CoefficientPrefix(logabs=np.zeros(8)))


@pytest.mark.parametrize("p", [10, 20, 30, 40, 50])
def test_formula_is_stable_for_large_quotients(p):
    ws = from_log_quotients(np.arange(1, 56, dtype=float) * math.log(2.0), name="mu=2^p")
    for q in (p + 1, p + 3):
        formula = disk_log_ab(ws, p, q)
        direct = disk_log_ab_direct(ws, p, q)
        assert formula[0] == pytest.approx(direct[0], rel=1e-9)
        assert formula[1] == pytest.approx(direct[1], rel=1e-9)


def test_formula_is_stable_for_gevrey_far_out():
    ws = from_log_quotients(np.log(np.arange(1, 2601, dtype=float)), name="gevrey:1")
    p = 2500
    # p^2 ln(1 - 1/(p+1)^2) + (p+1) ln(1 + 1/(p+1))
    exact = p * p * math.log1p(-1.0 / (p + 1) ** 2) + (p + 1) * math.log1p(1.0 / (p + 1))
    log_a, _ = disk_log_ab(ws, p, p + 1)
    assert log_a == pytest.approx(exact, abs=1e-10)
    for q in (p + 10, p + 50):
        formula = disk_log_ab(ws, p, q)
        direct = disk_log_ab_direct(ws, p, q)
        assert formula[0] == pytest.approx(direct[0], rel=1e-9, abs=1e-9)
        assert formula[1] == pytest.approx(direct[1], rel=1e-9, abs=1e-9)


def test_maximizer_at_zero_power_with_unit_first_quotient():
    ws = from_log_quotients([0.0, math.log(2.0), 2 * math.log(2.0), 3 * math.log(2.0)])
    assert disk_maximizer(ws, 1.0, 0.0) == 0.0


def test_maximizer_at_zero_power_below_first_kink(powers_of_two):
    assert disk_maximizer(powers_of_two, 1.0, 0.0) == pytest.approx(0.5)
