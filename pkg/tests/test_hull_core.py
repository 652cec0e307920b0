import math

import numpy as np
import pytest

from app.exceptions import CertificateMismatchError, ParameterError
from app.models import CoefficientPrefix, LuskyCertificate, Verdict
from app.services.condition_b import ABOracle, certificate_for_chain, forward_shift
from app.services.hull_core import block_stats, coeff_class_bound, core_sup_grid, log_c, reweight


def test_qgevrey_example_blocks_vanish(qgevrey2, qgevrey2_cert, qgevrey_even_coeffs):
    report = block_stats(qgevrey2, qgevrey2_cert, 1.0, qgevrey_even_coeffs)
    # blocks (1, 3], ..., (17, 19]; (19, 21] is past the prefix
    assert len(report.rows) == 9
    for row in report.rows:
        assert row.log_hull == pytest.approx(0.0, abs=1e-9)
        assert row.log_core == pytest.approx(0.0, abs=1e-9)
    assert report.hull_bounded == Verdict.HOLDS
    assert report.core_bounded == Verdict.HOLDS


def test_core_dominates_hull_by_at_most_half_log_two(qgevrey2, qgevrey2_cert):
    rng = np.random.default_rng(11)
    logabs = rng.uniform(-5.0, 5.0, size=61) - np.arange(61) ** 2 * math.log(2.0)
    report = block_stats(qgevrey2, qgevrey2_cert, 1.0, CoefficientPrefix(logabs=logabs))
    for row in report.rows:
        # two coefficients per block: l1 <= sqrt(2) l2
        assert row.log_hull <= row.log_core + 1e-9
        assert row.log_core - row.log_hull <= 0.5 * math.log(2.0) + 1e-9


def test_c_shift_maps_statistics(qgevrey2, qgevrey2_cert):
    rng = np.random.default_rng(3)
    coeffs = CoefficientPrefix(logabs=rng.uniform(-5.0, 5.0, size=41) - np.arange(41) ** 2 * math.log(2.0))
    base = block_stats(qgevrey2, qgevrey2_cert, 1.0, coeffs)
    shifted = block_stats(qgevrey2, qgevrey2_cert, 2.5, reweight(coeffs, 1.0, 2.5))
    for r, s in zip(base.rows, shifted.rows):
        assert s.log_hull == pytest.approx(r.log_hull, rel=1e-9, abs=1e-9)
        assert s.log_core == pytest.approx(r.log_core, rel=1e-9, abs=1e-9)


def test_growing_coefficients_fail_the_tail(qgevrey2, qgevrey2_cert, qgevrey_even_coeffs):
    grown = CoefficientPrefix(logabs=qgevrey_even_coeffs.logabs + np.arange(21) * 1.0)
    report = block_stats(qgevrey2, qgevrey2_cert, 1.0, grown)
    assert report.hull_bounded == Verdict.FAILS
    assert report.slope_hull == pytest.approx(2.0, rel=1e-6)


def test_forward_shift_moves_the_anchor(qgevrey2, qgevrey2_cert, qgevrey_even_coeffs):
    report = block_stats(qgevrey2, qgevrey2_cert, 1.0, qgevrey_even_coeffs, forward_shift=True)
    assert len(report.rows) == 9
    assert all(math.isfinite(r.log_hull) for r in report.rows)


def test_all_zero_block_is_minus_infinity(qgevrey2, qgevrey2_cert):
    logabs = np.full(21, -np.inf)
    logabs[2] = 0.0
    report = block_stats(qgevrey2, qgevrey2_cert, 1.0, CoefficientPrefix(logabs=logabs))
    assert math.isfinite(report.rows[0].log_hull)
    assert report.rows[1].log_hull == -math.inf
    assert report.rows[1].log_core == -math.inf


def test_prefix_too_short(qgevrey2, qgevrey2_cert):
    with pytest.raises(ParameterError):
        block_stats(qgevrey2, qgevrey2_cert, 1.0, CoefficientPrefix(logabs=np.zeros(4)))


def test_unverified_certificate_is_refused(qgevrey2):
    oracle = ABOracle.entire(qgevrey2)
    bad = certificate_for_chain(oracle, [1, 3, 7, 9], 1.0, 10.0)
    with pytest.raises(CertificateMismatchError):
        block_stats(qgevrey2, bad, 1.0, CoefficientPrefix(logabs=np.zeros(12)))


def test_shifted_certificate_still_accepted(qgevrey2, qgevrey2_cert, qgevrey_even_coeffs):
    report = block_stats(qgevrey2, forward_shift(qgevrey2_cert, 1), 1.0, qgevrey_even_coeffs)
    assert report.rows[0].a_j == 3


def test_invalid_c():
    with pytest.raises(ParameterError):
        log_c(0.0)
    with pytest.raises(ParameterError):
        log_c(math.inf)


def test_core_sup_of_zero_series(qgevrey2):
    assert core_sup_grid(qgevrey2, 1.0, CoefficientPrefix(logabs=np.full(5, -np.inf)), [0.0, 1.0]) == -math.inf
    with pytest.raises(ParameterError):
        core_sup_grid(qgevrey2, 1.0, CoefficientPrefix(logabs=np.zeros(5)), [])


def test_core_sup_of_constant(qgevrey2):
    # b_0 = 1: v(r) <= 1 with equality for c r <= mu_1
    coeffs = CoefficientPrefix(logabs=np.array([0.0, -np.inf]))
    assert core_sup_grid(qgevrey2, 1.0, coeffs, np.linspace(-3.0, 3.0, 61)) == pytest.approx(0.0)


def test_coefficient_class_bound(qgevrey2, qgevrey_even_coeffs):
    # |b_j| M_j = 2^{-j^2} 2^{j^2} = 1 on even j
    assert coeff_class_bound(qgevrey2, 1.0, qgevrey_even_coeffs) == pytest.approx(0.0, abs=1e-9)
    assert coeff_class_bound(qgevrey2, 2.0, qgevrey_even_coeffs) == pytest.approx(-2 * math.log(2.0), abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_core_sup_dominates_block_core(qgevrey2, qgevrey2_cert, seed):
    rng = np.random.default_rng(seed)
    c = float(rng.uniform(0.5, 3.0))
    logabs = rng.uniform(-5.0, 5.0, size=41) - np.arange(41) ** 2 * math.log(2.0)
    logabs[rng.random(41) < 0.2] = -np.inf
    coeffs = CoefficientPrefix(logabs=logabs)
    report = block_stats(qgevrey2, qgevrey2_cert, c, coeffs)
    anchors = [float(qgevrey2.lam[row.a_j]) - math.log(c) for row in report.rows]
    for row, logr in zip(report.rows, anchors):
        assert core_sup_grid(qgevrey2, c, coeffs, [logr]) >= row.log_core - 1e-9
    assert core_sup_grid(qgevrey2, c, coeffs, anchors) >= report.sup_core - 1e-9


def test_tampered_certificate_rows_are_refused(qgevrey2, qgevrey2_cert, qgevrey_even_coeffs):
    rows = list(qgevrey2_cert.rows)
    rows[0] = (rows[0][0], rows[0][1] - 1.0)
    forged = LuskyCertificate(
        sequence=qgevrey2_cert.sequence,
        horizon=qgevrey2_cert.horizon,
        a=qgevrey2_cert.a,
        logb=qgevrey2_cert.logb,
        logK=qgevrey2_cert.logK,
        rows=tuple(rows),
    )
    with pytest.raises(CertificateMismatchError):
        block_stats(qgevrey2, forged, 1.0, qgevrey_even_coeffs)
