import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.models import CoefficientPrefix, FamilyKind, FamilySpec
from app.services.condition_b import ABOracle, search_lusky
from app.services.sequences import family, from_log_quotients


@pytest.fixture(scope="session")
def qgevrey2():
    return family(FamilySpec(kind=FamilyKind.QGEVREY, horizon=500, q=2.0))


@pytest.fixture(scope="session")
def qgevrey2_cert(qgevrey2):
    return search_lusky(ABOracle.entire(qgevrey2), 500, 1.0, 10.0)


@pytest.fixture
def powers_of_two():
    """mu_p = 2^p, p = 1..13."""
    return from_log_quotients(np.arange(1, 14, dtype=float) * math.log(2.0), name="mu=2^p")


@pytest.fixture
def qgevrey_even_coeffs():
    """b_{2j} = 2^{-4j^2}, zero elsewhere, up to l = 20."""
    logabs = np.full(21, -np.inf)
    for l in range(2, 21, 2):
        logabs[l] = -(l ** 2) * math.log(2.0)
    return CoefficientPrefix(logabs=logabs)
