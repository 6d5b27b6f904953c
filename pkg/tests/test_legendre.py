import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from ellipstat.legendre import negative_order_relation, q_at_zero, q_column, q_eval


def scipy_q(n, m, x):
    """Normalized via scipy's lpmv, which carries the Condon-Shortley phase."""
    am = abs(m)
    norm = math.sqrt((2 * n + 1) / 2 * math.exp(math.lgamma(n - am + 1) - math.lgamma(n + am + 1)))
    value = norm * special.lpmv(am, n, x)
    return value * (-1) ** am if m < 0 else value


def test_examples():
    for x in (-1, -0.3, 0, 0.7, 1):
        assert q_eval(0, 0, x) == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        assert q_eval(1, 0, x) == pytest.approx(math.sqrt(1.5) * x, abs=1e-15)
    assert q_eval(2, 0, 0.0) == pytest.approx(-math.sqrt(5 / 8), rel=1e-15)


def test_domain_errors():
    with pytest.raises(ValueError):
        q_eval(1, 2, 0.0)
    with pytest.raises(ValueError):
        q_at_zero(3, -4)
    with pytest.raises(ValueError):
        q_eval(2, 0, 1.5)


@pytest.mark.parametrize("n", range(0, 12))
def test_matches_scipy(n):
    x = np.linspace(-1, 1, 41)
    for m in range(-n, n + 1):
        assert np.allclose(q_eval(n, m, x), [scipy_q(n, m, t) for t in x], rtol=1e-12, atol=1e-13)


def test_orthonormality():
    x, w = np.polynomial.legendre.leggauss(80)
    for m in range(0, 31):
        col = q_column(30, m, x)  # degrees m..30
        gram = (col * w) @ col.T
        assert np.allclose(gram, np.eye(len(col)), atol=1e-10)


@given(st.integers(0, 40), st.data(), st.floats(-1, 1))
def test_parity(n, data, x):
    m = data.draw(st.integers(-n, n))
    assert q_eval(n, m, -x) == pytest.approx((-1) ** (n - m) * q_eval(n, m, x), rel=1e-12, abs=1e-14)


def test_q_at_zero_examples():
    assert q_at_zero(1, 0) == 0.0
    assert q_at_zero(0, 0) == pytest.approx(1 / math.sqrt(2), rel=1e-16)
    assert q_at_zero(2, 0) == pytest.approx(-math.sqrt(5 / 8), rel=1e-15)


@pytest.mark.parametrize("n", [0, 1, 5, 19, 20, 21, 35, 60])
def test_q_at_zero_matches_recurrence(n):
    for m in range(-n, n + 1):
        expected = q_eval(n, m, 0.0)
        got = q_at_zero(n, m)
        if (n - m) % 2:
            assert got == 0.0
        assert got == pytest.approx(expected, rel=1e-13, abs=1e-13)


def test_negative_order_relation():
    assert negative_order_relation(1, 1) == -1
    assert negative_order_relation(3, 1) == -1
    assert negative_order_relation(2, 2) == 1
    x = np.linspace(-1, 1, 9)
    for n, m in [(1, 1), (3, 1), (2, 2), (7, 4)]:
        assert np.allclose(q_eval(n, -m, x), negative_order_relation(n, m) * q_eval(n, m, x), atol=1e-15)


def test_rodrigues_sign_for_m2():
    # Q_2^{2} from the Rodrigues form with the (-1)^m phase: 3 (1 - x^2) times norm
    x = 0.4
    norm = math.sqrt(5 / 2 * math.factorial(0) / math.factorial(4))
    assert q_eval(2, 2, x) == pytest.approx(norm * 3 * (1 - x * x), rel=1e-14)
    assert q_eval(2, -2, x) == pytest.approx(q_eval(2, 2, x), rel=1e-14)


def test_high_degree_stability():
    mpmath.mp.dps = 50
    for x in (0.0, 0.3, 0.77, 0.999):
        ref = mpmath.sqrt(mpmath.mpf(201) / 2) * mpmath.legendre(100, mpmath.mpf(x))
        assert q_eval(100, 0, x) == pytest.approx(float(ref), rel=1e-10, abs=1e-14)
