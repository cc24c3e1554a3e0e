import numpy as np
import pytest
from scipy.integrate import quad

from levylab.quadrature import (
    gauss_jacobi_both,
    gauss_jacobi_left,
    gauss_legendre_panels,
    geometric_breaks,
    log_power_rule,
    tanh_sinh,
)


def test_tanh_sinh_plain():
    x, w, _, _ = tanh_sinh(0.0, 1.0, 61)
    assert abs(w.sum() - 1.0) < 1e-12
    assert abs(w @ np.exp(x) - (np.e - 1.0)) < 1e-12


def test_tanh_sinh_endpoint_singularity():
    x, w, da, db = tanh_sinh(0.0, 1.0, 81, endpoint_exponent=-0.75)
    assert abs(w @ da ** -0.75 - 4.0) < 1e-10
    # distances are cancellation-free versions of x - a and b - x
    assert np.all(da > 0) and np.all(db > 0)
    assert abs((da + db)[3] - 1.0) < 1e-14


def test_gauss_jacobi_left_weight():
    x, w = gauss_jacobi_left(16, -0.5, 0.0, 0.5)
    oracle = quad(lambda y: y ** -0.5 * np.cos(y), 0, 0.5)[0]
    assert abs(w @ np.cos(x) - oracle) < 1e-12


def test_gauss_jacobi_both_weights():
    x, w = gauss_jacobi_both(24, -0.25, -0.5, 0.0, 1.0)
    oracle = quad(lambda t: t ** -0.25 * (1 - t) ** -0.5 * np.exp(t),
                  0, 1, limit=200)[0]
    assert abs(w @ np.exp(x) - oracle) < 1e-8


def test_legendre_panels_and_breaks():
    breaks = geometric_breaks(0.0, 1.0, 6, ratio=0.3)
    assert breaks[0] == 0.0 and abs(breaks[-1] - 1.0) < 1e-15
    x, w = gauss_legendre_panels(breaks, order=10)
    assert abs(w @ np.sqrt(x) - 2.0 / 3.0) < 1e-7
    with pytest.raises(ValueError):
        geometric_breaks(0.0, 1.0, 6, toward="center")


def test_log_power_rule_complex_exponent():
    e = -0.6 + 1.3j
    x, w = log_power_rule(e, 0.8)
    # exact moments of x^e against 1 and x on [0, 0.8]
    assert abs(w @ np.ones_like(x) - 0.8 ** (1 + e) / (1 + e)) < 1e-12
    assert abs(w @ x - 0.8 ** (2 + e) / (2 + e)) < 1e-12
    with pytest.raises(ValueError):
        log_power_rule(-1.2, 1.0)
