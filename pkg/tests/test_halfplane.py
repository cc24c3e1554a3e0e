import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levylab.halfplane import (
    HALF_PI,
    HomogeneousFn,
    check_involution,
    default_grid,
    dot,
    from_callable,
    kappa_norm,
    power_of_one_dot,
    sup_distance,
)

finite = st.floats(-10, 10, allow_nan=False)
cplx = st.builds(complex, finite, finite)
quadrant = st.builds(complex, st.floats(0.01, 10), st.floats(0.01, 10))
right_half = st.builds(complex, st.floats(0.01, 10), finite)


def test_dot_closed_forms():
    h = 0.7 - 0.3j
    assert dot(h, 1.0) == h
    assert dot(h, 1j) == np.conj(h)
    # at e^{i pi/4} the product collapses to sqrt(2) Re h
    u = np.exp(1j * np.pi / 4)
    assert abs(dot(h, u) - np.sqrt(2) * h.real) < 1e-15


@given(cplx, cplx)
@settings(max_examples=200, deadline=None)
def test_dot_is_real_linear_in_u(h, u):
    v = 0.3 - 1.7j
    lhs = dot(h, u + v)
    assert abs(lhs - (dot(h, u) + dot(h, v))) <= 1e-12 * (1 + abs(lhs))


@given(st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)), quadrant)
@settings(max_examples=200, deadline=None)
def test_dot_bounds(h, u):
    # |h| |i.u| <= |h.u| <= sqrt(2) |h| |u| on the first quadrant
    val = abs(dot(h, u))
    assert val <= np.sqrt(2) * abs(h) * abs(u) + 1e-12
    assert val >= abs(h) * abs(dot(1j, u)) - 1e-12


def test_involution_values():
    assert check_involution(1.0) == 1j
    u = np.exp(1j * np.pi / 4)
    assert abs(check_involution(u) - u) < 1e-15


@given(cplx)
@settings(max_examples=100, deadline=None)
def test_involution_is_involution(u):
    assert abs(check_involution(check_involution(u)) - u) < 1e-14


def test_grid_contract():
    g = default_grid(65)
    assert g[0] == 0.0 and g[-1] == HALF_PI and g[32] == 0.25 * np.pi
    assert np.all(np.diff(g) > 0)
    with pytest.raises(ValueError):
        default_grid(31)
    with pytest.raises(ValueError):
        default_grid(64)


def test_evaluation_contract():
    alpha = 1.3
    f = power_of_one_dot(0.5 * alpha, m=65)
    # grid points return stored values exactly
    assert np.array_equal(f.values_at_angle(f.thetas), f.values)
    # homogeneity is exact by construction of the evaluator
    j = 17
    u = np.exp(1j * f.thetas[j])
    assert abs(f(2.0 * u) - 2.0 ** f.beta * f.values[j]) < 1e-14
    with pytest.raises(ValueError):
        f(np.array([-1.0 + 0.5j]))
    with pytest.raises(ValueError):
        f(np.array([0.0j]))


def test_offgrid_interpolation_error():
    # closed form (1.u)^(a/2) sampled at m=257, evaluated off-grid
    alpha = 1.1
    f = power_of_one_dot(0.5 * alpha, m=257)
    theta = np.linspace(0.0, HALF_PI, 1111)
    exact = (np.cos(theta) + np.sin(theta)) ** (0.5 * alpha)
    assert np.max(np.abs(f.values_at_angle(theta) - exact)) < 1e-6


def test_kappa_norm_closed_form():
    alpha = 1.0
    f = power_of_one_dot(0.5 * alpha, m=129)
    kn = kappa_norm(f, 0.0)
    # sup of (cos+sin)^(1/2) is 2^(1/4) at pi/4
    assert abs(kn.value_inf - 2 ** 0.25) < 1e-6
    assert kn.value_kappa >= kn.value_inf >= 0
    with pytest.raises(ValueError):
        kappa_norm(f, 1.0)


def test_weight_vanishes_at_central_angle():
    u = np.exp(1j * np.pi / 4)
    assert abs(dot(1j, u)) < 1e-15


def test_partials_match_finite_differences():
    alpha = 1.4
    f = from_callable(0.5 * alpha,
                      lambda t: (np.cos(t) + np.sin(t)) ** (0.5 * alpha)
                      * (1.0 + 0.2 * np.sin(2 * t)), m=257)
    thetas = np.linspace(0.1, HALF_PI - 0.1, 7)
    d1, di = f.partials_on_circle(thetas)
    h = 1e-3
    for k, t in enumerate(thetas):
        u = np.exp(1j * t)
        fd1 = (f(u + h) - f(u - h)) / (2 * h)
        fdi = (f(u + 1j * h) - f(u - 1j * h)) / (2 * h)
        assert abs(fd1 - d1[k]) < 1e-4 * max(1.0, abs(d1[k]))
        assert abs(fdi - di[k]) < 1e-4 * max(1.0, abs(di[k]))


def test_norm_triangle_and_homogeneity():
    rng = np.random.default_rng(3)
    th = default_grid(65)
    beta = 0.6
    for _ in range(5):
        a = HomogeneousFn(beta, th, rng.normal(size=65) + 1j * rng.normal(size=65))
        b = HomogeneousFn(beta, th, rng.normal(size=65) + 1j * rng.normal(size=65))
        c = HomogeneousFn(beta, th, a.values + b.values)
        for kappa in (0.0, 0.5):
            na, nb, nc = (kappa_norm(x, kappa) for x in (a, b, c))
            assert nc.value_kappa <= na.value_kappa + nb.value_kappa + 1e-9
            scaled = kappa_norm(HomogeneousFn(beta, th, 3.0 * a.values), kappa)
            assert abs(scaled.value_kappa - 3.0 * na.value_kappa) < 1e-9


def test_cone_membership_flag():
    th = default_grid(65)
    good = HomogeneousFn(0.5, th, np.full(65, 0.2 + 0.1j))
    bad = HomogeneousFn(0.5, th, np.full(65, -0.2 + 0.1j))
    assert good.in_nonnegative_cone() and not bad.in_nonnegative_cone()


def test_json_round_trip():
    f = power_of_one_dot(0.55, scale=1.0 + 0.5j, m=65)
    g = HomogeneousFn.from_json(f.to_json())
    assert g.beta == f.beta
    assert np.array_equal(g.values, f.values)
    assert np.array_equal(g.thetas, f.thetas)
    assert sup_distance(f, g) == 0.0
    obj = json.loads(f.to_json())
    assert set(obj) == {"beta", "thetas", "values_re", "values_im"}
