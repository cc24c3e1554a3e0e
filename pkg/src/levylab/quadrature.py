"""Quadrature rules shared by the integral-operator modules.

Three families cover every integral in this package:

* tanh-sinh (double-exponential) rules for finite intervals whose
  integrand has algebraic endpoint singularities,
* Gauss-Jacobi rules that fold a one-sided algebraic weight ``(x-a)^mu``
  or ``(b-x)^mu`` exactly into the weights,
* composite Gauss-Legendre panels, optionally geometrically graded
  toward one endpoint, for smooth integrands with a nearby singularity.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import expit, roots_jacobi, roots_legendre


def tanh_sinh(a: float, b: float, n: int, endpoint_exponent: float = 0.0):
    """Tanh-sinh rule on (a, b) with n nodes.

    ``endpoint_exponent`` is the worst algebraic exponent lam > -1 such
    that the integrand behaves like ``dist^lam`` at an endpoint; the
    truncation range is widened so the transformed tail of such an
    integrand is below ~1e-13.

    Returns ``(nodes, weights, dist_a, dist_b)`` where the dist arrays
    are the node distances to each endpoint, computed without
    cancellation (needed to evaluate singular factors accurately).
    """
    if n < 5:
        raise ValueError("tanh-sinh rule needs at least 5 nodes")
    lam = 1.0 + endpoint_exponent
    if lam <= 0:
        raise ValueError("endpoint exponent must exceed -1")
    mass = 35.0 / lam
    t_max = float(np.arcsinh(2.0 * mass / np.pi))
    t_base = float(np.arcsinh(70.0 / np.pi))
    if t_max > t_base:
        # keep the node spacing of the lam = 1 rule when the range widens
        n = int(np.ceil(n * t_max / t_base)) | 1
    t = np.linspace(-t_max, t_max, n)
    h = t[1] - t[0]
    u = 0.5 * np.pi * np.sinh(t)
    sp = expit(2.0 * u)
    sm = expit(-2.0 * u)
    width = b - a
    nodes = a + width * sp
    weights = h * 0.5 * np.pi * np.cosh(t) * 2.0 * sp * sm * width
    return nodes, weights, width * sp, width * sm


def gauss_jacobi_left(n: int, exponent: float, a: float, b: float):
    """Nodes/weights for ``int_a^b (x-a)^exponent f(x) dx = sum w f(x)``."""
    x, w = roots_jacobi(n, 0.0, exponent)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = w * half ** (1.0 + exponent)
    return nodes, weights


def gauss_jacobi_both(n: int, exp_left: float, exp_right: float, a: float, b: float):
    """Rule for ``int_a^b (x-a)^exp_left (b-x)^exp_right f(x) dx``."""
    x, w = roots_jacobi(n, exp_right, exp_left)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = w * half ** (1.0 + exp_left + exp_right)
    return nodes, weights


@lru_cache(maxsize=64)
def _gl(n: int):
    return roots_legendre(n)


@lru_cache(maxsize=256)
def cached_roots_jacobi(n: int, a: float, b: float):
    return roots_jacobi(n, a, b)


@lru_cache(maxsize=128)
def _log_power_unit_rule(expo: complex, order: int, budget: float):
    re = expo.real
    freq = abs(expo.imag)
    span = budget / (1.0 + re)
    step = 3.0 / (1.0 + re + freq)
    panels = max(4, int(np.ceil(span / step)))
    v, gw = gauss_legendre_panels(np.linspace(0.0, span, panels + 1), order)
    x = np.exp(-v)
    w = np.exp(-(1.0 + expo) * v) * gw
    return x, w


def log_power_rule(expo: complex, delta: float, order: int = 8,
                   budget: float = 38.0):
    """Rule for ``int_0^delta x**expo phi(x) dx`` with complex expo.

    Substituting x = delta*exp(-v) turns the complex power into a
    decaying oscillatory exponential in v, resolved by composite
    Gauss-Legendre with oscillation-aware panel count; the algebraic
    endpoint behavior (including its log oscillation) sits entirely in
    the complex weights, so phi only needs to be smooth on [0, delta].
    """
    expo = complex(expo)
    if expo.real <= -1:
        raise ValueError("need Re(expo) > -1")
    x1, w1 = _log_power_unit_rule(expo, order, budget)
    return delta * x1, delta ** (1.0 + expo) * w1


def gauss_legendre_panels(breaks, order: int = 12):
    """Composite Gauss-Legendre rule over consecutive panels."""
    x, w = _gl(order)
    breaks = np.asarray(breaks, dtype=float)
    lo = breaks[:-1]
    hi = breaks[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_breaks(a: float, b: float, n_panels: int, ratio: float = 0.25,
                     toward: str = "left"):
    """Panel breakpoints on [a, b] shrinking geometrically toward one end."""
    if n_panels < 1:
        raise ValueError("need at least one panel")
    rel = ratio ** np.arange(n_panels, -1, -1, dtype=float)
    rel[0] = 0.0
    if toward == "left":
        return a + (b - a) * rel
    if toward == "right":
        return b - (b - a) * rel[::-1]
    raise ValueError("toward must be 'left' or 'right'")
