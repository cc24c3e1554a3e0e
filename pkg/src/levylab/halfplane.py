"""Calculus of positively homogeneous functions on the first quadrant.

The central object is a degree-beta homogeneous complex function on the
closed cone ``K1+ = {arg u in [0, pi/2]}``, stored through its values on
an angular grid of the unit quarter-circle.  The module also provides
the skewed product ``h.u``, the quarter-turn involution ``u -> i*conj(u)``
and the weighted C^1 norms used by the fixed-point machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

HALF_PI = 0.5 * np.pi

#: tolerance below which a real part is still considered non-negative
_NEG_TOL = 1e-10


def dot(h, u):
    """Skewed product ``h.u = Re(u) h + Im(u) conj(h)``.

    Equals ``(Re u + Im u) Re h + i (Re u - Im u) Im h``; real-linear in
    both arguments and designed so that ``Re(h.u) >= 0`` whenever h and u
    both lie in the right half-plane / first quadrant.
    """
    h = np.asarray(h)
    u = np.asarray(u)
    return u.real * h + u.imag * np.conj(h)


def check_involution(u):
    """Quarter-turn involution ``u -> i * conj(u) = Im(u) + i Re(u)``."""
    u = np.asarray(u)
    return u.imag + 1j * u.real


def default_grid(m: int = 65) -> np.ndarray:
    """Chebyshev-Lobatto angles on [0, pi/2], clustered at both ends.

    The grid always contains 0, pi/4 and pi/2 exactly (m must be odd so
    the midpoint lands on pi/4, where the downstream norm weight
    vanishes and several closed-form values live).
    """
    if m < 33:
        raise ValueError("angular grid needs at least 33 points")
    if m % 2 == 0:
        raise ValueError("angular grid size must be odd so pi/4 is a node")
    j = np.arange(m)
    theta = 0.25 * np.pi * (1.0 - np.cos(np.pi * j / (m - 1)))
    theta[0] = 0.0
    theta[m // 2] = 0.25 * np.pi
    theta[-1] = HALF_PI
    return theta


@dataclass(frozen=True)
class HomogeneousFn:
    """Degree-beta homogeneous function sampled on an angular grid.

    Off-grid evaluation uses a piecewise-cubic interpolant in the angle;
    homogeneity ``g(lam*u) = lam**beta * g(u)`` is exact by construction
    of the evaluator.
    """

    beta: float
    thetas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if thetas.ndim != 1 or thetas.size < 33:
            raise ValueError("need a 1-d angular grid with at least 33 points")
        if values.shape != thetas.shape:
            raise ValueError("values and grid shapes differ")
        if not (np.all(np.diff(thetas) > 0)
                and abs(thetas[0]) < 1e-15
                and abs(thetas[-1] - HALF_PI) < 1e-12):
            raise ValueError("grid must strictly increase from 0 to pi/2")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_spline", CubicSpline(thetas, values))
        object.__setattr__(self, "_dspline", self._spline.derivative())

    # -- evaluation --------------------------------------------------

    def values_at_angle(self, theta):
        """Values g(e^{i theta}) for angles in [0, pi/2].

        Exact grid hits return the stored values bit-for-bit.
        """
        theta = np.asarray(theta, dtype=float)
        if np.any(theta < -1e-12) or np.any(theta > HALF_PI + 1e-12):
            raise ValueError("angle outside [0, pi/2]")
        clipped = np.clip(theta, 0.0, HALF_PI)
        vals = self._spline(clipped)
        idx = np.searchsorted(self.thetas, clipped)
        idx = np.minimum(idx, self.thetas.size - 1)
        hit = self.thetas[idx] == clipped
        if np.any(hit):
            vals = np.asarray(vals)
            vals[hit] = self.values[idx[hit]]
        return vals

    def angular_derivative(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self._dspline(np.clip(theta, 0.0, HALF_PI))

    def __call__(self, u):
        """Evaluate g at points of the closed first quadrant (u != 0)."""
        u = np.asarray(u, dtype=complex)
        r = np.abs(u)
        if np.any(r == 0.0):
            raise ValueError("cannot evaluate a homogeneous function at 0")
        if np.any(u.real < -1e-12 * r) or np.any(u.imag < -1e-12 * r):
            raise ValueError("point outside the closed first quadrant")
        ang = np.arctan2(np.maximum(u.imag, 0.0), np.maximum(u.real, 0.0))
        return r ** self.beta * self._spline(ang)

    # -- cone membership ---------------------------------------------

    def min_real_part(self) -> float:
        return float(np.min(self.values.real))

    def in_nonnegative_cone(self, tol: float = _NEG_TOL) -> bool:
        """Re g >= -tol at every grid point (closure of the cone H^0)."""
        return self.min_real_part() >= -tol

    # -- gradient in Cartesian coordinates ---------------------------

    def partials_on_circle(self, theta):
        """(d1 g, di g) at e^{i theta} from the polar chain rule.

        On the unit circle a degree-beta function g = G(theta) has
        ``d1 g = beta G cos(theta) - G'(theta) sin(theta)`` and
        ``di g = beta G sin(theta) + G'(theta) cos(theta)``.
        """
        theta = np.asarray(theta, dtype=float)
        g = self.values_at_angle(theta)
        gp = self.angular_derivative(theta)
        c = np.cos(theta)
        s = np.sin(theta)
        return self.beta * g * c - gp * s, self.beta * g * s + gp * c

    # -- serialization ------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "beta": self.beta,
            "thetas": self.thetas.tolist(),
            "values_re": self.values.real.tolist(),
            "values_im": self.values.imag.tolist(),
        })

    @staticmethod
    def from_json(text: str) -> "HomogeneousFn":
        obj = json.loads(text)
        values = np.asarray(obj["values_re"]) + 1j * np.asarray(obj["values_im"])
        return HomogeneousFn(obj["beta"], np.asarray(obj["thetas"]), values)


def from_callable(beta: float, fn, m: int = 65) -> HomogeneousFn:
    """Sample a function of the angle onto the default grid."""
    thetas = default_grid(m)
    return HomogeneousFn(beta, thetas, np.asarray(fn(thetas), dtype=complex))


def power_of_one_dot(beta: float, scale: complex = 1.0, m: int = 65) -> HomogeneousFn:
    """The function ``u -> scale * (1.u)**beta = scale*(cos+sin)**beta``."""
    return from_callable(beta, lambda t: scale * (np.cos(t) + np.sin(t)) ** beta, m)


@dataclass(frozen=True)
class KappaNorm:
    kappa: float
    value_inf: float
    value_kappa: float


def kappa_norm(f: HomogeneousFn, kappa: float, oversample: int = 3) -> KappaNorm:
    """Sup norm plus the |i.u|^kappa weighted gradient sup on S1+.

    Both suprema are taken over an ``oversample``-fold refinement of the
    grid (plain grid sups systematically under-estimate).
    """
    if not 0.0 <= kappa < 1.0:
        raise ValueError("kappa must lie in [0, 1)")
    base = f.thetas
    fill = (base[:-1, None] + (base[1:] - base[:-1])[:, None]
            * (np.arange(1, oversample)[None, :] / oversample)).ravel()
    theta = np.sort(np.concatenate([base, fill]))
    g = f.values_at_angle(theta)
    d1, di = f.partials_on_circle(theta)
    weight = np.abs(np.cos(theta) - np.sin(theta)) ** kappa
    value_inf = float(np.max(np.abs(g)))
    grad = np.sqrt(np.abs(d1) ** 2 + np.abs(di) ** 2)
    return KappaNorm(kappa, value_inf, value_inf + float(np.max(weight * grad)))


def sup_distance(f: HomogeneousFn, g: HomogeneousFn) -> float:
    """Sup of |f - g| over the (union) grid on the quarter circle."""
    theta = np.union1d(f.thetas, g.thetas)
    return float(np.max(np.abs(f.values_at_angle(theta) - g.values_at_angle(theta))))
