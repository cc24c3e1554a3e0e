"""Finite-size heavy-tailed symmetric matrices and their resolvents."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from . import halfplane
from .halfplane import HomogeneousFn, dot
from .stable_random import StableLaw, sample_standard_stable, substream


@dataclass(frozen=True)
class LevyMatrix:
    """Symmetric n x n matrix with i.i.d. n^(-1/alpha)-scaled stable entries."""

    n: int
    alpha: float
    seed: int
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.shape != (self.n, self.n):
            raise ValueError("entry matrix shape does not match n")
        if not np.array_equal(a, a.T):
            raise ValueError("entries must be exactly symmetric")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the orthonormal eigenvector matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)


@dataclass(frozen=True)
class ResolventDiagonal:
    """Diagonal entries R_kk(z) of (A - z)^(-1) at one spectral point."""

    z: complex
    values: np.ndarray

    def __post_init__(self):
        if self.z.imag <= 0:
            raise ValueError("resolvent diagonal requires Im z > 0")

    @property
    def n(self) -> int:
        return int(self.values.size)


def build_levy_matrix(n: int, alpha: float, seed: int) -> LevyMatrix:
    """Heavy-tailed symmetric matrix, a deterministic function of (n, alpha, seed).

    The upper triangle (diagonal included) holds i.i.d. draws
    ``n**(-1/alpha) * X`` with X symmetric stable normalized so that
    P(|X| >= t) ~ t^(-alpha); the lower triangle mirrors it.
    """
    if n < 1:
        raise ValueError("matrix dimension must be positive")
    law = StableLaw(alpha)
    rng = substream(seed, n)
    m = n * (n + 1) // 2
    draws = sample_standard_stable(law, rng, size=m) * n ** (-1.0 / alpha)
    a = np.zeros((n, n))
    iu = np.triu_indices(n)
    a[iu] = draws
    a = a + np.triu(a, 1).T
    return LevyMatrix(n=n, alpha=alpha, seed=seed, entries=a)


def eigendecompose(matrix: LevyMatrix | np.ndarray) -> SpectralDecomposition:
    """Full symmetric eigendecomposition, eigenvalues ascending.

    Eigensolver non-convergence is surfaced as LinAlgError, never
    silently truncated.
    """
    a = matrix.entries if isinstance(matrix, LevyMatrix) else np.asarray(matrix)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    lam, u = np.linalg.eigh(a)
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=u)


def resolvent_diagonal(sd: SpectralDecomposition, z: complex) -> ResolventDiagonal:
    """R_kk(z) = sum_j <u_j, e_k>^2 / (lambda_j - z), for Im z > 0."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("resolvent requires Im z > 0")
    weights = sd.eigenvectors ** 2
    values = weights @ (1.0 / (sd.eigenvalues - z))
    return ResolventDiagonal(z=z, values=values)


def fractional_moment(rd: ResolventDiagonal, beta: float) -> float:
    """(1/n) sum_k (Im R_kk)^beta."""
    if beta <= 0:
        raise ValueError("moment order must be positive")
    return float(np.mean(rd.values.imag ** beta))


def empirical_gamma(rd: ResolventDiagonal, alpha: float,
                    grid: np.ndarray | int = 65) -> HomogeneousFn:
    """Finite-n order parameter as a degree-alpha/2 homogeneous function.

    At each grid angle u = e^{i theta} this is
    ``Gamma(1 - alpha/2) * mean_k (-i R_kk . u)^(alpha/2)`` with the
    principal branch; the arguments -i R_kk . u stay in the closed right
    half-plane because Re(-i R_kk) = Im R_kk > 0.
    """
    thetas = halfplane.default_grid(grid) if isinstance(grid, int) else np.asarray(grid)
    if thetas.size == 0:
        raise ValueError("empty angular grid")
    w = -1j * rd.values
    u = np.exp(1j * thetas)
    args = dot(w[:, None], u[None, :])
    bad = args.real < -1e-12 * np.abs(args)
    if np.any(bad):
        raise ValueError("fractional power argument left the right half-plane")
    vals = gamma_fn(1.0 - 0.5 * alpha) * np.mean(args ** (0.5 * alpha), axis=0)
    return HomogeneousFn(0.5 * alpha, thetas, vals)


def eigenvalue_counting(sd: SpectralDecomposition, a: float, b: float) -> int:
    """Number of eigenvalues in the closed interval [a, b]."""
    lam = sd.eigenvalues
    return int(np.count_nonzero((lam >= a) & (lam <= b)))
