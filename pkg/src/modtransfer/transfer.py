"""Transfer operators of the Farey map and their collocation discretization.

Two operators are involved. The two-branch Farey operator

    (L_s f)(t) = f(t + 1) + (t + 1)^{-2s} f(t / (t + 1))

is the object whose eigenfunctions with eigenvalue 1 are sought. Summing its
translation branch gives the one-branch (Gauss map) operator

    (G_s h)(x) = sum_{n >= 1} (x + n)^{-2s} h(1 / (x + n)),

which maps functions analytic near [0, 3/2] to themselves and is discretized
here by Chebyshev collocation. The sum is cut at ``n_max`` and the remainder is
replaced by a Taylor expansion of h at 0 against Hurwitz zeta values:

    sum_{n > n_max} (x + n)^{-2s} h(1/(x + n))
        ~ sum_{m=0}^{K} h^(m)(0) / m! * zeta(2s + m, x + n_max + 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DomainError, PoleError
from .hurwitz import hurwitz_zeta
from .psl2 import GroupElement

__all__ = [
    "SpectralParameter", "CollocationGrid", "OperatorMatrix", "DEFAULT_INTERVAL",
    "gauss_matrix", "gauss_extend", "fredholm_det", "eigenpair_near",
    "tau_action", "farey_apply", "as_parameter",
]

DEFAULT_INTERVAL = (0.0, 1.5)


@dataclass(frozen=True)
class SpectralParameter:
    """Spectral parameter ``s = sigma + i R`` with Laplace eigenvalue ``s (1 - s)``."""

    sigma: float
    R: float = 0.0

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.R)

    @property
    def lam(self) -> complex:
        s = self.s
        return s * (1 - s)

    @classmethod
    def critical(cls, R: float) -> "SpectralParameter":
        """Point ``1/2 + iR`` of the critical line."""
        return cls(0.5, float(R))

    def __complex__(self):
        return self.s


def as_parameter(s) -> SpectralParameter:
    """Coerce a number or SpectralParameter."""
    if isinstance(s, SpectralParameter):
        return s
    s = complex(s)
    return SpectralParameter(s.real, s.imag)


class CollocationGrid:
    """Chebyshev points of the first kind on an interval, with barycentric weights.

    Parameters
    ----------
    N : int
        Number of nodes.
    interval : (float, float)
        Defaults to ``[0, 3/2]``, which contains every image ``1/(x + n)``
        (n >= 1) of itself and is mapped strictly inside by the composite
        branches.
    """

    def __init__(self, N: int, interval=DEFAULT_INTERVAL):
        if N < 2:
            raise DomainError("grid needs at least two nodes")
        lo, hi = map(float, interval)
        k = np.arange(N)
        theta = np.pi * (2 * k + 1) / (2 * N)
        self.N = N
        self.interval = (lo, hi)
        self.nodes = (lo + hi) / 2 - (hi - lo) / 2 * np.cos(theta)
        self.weights = (-1.0) ** k * np.sin(theta)

    def interp_matrix(self, y) -> np.ndarray:
        """Rows of barycentric interpolation weights: ``P @ values`` evaluates at ``y``."""
        y = np.asarray(y, dtype=float).ravel()
        d = y[:, None] - self.nodes[None, :]
        exact = d == 0
        d[exact] = 1.0
        c = self.weights / d
        P = c / c.sum(axis=1, keepdims=True)
        rows, cols = np.nonzero(exact)
        P[rows] = 0.0
        P[rows, cols] = 1.0
        return P

    def interpolate(self, values, y):
        """Evaluate the interpolant of node ``values`` at ``y`` (any shape)."""
        y = np.asarray(y, dtype=float)
        return (self.interp_matrix(y) @ np.asarray(values)).reshape(y.shape)

    def diff_matrix(self) -> np.ndarray:
        """Spectral differentiation matrix on the nodes."""
        x, w = self.nodes, self.weights
        dx = x[:, None] - x[None, :]
        np.fill_diagonal(dx, 1.0)
        D = (w[None, :] / w[:, None]) / dx
        np.fill_diagonal(D, 0.0)
        np.fill_diagonal(D, -D.sum(axis=1))
        return D

    def taylor_rows(self, K: int) -> np.ndarray:
        """Rows ``C`` with ``C[m] @ values`` the m-th Taylor coefficient at 0.

        Obtained by differentiating the interpolant spectrally and evaluating
        at 0 barycentrically.
        """
        D = self.diff_matrix()
        row = self.interp_matrix([0.0])[0]
        out = np.empty((K + 1, self.N))
        for m in range(K + 1):
            out[m] = row / factorial(m)
            row = row @ D
        return out

    def nearest(self, x: float) -> int:
        """Index of the node nearest ``x``."""
        return int(np.argmin(np.abs(self.nodes - x)))


@lru_cache(maxsize=32)
def _grid(N: int, interval=DEFAULT_INTERVAL) -> CollocationGrid:
    return CollocationGrid(N, interval)


@lru_cache(maxsize=16)
def _plan(N: int, n_max: int, K: int, interval=DEFAULT_INTERVAL):
    # s-independent pieces of the collocation matrix
    g = _grid(N, interval)
    X = g.nodes[:, None] + np.arange(1, n_max + 1)[None, :]
    P = g.interp_matrix((1.0 / X).ravel()).reshape(N, n_max, N)
    C = g.taylor_rows(K)
    logX = np.log(X)
    for arr in (X, P, C, logX):
        arr.setflags(write=False)
    return g, logX, P, C


def _check_params(N, n_max, K):
    if N < 4:
        raise DomainError("N must be at least 4")
    if n_max < 10:
        raise DomainError("n_max must be at least 10")
    if K < 0:
        raise DomainError("K must be nonnegative")


@dataclass
class OperatorMatrix:
    """Collocation matrix of the Gauss-map operator at one spectral parameter."""

    s: SpectralParameter
    grid: CollocationGrid
    n_max: int
    K: int
    entries: np.ndarray

    @property
    def N(self) -> int:
        return self.grid.N

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def gauss_matrix(s, N: int = 24, n_max: int = 50, K: int = 4,
                 interval=DEFAULT_INTERVAL) -> OperatorMatrix:
    """Collocation matrix of the Gauss-map transfer operator.

    ``M[i, j] = sum_{n=1}^{n_max} (x_i + n)^{-2s} l_j(1/(x_i + n))
    + sum_{m=0}^{K} l_j^(m)(0)/m! * zeta(2s + m, x_i + n_max + 1)``,
    with ``l_j`` the Lagrange cardinal functions of the grid and principal
    complex powers (all bases are at least 1).

    Parameters
    ----------
    s : complex or SpectralParameter
        ``Re s >= 1/2``.
    N, n_max, K : int
        Grid size, summation cutoff and tail Taylor order.
    interval : (float, float)
        Collocation interval.

    Returns
    -------
    OperatorMatrix
    """
    sp = as_parameter(s)
    if sp.sigma < 0.5:
        raise DomainError("gauss_matrix needs Re s >= 1/2")
    _check_params(N, n_max, K)
    interval = tuple(map(float, interval))
    g, logX, P, C = _plan(N, n_max, K, interval)
    s2 = 2 * sp.s
    W = np.exp(-s2 * logX)
    M = np.einsum("in,inj->ij", W, P)
    a = g.nodes + n_max + 1
    Z = np.stack([hurwitz_zeta(s2 + m, a) for m in range(K + 1)])
    M += Z.T @ C
    return OperatorMatrix(sp, g, n_max, K, M)


def gauss_extend(s, values, y, N: int | None = None, n_max: int = 50, K: int = 4,
                 interval=DEFAULT_INTERVAL):
    """Apply the truncated Gauss-map operator to an interpolant at arbitrary points.

    Evaluates ``(G_s h)(y)`` where h interpolates ``values`` on the grid, using
    the same sum and Hurwitz tail as :func:`gauss_matrix`. At the nodes this
    reproduces ``M @ values``. Valid for ``y > -1``.
    """
    sp = as_parameter(s)
    values = np.asarray(values)
    N = len(values) if N is None else N
    g, _, _, C = _plan(N, n_max, K, tuple(map(float, interval)))
    y = np.asarray(y, dtype=float)
    shape = y.shape
    y = y.ravel()
    if np.any(y <= -1):
        raise DomainError("operator extension needs y > -1")
    s2 = 2 * sp.s
    Y = y[:, None] + np.arange(1, n_max + 1)[None, :]
    h = g.interpolate(values, 1.0 / Y)
    out = (np.exp(-s2 * np.log(Y)) * h).sum(axis=1)
    coef = C @ values
    a = y + n_max + 1
    for m in range(K + 1):
        out = out + coef[m] * hurwitz_zeta(s2 + m, a)
    return out.reshape(shape)


def fredholm_det(M, sign: int = 1) -> complex:
    """``det(I - sign * M)`` by LU factorization with partial pivoting."""
    A = np.asarray(M)
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    return complex(np.linalg.det(np.eye(A.shape[0]) - sign * A))


def eigenpair_near(M, mu, tol: float = 1e-12, max_iter: int = 500, normalize_at: float = 1.0,
                   grid: CollocationGrid | None = None):
    """Eigenvalue of ``M`` nearest ``mu`` by shifted inverse iteration.

    The start vector is the constant vector plus a fixed linear ramp, so results
    are deterministic. The eigenvector is scaled to 1 at the node nearest
    ``normalize_at`` (entry index nearest the middle when no grid is known).

    Returns
    -------
    (complex, ndarray)
        Eigenvalue and eigenvector.

    Raises
    ------
    ConvergenceError
        If the residual ``|M v - lam v| / |v|`` stays above ``tol`` (scaled by
        ``max(1, |M|)``) after ``max_iter`` iterations.
    """
    if isinstance(M, OperatorMatrix):
        grid = M.grid if grid is None else grid
    A = np.asarray(M, dtype=complex)
    n = A.shape[0]
    scale = max(1.0, np.abs(A).max())
    lu = scipy.linalg.lu_factor(A - mu * np.eye(n), check_finite=True)
    v = np.ones(n, complex) + np.linspace(0.0, 0.5, n)
    v /= np.linalg.norm(v)
    lam = complex(mu)
    for _ in range(max_iter):
        w = scipy.linalg.lu_solve(lu, v)
        nw = np.linalg.norm(w)
        if not np.isfinite(nw) or nw == 0:
            break
        v = w / nw
        Av = A @ v
        lam = complex(np.vdot(v, Av))
        if np.linalg.norm(Av - lam * v) < tol * scale:
            break
    else:
        raise ConvergenceError(f"inverse iteration near {mu} did not converge")
    if not np.isfinite(lam):
        raise ConvergenceError("inverse iteration produced non-finite values")
    idx = grid.nearest(normalize_at) if grid is not None else n // 2
    if v[idx] == 0:
        raise ConvergenceError("eigenvector vanishes at the normalization node")
    return lam, v / v[idx]


def tau_action(g: GroupElement, s, f, t):
    """Slash action ``(tau_s(g) f)(t) = |(g^{-1})'(t)|^s f(g^{-1} t)``.

    With ``g^{-1} = [[d, -b], [-c, a]]`` the derivative is ``(a - c t)^{-2}``,
    a positive real, so the power is ``|a - c t|^{-2s}`` and no branch choice
    arises. This is a left action: ``tau(g h) = tau(g) tau(h)``. For example
    ``tau_s(T2^{-1}) f(t) = f(t + 1)`` and
    ``tau_s(T1^{-1}) f(t) = (t + 1)^{-2s} f(t/(t + 1))``.

    Parameters
    ----------
    g : GroupElement
    s : complex
    f : callable
        Vectorized function of real arguments.
    t : float or ndarray
        Real points, none equal to the pole ``a / c``.

    Raises
    ------
    PoleError
        If some ``t`` is the pole of ``g^{-1}``.
    """
    s = complex(s)
    t = np.asarray(t, dtype=float)
    den = g.a - g.c * t
    if np.any(den == 0):
        raise PoleError("tau_action evaluated at the pole of the inverse element")
    return np.abs(den) ** (-2 * s) * f((g.d * t - g.b) / den)


def farey_apply(s, f, t):
    """Two-branch Farey operator ``f(t + 1) + (t + 1)^{-2s} f(t / (t + 1))``."""
    s = complex(s)
    t = np.asarray(t, dtype=float)
    return f(t + 1) + (t + 1) ** (-2 * s) * f(t / (t + 1))
