"""Critical-line resonance search and period-function checks.

On the line ``s = 1/2 + iR`` the determinants ``d_mu(R) = det(I - mu M(s))``,
``mu = +1, -1``, of the Gauss-map collocation matrix nearly vanish exactly at
the spectral parameters of Maass cusp forms. Around each dip an eigenvector h
of ``M`` with eigenvalue ``mu`` is extended to a period function

    psi(x) = h(x) + mu x^{-2s} h(1/x),     x > 0,

which should satisfy the three-term equation
``psi(t) = psi(t + 1) + (t + 1)^{-2s} psi(t / (t + 1))`` and extend smoothly
across 0 through ``-|t|^{-2s} psi(-1/t)``. Those conditions are measured by
:func:`three_term_residual`, :func:`boundary_residual` and
:func:`cocycle_residuals`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, DomainError
from .psl2 import GroupElement, S, compose
from .transfer import (DEFAULT_INTERVAL, CollocationGrid, SpectralParameter, _grid,
                       as_parameter, eigenpair_near, fredholm_det, gauss_extend,
                       gauss_matrix, tau_action)

__all__ = [
    "PeriodFunction", "ResonanceResult", "DipCandidate", "Tolerances",
    "scan_critical_line", "refine_resonance", "period_function", "reconstruct_psi",
    "three_term_residual", "boundary_residual", "cocycle_residuals", "lambda_of",
    "psi_scale", "VERIFY_PARAMS",
]

VERIFY_PARAMS = (48, 200, 8)
ST = compose(S, GroupElement(1, 1, 0, 1))
ST2 = compose(ST, ST)


@dataclass(frozen=True)
class Tolerances:
    """Acceptance thresholds for a reported resonance."""

    three_term: float = 1e-6
    boundary: float = 1e-3
    cocycle: float = 1e-5
    eigen: float = 1e-8


def lambda_of(s) -> complex:
    """Laplace eigenvalue ``s (1 - s)``."""
    s = complex(s)
    return s * (1 - s)


# ---------------------------------------------------------------- period functions

@dataclass
class PeriodFunction:
    """Eigenvector data of the Gauss-map operator and the resulting period function.

    Attributes
    ----------
    s : SpectralParameter
    parity : int
        Target eigenvalue ``mu``, +1 or -1.
    node_values : ndarray
        Eigenvector on the collocation nodes, scaled to 1 at the node nearest 1.
    n_max, K : int
        Operator truncation used for the extension.
    interval : (float, float)
    eigenvalue : complex
        Eigenvalue actually found (close to ``parity`` at a resonance).
    eig_residual : float
        ``|M h - mu h|_inf / |h|_inf``.
    """

    s: SpectralParameter
    parity: int
    node_values: np.ndarray
    n_max: int = 50
    K: int = 4
    interval: tuple = DEFAULT_INTERVAL
    eigenvalue: complex = complex("nan")
    eig_residual: float = float("nan")

    @property
    def N(self) -> int:
        return len(self.node_values)

    @property
    def grid(self) -> CollocationGrid:
        return _grid(self.N, tuple(self.interval))

    def __call__(self, y):
        """Barycentric interpolant of the node values."""
        return self.grid.interpolate(self.node_values, y)

    def extension(self, y):
        """``mu (G_s h)(y)``: the eigen-relation used to extend h to ``y > -1``."""
        return self.parity * gauss_extend(self.s, self.node_values, y, self.N,
                                          self.n_max, self.K, self.interval)

    def scaled(self, c) -> "PeriodFunction":
        return PeriodFunction(self.s, self.parity, c * self.node_values, self.n_max,
                              self.K, self.interval, self.eigenvalue, self.eig_residual)


def period_function(s, parity: int, N: int = 24, n_max: int = 50, K: int = 4,
                    interval=DEFAULT_INTERVAL, eig_tol: float | None = None) -> PeriodFunction:
    """Eigenvector of the collocation matrix at ``s`` for the eigenvalue nearest ``parity``.

    Parameters
    ----------
    eig_tol : float, optional
        If given, raise :class:`ConvergenceError` unless
        ``|M h - parity h|_inf / |h|_inf < eig_tol``.
    """
    if parity not in (1, -1):
        raise DomainError("parity must be +1 or -1")
    M = gauss_matrix(s, N, n_max, K, interval)
    lam, h = eigenpair_near(M, parity)
    res = float(np.abs(M.entries @ h - parity * h).max() / np.abs(h).max())
    if eig_tol is not None and not res < eig_tol:
        raise ConvergenceError(f"eigen-residual {res:.2e} exceeds {eig_tol:.0e}")
    return PeriodFunction(M.s, parity, h, n_max, K, tuple(interval), lam, res)


def reconstruct_psi(pf: PeriodFunction):
    """Period function ``psi`` on (0, inf) from eigenvector data.

    ``psi(x) = H(x - 1)`` for ``x > 1`` and ``psi(x) = mu x^{-2s} H(1/x - 1)``
    for ``0 < x <= 1``, where ``H = mu G_s h`` extends h. Both branches equal
    ``h(x) + mu x^{-2s} h(1/x)`` when h is an exact eigenfunction.

    Returns
    -------
    callable
        Vectorized; raises DomainError for arguments ``<= 0``.
    """
    s = pf.s.s
    mu = pf.parity

    def psi(x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("psi is defined on (0, inf)")
        flat = x.ravel()
        out = np.empty(flat.shape, complex)
        big = flat > 1
        out[big] = pf.extension(flat[big] - 1)
        small = ~big
        xs = flat[small]
        out[small] = mu * xs ** (-2 * s) * pf.extension(1 / xs - 1)
        return out.reshape(x.shape)

    psi.s = s
    psi.parity = mu
    return psi


def _three_term_points(m=200, t_max=10.0):
    return np.linspace(0.0, t_max, m + 2)[1:-1]


def psi_scale(psi, m: int = 200, t_max: float = 10.0) -> float:
    """``max |psi|`` on the residual grid of (0, t_max)."""
    return float(np.abs(psi(_three_term_points(m, t_max))).max())


def three_term_residual(psi, s, m: int = 200, t_max: float = 10.0) -> float:
    """Relative defect of the three-term equation on m equispaced points of (0, t_max).

    ``max |psi(t) - psi(t+1) - (t+1)^{-2s} psi(t/(t+1))| / max |psi(t)|``;
    zero for ``psi == 0``.
    """
    s = complex(s)
    t = _three_term_points(m, t_max)
    p = psi(t)
    r = p - psi(t + 1) - (t + 1) ** (-2 * s) * psi(t / (t + 1))
    scale = np.abs(p).max()
    return 0.0 if scale == 0 else float(np.abs(r).max() / scale)


def _boundary_coeffs(psi, s, width, degree, order):
    e = width * (1 - np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))) / 2
    gp = psi(e)
    gm = -e ** (-2 * s) * psi(1 / e)  # g_-(-e)
    cp = np.polynomial.polynomial.polyfit(e, gp, degree)[:order + 1]
    cm = np.polynomial.polynomial.polyfit(-e, gm, degree)[:order + 1]
    return cp, cm


def boundary_residual(psi, s, width: float = 0.05, degree: int = 8, order: int = 2,
                      scale: float | None = None) -> float:
    """Mismatch of one-sided Taylor coefficients of the boundary map at 0.

    The map equal to ``psi(t)`` for t > 0 and ``-|t|^{-2s} psi(-1/t)`` for
    t < 0 is sampled on ``degree + 1`` Chebyshev points of ``[0, width]`` on
    each side, fitted by polynomials of that degree, and the coefficients of
    orders ``0..order`` are compared.

    Returns
    -------
    float
        Largest coefficient mismatch divided by ``scale`` (default ``max |psi|``
        on the three-term grid).
    """
    s = complex(s)
    cp, cm = _boundary_coeffs(psi, s, width, degree, order)
    if scale is None:
        scale = psi_scale(psi)
    return float(np.abs(cp - cm).max() / scale) if scale else 0.0


def _cocycle_samples(m=40):
    pos = np.geomspace(1e-2, 1e2, m)
    mid = -np.linspace(0.02, 0.98, m)
    neg = -np.geomspace(1.02, 1e2, m)
    return pos, mid, neg


def cocycle_residuals(psi, s, m: int = 40, scale: float | None = None):
    """Cocycle identities for ``c_S`` built from psi.

    ``c_S = psi`` on (0, inf) and ``-tau_s(S) psi`` on (-inf, 0). Returns

    * ``r1 = max |tau_s(S) c_S + c_S|``,
    * ``r2 = max |(tau_s((ST)^2) + tau_s(ST) + 1) c_S|``,

    sampled on (0, inf), (-1, 0) and (-inf, -1), each divided by ``scale``
    (default ``max |psi|`` on the three-term grid).
    """
    s = complex(s)

    def c_S(t):
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape, complex)
        pos = t > 0
        out[pos] = psi(t[pos])
        neg = t < 0
        tn = t[neg]
        out[neg] = -np.abs(tn) ** (-2 * s) * psi(-1 / tn)
        if np.any(t == 0):
            raise DomainError("c_S is not defined at 0")
        return out

    pts = np.concatenate(_cocycle_samples(m))
    r1 = np.abs(tau_action(S, s, c_S, pts) + c_S(pts)).max()
    r2 = np.abs(tau_action(ST2, s, c_S, pts) + tau_action(ST, s, c_S, pts) + c_S(pts)).max()
    if scale is None:
        scale = psi_scale(psi)
    return float(r1 / scale), float(r2 / scale)


# ---------------------------------------------------------------- scanning

@dataclass(frozen=True)
class DipCandidate:
    """Local minimum of ``|det(I - parity M)|`` on the scan grid."""

    R: float
    parity: int
    det_abs: float


def _scan_grid(R_lo, R_hi, step):
    n = int(np.floor((R_hi - R_lo) / step + 1e-9))
    return R_lo + step * np.arange(n + 1)


def scan_critical_line(R_lo: float, R_hi: float, step: float = 0.01, N: int = 24,
                       n_max: int = 50, K: int = 4, threshold: float = 0.05,
                       matrix_fn=None, threads: int | None = None, return_values: bool = False):
    """Find dips of ``|d_+|`` and ``|d_-|`` along ``s = 1/2 + iR``.

    A dip is a strict interior local minimum whose value is below ``threshold``
    times the median of ``|d|`` over the grid.

    Parameters
    ----------
    R_lo, R_hi, step : float
        Grid ``R_lo, R_lo + step, ...`` up to ``R_hi``.
    N, n_max, K : int
        Discretization.
    threshold : float
        Relative dip threshold.
    matrix_fn : callable, optional
        ``matrix_fn(s) -> array``; replaces :func:`gauss_matrix` (used for
        stubs in tests).
    threads : int, optional
        Evaluate grid points in a thread pool of this size. Results do not
        depend on it.
    return_values : bool
        Also return the grid and the two determinant arrays.

    Returns
    -------
    list of DipCandidate
        Sorted by R, then parity.
    """
    if not (0 < R_lo < R_hi) or step <= 0:
        raise DomainError("scan needs 0 < R_lo < R_hi and step > 0")
    Rs = _scan_grid(R_lo, R_hi, step)
    if matrix_fn is None:
        def matrix_fn(s):
            return gauss_matrix(s, N, n_max, K)

    def dets(R):
        M = matrix_fn(complex(0.5, R))
        return fredholm_det(M, 1), fredholm_det(M, -1)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            vals = list(ex.map(dets, Rs))
    else:
        vals = [dets(R) for R in Rs]
    d = np.array(vals, dtype=complex).reshape(len(Rs), 2)
    out = []
    for col, parity in ((0, 1), (1, -1)):
        a = np.abs(d[:, col])
        cut = threshold * np.median(a)
        for k in range(1, len(a) - 1):
            if a[k] < a[k - 1] and a[k] < a[k + 1] and a[k] < cut:
                out.append(DipCandidate(float(Rs[k]), parity, float(a[k])))
    out.sort(key=lambda c: (c.R, -c.parity))
    if return_values:
        return out, Rs, d
    return out


# ---------------------------------------------------------------- refinement

@dataclass
class ResonanceResult:
    """A refined critical-line resonance and its residual checks.

    ``R`` is the refined value at the scan discretization; ``R_verified`` is
    the value re-polished at the verification discretization, at which the
    period function and all residuals are evaluated.
    """

    R: float
    parity: int
    lam: float
    det_abs_min: float
    three_term_residual: float
    boundary_residual: float
    cocycle_residuals: tuple
    N: int
    n_max: int
    K: int
    step: float
    R_verified: float = float("nan")
    verify_params: tuple = VERIFY_PARAMS
    accepted: bool = False
    eig_residual: float = float("nan")
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["lambda"] = rec.pop("lam")
        rec["cocycle_r1"], rec["cocycle_r2"] = rec.pop("cocycle_residuals")
        rec["verify_params"] = list(self.verify_params)
        return rec


def _abs2_det(parity, N, n_max, K):
    def f(R):
        return abs(fredholm_det(gauss_matrix(complex(0.5, R), N, n_max, K), parity)) ** 2
    return f


def _minimize(f, R0, half_width, xtol):
    lo, hi = R0 - half_width, R0 + half_width
    f0, flo, fhi = f(R0), f(lo), f(hi)
    if f0 < flo and f0 < fhi:
        res = minimize_scalar(f, bracket=(lo, R0, hi), method="brent",
                              options={"xtol": xtol, "maxiter": 200})
    else:
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                              options={"xatol": xtol, "maxiter": 200})
    R = float(res.x)
    # a minimizer hugging the bracket end means |d| is monotone there
    margin = 1e-3 * half_width
    if not res.success or not (lo + margin < R < hi - margin):
        raise ConvergenceError(f"no interior minimum of |det| near R = {R0}")
    return R


def refine_resonance(R0: float, parity: int, N: int = 24, n_max: int = 50, K: int = 4,
                     step: float = 0.01, verify_params=VERIFY_PARAMS, tol: float = 1e-13,
                     tolerances: Tolerances = Tolerances()) -> ResonanceResult:
    """Refine a dip and run the period-function checks.

    ``|d_parity(R)|^2``, which is smooth and quadratic near a near-zero of the
    determinant, is minimized by Brent's method in ``[R0 - step, R0 + step]``
    at the scan discretization. The minimizer is then re-polished at the
    verification discretization ``verify_params = (N, n_max, K)``, where the
    eigenvector, psi and the residuals are computed. The result is accepted
    only if every residual is below its tolerance.

    Raises
    ------
    ConvergenceError
        If no interior minimum is found.
    """
    if parity not in (1, -1):
        raise DomainError("parity must be +1 or -1")
    R = _minimize(_abs2_det(parity, N, n_max, K), R0, step, tol)
    dmin = abs(fredholm_det(gauss_matrix(complex(0.5, R), N, n_max, K), parity))
    Nv, nv, Kv = verify_params
    Rv = _minimize(_abs2_det(parity, Nv, nv, Kv), R, 1e-3, tol)
    pf = period_function(complex(0.5, Rv), parity, Nv, nv, Kv)
    psi = reconstruct_psi(pf)
    s = pf.s.s
    scale = psi_scale(psi)
    tt = three_term_residual(psi, s)
    bd = boundary_residual(psi, s, scale=scale)
    cc = cocycle_residuals(psi, s, scale=scale)
    ok = (tt < tolerances.three_term and bd < tolerances.boundary
          and max(cc) < tolerances.cocycle)
    return ResonanceResult(R=R, parity=parity, lam=0.25 + R * R, det_abs_min=dmin,
                           three_term_residual=tt, boundary_residual=bd,
                           cocycle_residuals=cc, N=N, n_max=n_max, K=K, step=step,
                           R_verified=Rv, verify_params=tuple(verify_params),
                           accepted=bool(ok), eig_residual=pf.eig_residual,
                           tolerances=tolerances)


def find_resonances(R_lo, R_hi, step=0.01, N=24, n_max=50, K=4, threads=None, **kw) -> list:
    """Scan and refine every dip; failed refinements are skipped."""
    out = []
    for c in scan_critical_line(R_lo, R_hi, step, N, n_max, K, threads=threads):
        try:
            out.append(refine_resonance(c.R, c.parity, N, n_max, K, step, **kw))
        except ConvergenceError:
            continue
    return sorted(out, key=lambda r: r.R)
