"""Hurwitz zeta function by Euler-Maclaurin summation."""

from __future__ import annotations

from math import factorial

import numpy as np

from .errors import PoleError

__all__ = ["hurwitz_zeta"]

# B_2, B_4, B_6, B_8
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30)


def hurwitz_zeta(w, a, shift: float | None = None):
    """Hurwitz zeta ``sum_{n >= 0} (a + n)^{-w}``.

    The first terms are summed directly until the base reaches
    ``b = a + M >= shift``; the remainder is the Euler-Maclaurin expansion
    ``b^{1-w}/(w-1) + b^{-w}/2 + sum_k B_{2k}/(2k)! (w)_{2k-1} b^{-w-2k+1}``
    through ``B_8``. With the default shift ``3|w| + 30`` the relative error
    is below about 1e-13 for ``Re w >= 1/2`` and ``|Im w| <= 40``.

    Parameters
    ----------
    w : complex or array_like
        Exponent, ``w != 1``.
    a : float or array_like
        Positive offset; broadcast against ``w``.
    shift : float, optional
        Base for the asymptotic tail.

    Returns
    -------
    complex or ndarray of complex

    Raises
    ------
    PoleError
        If any ``w == 1``.
    ValueError
        If any ``a <= 0``.
    """
    scalar = np.ndim(w) == 0 and np.ndim(a) == 0
    w, a = np.broadcast_arrays(np.asarray(w, dtype=complex), np.asarray(a, dtype=float))
    if np.any(w == 1):
        raise PoleError("Hurwitz zeta has a pole at w = 1")
    if np.any(a <= 0):
        raise ValueError("Hurwitz zeta needs a > 0")
    if w.size == 0:
        return np.zeros(w.shape, complex)
    if shift is None:
        shift = 3.0 * float(np.abs(w).max()) + 30.0
    M = max(0, int(np.ceil(shift - a.min())))
    n = np.arange(M)
    out = ((a[..., None] + n) ** (-w[..., None])).sum(-1) if M else np.zeros(w.shape, complex)
    b = a + M
    out = out + b ** (1 - w) / (w - 1) + 0.5 * b ** (-w)
    poch = w.copy()  # rising factorial (w)_{2k-1}
    for k, B2k in enumerate(_BERNOULLI, start=1):
        out = out + B2k / factorial(2 * k) * poch * b ** (-w - 2 * k + 1)
        poch = poch * (w + 2 * k - 1) * (w + 2 * k)
    return complex(out) if scalar else out
