"""Length spectrum of the modular surface, the Selberg Euler product and the torus zeta.

Primitive closed geodesics correspond to primitive necklaces over {L1, L2}
(equivalently, conjugacy classes of primitive hyperbolic elements). A class of
trace t has length ``2 arcosh(t/2)``. Multiplicities count oriented geodesics.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import Necklace, enumerate_necklaces
from .errors import DomainError, OracleIncompleteError

__all__ = [
    "LengthSpectrumEntry", "geodesic_length", "length_spectrum", "conjugacy_oracle",
    "selberg_zeta_euler", "default_cache_dir", "CACHE_VERSION",
    "TorusSpectrum", "torus_zeta", "torus_zeta_derivatives", "torus_spectrum",
    "torus_zeros", "zero_order",
]

CACHE_VERSION = 1
CACHE_ENV = "MODTRANSFER_CACHE_DIR"


# ---------------------------------------------------------------- lengths

def geodesic_length(trace: int) -> float:
    """Length ``2 arcosh(trace / 2)`` of the closed geodesic of a hyperbolic class.

    Computed as ``2 log((t + sqrt(t^2 - 4)) / 2)``, which is exact to rounding
    for integer traces.
    """
    t = abs(trace)
    if t <= 2:
        raise DomainError(f"trace {trace} is not hyperbolic")
    return 2.0 * math.log((t + math.sqrt(t * t - 4)) / 2.0)


@dataclass
class LengthSpectrumEntry:
    """All primitive geodesics of one trace.

    Attributes
    ----------
    trace : int
    length : float
    multiplicity : int
        Number of primitive necklaces (oriented geodesics) with this trace.
    necklaces : list of Necklace
    """

    trace: int
    length: float
    multiplicity: int
    necklaces: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "trace": self.trace,
            "length": self.length,
            "multiplicity": self.multiplicity,
            "necklaces": [str(n) for n in self.necklaces],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "LengthSpectrumEntry":
        return cls(int(rec["trace"]), float(rec["length"]), int(rec["multiplicity"]),
                   [Necklace(w) for w in rec["necklaces"]])


def default_cache_dir() -> Path:
    """Cache directory: ``$MODTRANSFER_CACHE_DIR`` or ``~/.cache/modtransfer``."""
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "modtransfer"


def _cache_path(cache_dir) -> Path:
    return Path(cache_dir) / "length_spectrum.json"


def _load_cache(cache_dir, max_trace):
    path = _cache_path(cache_dir)
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if data.get("version") != CACHE_VERSION or data.get("max_trace", 0) < max_trace:
        return None
    try:
        entries = [LengthSpectrumEntry.from_record(r) for r in data["entries"]]
    except (KeyError, TypeError, ValueError, DomainError):
        return None
    return [e for e in entries if e.trace <= max_trace]


def _store_cache(cache_dir, max_trace, entries):
    path = _cache_path(cache_dir)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"version": CACHE_VERSION, "max_trace": max_trace,
            "entries": [e.to_record() for e in entries]}
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(data))
    tmp.replace(path)


def length_spectrum(max_trace: int, cache_dir=None) -> list:
    """Primitive length spectrum grouped by trace, ascending.

    Parameters
    ----------
    max_trace : int
        Include classes with trace at most this value; values below 3 give [].
    cache_dir : path-like, optional
        If given, read a cached spectrum covering ``max_trace`` from this
        directory or compute and store one. A version mismatch invalidates
        the cache.
    """
    if max_trace < 3:
        return []
    if cache_dir is not None:
        hit = _load_cache(cache_dir, max_trace)
        if hit is not None:
            return hit
    groups = defaultdict(list)
    for neck, tr in enumerate_necklaces(max_trace):
        groups[tr].append(neck)
    entries = [LengthSpectrumEntry(tr, geodesic_length(tr), len(ns), ns)
               for tr, ns in sorted(groups.items())]
    if cache_dir is not None:
        _store_cache(cache_dir, max_trace, entries)
    return entries


# ---------------------------------------------------------------- conjugacy oracle

def _mul(g, h):
    a, b, c, d = g
    e, f, k, m = h
    r = (a * e + b * k, a * f + b * m, c * e + d * k, c * f + d * m)
    if r[2] < 0 or (r[2] == 0 and r[0] < 0):
        r = (-r[0], -r[1], -r[2], -r[3])
    return r


def _inv(g):
    a, b, c, d = g
    return _mul((d, -b, -c, a), (1, 0, 0, 1))


_ORACLE_GENS = ((0, -1, 1, 0), (1, 1, 0, 1), (1, -1, 0, 1))  # S, T, T^-1


def _ball(radius):
    seen = {(1, 0, 0, 1): 0}
    front = [(1, 0, 0, 1)]
    for r in range(1, radius + 1):
        nxt = []
        for g in front:
            for s in _ORACLE_GENS:
                h = _mul(g, s)
                if h not in seen:
                    seen[h] = r
                    nxt.append(h)
        front = nxt
    return seen


def _chebyshev_u(n, t):
    # U_n(t/2): U_{-1} = 0, U_0 = 1, U_{k+1} = t U_k - U_{k-1}
    if n < 0:
        return 0
    u0, u1 = 0, 1
    for _ in range(n):
        u0, u1 = u1, t * u1 - u0
    return u1


def _is_proper_power(g) -> bool:
    """Exact test whether hyperbolic ``g`` equals ``h^n`` with ``n >= 2``.

    For ``tr h = t`` one has ``h^n = U_{n-1} h - U_{n-2} I`` (Chebyshev
    polynomials in t), so h is recovered from g and t exactly.
    """
    a, b, c, d = g
    tr = abs(a + d)
    n = 2
    while True:
        # smallest |tr h^n| with |tr h| >= 3 grows with n; stop once above tr
        if abs(_chebyshev_u(n, 3) - _chebyshev_u(n - 2, 3)) > tr:
            return False
        t = 3
        while True:
            vn = _chebyshev_u(n, t) - _chebyshev_u(n - 2, t)  # tr h^n
            if vn > tr:
                break
            if vn == tr:
                u1, u2 = _chebyshev_u(n - 1, t), _chebyshev_u(n - 2, t)
                for sg in (1, -1):
                    # sg * g = U_{n-1} h - U_{n-2} I  (h with trace +t)
                    num = (sg * a + u2, sg * b, sg * c, sg * d + u2)
                    if all(x % u1 == 0 for x in num):
                        h = tuple(x // u1 for x in num)
                        if h[0] * h[3] - h[1] * h[2] == 1 and h[0] + h[3] == t:
                            return True
            t += 1
        n += 1


def _class_counts(elements, conjugators, max_trace):
    parent = {g: g for g in elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    conj = [(c, _inv(c)) for c in conjugators]
    for g in elements:
        for c, ci in conj:
            h = _mul(_mul(c, g), ci)
            if h in parent:
                rg, rh = find(g), find(h)
                if rg != rh:
                    parent[rg] = rh
    counts = defaultdict(int)
    for g in elements:
        if find(g) == g:
            counts[abs(g[0] + g[3])] += 1
    return {t: counts[t] for t in sorted(counts) if t <= max_trace}


def conjugacy_oracle(max_trace: int, word_length_bound: int = 16,
                     conjugator_radius: int = 6, strict: bool = True) -> dict:
    """Brute-force count of primitive hyperbolic conjugacy classes by trace.

    Enumerates every element of word length at most ``word_length_bound`` over
    {S, T, T^-1}, keeps the primitive hyperbolic ones with trace at most
    ``max_trace`` (primitivity decided exactly), and merges elements that are
    conjugate by some element of word length at most ``conjugator_radius``.

    A trace is reported as unresolved when its count changes if either bound is
    lowered by one: the class count has not stabilised and may be inflated
    (missed conjugations) or deflated (missed representatives).

    Parameters
    ----------
    max_trace, word_length_bound, conjugator_radius : int
    strict : bool
        Raise on unresolved traces (default). Otherwise return the counts
        with an ``"unresolved"`` key listing them.

    Returns
    -------
    dict
        trace -> number of classes.

    Raises
    ------
    OracleIncompleteError
        If some trace is unresolved and ``strict`` is true.
    """
    if word_length_bound > 16:
        raise DomainError("word_length_bound above 16 is outside the oracle's budget")
    if max_trace < 3:
        return {}
    ball = _ball(word_length_bound)
    elems = {}
    for g, r in ball.items():
        tr = abs(g[0] + g[3])
        if 2 < tr <= max_trace and not _is_proper_power(g):
            elems[g] = r
    conj_all = _ball(conjugator_radius)

    def counts(L, R):
        els = [g for g, r in elems.items() if r <= L]
        cs = [c for c, r in conj_all.items() if r <= R]
        return _class_counts(els, cs, max_trace)

    full = counts(word_length_bound, conjugator_radius)
    fewer_words = counts(word_length_bound - 1, conjugator_radius)
    fewer_conj = counts(word_length_bound, conjugator_radius - 1)
    unresolved = sorted(t for t in set(full) | set(fewer_words) | set(fewer_conj)
                        if not (full.get(t) == fewer_words.get(t) == fewer_conj.get(t)))
    if unresolved:
        if strict:
            raise OracleIncompleteError(full, unresolved)
        full = dict(full)
        full["unresolved"] = unresolved
    return full


# ---------------------------------------------------------------- Selberg zeta

def selberg_zeta_euler(s, max_trace: int, k_max: int, spectrum=None) -> complex:
    """Doubly truncated Euler product ``prod_l prod_{k=0}^{k_max} (1 - e^{-(s+k) l})``.

    Factors are accumulated as logarithms in ascending (length, k) order, with
    each factor raised to the multiplicity of its length.

    Parameters
    ----------
    s : complex
        ``Re s > 1``.
    max_trace : int
        Lengths of classes with trace at most this value.
    k_max : int
        Largest k included (``k_max >= 1``).
    spectrum : list of LengthSpectrumEntry, optional
        Precomputed spectrum covering ``max_trace``.
    """
    s = complex(s)
    if not s.real > 1:
        raise DomainError(f"Euler product requires Re s > 1, got {s}")
    if k_max < 1:
        raise DomainError("k_max must be at least 1")
    if spectrum is None:
        spectrum = length_spectrum(max_trace)
    total = 0j
    for e in sorted(spectrum, key=lambda e: e.length):
        if e.trace > max_trace:
            continue
        for k in range(k_max + 1):
            total += e.multiplicity * cmath.log(1 - cmath.exp(-(s + k) * e.length))
    out = cmath.exp(total)
    return out


# ---------------------------------------------------------------- flat torus

@dataclass
class TorusSpectrum:
    """Laplace eigenvalues ``(2 pi k)^2``, ``|k| <= k_max``, of the unit circle.

    ``eigenvalues`` is sorted ascending and lists each value with its
    multiplicity (1 for zero, 2 otherwise).
    """

    k_max: int
    eigenvalues: np.ndarray

    def multiplicities(self) -> dict:
        vals, counts = np.unique(self.eigenvalues, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))


def torus_spectrum(k_max: int) -> TorusSpectrum:
    """Spectrum of ``-d^2/dx^2`` on R/Z truncated at ``|k| <= k_max``."""
    if k_max < 0:
        raise DomainError("k_max must be nonnegative")
    k = np.arange(-k_max, k_max + 1)
    return TorusSpectrum(k_max, np.sort((2 * np.pi * k) ** 2))


def torus_zeta(s):
    """Torus zeta ``(1 - e^{-s})^2``: one primitive length 1, counted with both orientations."""
    return (1 - np.exp(-np.asarray(s, dtype=complex))) ** 2 if np.ndim(s) else \
        (1 - cmath.exp(-complex(s))) ** 2


def torus_zeta_derivatives(s):
    """Values ``(f, f', f'')`` of the torus zeta at ``s``."""
    e = cmath.exp(-complex(s))
    return (1 - e) ** 2, 2 * (1 - e) * e, 2 * e * e - 2 * (1 - e) * e


def torus_zeros(x_max: float = 1.0, y_max: float = 3.0, tol: float = 1e-14,
                starts_per_unit: int = 2, max_iter: int = 60) -> list:
    """Zeros of the torus zeta in ``{x + 2 pi i y : |x| <= x_max, |y| <= y_max}``.

    Newton's method is applied to ``f / f'``, which has simple zeros at the
    zeros of f whatever their order, from a grid of starting points covering
    the box. Converged points are merged when closer than 1e-6.

    Returns
    -------
    list of complex
        Sorted by imaginary part.
    """
    xs = np.linspace(-x_max, x_max, max(2, int(2 * x_max * starts_per_unit) + 1))
    ys = np.linspace(-y_max, y_max, max(2, int(2 * y_max * starts_per_unit) * 2 + 1))
    found = []
    for x0 in xs:
        for y0 in ys:
            z = complex(x0, 2 * np.pi * y0)
            for _ in range(max_iter):
                f, f1, f2 = torus_zeta_derivatives(z)
                if f1 == 0:
                    break
                u = f / f1
                du = 1 - f * f2 / (f1 * f1)
                if du == 0:
                    break
                step = u / du
                z -= step
                if abs(step) < tol or abs(z.real) > 4 * x_max + 4:
                    break
            if abs(z.real) > 4 * x_max + 4:
                continue
            f, _, _ = torus_zeta_derivatives(z)
            if abs(f) > 1e-20:
                continue
            if abs(z.real) > x_max + 1e-9 or abs(z.imag) > 2 * np.pi * y_max + 1e-9:
                continue
            if all(abs(z - w) > 1e-6 for w in found):
                found.append(z)
    return sorted(found, key=lambda z: z.imag)


def zero_order(f, z0, h: float = 1e-4, max_order: int = 4, tol: float = 1e-6):
    """Numerical order of a zero from central differences.

    Returns
    -------
    order : int
        The first derivative index whose central-difference estimate exceeds
        ``tol`` in modulus (``max_order + 1`` if none does).
    derivs : list of complex
        Estimates of ``f^(m)(z0)`` for ``m = 0 .. max_order``.
    """
    from math import comb
    derivs = []
    for m in range(max_order + 1):
        if m == 0:
            derivs.append(complex(f(z0)))
            continue
        # central difference of order m on the stencil z0 + (m/2 - j) h
        acc = 0j
        for j in range(m + 1):
            acc += (-1) ** j * comb(m, j) * f(z0 + (m / 2 - j) * h)
        derivs.append(acc / h ** m)
    order = next((m for m, d in enumerate(derivs) if abs(d) > tol), max_order + 1)
    return order, derivs
