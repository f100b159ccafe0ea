"""The Farey map, its symbolic coding and periodic-orbit enumeration.

The map acts on positive irrationals by

    F(x) = x / (1 - x)   if 0 < x < 1   (letter L1, inverse branch T1)
    F(x) = x - 1         if x > 1       (letter L2, inverse branch T2)

so every point carries an infinite word over {L1, L2}. Periodic orbits are
coded by necklaces (cyclic words). A primitive necklace containing both letters
corresponds to a conjugacy class of primitive hyperbolic elements of PSL(2, Z),
with matrix the ordered product of ``T1 = [[1, 0], [1, 1]]`` and
``T2 = [[1, 1], [0, 1]]``.

Letters are the integers 1 and 2 (``L1 < L2``); words are tuples of letters and
print as strings over ``"12"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import BoundaryHitError, DomainError
from .psl2 import GroupElement, T1, T2, compose, is_hyperbolic, trace

__all__ = [
    "L1", "L2", "as_word", "word_str", "farey_step", "orbit_code", "word_matrix",
    "canonicalize", "is_primitive", "Necklace", "enumerate_necklaces",
    "QuadraticIrrational", "fixed_point", "iterate_farey", "mobius_exact",
]

L1 = 1
L2 = 2
_LETTER_MATRIX = {L1: T1, L2: T2}


def as_word(w) -> tuple:
    """Coerce a string over ``"12"`` or a sequence of letters to a word tuple."""
    if isinstance(w, Necklace):
        return w.word
    if isinstance(w, str):
        w = [int(ch) for ch in w]
    w = tuple(int(x) for x in w)
    if not w:
        raise DomainError("words must be non-empty")
    if any(x not in (L1, L2) for x in w):
        raise DomainError(f"letters must be 1 or 2, got {w}")
    return w


def word_str(w) -> str:
    """String form over ``"12"``."""
    return "".join(str(x) for x in as_word(w))


# ---------------------------------------------------------------- exact reals

class QuadraticIrrational:
    """Exact real number ``(p + sqrt(D)) / q``.

    Stored in the normal form ``q > 0``, ``D`` a positive non-square,
    ``q | D - p^2``, with the largest common factor removed (``g | p``,
    ``g | q``, ``g^2 | D``) subject to keeping that divisibility.
    """

    __slots__ = ("p", "q", "D")

    def __init__(self, p: int, q: int, D: int):
        if q == 0:
            raise DomainError("q must be nonzero")
        if D <= 0 or math.isqrt(D) ** 2 == D:
            raise DomainError(f"D = {D} must be a positive non-square")
        if q < 0:
            # (p + r)/q with q < 0 equals (-p - r)/(-q); only representable
            # when the sign of the root is flipped, which changes the number.
            raise DomainError("q must be positive")
        if (D - p * p) % q:
            # scale to reach the normal form: (p + sqrt D)/q = (p|q| + sqrt(D q^2)) / q^2
            p, D, q = p * q, D * q * q, q * q
        g = math.gcd(p, q)
        for f in sorted(_divisors(g), reverse=True):
            if D % (f * f) == 0:
                p2, q2, D2 = p // f, q // f, D // (f * f)
                if (D2 - p2 * p2) % q2 == 0:
                    p, q, D = p2, q2, D2
                    break
        self.p, self.q, self.D = p, q, D

    def _parts(self):
        # value = r + s * sqrt(D) with rationals r, s
        return Fraction(self.p, self.q), Fraction(1, self.q)

    def __float__(self):
        return (self.p + math.sqrt(self.D)) / self.q

    def __eq__(self, other):
        if isinstance(other, QuadraticIrrational):
            return (self.p, self.q, self.D) == (other.p, other.q, other.D)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q, self.D))

    def __repr__(self):
        return f"QuadraticIrrational(({self.p} + sqrt({self.D}))/{self.q})"

    def conjugate_value(self) -> float:
        """Float value of the Galois conjugate ``(p - sqrt D)/q``."""
        return (self.p - math.sqrt(self.D)) / self.q


class _QField:
    """Element ``r + s sqrt(D)`` of a real quadratic field, rational r, s."""

    __slots__ = ("r", "s", "D")

    def __init__(self, r, s, D):
        self.r, self.s, self.D = Fraction(r), Fraction(s), D

    @classmethod
    def of(cls, x):
        if isinstance(x, QuadraticIrrational):
            r, s = x._parts()
            return cls(r, s, x.D)
        raise TypeError

    def __add__(self, o):
        if isinstance(o, _QField):
            return _QField(self.r + o.r, self.s + o.s, self.D)
        return _QField(self.r + o, self.s, self.D)

    def __sub__(self, o):
        return self + (-1 * o if not isinstance(o, _QField) else _QField(-o.r, -o.s, o.D))

    def __mul__(self, o):
        if isinstance(o, _QField):
            return _QField(self.r * o.r + self.s * o.s * self.D,
                           self.r * o.s + self.s * o.r, self.D)
        return _QField(self.r * o, self.s * o, self.D)

    __rmul__ = __mul__

    def __truediv__(self, o):
        n = o.r * o.r - o.s * o.s * o.D
        return self * _QField(o.r / n, -o.s / n, o.D)

    def sign(self) -> int:
        # sign of r + s sqrt(D), exact
        a, b = self.r, self.s
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        big = a * a - b * b * self.D
        return (1 if a > 0 else -1) if big > 0 else (1 if b > 0 else -1)

    def to_qi(self):
        # r + s sqrt D with s > 0 written as (p + sqrt(D'))/q
        if self.s <= 0:
            raise DomainError("only numbers with positive surd part are representable")
        q = math.lcm(self.r.denominator, self.s.denominator)
        p = int(self.r * q)
        m = int(self.s * q)
        return QuadraticIrrational(p, q, m * m * self.D)


def _divisors(n: int):
    n = abs(n)
    out = []
    for k in range(1, math.isqrt(n) + 1):
        if n % k == 0:
            out.append(k)
            out.append(n // k)
    return set(out) or {1}


# ---------------------------------------------------------------- the map F

def farey_step(x):
    """One step of the Farey map.

    Parameters
    ----------
    x : float, Fraction or QuadraticIrrational
        Positive and different from 1. Exact inputs are iterated exactly.

    Returns
    -------
    (y, letter)
        ``(x/(1-x), L1)`` for ``0 < x < 1`` and ``(x-1, L2)`` for ``x > 1``.

    Raises
    ------
    BoundaryHitError
        If ``x <= 0`` or ``x == 1``.
    """
    if isinstance(x, QuadraticIrrational):
        v = _QField.of(x)
        sgn1 = (v - 1).sign()
        if v.sign() <= 0 or sgn1 == 0:
            raise BoundaryHitError(f"{x} is not in (0,1) or (1,inf)")
        if sgn1 < 0:
            return (v / (_QField(1, 0, v.D) - v)).to_qi(), L1
        return (v - 1).to_qi(), L2
    if x <= 0 or x == 1:
        raise BoundaryHitError(f"Farey map undefined at x = {x}")
    if x < 1:
        return x / (1 - x), L1
    return x - 1, L2


def orbit_code(x, n: int) -> list:
    """First ``n`` letters of the forward orbit of ``x``.

    Raises
    ------
    DomainError
        If ``x <= 0``.
    BoundaryHitError
        If an iterate lands on 1 or leaves (0, inf), which happens for
        rational inputs and signals loss of accuracy for float inputs.
    """
    if not isinstance(x, QuadraticIrrational) and x <= 0:
        raise DomainError("orbit_code needs x > 0")
    code = []
    for _ in range(n):
        x, letter = farey_step(x)
        code.append(letter)
    return code


def iterate_farey(x, n: int):
    """Return ``F^n(x)``."""
    for _ in range(n):
        x, _ = farey_step(x)
    return x


# ---------------------------------------------------------------- words and necklaces

def word_matrix(w) -> GroupElement:
    """Ordered product of the letter matrices, ``T_{w1} T_{w2} ...``."""
    w = as_word(w)
    g = _LETTER_MATRIX[w[0]]
    for x in w[1:]:
        g = compose(g, _LETTER_MATRIX[x])
    return g


def _min_rotation(w: tuple) -> tuple:
    # Booth's least-rotation algorithm
    s = w + w
    n = len(w)
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return s[k:k + n]


def _smallest_period(w: tuple) -> int:
    # prefix function; the word is a proper power iff n % (n - pi[-1]) == 0
    n = len(w)
    pi = [0] * n
    for i in range(1, n):
        k = pi[i - 1]
        while k and w[i] != w[k]:
            k = pi[k - 1]
        if w[i] == w[k]:
            k += 1
        pi[i] = k
    per = n - pi[-1]
    return per if n % per == 0 else n


def _require_mixed(w: tuple):
    if L1 not in w or L2 not in w:
        raise DomainError(f"word {word_str(w)} uses a single letter and codes a parabolic element")


def is_primitive(w) -> bool:
    """True iff the word is not a proper power of a shorter word."""
    w = as_word(w)
    _require_mixed(w)
    return _smallest_period(w) == len(w)


@total_ordering
@dataclass(frozen=True)
class Necklace:
    """Cyclic class of a word, stored as its least rotation (``L1 < L2``)."""

    word: tuple

    def __post_init__(self):
        w = as_word(self.word)
        _require_mixed(w)
        object.__setattr__(self, "word", _min_rotation(w))

    def __str__(self):
        return word_str(self.word)

    def __len__(self):
        return len(self.word)

    def __lt__(self, other):
        return self.word < other.word

    @property
    def primitive(self) -> bool:
        return _smallest_period(self.word) == len(self.word)

    def matrix(self) -> GroupElement:
        return word_matrix(self.word)

    @property
    def trace(self) -> int:
        return trace(word_matrix(self.word))


def canonicalize(w) -> Necklace:
    """Necklace of ``w``: its lexicographically least rotation."""
    return Necklace(as_word(w))


def enumerate_necklaces(max_trace: int) -> list:
    """All primitive necklaces whose matrix has trace at most ``max_trace``.

    Lyndon words are generated depth-first as prefixes of prenecklaces
    (Fredricksen-Kessler-Maiorana). The letter matrices have nonnegative
    entries and dominate the identity entrywise, so the trace of any extension
    is at least the trace of the current prefix product (times ``T2`` when the
    prefix has no ``L2`` yet); branches are cut once that bound exceeds
    ``max_trace``. A mixed word of length n has trace at least n + 1, which
    bounds the depth.

    Returns
    -------
    list of (Necklace, int)
        Sorted by trace, then by word.
    """
    out = []
    if max_trace < 3:
        return out
    max_len = max_trace - 1
    a = [0] * (max_len + 1)

    def bound(m, has2):
        if has2:
            return m[0] + m[3]
        # m * T2 = [[a, a + b], [c, c + d]]
        return m[0] + m[2] + m[3]

    def dfs(t, p, m, has2):
        # a[1..t-1] is a prenecklace of period p with product m
        if t - 1 == p and has2 and t - 1 >= 2:
            out.append((tuple(a[1:t]), m[0] + m[3]))
        if t > max_len:
            return
        prev = a[t - p]
        for letter in (prev, L2) if prev == L1 else (prev,):
            if letter == L1:
                m2 = (m[0] + m[1], m[1], m[2] + m[3], m[3])
            else:
                m2 = (m[0], m[0] + m[1], m[2], m[2] + m[3])
            h2 = has2 or letter == L2
            if bound(m2, h2) > max_trace:
                continue
            a[t] = letter
            dfs(t + 1, p if letter == prev else t, m2, h2)

    a[1] = L1
    import sys
    limit = sys.getrecursionlimit()
    if max_len + 50 > limit:
        sys.setrecursionlimit(max_len + 100)
    try:
        dfs(2, 1, (1, 0, 1, 1), False)
    finally:
        sys.setrecursionlimit(limit)
    out.sort(key=lambda e: (e[1], e[0]))
    return [(Necklace(w), tr) for w, tr in out]


# ---------------------------------------------------------------- fixed points

def fixed_point(g: GroupElement) -> QuadraticIrrational:
    """Attracting fixed point ``((a - d) + sqrt(tr^2 - 4)) / (2c)`` of a hyperbolic element.

    For necklace matrices (nonnegative entries, ``c >= 1``) this is the point in
    (0, inf) whose Farey orbit code is the word itself.

    Raises
    ------
    DomainError
        If ``g`` is not hyperbolic, ``c == 0``, or the normalized trace is
        negative.
    """
    if not is_hyperbolic(g):
        raise DomainError(f"{g} is not hyperbolic")
    if g.c == 0:
        raise DomainError("fixed point at infinity")
    tr = g.a + g.d
    if tr < 0:
        # the attracting point is then ((a - d) - sqrt(tr^2 - 4)) / (2c), whose
        # surd coefficient is negative and outside the stored normal form
        raise DomainError("fixed_point needs a normalized element with positive trace")
    return QuadraticIrrational(g.a - g.d, 2 * g.c, tr * tr - 4)


def mobius_exact(g: GroupElement, x: QuadraticIrrational) -> QuadraticIrrational:
    """Exact Möbius image of a quadratic irrational (surd part must stay positive)."""
    v = _QField.of(x)
    return ((v * g.a + g.b) / (v * g.c + g.d)).to_qi()
