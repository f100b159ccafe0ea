"""Exact arithmetic in PSL(2, Z) and its Möbius action on the extended real line.

Elements are stored as integer matrices ``[[a, b], [c, d]]`` with ``ad - bc = 1``,
identified with their negatives and normalized so that ``c > 0`` or
``c == 0 and a > 0``. Python integers are arbitrary precision, so products never
overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isinf

from .errors import DomainError

__all__ = [
    "GroupElement", "INF", "normalize", "negate", "compose", "inverse", "power",
    "mobius", "trace", "is_hyperbolic", "IDENTITY", "S", "T", "T1", "T2",
    "T_INV", "T1_INV", "T2_INV",
]


class _Infinity:
    """The unsigned point at infinity of P^1(R)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


@dataclass(frozen=True)
class GroupElement:
    """A PSL(2, Z) element represented by an integer matrix of determinant one.

    Construct through :func:`normalize` (or the constructor, which normalizes
    and validates); two elements compare equal iff they are the same element of
    PSL(2, Z).
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for v in (self.a, self.b, self.c, self.d):
            if not isinstance(v, int) or isinstance(v, bool):
                raise DomainError("matrix entries must be Python integers")
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"determinant of {self.matrix()} is not 1")
        if self.c < 0 or (self.c == 0 and self.a < 0):
            a, b, c, d = -self.a, -self.b, -self.c, -self.d
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "c", c)
            object.__setattr__(self, "d", d)

    def matrix(self):
        """Return the normalized representative as nested lists."""
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return f"GroupElement([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def normalize(a, b=None, c=None, d=None) -> GroupElement:
    """Return the sign-normalized element.

    Accepts a :class:`GroupElement`, a 2x2 nested sequence, or four integers.
    """
    if b is None:
        if isinstance(a, GroupElement):
            return GroupElement(a.a, a.b, a.c, a.d)
        (a, b), (c, d) = a
    return GroupElement(int(a), int(b), int(c), int(d))


def negate(g: GroupElement) -> GroupElement:
    """Return the element represented by ``-g``; equal to ``g`` in PSL(2, Z)."""
    return GroupElement(-g.a, -g.b, -g.c, -g.d)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Matrix product ``g h``, normalized."""
    return GroupElement(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def inverse(g: GroupElement) -> GroupElement:
    """Inverse via the adjugate."""
    return GroupElement(g.d, -g.b, -g.c, g.a)


def power(g: GroupElement, n: int) -> GroupElement:
    """Integer power by repeated squaring; negative ``n`` uses the inverse."""
    if n < 0:
        g, n = inverse(g), -n
    out = IDENTITY
    while n:
        if n & 1:
            out = compose(out, g)
        g = compose(g, g)
        n >>= 1
    return out


def mobius(g: GroupElement, x):
    """Boundary action ``x -> (a x + b) / (c x + d)`` on P^1(R).

    Parameters
    ----------
    g : GroupElement
    x : real, fractions.Fraction, or INF
        Float infinities are treated as INF.

    Returns
    -------
    real or INF
        Exact when ``x`` is an integer or Fraction and the result is finite.
    """
    if x is INF or (isinstance(x, float) and isinf(x)):
        return INF if g.c == 0 else _div(g.a, g.c)
    den = g.c * x + g.d
    if den == 0:
        return INF
    return _div(g.a * x + g.b, den)


def _div(p, q):
    if isinstance(p, int) and isinstance(q, int):
        from fractions import Fraction
        f = Fraction(p, q)
        return f.numerator if f.denominator == 1 else f
    return p / q


def trace(g: GroupElement) -> int:
    """Absolute value of the trace (well defined on PSL(2, Z))."""
    return abs(g.a + g.d)


def is_hyperbolic(g: GroupElement) -> bool:
    """True iff ``|tr g| > 2``."""
    return trace(g) > 2


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, 1, -1, 0)
T = GroupElement(1, 1, 0, 1)
T2 = T
T1 = GroupElement(1, 0, 1, 1)
T_INV = inverse(T)
T2_INV = T_INV
T1_INV = inverse(T1)
