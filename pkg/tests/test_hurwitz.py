import math

import mpmath
import numpy as np
import pytest

from modtransfer.errors import PoleError
from modtransfer.hurwitz import hurwitz_zeta


def _richardson_sum(w, a, n=4000):
    """Partial sums at n, 2n, 4n with remainders ~ n^(1-w) and n^(-w) eliminated."""
    s = [np.sum((a + np.arange(m * n, dtype=float)) ** (-w)) for m in (1, 2, 4)]
    r1 = 2.0 ** (1 - w)
    t = [(s[i + 1] - r1 * s[i]) / (1 - r1) for i in range(2)]
    r2 = 2.0 ** (-w)
    return (t[1] - r2 * t[0]) / (1 - r2)


def test_basic_values():
    assert hurwitz_zeta(2, 1) == pytest.approx(math.pi ** 2 / 6, abs=1e-14)
    assert hurwitz_zeta(2, 2) == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-14)
    assert hurwitz_zeta(3, 1) == pytest.approx(1.2020569031595942854, abs=1e-14)


@pytest.mark.parametrize("w,a", [(2, 1), (2, 2), (3, 1), (2.5, 0.7)])
def test_against_partial_sums(w, a):
    ref = _richardson_sum(w, a)
    assert abs(hurwitz_zeta(w, a) - ref) < 1e-9 * abs(ref)


POINTS = [(0.5 + 1j, 1.0), (1 + 20j, 1.3), (1 + 28j, 51.0), (0.5 + 40j, 51.0),
          (5 + 28j, 3.0), (1.5 - 40j, 200.0), (13 + 28j, 200.0), (2, 0.3), (-0.5 + 3j, 2.0)]


@pytest.mark.parametrize("w,a", POINTS)
def test_against_high_precision(w, a):
    with mpmath.workdps(60):
        ref = complex(mpmath.zeta(w, a))
    assert abs(hurwitz_zeta(w, a) - ref) <= 1e-12 * abs(ref)


def test_vectorized_broadcast():
    w = np.array([2.0, 3.0, 1 + 5j])
    a = np.array([[1.0], [2.5]])
    out = hurwitz_zeta(w, a)
    assert out.shape == (2, 3)
    for i in range(2):
        for j in range(3):
            ref = hurwitz_zeta(complex(w[j]), float(a[i, 0]))
            assert abs(out[i, j] - ref) <= 1e-13 * abs(ref)


def test_pole_and_domain():
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 2.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(2, 0.0)
