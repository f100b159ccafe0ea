import math
from collections import Counter
from itertools import product

import pytest

from modtransfer.dynamics import (L1, L2, Necklace, QuadraticIrrational, canonicalize,
                                  enumerate_necklaces, farey_step, fixed_point, is_primitive,
                                  iterate_farey, mobius_exact, orbit_code, word_matrix)
from modtransfer.errors import BoundaryHitError, DomainError
from modtransfer.psl2 import compose, inverse, normalize, trace

PHI = (1 + math.sqrt(5)) / 2


def _brute_necklaces(max_trace, max_len):
    """Every mixed primitive word up to ``max_len``, reduced to least rotations."""
    found = {}
    for n in range(2, max_len + 1):
        for w in product((1, 2), repeat=n):
            if 1 not in w or 2 not in w:
                continue
            if any(n % p == 0 and w == w[:p] * (n // p) for p in range(1, n)):
                continue
            tr = trace(word_matrix(w))
            if tr <= max_trace:
                found[min(w[i:] + w[:i] for i in range(n))] = tr
    return sorted((tr, w) for w, tr in found.items())


def _lucas(n):
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


# ---------------------------------------------------------------- Farey map

def test_farey_step_examples():
    y, letter = farey_step(math.sqrt(2))
    assert letter == L2 and y == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
    y, letter = farey_step((math.sqrt(5) - 1) / 2)
    assert letter == L1 and y == pytest.approx(PHI, abs=1e-14)
    y, letter = farey_step(0.25)
    assert letter == L1 and y == pytest.approx(1 / 3, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -0.5, 1.0])
def test_farey_step_domain(x):
    with pytest.raises(DomainError):
        farey_step(x)


def test_orbit_code_examples():
    assert orbit_code((-1 + math.sqrt(5)) / 2, 4) == [L1, L2, L1, L2]
    assert orbit_code(math.sqrt(2), 2) == [L2, L1]
    assert orbit_code(2.5, 1) == [L2]


def test_orbit_code_hits_boundary_for_rationals():
    with pytest.raises(BoundaryHitError):
        orbit_code(2.5, 5)
    with pytest.raises(DomainError):
        orbit_code(-1.0, 2)


def test_exact_farey_iteration():
    x = QuadraticIrrational(-1, 2, 5)
    y, letter = farey_step(x)
    assert letter == L1 and y == QuadraticIrrational(1, 2, 5)
    assert farey_step(y) == (x, L2)


# ---------------------------------------------------------------- words

def test_word_matrix_examples():
    g = word_matrix([L1, L2])
    assert g.matrix() == [[1, 1], [1, 2]] and trace(g) == 3
    g = word_matrix([L2, L2])
    assert g.matrix() == [[1, 2], [0, 1]] and trace(g) == 2
    g = word_matrix([L1, L1, L2])
    assert g.matrix() == [[1, 1], [2, 3]] and trace(g) == 4


def test_canonicalize_and_primitivity_examples():
    assert canonicalize([L2, L1]).word == (L1, L2)
    assert not is_primitive([L1, L2, L1, L2])
    assert is_primitive([L1, L1, L2])
    with pytest.raises(DomainError):
        canonicalize([L2, L2, L2])
    with pytest.raises(DomainError):
        is_primitive("111")


@pytest.mark.parametrize("w", ["12", "1121", "2211212", "1212112", "221"])
def test_canonicalize_idempotent_and_rotation_invariant(w):
    n = canonicalize(w)
    assert canonicalize(n.word) == n
    for i in range(len(w)):
        assert canonicalize(w[i:] + w[:i]) == n
    assert n.word == min(tuple(map(int, w[i:] + w[:i])) for i in range(len(w)))


def test_rotations_are_conjugate():
    for neck, tr in enumerate_necklaces(20):
        w = neck.word
        g = word_matrix(w)
        for i in range(1, len(w)):
            h = word_matrix(w[i:] + w[:i])
            assert trace(h) == tr
            # explicit conjugator: prefix product
            p = word_matrix(w[:i])
            assert compose(compose(inverse(p), g), p) == h


# ---------------------------------------------------------------- enumeration

def test_enumerate_examples():
    assert enumerate_necklaces(3) == [(Necklace((1, 2)), 3)]
    assert enumerate_necklaces(2) == []
    four = enumerate_necklaces(4)
    assert [str(n) for n, _ in four] == ["12", "112", "122"]


def test_trace_bounds_by_length():
    # exhaustive over mixed words: n + 1 <= trace <= Lucas(n), both attained for even n
    for n in range(2, 11):
        trs = [trace(word_matrix(w)) for w in product((1, 2), repeat=n) if 1 in w and 2 in w]
        assert min(trs) == n + 1
        assert max(trs) <= _lucas(n)
        if n % 2 == 0:
            assert max(trs) == _lucas(n) == trace(word_matrix((1, 2) * (n // 2)))


@pytest.mark.parametrize("max_trace", [3, 5, 8, 12, 16])
def test_enumerate_matches_brute_force(max_trace):
    brute = _brute_necklaces(max_trace, max_trace - 1)
    mine = [(tr, n.word) for n, tr in enumerate_necklaces(max_trace)]
    assert mine == brute


def test_enumerate_is_sorted_unique_primitive():
    out = enumerate_necklaces(60)
    keys = [(tr, n.word) for n, tr in out]
    assert keys == sorted(keys)
    assert len({n for n, _ in out}) == len(out)
    assert all(n.primitive and n.trace == tr for n, tr in out)


def test_counts_frozen():
    # counts produced by the independent brute-force word search above
    counts = Counter(tr for _, tr in enumerate_necklaces(12))
    assert dict(counts) == {3: 1, 4: 2, 5: 2, 6: 3, 7: 2, 8: 4, 9: 2, 10: 6, 11: 3, 12: 4}


# ---------------------------------------------------------------- fixed points

def test_fixed_point_examples():
    x = fixed_point(normalize([[1, 1], [1, 2]]))
    assert x == QuadraticIrrational(-1, 2, 5)
    assert float(x) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    y = fixed_point(normalize([[1, 1], [2, 3]]))
    assert y == QuadraticIrrational(-2, 4, 12) == QuadraticIrrational(-1, 2, 3)
    assert float(y) == pytest.approx((math.sqrt(3) - 1) / 2, abs=1e-15)


def test_fixed_point_errors():
    with pytest.raises(DomainError):
        fixed_point(normalize([[1, 1], [0, 1]]))
    with pytest.raises(DomainError):
        fixed_point(normalize([[0, -1], [1, 0]]))


def test_quadratic_irrational_normal_form():
    x = QuadraticIrrational(3, 5, 7)  # 5 does not divide 7 - 9; rescaled
    assert (x.D - x.p ** 2) % x.q == 0
    assert float(x) == pytest.approx((3 + math.sqrt(7)) / 5, abs=1e-15)
    with pytest.raises(DomainError):
        QuadraticIrrational(1, 2, 9)


def test_branch_consistency():
    for neck, _ in enumerate_necklaces(20):
        g = neck.matrix()
        x = fixed_point(g)
        assert mobius_exact(g, x) == x
        assert iterate_farey(x, len(neck)) == x
        assert tuple(orbit_code(x, len(neck))) == neck.word
        xf = float(x)
        assert tuple(orbit_code(xf, len(neck))) == neck.word
        assert abs(iterate_farey(xf, len(neck)) - xf) < 1e-10
