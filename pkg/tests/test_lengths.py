import json
import math

import pytest

from modtransfer.errors import DomainError, OracleIncompleteError
from modtransfer.lengths import (CACHE_VERSION, conjugacy_oracle, geodesic_length,
                                 length_spectrum, selberg_zeta_euler, torus_spectrum,
                                 torus_zeros, torus_zeta, zero_order)

# mpmath at 30 digits
L0 = 1.9248473002384137899910356537
L4 = 2.63391579384963341725009269462


def test_geodesic_length_examples():
    assert geodesic_length(3) == pytest.approx(2 * math.log((3 + math.sqrt(5)) / 2), abs=1e-15)
    assert geodesic_length(3) == pytest.approx(L0, abs=1e-14)
    assert geodesic_length(4) == pytest.approx(L4, abs=1e-14)
    vals = [geodesic_length(t) for t in range(3, 102)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        geodesic_length(2)


def test_length_spectrum_examples():
    sp = length_spectrum(3)
    assert len(sp) == 1
    e = sp[0]
    assert (e.trace, e.multiplicity, [str(n) for n in e.necklaces]) == (3, 1, ["12"])
    assert e.length == pytest.approx(L0, abs=1e-12)
    assert length_spectrum(2) == []


def test_entry_invariants():
    sp = length_spectrum(60)
    for e in sp:
        assert math.cosh(e.length / 2) == pytest.approx(e.trace / 2, rel=1e-13)
        assert e.multiplicity == len(e.necklaces) == len(set(e.necklaces))
        assert all(n.trace == e.trace for n in e.necklaces)
    assert [e.trace for e in sp] == sorted(e.trace for e in sp)


def test_spectrum_stable_under_larger_cutoff():
    small = {e.trace: e.multiplicity for e in length_spectrum(25)}
    big = {e.trace: e.multiplicity for e in length_spectrum(50) if e.trace <= 25}
    assert small == big


def test_oracle_examples():
    assert conjugacy_oracle(3, 8) == {3: 1}
    assert conjugacy_oracle(2, 8) == {}


def test_oracle_matches_necklaces():
    oracle = conjugacy_oracle(12, 16)
    mine = {e.trace: e.multiplicity for e in length_spectrum(12)}
    assert oracle == mine


def test_oracle_flags_insufficient_bounds():
    with pytest.raises(OracleIncompleteError) as info:
        conjugacy_oracle(12, 8)
    assert info.value.unresolved
    loose = conjugacy_oracle(12, 8, strict=False)
    assert "unresolved" in loose


def test_oracle_bound_limit():
    with pytest.raises(DomainError):
        conjugacy_oracle(5, 17)


def test_euler_two_factor_example():
    # (1 - e^{-2 l0})(1 - e^{-3 l0}) at 30 digits
    assert selberg_zeta_euler(2, 3, 1) == pytest.approx(0.975674250694001849726893186788, abs=1e-14)


def test_euler_monotone_in_trace():
    vals = [selberg_zeta_euler(1.5, t, 5).real for t in (3, 5, 10, 20, 40)]
    assert all(0 < v < 1 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_euler_tail_stability():
    a = selberg_zeta_euler(2, 400, 30)
    b = selberg_zeta_euler(2, 300, 30)
    assert abs(a - b) < 1e-6


def test_euler_domain():
    with pytest.raises(DomainError):
        selberg_zeta_euler(1.0, 10, 3)
    with pytest.raises(DomainError):
        selberg_zeta_euler(0.5 + 3j, 10, 3)
    with pytest.raises(DomainError):
        selberg_zeta_euler(2, 10, 0)


def test_euler_conjugation():
    z = selberg_zeta_euler(1.5 + 2j, 40, 5)
    assert selberg_zeta_euler(1.5 - 2j, 40, 5) == pytest.approx(z.conjugate(), abs=1e-15)


def test_cache_roundtrip(tmp_path):
    a = length_spectrum(30, cache_dir=tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    data = json.loads(files[0].read_text())
    assert data["version"] == CACHE_VERSION
    assert {"trace", "length", "multiplicity", "necklaces"} <= set(data["entries"][0])
    b = length_spectrum(20, cache_dir=tmp_path)
    assert [e.to_record() for e in b] == [e.to_record() for e in a if e.trace <= 20]


def test_cache_version_mismatch_recomputes(tmp_path):
    length_spectrum(10, cache_dir=tmp_path)
    path = next(tmp_path.iterdir())
    data = json.loads(path.read_text())
    data["version"] = -1
    data["entries"] = []
    path.write_text(json.dumps(data))
    sp = length_spectrum(10, cache_dir=tmp_path)
    assert sp and sp[0].trace == 3
    assert json.loads(path.read_text())["version"] == CACHE_VERSION


# ---------------------------------------------------------------- torus

def test_torus_zeta_values():
    assert torus_zeta(1) == pytest.approx(0.39957640089372804870295195465, abs=1e-15)
    for k in range(-3, 4):
        assert abs(torus_zeta(2j * math.pi * k)) < 1e-25


def test_torus_spectrum():
    sp = torus_spectrum(3)
    mult = sp.multiplicities()
    assert mult[0.0] == 1
    for k in (1, 2, 3):
        assert mult[(2 * math.pi * k) ** 2] == 2
    assert len(sp.eigenvalues) == 7


def test_torus_zeros_and_orders():
    zs = torus_zeros(1.0, 3.0)
    expected = [2j * math.pi * k for k in range(-3, 4)]
    assert len(zs) == len(expected)
    for z, w in zip(zs, expected):
        assert abs(z - w) < 1e-8
        order, d = zero_order(torus_zeta, z)
        assert order == 2
        assert abs(d[1]) < 1e-6 and abs(d[2]) > 0.1


def test_torus_zeros_match_spectrum():
    # zeros s = 2 pi i k give (i s)^2 = (2 pi k)^2 in the Laplace spectrum
    sp = set(torus_spectrum(3).eigenvalues.round(9).tolist())
    for z in torus_zeros():
        lam = (1j * z) ** 2
        assert abs(lam.imag) < 1e-9
        assert round(lam.real, 9) in sp
