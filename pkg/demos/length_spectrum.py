"""
Periodic geodesics from Farey necklaces
=======================================

Every primitive periodic geodesic on the modular surface is coded by a
necklace of Farey letters 1 and 2 that uses both letters. The word's matrix
product is hyperbolic, and its trace t gives the length 2 log((t + sqrt(t^2 - 4)) / 2).
"""

import math
from collections import Counter

from modtransfer.dynamics import enumerate_necklaces, fixed_point, orbit_code
from modtransfer.lengths import conjugacy_oracle, geodesic_length, length_spectrum

# The shortest geodesic: word "12", matrix [[1, 1], [1, 2]], trace 3.
neck, tr = enumerate_necklaces(3)[0]
print("shortest:", neck, "trace", tr, "length", geodesic_length(tr))
print("2 log golden ratio squared =", 2 * math.log((3 + math.sqrt(5)) / 2))

# Its attracting fixed point is a quadratic irrational whose Farey orbit repeats the word.
x = fixed_point(neck.matrix())
print("fixed point", x, "=", float(x), "orbit code", orbit_code(x, 6))

# Multiplicities grow quickly with the trace.
print()
print(f"{'trace':>5} {'length':>10} {'mult':>5}  necklaces")
for e in length_spectrum(14):
    names = " ".join(str(n) for n in e.necklaces)
    print(f"{e.trace:5d} {e.length:10.6f} {e.multiplicity:5d}  {names}")

# An independent check: count conjugacy classes by brute force in PSL(2, Z).
oracle = conjugacy_oracle(12)
mine = Counter(tr for _, tr in enumerate_necklaces(12))
print()
print("oracle agrees up to trace 12:", oracle == dict(mine))

# Prime geodesic growth: the number of classes with length <= L behaves like e^L / L.
sp = length_spectrum(400)
for L in (6, 8, 10, 11):
    count = sum(e.multiplicity for e in sp if e.length <= L)
    print(f"L = {L:2d}: {count:6d} geodesics, e^L/L = {math.exp(L) / L:9.1f}")
