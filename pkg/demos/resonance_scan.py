"""
Finding Maass cusp forms on the critical line
=============================================

Scan s = 1/2 + iR for dips of |det(1 - mu M(s))|, mu = +1 or -1, where M is
the collocation matrix of the Gauss-map transfer operator. Each dip is
refined by Brent's method and checked through its period function. The
Laplace eigenvalue is 1/4 + R^2.
"""

import time

import numpy as np

from modtransfer.spectral import refine_resonance, scan_critical_line

t0 = time.perf_counter()
cands, Rs, d = scan_critical_line(9, 14, 0.01, return_values=True)
print(f"scanned {len(Rs)} points in {time.perf_counter() - t0:.2f} s")
print("median |d+| =", np.median(np.abs(d[:, 0])), " median |d-| =", np.median(np.abs(d[:, 1])))
for c in cands:
    print(f"  dip at R = {c.R:.2f}, parity {c.parity:+d}, |d| = {c.det_abs:.2e}")

print()
print(f"{'R':>14} {'lambda':>11} {'mu':>3} {'three-term':>10} {'boundary':>9} {'cocycle':>9}")
for c in cands:
    r = refine_resonance(c.R, c.parity)
    print(f"{r.R:14.10f} {r.lam:11.5f} {r.parity:+3d} {r.three_term_residual:10.1e} "
          f"{r.boundary_residual:9.1e} {max(r.cocycle_residuals):9.1e}"
          + ("" if r.accepted else "  rejected"))

# Nothing lives below R = 9.53.
print()
print("candidates in [1, 5]:", scan_critical_line(1, 5, 0.01))
