"""
The period function of the first cusp form
==========================================

At a resonance the eigenvector h of the transfer matrix, with M h = mu h,
yields psi(x) = h(x) + mu x^{-2s} h(1/x) on (0, inf). This psi solves the
three-term equation

    psi(t) = psi(t + 1) + (t + 1)^{-2s} psi(t / (t + 1))

and extends smoothly across 0 once reflected by t -> -1/t. Away from a
resonance the same construction fails visibly.
"""

import numpy as np

from modtransfer.spectral import (VERIFY_PARAMS, boundary_residual, cocycle_residuals,
                                  period_function, reconstruct_psi, refine_resonance,
                                  three_term_residual)


def report(label, psi, s):
    tt = three_term_residual(psi, s)
    bd = boundary_residual(psi, s)
    r1, r2 = cocycle_residuals(psi, s)
    print(f"{label:>24}: three-term {tt:8.1e}  boundary {bd:8.1e}  cocycle {r1:8.1e} {r2:8.1e}")


r = refine_resonance(9.53, -1)
s = complex(0.5, r.R_verified)
pf = period_function(s, -1, *VERIFY_PARAMS)
psi = reconstruct_psi(pf)
print(f"R = {r.R_verified:.10f}, eigenvalue of M: {pf.eigenvalue:.12f}")

x = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
for xi, v in zip(x, psi(x)):
    print(f"  psi({xi:3.1f}) = {v.real:+.6f} {v.imag:+.6f}i")

# psi(1) = 0 here: the odd reflection x -> 1/x forces it when mu = -1.
print()
report("resonance", psi, s)

off = 0.5 + 10j
report("off resonance, R = 10", reconstruct_psi(period_function(off, 1, *VERIFY_PARAMS)), off)

flipped = type(pf)(pf.s, +1, pf.node_values, pf.n_max, pf.K, pf.interval)
report("wrong reflection sign", reconstruct_psi(flipped), s)
