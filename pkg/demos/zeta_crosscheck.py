"""
Two sides of one zeta function
==============================

The Selberg zeta function is an Euler product over the length spectrum,

    Z(s) = prod_l prod_k (1 - e^{-(s + k) l}),

and it also equals det(1 - L_s) det(1 + L_s) for the Gauss-map transfer
operator L_s. For Re s > 1 both sides can be evaluated directly and compared.
The torus analogue is exact: (1 - e^{-s})^2 has double zeros at 2 pi i k.
"""

from modtransfer.lengths import selberg_zeta_euler, torus_zeros, torus_zeta, zero_order
from modtransfer.transfer import fredholm_det, gauss_matrix

print(f"{'s':>6} {'Euler product':>16} {'det product':>16} {'diff':>9}")
for s in (1.5, 2.0, 3.0):
    euler = selberg_zeta_euler(s, 400, 30)
    M = gauss_matrix(s, 24, 50, 4)
    dets = fredholm_det(M, 1) * fredholm_det(M, -1)
    print(f"{s:6.2f} {euler.real:16.10f} {dets.real:16.10f} {abs(euler - dets):9.1e}")

# The gap at s = 1.5 is the Euler product's truncation: geodesics up to length L
# number about e^L / L, so the omitted factors only decay like e^{(1 - s) L}.
# At s = 1 the product diverges, while the determinant still makes sense.
M = gauss_matrix(1.0, 24, 50, 4)
print("det(1 - L_1) =", abs(fredholm_det(M, 1)), "(zero: the Gauss density is fixed)")

# Torus: zeros at 2 pi i k, each of order 2.
print()
for z in torus_zeros(1.0, 2.0):
    order, d = zero_order(torus_zeta, z)
    print(f"zero {z.imag:9.6f}i  order {order}  |f''| = {abs(d[2]):.3f}")
