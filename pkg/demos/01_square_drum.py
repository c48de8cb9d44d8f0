"""Solve the unit-square Dirichlet problem and compare with separation of
variables.

The exact eigenvalues are pi^2 (p^2 + q^2); the P1 discretization converges
to them at second order from above.
"""

import numpy as np

from spectralab import assemble, build_structured, make_chart, solve_sparse
from spectralab.reference import rectangle_spectrum

chart = make_chart("flat_rectangle")
exact = rectangle_spectrum(8)

print("unit square, first 8 Dirichlet eigenvalues")
print(f"{'resolution':>10s} " + " ".join(f"{v:>9.4f}" for v in exact) + "   (exact)")
for resolution in (16, 32, 64):
    mesh = build_structured(chart.domain, resolution)
    a_mat, b_mat, _ = assemble(chart, mesh)
    lam = solve_sparse(a_mat, b_mat, 8).eigenvalues
    print(f"{resolution:>10d} " + " ".join(f"{v:>9.4f}" for v in lam))

mesh = build_structured(chart.domain, 64)
a_mat, b_mat, _ = assemble(chart, mesh)
lam = solve_sparse(a_mat, b_mat, 8).eigenvalues
rel = np.abs(lam - exact) / exact
print(f"\nrelative error at 64x64: max {rel.max():.2e} (lambda_1: {rel[0]:.2e})")
