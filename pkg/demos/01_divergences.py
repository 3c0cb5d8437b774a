"""Alpha-divergences between two densities on the circle.

The family interpolates between the two Kullback-Leibler directions
(alpha = +-1) through the Hellinger-type divergence at alpha = 0, which is
a chordal distance on the unit sphere of square-root densities:

    D^0(rho1, rho2) = 1 - cos d_H,    d_H = arccos int sqrt(rho1 rho2) dx.

Near the diagonal every member has the same second-order behaviour: it
induces one metric, a quarter of the Fisher-Rao metric on densities.

Run: python demos/01_divergences.py
"""
import numpy as np

from frflows import (CircleDiffeo, Density, ParametricFamily, PeriodicGrid, alpha_divergence,
                     fisher_rao_matrix, hellinger_distance, metric_from_divergence)

g = PeriodicGrid(256)
x = g.points
rho1 = Density.normalized(g, 1 + 0.2 * np.sin(2 * np.pi * x))
rho2 = Density.normalized(g, 1 + 0.4 * np.cos(2 * np.pi * x) + 0.1 * np.sin(4 * np.pi * x))

print("alpha    D(rho1, rho2)    D(rho2, rho1)")
for a in np.linspace(-1, 1, 9):
    print(f"{a:+.2f}    {alpha_divergence(rho1, rho2, a):.10f}    {alpha_divergence(rho2, rho1, a):.10f}")
# the (alpha, -alpha) members are mirror images of each other
print("mirror gap at alpha=0.5:",
      abs(alpha_divergence(rho1, rho2, 0.5) - alpha_divergence(rho2, rho1, -0.5)))

dH = hellinger_distance(rho1, rho2)
print(f"\nspherical distance d_H = {dH:.10f}")
print(f"1 - cos d_H            = {1 - np.cos(dH):.10f}  (equals D^0)")

# Second-order behaviour.  eta_t = x + t sin(2 pi x)/(2 pi) has Jacobian
# 1 + t cos(2 pi x): the induced metric sees only the density it moves.
V = g.field(np.sin(2 * np.pi * x) / (2 * np.pi))
ident = CircleDiffeo.identity(g)
print("\nmetric recovered from the divergence, <V, V> at the identity:")
for a in (-1.0, 0.0, 1.0):
    print(f"  alpha={a:+.0f}: {metric_from_divergence(a, ident, V, V):.10f}")
fam = ParametricFamily(1, lambda th: Density(g, 1 + th[0] * np.cos(2 * np.pi * x)))
g11 = fisher_rao_matrix(fam, [0.0])[0, 0]
print(f"Fisher-Rao information of the same curve: {g11:.10f}  -> ratio {0.125 / g11:.6f}")
