"""Duality, flatness and curvature of the alpha-connections.

The connections come in dual pairs with respect to the H-dot-1 metric:

    X <Y, Z> = <nabla^alpha_X Y, Z> + <Y, nabla^-alpha_X Z>,

alpha = 0 being the self-dual Levi-Civita connection.  The endpoints
alpha = +-1 are flat.  In between, the curvature is that of the unit sphere
scaled by (1 - alpha^2): sqrt(eta_x) maps the group isometrically onto a
piece of the L2 sphere, and the alpha-connections interpolate between two
flat affine structures around it.

Run: python demos/03_curvature_and_duality.py
"""
import numpy as np

from frflows import (CircleDiffeo, PeriodicGrid, christoffel, christoffel_from_divergence,
                     curvature_eval, duality_residual, h1_inner)

rng = np.random.default_rng(3)
g = PeriodicGrid(128)
x = g.points


def smooth(scale):
    # a few low modes, vanishing at x = 0
    f = sum(rng.uniform(-scale, scale) * np.sin(2 * np.pi * k * x + rng.uniform(0, 2 * np.pi)) / k
            for k in (1, 2, 3))
    return f - f[0]


eta = CircleDiffeo(g, smooth(0.04))
X, Y, Z = (g.field(smooth(0.1)) for _ in range(3))

print("duality residuals:")
for a in (-1.0, -0.5, 0.0, 0.5, 1.0):
    print(f"  alpha={a:+.1f}  {duality_residual(a, eta, X, Y, Z):.2e}")

print("\nChristoffel symbols from third derivatives of the divergence:")
for a in (-0.5, 0.5, 1.0):
    exact = h1_inner(christoffel(a, eta, Y, X), Z, eta)
    print(f"  alpha={a:+.1f}  analytic {exact:+.8f}  from D^alpha {christoffel_from_divergence(a, eta, X, Y, Z):+.8f}")

print("\n<R(X, Y)Y, X> against (1 - alpha^2) times the sphere value:")
sphere = h1_inner(Y, Y, eta) * h1_inner(X, X, eta) - h1_inner(X, Y, eta) ** 2
for a in (-1.0, -0.5, 0.0, 0.5, 1.0):
    rep = curvature_eval(a, eta, X, Y, Y)
    print(f"  alpha={a:+.1f}  {h1_inner(rep.commutator, X, eta):+.6e}  vs  {(1 - a * a) * sphere:+.6e}")
