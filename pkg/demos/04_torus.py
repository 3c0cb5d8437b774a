"""The alpha = 1 geodesic flow on the flat 2-torus.

On T^n the velocity splits into a gradient and a divergence-free part.  The
geodesic equation only acts on the gradient part; the divergence-free part
is carried along unchanged.  For alpha = 1 the chart

    phi(eta) = sqrt(det D eta)

again straightens geodesics, so along particle paths phi is linear in t.
This demo integrates the PDE, tracks particles and compares.

Run: python demos/04_torus.py
"""
import time

import numpy as np

from frflows import TorusGrid, TorusVectorField, alpha1_solution_nd, integrate_nd
from frflows.torus import (alpha1_trajectory_nd, divergence_free_part, grad, lagrangian_phi,
                           pjn_residual, potential_velocity, track_particles)

g = TorusGrid(2, 64)
X, Y = g.points
a = 0.24 * np.cos(2 * np.pi * X) + 0.18 * np.sin(2 * np.pi * (X + Y)) + 0.12 * np.sin(4 * np.pi * Y)
b = np.zeros_like(a)

cf = alpha1_trajectory_nd(a, b, np.linspace(0.0, 0.5, 51))
print(f"closed form satisfies the PDE to {pjn_residual(cf, 1.0).max():.1e}")

psi = 0.05 * np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y)
gp = grad(psi).components
swirl = TorusVectorField(g, np.array([-gp[1], gp[0]]))
u0 = potential_velocity(a) + swirl

start = time.perf_counter()
tr = integrate_nd(u0, 1.0, 0.5, 2e-3, save_every=25)
ts, pos = track_particles(tr)
phi = lagrangian_phi(tr, ts, pos)
print(f"integrated to t = {tr.times[-1]} in {time.perf_counter() - start:.1f} s")
for t, p in zip(ts, phi):
    err = np.max(np.abs(p - alpha1_solution_nd(a, b, t)[1].ravel()))
    print(f"  t={t:.2f}  max|phi - (1 + t a/2)| along particles = {err:.1e}")

d0 = divergence_free_part(tr.velocities[0])
print("divergence-free part drift:",
      f"{max((divergence_free_part(v) - d0).max_abs() for v in tr.velocities):.1e}")
