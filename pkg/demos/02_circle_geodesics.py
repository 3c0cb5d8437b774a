"""Geodesics of the alpha-connections on the circle.

In the velocity u(t, x) of a path of diffeomorphisms the geodesic equation
reads

    u_txx + (2 - alpha) u_x u_xx + u u_xxx = 0.

Three members can be checked against exact solutions:

* alpha = 1: the flat chart phi(eta) = int sqrt(eta_x) turns geodesics into
  straight lines, so the solution is known in closed form for all time;
* alpha = -1: u_x solves inviscid Burgers and steepens until
  t* = -1 / min u_x(0);
* alpha = 0: the Hunter-Saxton equation, conserving int u_x^2, whose
  densities move along great circles of the sqrt-density sphere.

Run: python demos/02_circle_geodesics.py
"""
import numpy as np

from frflows import (Density, PeriodicGrid, alpha0_density_geodesic, alpha1_solution,
                     alpham1_solution, burgers_breakdown_time, derivative, flow,
                     hellinger_distance, integrate, integrate_pj, jacobian)

g = PeriodicGrid(256)
x = g.points

print("-- alpha = 1: numerical flow against the straight-line solution")
a = g.field(0.3 * np.sin(2 * np.pi * x))
b = g.field(0.2 * np.cos(2 * np.pi * x))
b = b - integrate(b)
_, u0 = alpha1_solution(a, b, 0.0)
tr = integrate_pj(u0, 1.0, 0.5, 1e-3, save_every=100)
for t, u in zip(tr.times, tr.fields):
    print(f"  t={t:.2f}  max|u - u_exact| = {(u - alpha1_solution(a, b, t)[1]).max_abs():.2e}")

print("\n-- alpha = -1: steepening and breakdown")
u0 = g.sample(lambda s: -np.sin(2 * np.pi * s) / np.pi)
tstar = burgers_breakdown_time(u0)
tr = integrate_pj(u0, -1.0, 1.0, 1e-3, save_every=50)
for t, u in zip(tr.times, tr.fields):
    if t <= 0.4 + 1e-12:
        err = (u - alpham1_solution(u0, t)[1]).max_abs()
        print(f"  t={t:.2f}  min u_x = {derivative(u).values.min():+8.3f}  error {err:.2e}")
print(f"  predicted breakdown t* = {tstar:.4f}, detected at t = {tr.breakdown:.4f}")

print("\n-- alpha = 0: conservation and the great circle")
u0 = g.sample(lambda s: 0.5 * np.sin(2 * np.pi * s) / (2 * np.pi))
tr = integrate_pj(u0, 0.0, 0.5, 1e-3, save_every=10)
E = [integrate(derivative(u) ** 2) for u in tr.fields]
print(f"  int u_x^2: start {E[0]:.12f}, max drift {np.max(np.abs(np.array(E) - E[0])):.1e}")
fl = flow(tr, 0.5, 1e-2)
one = Density(g, np.ones(g.n))
end = jacobian(fl.diffeos[-1])
theta = hellinger_distance(one, end)
gap = max(np.max(np.abs(jacobian(e).values
                        - alpha0_density_geodesic(one, end, hellinger_distance(one, jacobian(e)) / theta).values))
          for e in fl.diffeos)
print(f"  distance travelled {theta:.6f}; distance of the flowed densities from the arc {gap:.1e}")
