"""Fixed-step RK4 driver shared by the 1-D and torus geodesic integrators.

Alongside the Eulerian state the driver integrates, at every grid label,
the gradient ``w = phi o eta`` (``phi`` = divergence of the velocity) and the
Jacobian ``J`` of the flow map:

    dw/dt = C(t) - (1 - alpha)/2 * w**2,    dJ/dt = w J,
    C(t)  = -(1 + alpha)/2 * mean(phi**2).

This system is exact for the whole Proudman-Johnson family, so the first
step at which ``J`` collapses (or ``w`` explodes) marks the breakdown of the
classical solution even when the Eulerian field is still resolution
limited.
"""
from __future__ import annotations

import numpy as np

from .diffeo import EPS_JAC

MAGNITUDE_CAP = 1e6


def integrate_rk4(u0, rhs, phi_of, grad_sup, alpha, T, dt, save_every=1):
    """Returns ``(times, states, breakdown_time, step)``; states stop before breakdown."""
    nsteps = max(1, int(np.ceil(T / dt - 1e-9)))
    h = T / nsteps
    kp = -(1.0 + alpha) / 2.0
    km = (1.0 - alpha) / 2.0

    def full_rhs(state):
        u, w, J = state
        phi = phi_of(u)
        C = kp * float(np.mean(phi * phi))
        return rhs(u), C - km * w * w, w * J

    u = np.array(u0, dtype=float)
    w = phi_of(u).ravel()
    J = np.ones_like(w)
    times, states = [0.0], [u.copy()]
    breakdown = None
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(nsteps):
            s0 = (u, w, J)
            k1 = full_rhs(s0)
            k2 = full_rhs(tuple(a + h / 2 * b for a, b in zip(s0, k1)))
            k3 = full_rhs(tuple(a + h / 2 * b for a, b in zip(s0, k2)))
            k4 = full_rhs(tuple(a + h * b for a, b in zip(s0, k3)))
            u, w, J = (a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
                       for a, b1, b2, b3, b4 in zip(s0, k1, k2, k3, k4))
            t = (i + 1) * h
            if _broken(u, w, J, grad_sup):
                breakdown = t
                break
            if (i + 1) % save_every == 0 or i + 1 == nsteps:
                times.append(t)
                states.append(u.copy())
    return np.array(times), states, breakdown, h


def _broken(u, w, J, grad_sup):
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(w)) and np.all(np.isfinite(J))):
        return True
    if np.max(np.abs(u)) > MAGNITUDE_CAP or grad_sup(u) > MAGNITUDE_CAP:
        return True
    return bool(np.min(J) <= EPS_JAC or np.max(np.abs(w)) > MAGNITUDE_CAP)
