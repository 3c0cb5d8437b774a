"""Invariant suites behind ``frflows validate``.

Each suite returns a list of :class:`Check` records (measured value,
tolerance, verdict).  Inputs are fixed or drawn from seeded generators so
reports are reproducible bit for bit.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .calculus import PeriodicGrid, derivative, integrate, inverse_A
from .connections import (christoffel, chart_christoffel, curvature_eval, duality_residual,
                          h1_inner)
from .diffeo import CircleDiffeo, Density, compose, flow, invert, jacobian
from .divergences import (alpha_divergence, hellinger_distance, metric_from_divergence,
                          christoffel_from_divergence)
from .geodesics import (affine_chart_phi, alpha0_density_geodesic, alpha1_solution,
                        alpham1_solution, burgers_breakdown_time, integrate_pj)
from .torus import (TorusGrid, TorusVectorField, alpha1_solution_nd, alpha1_trajectory_nd, curl,
                    divergence_free_part, galilean_frame_1d, geodesic_rhs_nd, grad,
                    integrate_nd, lagrangian_phi, pjn_residual, potential_velocity,
                    track_particles)

__all__ = ["Check", "SUITES", "run_suite", "run_suites", "worker_threads"]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float
    passed: bool


def _le(name, value, tol):
    value = float(value)
    return Check(name, value, tol, bool(np.isfinite(value) and value <= tol))


def _ge(name, value, bound):
    value = float(value)
    return Check(name, value, bound, bool(np.isfinite(value) and value >= bound))


def _random_tangent(grid, rng, modes=3, scale=0.1):
    x = grid.points
    v = sum(rng.normal(scale=scale) * np.sin(2 * np.pi * k * x) + rng.normal(scale=scale) * np.cos(2 * np.pi * k * x)
            for k in range(1, modes + 1))
    return grid.field(v - v[0])


def _random_diffeo(grid, rng, amp=0.04):
    x = grid.points
    d = sum(rng.uniform(-amp, amp) * np.sin(2 * np.pi * k * x + rng.uniform(0, 2 * np.pi)) / k
            for k in (1, 2, 3))
    return CircleDiffeo(grid, d)


def _random_density(grid, rng):
    x = grid.points
    v = 1 + sum(rng.uniform(-0.15, 0.15) * np.cos(2 * np.pi * k * x + rng.uniform(0, 2 * np.pi))
                for k in (1, 2, 3))
    return Density.normalized(grid, v)


# -- suites ---------------------------------------------------------------

def suite_calculus():
    out = []
    g64 = PeriodicGrid(64)
    x = g64.points
    err = np.max(np.abs(derivative(g64.field(np.sin(2 * np.pi * x))).values - 2 * np.pi * np.cos(2 * np.pi * x)))
    out.append(_le("derivative of sin(2 pi x), n=64", err, 1e-12))

    rng = np.random.default_rng(1)
    g = PeriodicGrid(512)
    x = g.points
    u = sum(rng.normal() * np.sin(2 * np.pi * k * x) + rng.normal() * np.cos(2 * np.pi * k * x) for k in range(1, 9))
    u = g.field(u)
    h = inverse_A(u)
    out.append(_le("-(A^-1 u)'' = u, relative", (-derivative(h, 2) - u).max_abs() / u.max_abs(), 1e-9))
    out.append(_le("A^-1 u vanishes at 0", abs(h.values[0]), 0.0))

    # double-integral formula by composite Simpson on an 8x refined grid
    xf = np.linspace(0.0, 1.0, 8 * g.n + 1)
    uf = u(xf)
    inner = cumulative_simpson(uf, x=xf, initial=0.0)
    outer = cumulative_simpson(inner, x=xf, initial=0.0)
    ref = (-outer + xf * outer[-1])[:-1:8]
    out.append(_le("A^-1 spectral vs double-integral quadrature, n=512", np.max(np.abs(h.values - ref)), 1e-8))

    f = g.field(np.exp(np.sin(2 * np.pi * x)) + x * (1 - x))
    out.append(_le("integral of a derivative", abs(integrate(derivative(f))), 1e-13))

    errs = []
    for n in (64, 128):
        gn = PeriodicGrid(n)
        xn = gn.points
        c = np.cos(2 * np.pi * xn)
        exact = 2 * np.pi * np.sin(2 * np.pi * xn) / (1.1 + c) ** 2
        errs.append(np.max(np.abs(derivative(gn.field(1 / (1.1 + c))).values - exact)))
    out.append(_ge("spectral decay: error ratio n=64 -> 128", errs[0] / errs[1], 8.0))
    return out


def suite_group():
    rng = np.random.default_rng(2)
    g = PeriodicGrid(256)
    e1, e2, e3 = (_random_diffeo(g, rng) for _ in range(3))
    out = []
    assoc = compose(compose(e1, e2), e3).displacement - compose(e1, compose(e2, e3)).displacement
    out.append(_le("associativity of compose", assoc.max_abs(), 1e-8))
    inv = invert(e1)
    out.append(_le("eta o eta^-1 = id", compose(e1, inv).displacement.max_abs(), 1e-8))
    out.append(_le("eta^-1 o eta = id", compose(inv, e1).displacement.max_abs(), 1e-8))
    lhs = jacobian(compose(e1, e2)).values
    rhs = derivative(e1.displacement)(e2.values) + 1.0
    out.append(_le("chain rule for Jacobians", np.max(np.abs(lhs - rhs * e2.jacobian_values)), 1e-7))
    out.append(_le("unit mass of Jacobian", abs(integrate(jacobian(e1)) - 1), 1e-13))

    x = g.points
    u = g.field(0.1 * np.sin(2 * np.pi * x) + 0.05 * np.sin(4 * np.pi * x))
    dt = 1e-3
    tr = flow(u, 0.2, dt)
    J = np.array([e.jacobian_values for e in tr.diffeos])
    Jt = (J[2:] - J[:-2]) / (2 * dt)
    ux = derivative(u)
    pred = np.array([ux(e.values) * e.jacobian_values for e in tr.diffeos[1:-1]])
    out.append(_le("d/dt Jac = (u' o eta) Jac along a flow", np.max(np.abs(Jt - pred)), 1e-5))
    return out


def suite_divergence():
    rng = np.random.default_rng(3)
    g = PeriodicGrid(128)
    alphas = (-1.0, -0.5, 0.0, 0.5, 1.0)
    worst = 0.0
    for _ in range(200):
        r1, r2 = _random_density(g, rng), _random_density(g, rng)
        worst = min(worst, *(alpha_divergence(r1, r2, a) for a in alphas))
    out = [_ge("non-negativity on 200 random pairs", worst, -1e-12)]
    r1, r2 = _random_density(g, rng), _random_density(g, rng)
    out.append(_le("D(rho, rho) = 0", max(abs(alpha_divergence(r1, r1, a)) for a in alphas), 1e-12))
    cont = max(abs(alpha_divergence(r1, r2, -1 + 1e-6) - alpha_divergence(r1, r2, -1.0)),
               abs(alpha_divergence(r1, r2, 1 - 1e-6) - alpha_divergence(r1, r2, 1.0)))
    out.append(_le("endpoint continuity at 1 - 1e-6", cont, 1e-4))
    out.append(_le("D^0 = 1 - cos d_H",
                   abs(alpha_divergence(r1, r2, 0.0) - (1 - np.cos(hellinger_distance(r1, r2)))), 1e-12))

    g = PeriodicGrid(256)
    x = g.points
    V = g.field(np.sin(2 * np.pi * x) / (2 * np.pi))
    eta = CircleDiffeo.identity(g)
    ratio = metric_from_divergence(0.0, eta, V, V) / 0.5
    out.append(_le("lifted metric / Fisher-Rao - 1/4 (rho_t = 1 + t cos)", abs(ratio - 0.25) / 0.25, 1e-6))

    worst = 0.0
    for _ in range(4):
        eta = _random_diffeo(g, rng)
        V, W = _random_tangent(g, rng), _random_tangent(g, rng)
        ref = h1_inner(V, W, eta)
        for a in alphas:
            worst = max(worst, abs(metric_from_divergence(a, eta, V, W) - ref) / abs(ref))
    out.append(_le("metric recovered from D^alpha, relative", worst, 1e-4))

    worst = 0.0
    for _ in range(2):
        eta = _random_diffeo(g, rng)
        V, W, Z = (_random_tangent(g, rng) for _ in range(3))
        for a in (-0.5, 0.0, 0.5, 1.0):
            ref = h1_inner(christoffel(a, eta, W, V), Z, eta)
            worst = max(worst, abs(christoffel_from_divergence(a, eta, V, W, Z) - ref) / abs(ref))
    out.append(_le("Christoffel recovered from D^alpha, relative", worst, 1e-3))
    return out


def suite_duality():
    rng = np.random.default_rng(4)
    g = PeriodicGrid(256)
    eta = _random_diffeo(g, rng)
    V, W, Z = (_random_tangent(g, rng) for _ in range(3))
    out = []
    for a in (-1.0, -0.5, 0.0, 0.5, 1.0):
        out.append(_le(f"duality residual alpha={a:+.1f}", duality_residual(a, eta, V, W, Z), 1e-6))
    G1 = christoffel(1.0, eta, W, V)
    out.append(_le("Gamma symmetric", (G1 - christoffel(1.0, eta, V, W)).max_abs(), 1e-12 * max(1, G1.max_abs())))
    out.append(_le("Gamma^alpha = (1+alpha)/2 Gamma^1",
                   (christoffel(0.3, eta, W, V) - 0.65 * G1).max_abs(), 1e-12 * max(1, G1.max_abs())))
    for a in (-1.0, 1.0):
        out.append(_le(f"commutator curvature alpha={a:+.0f}",
                       curvature_eval(a, eta, V, W, Z).commutator.max_abs(), 1e-4))
    out.append(_le("Gamma^1 vanishes in the affine chart", chart_christoffel(eta, W, V).max_abs(), 1e-6))
    return out


def suite_geodesic_1d():
    g = PeriodicGrid(256)
    x = g.points
    out = []
    a = g.field(0.3 * np.sin(2 * np.pi * x))
    b = g.field(0.2 * np.cos(2 * np.pi * x))
    eta0, u0 = alpha1_solution(a, b, 0.0)
    tr = integrate_pj(u0, 1.0, 0.5, 1e-3, save_every=10)
    err = max((alpha1_solution(a, b, t)[1] - f).max_abs() for t, f in zip(tr.times[::5], tr.fields[::5]))
    out.append(_le("alpha=1 PDE vs closed form", err, 1e-5))

    fl = flow(tr, 0.5, 1e-2, eta0=eta0)
    ph = np.array([affine_chart_phi(e).values for e in fl.diffeos])
    out.append(_le("alpha=1 chart straightness", np.max(np.abs(ph[2:] - 2 * ph[1:-1] + ph[:-2])), 1e-8))

    errs = []
    for dt in (0.05, 0.025):
        t2 = integrate_pj(u0, 1.0, 0.5, dt, save_every=10 ** 6)
        errs.append((alpha1_solution(a, b, 0.5)[1] - t2.fields[-1]).max_abs())
    out.append(_ge("RK4 temporal order", np.log2(errs[0] / errs[1]), 3.8))

    u0 = g.field(-np.sin(2 * np.pi * x) / np.pi)
    tstar = burgers_breakdown_time(u0)
    dt = 1e-3
    tr = integrate_pj(u0, -1.0, 1.0, dt, save_every=10)
    err = max((alpham1_solution(u0, t)[1] - f).max_abs() for t, f in zip(tr.times, tr.fields) if t <= 0.8 * tstar)
    out.append(_le("alpha=-1 PDE vs straight lines (t <= 0.8 t*)", err, 1e-5))
    bt = tr.breakdown if tr.breakdown is not None else np.inf
    out.append(_le("alpha=-1 breakdown time vs -1/min u0' (in steps)", abs(bt - tstar) / dt, 2.0))

    u0 = g.field(0.5 * np.sin(2 * np.pi * x) / (2 * np.pi) + 0.2 * np.sin(4 * np.pi * x) / (4 * np.pi))
    tr = integrate_pj(u0, 0.0, 0.5, 1e-3, save_every=10)
    E = np.array([integrate(derivative(f) ** 2) for f in tr.fields])
    out.append(_le("alpha=0 drift of int u_x^2, relative", np.max(np.abs(E - E[0])) / E[0], 1e-8))
    fl = flow(tr, 0.5, 1e-2)
    rho1 = jacobian(fl.diffeos[-1])
    one = Density(g, np.ones(g.n))
    theta = hellinger_distance(one, rho1)
    err = 0.0
    for e in fl.diffeos:
        rho = jacobian(e)
        s = hellinger_distance(one, rho) / theta
        err = max(err, np.max(np.abs(rho.values - alpha0_density_geodesic(one, rho1, s).values)))
    out.append(_le("alpha=0 density path on the great circle", err, 1e-4))
    return out


def suite_torus_nd():
    out = []
    g = TorusGrid(2, 64)
    X, Y = g.points
    a = 0.24 * np.cos(2 * np.pi * X) + 0.18 * np.sin(2 * np.pi * (X + Y)) + 0.12 * np.sin(4 * np.pi * Y)
    b = np.zeros_like(a)
    psi = 0.05 * np.sin(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    gp = grad(psi).components
    u0 = potential_velocity(a) + TorusVectorField(g, np.array([-gp[1], gp[0]]))

    out.append(_le("curl of geodesic_rhs_nd", np.max(np.abs(curl(geodesic_rhs_nd(u0, 0.3)))), 1e-10))
    cf = alpha1_trajectory_nd(a, b, np.linspace(0.0, 0.5, 51))
    out.append(_le("pjn residual of alpha=1 closed form", pjn_residual(cf, 1.0).max(), 1e-6))

    tr = integrate_nd(u0, 1.0, 0.5, 2e-3, save_every=5)
    dfp = [divergence_free_part(v) for v in tr.velocities]
    out.append(_le("divergence-free part constant in time", max((d - dfp[0]).max_abs() for d in dfp), 1e-8))
    ts, pos = track_particles(tr)
    phiL = lagrangian_phi(tr, ts, pos)
    err = max(np.max(np.abs(p - alpha1_solution_nd(a, b, t)[1].ravel())) for p, t in zip(phiL, ts))
    out.append(_le("alpha=1 phi along particles vs closed form", err, 1e-4))

    tr = integrate_nd(u0, 0.5, 0.2, 1e-3, save_every=5)
    out.append(_le("pjn residual of integrate_nd, alpha=0.5", pjn_residual(tr, 0.5).max(), 1e-4))

    g1 = PeriodicGrid(256)
    x = g1.points
    u1 = 0.3 * np.sin(2 * np.pi * x) / (2 * np.pi) + 0.1 * (np.cos(4 * np.pi * x) - 1)
    tp = integrate_pj(g1.field(u1), 0.5, 0.4, 1e-3, save_every=10)
    tn = integrate_nd(TorusVectorField(TorusGrid(1, 256), u1[None]), 0.5, 0.4, 1e-3, save_every=10)
    err = max(np.max(np.abs(derivative(f).values - p)) for f, p in zip(galilean_frame_1d(tp), tn.phi))
    out.append(_le("n=1 torus vs Proudman-Johnson, phi", err, 1e-5))
    return out


SUITES = {
    "calculus": suite_calculus,
    "group": suite_group,
    "divergence": suite_divergence,
    "duality": suite_duality,
    "geodesic-1d": suite_geodesic_1d,
    "torus-nd": suite_torus_nd,
}


def worker_threads() -> int:
    """Thread cap from ``FRF_NUM_THREADS`` (default: up to 4)."""
    raw = os.environ.get("FRF_NUM_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FRF_NUM_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"FRF_NUM_THREADS must be a positive integer, got {raw!r}")
    return n


def run_suite(name: str) -> dict:
    checks = SUITES[name]()
    return {"suite": name, "passed": all(c.passed for c in checks), "checks": [asdict(c) for c in checks]}


def run_suites(names, threads: int = 1) -> list:
    """Run suites (possibly concurrently); results keep the order of ``names``."""
    names = list(names)
    if threads <= 1 or len(names) == 1:
        return [run_suite(n) for n in names]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_suite, names))
