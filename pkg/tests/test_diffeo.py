import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from frflows.calculus import PeriodicGrid, derivative, integrate
from frflows.diffeo import (CircleDiffeo, Density, compose, compose_field, flow, invert, jacobian,
                            pushforward_velocity, sqrt_jac_embed)
from frflows.divergences import hellinger_distance
from frflows.errors import BreakdownError, DegenerateDiffeoError, InvalidInputError
from frflows.geodesics import VelocityTrajectory, alpha1_solution

from conftest import random_diffeo

TWO_PI = 2 * np.pi


def sinusoidal(grid, a, k=1, phase=0.0):
    return CircleDiffeo(grid, a * np.sin(TWO_PI * k * grid.points + phase) / (TWO_PI * k))


# -- construction ------------------------------------------------------------

def test_displacement_is_pinned_at_zero(grid):
    eta = CircleDiffeo(grid, 0.01 + 0.02 * np.cos(TWO_PI * grid.points))
    assert eta.displacement.values[0] == 0.0
    assert eta.values[0] == 0.0


def test_degenerate_map_rejected(grid):
    with pytest.raises(DegenerateDiffeoError):
        sinusoidal(grid, 1.2)


def test_periodicity_of_map(grid):
    eta = sinusoidal(grid, 0.5)
    y = np.linspace(-0.3, 0.7, 11)
    assert np.allclose(eta(y + 1.0), eta(y) + 1.0, atol=1e-13)


# -- compose -----------------------------------------------------------------

def test_compose_with_identity(grid, rng):
    eta = random_diffeo(grid, rng)
    ident = CircleDiffeo.identity(grid)
    assert (compose(eta, ident).displacement - eta.displacement).max_abs() <= 1e-15
    assert (compose(ident, eta).displacement - eta.displacement).max_abs() <= 1e-15


def test_compose_inverse_law(grid, rng):
    eta = random_diffeo(grid, rng)
    assert compose(eta, invert(eta)).displacement.max_abs() <= 1e-8


def test_compose_against_dense_grid():
    coarse, fine = PeriodicGrid(256), PeriodicGrid(4096)
    ref = compose(sinusoidal(fine, 0.3), sinusoidal(fine, 0.2, k=2, phase=0.4))
    got = compose(sinusoidal(coarse, 0.3), sinusoidal(coarse, 0.2, k=2, phase=0.4))
    assert np.max(np.abs(got.displacement.values - ref.displacement.values[::16])) <= 1e-7


def test_compose_cubic_fallback_close_to_trig(grid, rng):
    eta, xi = random_diffeo(grid, rng), random_diffeo(grid, rng)
    trig = compose(eta, xi)
    cubic = compose(eta, xi, method="cubic")
    assert (trig.displacement - cubic.displacement).max_abs() <= 1e-6


def test_compose_unknown_method(grid):
    ident = CircleDiffeo.identity(grid)
    with pytest.raises(InvalidInputError):
        compose_field(grid.zeros(), ident, method="linear")


# -- invert ------------------------------------------------------------------

def test_invert_identity(grid):
    assert invert(CircleDiffeo.identity(grid)).displacement.max_abs() <= 1e-15


def test_invert_is_involution(grid, rng):
    eta = random_diffeo(grid, rng)
    assert (invert(invert(eta)).displacement - eta.displacement).max_abs() <= 1e-9


def test_invert_against_root_finder(grid, rng):
    a = 0.1
    eta = sinusoidal(grid, a)
    inv = invert(eta)
    pts = rng.uniform(0, 1, 1000)
    got = inv(pts)

    def fwd(y):
        return y + a * np.sin(TWO_PI * y) / TWO_PI

    ref = np.array([brentq(lambda y: fwd(y) - p, p - 0.1, p + 0.1, xtol=1e-15, rtol=1e-15) for p in pts])
    assert np.max(np.abs(got - ref)) <= 1e-10


def test_invert_reaches_machine_precision(grid):
    a = 0.6
    inv = invert(sinusoidal(grid, a))
    ref = np.array([brentq(lambda y: y + a * np.sin(TWO_PI * y) / TWO_PI - p, p - 0.2, p + 0.2,
                           xtol=1e-16, rtol=1e-15) for p in grid.points])
    assert np.max(np.abs(inv.values - ref)) <= 1e-14


def test_invert_steep_map(grid):
    eta = sinusoidal(grid, 0.97)
    assert compose(eta, invert(eta)).displacement.max_abs() <= 1e-8


# -- jacobian and the sphere embedding ---------------------------------------

def test_jacobian_identity(grid):
    assert np.all(jacobian(CircleDiffeo.identity(grid)).values == 1.0)


def test_jacobian_sinusoidal(grid):
    rho = jacobian(sinusoidal(grid, 0.6))
    assert np.max(np.abs(rho.values - (1 + 0.6 * np.cos(TWO_PI * grid.points)))) <= 1e-13


def test_jacobian_unit_mass(grid, rng):
    for _ in range(5):
        assert abs(integrate(jacobian(random_diffeo(grid, rng))) - 1.0) <= 1e-13


def test_sqrt_embedding(grid, rng):
    assert np.allclose(sqrt_jac_embed(CircleDiffeo.identity(grid)).values, 1.0)
    xi, eta = random_diffeo(grid, rng), random_diffeo(grid, rng)
    s, r = sqrt_jac_embed(xi), sqrt_jac_embed(eta)
    assert abs(integrate(s * s) - 1.0) <= 1e-12
    d = np.arccos(np.clip(integrate(s * r), -1, 1))
    assert abs(d - hellinger_distance(jacobian(xi), jacobian(eta))) <= 1e-12


def test_density_validation(grid):
    with pytest.raises(InvalidInputError):
        Density(grid, np.full(grid.n, 2.0))
    with pytest.raises(InvalidInputError):
        Density.normalized(grid, np.cos(TWO_PI * grid.points))
    rho = Density.normalized(grid, 2 + np.cos(TWO_PI * grid.points))
    assert abs(integrate(rho) - 1) <= 1e-12


# -- pushforward ---------------------------------------------------------------

def test_pushforward_identity(grid):
    V = grid.sample(lambda x: np.sin(TWO_PI * x))
    assert (pushforward_velocity(V, CircleDiffeo.identity(grid)) - V).max_abs() <= 1e-14


def test_pushforward_round_trip(grid, rng):
    eta = random_diffeo(grid, rng)
    V = grid.sample(lambda x: np.sin(TWO_PI * x) + 0.3 * np.cos(3 * TWO_PI * x))
    assert (compose_field(pushforward_velocity(V, eta), eta) - V).max_abs() <= 1e-8


def test_pushforward_against_pointwise_oracle(grid):
    a = 0.4
    eta = sinusoidal(grid, a)

    def V(x):
        return np.sin(TWO_PI * x) + 0.3 * np.cos(2 * TWO_PI * x)

    got = pushforward_velocity(grid.sample(V), eta).values
    y = np.array([brentq(lambda s: s + a * np.sin(TWO_PI * s) / TWO_PI - p, p - 0.2, p + 0.2, xtol=1e-15)
                  for p in grid.points])
    assert np.max(np.abs(got - V(y))) <= 1e-7


# -- flow ------------------------------------------------------------------------

def test_flow_of_zero(grid):
    tr = flow(grid.zeros(), 0.3, 0.05)
    assert all(e.displacement.max_abs() == 0.0 for e in tr.diffeos)


def test_flow_matches_scalar_ode(grid, rng):
    def u(x):
        return 0.3 * np.sin(TWO_PI * x) * (1 + 0.5 * np.cos(TWO_PI * x))

    tr = flow(grid.sample(u), 0.3, 1e-3)
    idx = np.sort(rng.choice(grid.n, 200, replace=False))
    x0 = grid.points[idx]
    sol = solve_ivp(lambda t, y: u(y), (0, 0.3), x0, method="DOP853", rtol=1e-13, atol=1e-14)
    assert np.max(np.abs(tr.diffeos[-1].values[idx] - sol.y[:, -1])) <= 1e-8


def test_flow_reproduces_alpha1_solution(grid):
    x = grid.points
    a = grid.field(0.3 * np.sin(TWO_PI * x))
    b = grid.field(0.2 * np.cos(TWO_PI * x))
    times = np.linspace(0, 0.3, 31)
    sols = [alpha1_solution(a, b, t) for t in times]
    traj = VelocityTrajectory(times, [s[1] for s in sols], 1.0)
    fl = flow(traj, 0.3, 0.02, eta0=sols[0][0])
    for k in range(0, 31, 2):
        assert (fl.diffeos[k // 2].displacement - sols[k][0].displacement).max_abs() <= 1e-6


def test_flow_breakdown_reports_time(grid):
    u = grid.sample(lambda x: -np.sin(TWO_PI * x) / np.pi)
    # the exact Jacobian at x = 0 is exp(-80 t); the map steepens into a
    # front the grid cannot resolve and the spectral Jacobian goes negative
    with pytest.raises(BreakdownError) as info:
        flow(u * 40.0, 1.0, 1e-3)
    assert 0 < info.value.time < np.log(1e8) / 80


def test_flow_rejects_bad_step(grid):
    with pytest.raises(InvalidInputError):
        flow(grid.zeros(), 1.0, 0.0)


# -- properties ----------------------------------------------------------------

diffeo_params = st.tuples(*[st.floats(-0.04, 0.04) for _ in range(3)], *[st.floats(0, 6.28) for _ in range(3)])


def build(grid, p):
    x = grid.points
    d = sum(p[i] * np.sin(TWO_PI * (i + 1) * x + p[3 + i]) / (i + 1) for i in range(3))
    return CircleDiffeo(grid, d)


G128 = PeriodicGrid(128)


@settings(max_examples=20, deadline=None)
@given(diffeo_params, diffeo_params, diffeo_params)
def test_group_laws(p1, p2, p3):
    e1, e2, e3 = build(G128, p1), build(G128, p2), build(G128, p3)
    left = compose(compose(e1, e2), e3).displacement
    right = compose(e1, compose(e2, e3)).displacement
    assert (left - right).max_abs() <= 1e-8
    inv = invert(e1)
    assert compose(e1, inv).displacement.max_abs() <= 1e-8
    assert compose(inv, e1).displacement.max_abs() <= 1e-8


@settings(max_examples=20, deadline=None)
@given(diffeo_params, diffeo_params)
def test_chain_rule(p1, p2):
    eta, xi = build(G128, p1), build(G128, p2)
    lhs = jacobian(compose(eta, xi)).values
    rhs = (1 + derivative(eta.displacement)(xi.values)) * xi.jacobian_values
    assert np.max(np.abs(lhs - rhs)) <= 1e-7


def test_jacobian_evolution_along_flow(grid):
    u = grid.sample(lambda x: 0.1 * np.sin(TWO_PI * x) + 0.05 * np.sin(2 * TWO_PI * x))
    dt = 1e-3
    tr = flow(u, 0.2, dt)
    J = np.array([e.jacobian_values for e in tr.diffeos])
    Jt = (J[2:] - J[:-2]) / (2 * dt)
    ux = derivative(u)
    pred = np.array([ux(e.values) * e.jacobian_values for e in tr.diffeos[1:-1]])
    assert np.max(np.abs(Jt - pred)) <= 1e-5
