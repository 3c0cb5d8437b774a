import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frflows.calculus import (PeriodicGrid, antiderivative, dealias, dealiased_product, derivative,
                              integral_from_zero, integrate, inverse_A, inverse_A_dx, shift, trig_eval)
from frflows.errors import DomainError, InvalidInputError

from conftest import a_inverse_quad

TWO_PI = 2 * np.pi


# -- grid ------------------------------------------------------------------

@pytest.mark.parametrize("n", [15, 8, 17, 0, 2.5])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(InvalidInputError):
        PeriodicGrid(n)


def test_grid_points_are_exact():
    g = PeriodicGrid(64)
    assert np.array_equal(g.points, np.arange(64) / 64)


def test_field_rejects_non_finite(grid):
    v = np.zeros(grid.n)
    v[3] = np.nan
    with pytest.raises(InvalidInputError):
        grid.field(v)


def test_field_is_immutable(grid):
    f = grid.field(np.ones(grid.n))
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_mixed_grids_rejected():
    with pytest.raises(InvalidInputError):
        PeriodicGrid(32).zeros() + PeriodicGrid(64).zeros()


# -- derivative --------------------------------------------------------------

def test_derivative_of_constant(grid):
    assert derivative(grid.constant(1.0)).max_abs() == 0.0


def test_derivative_of_sine():
    g = PeriodicGrid(64)
    x = g.points
    err = derivative(g.field(np.sin(TWO_PI * x))).values - TWO_PI * np.cos(TWO_PI * x)
    assert np.max(np.abs(err)) <= 1e-12


def test_derivative_of_product():
    g = PeriodicGrid(128)
    x = g.points
    f = np.sin(TWO_PI * x) * np.cos(2 * TWO_PI * x)
    exact = TWO_PI * np.cos(TWO_PI * x) * np.cos(2 * TWO_PI * x) - 2 * TWO_PI * np.sin(TWO_PI * x) * np.sin(2 * TWO_PI * x)
    assert np.max(np.abs(derivative(g.field(f)).values - exact)) <= 1e-10


def test_nyquist_derivative_is_zero():
    g = PeriodicGrid(32)
    nyq = g.field(np.cos(np.pi * g.n * g.points))
    assert derivative(nyq).max_abs() <= 1e-12


def test_second_derivative(grid):
    x = grid.points
    f = grid.field(np.sin(3 * TWO_PI * x))
    err = derivative(f, 2).values + (3 * TWO_PI) ** 2 * np.sin(3 * TWO_PI * x)
    assert np.max(np.abs(err)) <= 1e-9


# -- integrate -----------------------------------------------------------------

def test_integrate_constant(grid):
    assert integrate(grid.constant(2.5)) == pytest.approx(2.5, abs=1e-15)


def test_integrate_odd_harmonic(grid):
    assert abs(integrate(grid.sample(lambda x: np.sin(TWO_PI * x)))) <= 1e-15


def test_integrate_cos_squared(grid):
    assert abs(integrate(grid.sample(lambda x: np.cos(TWO_PI * x) ** 2)) - 0.5) <= 1e-14


# -- antiderivative ------------------------------------------------------------

def test_antiderivative_inverts_derivative(grid):
    x = grid.points
    f = grid.field(np.sin(TWO_PI * x) + 0.3 * np.cos(2 * TWO_PI * x))
    F = antiderivative(f)
    assert F.values[0] == 0.0
    assert (derivative(F) - f).max_abs() <= 1e-12


def test_integral_from_zero_with_mean(grid):
    x = grid.points
    f = grid.field(1.0 + np.cos(TWO_PI * x))
    exact = x + np.sin(TWO_PI * x) / TWO_PI
    assert np.max(np.abs(integral_from_zero(f).values - exact)) <= 1e-13


# -- inverse_A -----------------------------------------------------------------

def test_inverse_A_zero(grid):
    assert inverse_A(grid.zeros()).max_abs() == 0.0


def test_inverse_A_cosine_analytic():
    g = PeriodicGrid(512)
    x = g.points
    h = inverse_A(g.field(np.cos(TWO_PI * x)))
    exact = (np.cos(TWO_PI * x) - 1) / (4 * np.pi ** 2)
    assert np.max(np.abs(h.values - exact)) <= 1e-14


@pytest.mark.parametrize("u", [lambda x: np.cos(TWO_PI * x), lambda x: np.sin(2 * TWO_PI * x)])
def test_inverse_A_matches_double_integral(u):
    g = PeriodicGrid(512)
    idx = np.arange(0, 512, 37)
    h = inverse_A(g.sample(u))
    ref = a_inverse_quad(u, g.points[idx])
    assert np.max(np.abs(h.values[idx] - ref)) <= 1e-8


def test_inverse_A_rejects_nonzero_mean(grid):
    with pytest.raises(DomainError, match="mean"):
        inverse_A(grid.constant(1e-6))


def test_inverse_A_dx_accepts_any_field(grid):
    x = grid.points
    f = grid.field(2.0 + np.sin(TWO_PI * x))
    g = inverse_A_dx(f)
    # -g'' = f'
    assert (-derivative(g, 2) - derivative(f)).max_abs() <= 1e-10


# -- dealiasing, interpolation, shift ----------------------------------------

def test_dealias_keeps_low_modes_and_drops_high():
    g = PeriodicGrid(48)
    x = g.points
    low = np.cos(TWO_PI * 15 * x)
    high = np.cos(TWO_PI * 16 * x)
    assert np.allclose(dealias(g.field(low)).values, low, atol=1e-13)
    assert dealias(g.field(high)).max_abs() <= 1e-13


def test_dealiased_product_exact_for_low_modes():
    g = PeriodicGrid(64)
    x = g.points
    f, h = np.sin(TWO_PI * 3 * x), np.cos(TWO_PI * 5 * x)
    assert np.allclose(dealiased_product(g.field(f), g.field(h)).values, f * h, atol=1e-13)


def test_trig_eval_off_grid(grid, rng):
    x = grid.points
    f = grid.field(np.sin(TWO_PI * x) + 0.2 * np.cos(3 * TWO_PI * x))
    y = rng.uniform(-1, 2, 100)
    assert np.allclose(trig_eval(f, y), np.sin(TWO_PI * y) + 0.2 * np.cos(3 * TWO_PI * y), atol=1e-13)
    dy = TWO_PI * np.cos(TWO_PI * y) - 0.6 * TWO_PI * np.sin(3 * TWO_PI * y)
    assert np.allclose(f(y, deriv=1), dy, atol=1e-11)


def test_shift_translates(grid):
    x = grid.points
    f = grid.field(np.sin(TWO_PI * x) + np.cos(np.pi * grid.n * x))
    s = 0.137
    ref = np.sin(TWO_PI * (x - s)) + np.cos(np.pi * grid.n * x) * np.cos(np.pi * grid.n * s)
    assert np.max(np.abs(shift(f, s).values - ref)) <= 1e-12


# -- properties --------------------------------------------------------------

coef = st.floats(-1.0, 1.0, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=8, max_size=8), st.sampled_from([64, 128, 256]))
def test_inverse_A_round_trip(cs, n):
    g = PeriodicGrid(n)
    x = g.points
    u = sum(c * (np.sin if i % 2 else np.cos)(TWO_PI * (i // 2 + 1) * x) for i, c in enumerate(cs))
    u = g.field(u)
    h = inverse_A(u)
    assert h.values[0] == 0.0
    scale = max(u.max_abs(), 1e-300)
    assert (-derivative(h, 2) - u).max_abs() <= 1e-9 * max(scale, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=16, max_size=16))
def test_integral_of_derivative_vanishes(vals):
    g = PeriodicGrid(16)
    assert abs(integrate(derivative(g.field(vals)))) <= 1e-13 * max(1.0, max(map(abs, vals)))
