r"""Circle diffeomorphisms fixing the origin.

The space :math:`\{\eta \in \mathcal{D}(S^1) : \eta(0) = 0\}` represents the
coset space :math:`\mathcal{D}(S^1)/\mathrm{Rot}(S^1)`.  A map is stored as
identity plus a periodic displacement, :math:`\eta(x) = x + d(x)` with
:math:`d(0) = 0`.  Off-grid evaluation uses trigonometric interpolation of
the displacement, so composition and inversion keep spectral accuracy for
smooth maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .calculus import (
    PeriodicField,
    PeriodicGrid,
    derivative,
    trig_eval,
    trig_eval_multi,
)
from .errors import BreakdownError, DegenerateDiffeoError, InvalidInputError

__all__ = [
    "EPS_JAC",
    "CircleDiffeo",
    "Density",
    "DiffeoTrajectory",
    "compose",
    "compose_field",
    "invert",
    "jacobian",
    "sqrt_jac_embed",
    "pushforward_velocity",
    "flow",
]

EPS_JAC = 1e-8
INVERT_TOL = 1e-12


class Density(PeriodicField):
    """A strictly positive field of unit mass."""

    MASS_TOL = 1e-10

    def __post_init__(self):
        super().__post_init__()
        if np.min(self.values) <= 0.0:
            raise InvalidInputError(
                f"density must be strictly positive, min is {np.min(self.values):.3e}")
        mass = float(np.mean(self.values))
        if abs(mass - 1.0) > self.MASS_TOL:
            raise InvalidInputError(f"density must have unit mass, got {mass!r}")

    @classmethod
    def normalized(cls, grid: PeriodicGrid, values) -> "Density":
        v = np.asarray(values, dtype=float)
        return cls(grid, v / np.mean(v))

    @classmethod
    def from_function(cls, grid: PeriodicGrid, func) -> "Density":
        return cls.normalized(grid, func(grid.points))

    def _new(self, values):
        # arithmetic leaves the space of densities
        return PeriodicField(self.grid, values)


@dataclass(frozen=True, eq=False)
class CircleDiffeo:
    """Orientation-preserving circle diffeomorphism with ``eta(0) = 0``.

    ``displacement`` may be given as a :class:`PeriodicField` or a plain
    array; its value at 0 is subtracted so that the stored representative
    fixes the origin.
    """

    grid: PeriodicGrid
    displacement: PeriodicField = field(repr=False)

    def __post_init__(self):
        d = self.displacement
        if isinstance(d, PeriodicField):
            if d.grid != self.grid:
                raise InvalidInputError("displacement lives on a different grid")
            v = d.values
        else:
            v = np.asarray(d, dtype=float)
        d = PeriodicField(self.grid, v - v[0])
        object.__setattr__(self, "displacement", d)
        jmin = float(np.min(self.jacobian_values))
        if not jmin > EPS_JAC:
            raise DegenerateDiffeoError(
                f"Jacobian minimum {jmin:.3e} is below the floor {EPS_JAC:g}")

    @classmethod
    def identity(cls, grid: PeriodicGrid) -> "CircleDiffeo":
        return cls(grid, np.zeros(grid.n))

    @classmethod
    def from_map(cls, grid: PeriodicGrid, func) -> "CircleDiffeo":
        """Build from a vectorised map ``func(x) = eta(x)`` with ``eta(x+1) = eta(x)+1``."""
        x = grid.points
        return cls(grid, func(x) - x)

    @cached_property
    def jacobian_values(self) -> np.ndarray:
        return 1.0 + derivative(self.displacement).values

    @property
    def values(self) -> np.ndarray:
        """Samples ``eta(x_j)``."""
        return self.grid.points + self.displacement.values

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return y + trig_eval(self.displacement, y)

    def perturb(self, V: PeriodicField, s: float) -> "CircleDiffeo":
        """The map ``eta + s V`` (straight line in the displacement chart)."""
        return CircleDiffeo(self.grid, self.displacement + s * V)


@dataclass(frozen=True)
class DiffeoTrajectory:
    """Time samples of a path of diffeomorphisms."""

    times: np.ndarray
    diffeos: list

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i):
        return self.diffeos[i]

    @property
    def grid(self):
        return self.diffeos[0].grid

    def displacements(self) -> np.ndarray:
        return np.array([eta.displacement.values for eta in self.diffeos])


def _check_pair(a, b):
    if a.grid != b.grid:
        raise InvalidInputError("arguments live on different grids")


def _periodic_spline(f: PeriodicField) -> CubicSpline:
    x = np.append(f.grid.points, 1.0)
    y = np.append(f.values, f.values[0])
    return CubicSpline(x, y, bc_type="periodic")


def compose_field(f: PeriodicField, eta: CircleDiffeo, method: str = "trig") -> PeriodicField:
    """Samples of ``f o eta`` at the grid points."""
    _check_pair(f, eta)
    y = eta.values
    if method == "trig":
        return PeriodicField(f.grid, trig_eval(f, y))
    if method == "cubic":
        return PeriodicField(f.grid, _periodic_spline(f)(np.mod(y, 1.0)))
    raise InvalidInputError(f"unknown interpolation method {method!r}")


def compose(eta: CircleDiffeo, xi: CircleDiffeo, method: str = "trig") -> CircleDiffeo:
    """The composition ``eta o xi``."""
    _check_pair(eta, xi)
    d = xi.displacement + compose_field(eta.displacement, xi, method=method)
    return CircleDiffeo(eta.grid, d)


def _solve_monotone(eta: CircleDiffeo, targets: np.ndarray, tol: float = INVERT_TOL) -> np.ndarray:
    """Solve ``eta(y) = target`` elementwise (eta strictly increasing)."""
    d = eta.displacement
    reach = 1.05 * float(np.max(np.abs(trig_eval(d, np.arange(4 * eta.grid.n) / (4 * eta.grid.n))))) + 1e-12
    lo = targets - reach
    hi = targets + reach

    def residual(y):
        dv, dp = trig_eval_multi(d, y, (0, 1))
        return y + dv - targets, 1.0 + dp

    # widen any bracket that the reach estimate missed
    for _ in range(60):
        r_lo, _ = residual(lo)
        r_hi, _ = residual(hi)
        bad_lo, bad_hi = r_lo > 0, r_hi < 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, lo - reach, lo)
        hi = np.where(bad_hi, hi + reach, hi)

    # bisection seed
    for _ in range(4):
        mid = 0.5 * (lo + hi)
        r, _ = residual(mid)
        lo = np.where(r <= 0, mid, lo)
        hi = np.where(r > 0, mid, hi)

    y = 0.5 * (lo + hi)
    converged = np.zeros(y.shape, dtype=bool)
    for _ in range(50):
        r, dr = residual(y)
        lo = np.where(r <= 0, y, lo)
        hi = np.where(r > 0, y, hi)
        step = r / dr
        y_new = y - step
        outside = (y_new <= lo) | (y_new >= hi) | ~np.isfinite(y_new)
        y_new = np.where(outside, 0.5 * (lo + hi), y_new)
        # the last accepted Newton step is kept: it is quadratically accurate
        converged = (np.abs(step) <= tol) & ~outside
        y = y_new
        if converged.all():
            break

    if not converged.all():
        idx = ~converged
        a, b = lo[idx], hi[idx]
        tgt = targets[idx]
        for _ in range(200):
            if np.max(b - a) <= tol:
                break
            m = 0.5 * (a + b)
            rm = m + trig_eval(d, m) - tgt
            a = np.where(rm <= 0, m, a)
            b = np.where(rm > 0, m, b)
        y[idx] = 0.5 * (a + b)
    return y


def invert(eta: CircleDiffeo) -> CircleDiffeo:
    """The inverse map, by a safeguarded Newton solve at each grid node."""
    x = eta.grid.points
    y = _solve_monotone(eta, x)
    return CircleDiffeo(eta.grid, y - x)


def jacobian(eta: CircleDiffeo) -> Density:
    """The Jacobian ``eta_x`` as a probability density."""
    J = eta.jacobian_values
    if np.min(J) <= EPS_JAC:
        raise DegenerateDiffeoError("Jacobian is not positive")
    return Density(eta.grid, J)


def sqrt_jac_embed(eta: CircleDiffeo) -> PeriodicField:
    """``sqrt(eta_x)``, a point of the unit sphere in L^2."""
    return PeriodicField(eta.grid, np.sqrt(jacobian(eta).values))


def pushforward_velocity(V: PeriodicField, eta: CircleDiffeo, eta_inv: CircleDiffeo | None = None) -> PeriodicField:
    """The right-translated field ``V o eta^{-1}``."""
    if eta_inv is None:
        eta_inv = invert(eta)
    return compose_field(V, eta_inv)


def _velocity_source(u):
    if hasattr(u, "at"):
        return u.at
    if isinstance(u, PeriodicField):
        return lambda t: u
    if callable(u):
        return u
    raise InvalidInputError("velocity must be a PeriodicField, a callable of t, or a trajectory")


def flow(u, T: float, dt: float, eta0: CircleDiffeo | None = None) -> DiffeoTrajectory:
    r"""Integrate :math:`d\eta/dt = u(t)\circ\eta`, :math:`\eta(0) = \mathrm{id}`, by RK4.

    ``u`` is a fixed :class:`PeriodicField`, a callable ``t -> PeriodicField``
    or any object with an ``at(t)`` method (e.g. a recorded velocity
    trajectory, linearly interpolated in time).  Raises
    :class:`BreakdownError` at the first step whose Jacobian collapses.
    """
    if not dt > 0 or not T > 0:
        raise InvalidInputError("T and dt must be positive")
    u_at = _velocity_source(u)
    nsteps = max(1, int(np.ceil(T / dt - 1e-9)))
    h = T / nsteps
    grid = eta0.grid if eta0 is not None else u_at(0.0).grid
    x = grid.points
    eta = eta0 if eta0 is not None else CircleDiffeo.identity(grid)
    d = eta.displacement.values.copy()

    def rhs(t, d):
        return trig_eval(u_at(t), x + d)

    times = [0.0]
    diffeos = [eta]
    t = 0.0
    for i in range(nsteps):
        k1 = rhs(t, d)
        k2 = rhs(t + h / 2, d + h / 2 * k1)
        k3 = rhs(t + h / 2, d + h / 2 * k2)
        k4 = rhs(t + h, d + h * k3)
        d = d + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = (i + 1) * h
        try:
            if not np.all(np.isfinite(d)):
                raise DegenerateDiffeoError("non-finite displacement")
            eta = CircleDiffeo(grid, d)
        except (DegenerateDiffeoError, InvalidInputError) as exc:
            raise BreakdownError(f"flow broke down at t = {t:.6g}: {exc}", t) from exc
        d = eta.displacement.values.copy()
        times.append(t)
        diffeos.append(eta)
    return DiffeoTrajectory(np.array(times), diffeos)
