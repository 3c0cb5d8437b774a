r"""Geodesics of the alpha-connections on :math:`\mathcal{D}(S^1)/\mathrm{Rot}(S^1)`.

In Eulerian form the geodesic equation is the generalized Proudman-Johnson
equation

.. math::

    u_t + u u_x = -\frac{1+\alpha}{2} A^{-1}\partial_x(u_x^2),

integrated here pseudospectrally (2/3-rule dealiasing, fixed-step RK4).
The cases :math:`\alpha = -1, 0, 1` are integrable and have closed-form
solvers: straight lines :math:`\eta = \mathrm{id} + t u_0` for
:math:`\alpha=-1`, great circles of :math:`\sqrt{\eta_x}` on the unit
:math:`L^2` sphere for :math:`\alpha=0` (Hunter-Saxton), and straight lines
in the chart :math:`\phi(\eta) = \log\eta_x - \int\log\eta_x` for
:math:`\alpha = 1`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _rk4
from .calculus import (
    PeriodicField,
    PeriodicGrid,
    antiderivative,
    derivative,
    integrate,
)
from .diffeo import CircleDiffeo, Density, compose_field, invert, jacobian
from .divergences import check_alpha, hellinger_distance
from .errors import BreakdownError, DegenerateDiffeoError, DomainError, InvalidInputError

__all__ = [
    "MAX_DT",
    "VelocityTrajectory",
    "pj_rhs",
    "integrate_pj",
    "conserved_C",
    "affine_chart_phi",
    "inverse_phi",
    "alpha1_solution",
    "alpham1_solution",
    "burgers_breakdown_time",
    "alpha0_solution",
    "hunter_saxton_breakdown_time",
    "alpha0_density_geodesic",
    "pj_residual",
]

MAX_DT = 0.05


@dataclass(frozen=True)
class VelocityTrajectory:
    """Recorded velocities ``u(t_k)`` of a geodesic integration.

    ``breakdown`` is the first time at which the solution was found invalid
    (``None`` if the run completed); no fields are stored past it.
    """

    times: np.ndarray
    fields: list
    alpha: float
    breakdown: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if len(t) != len(self.fields):
            raise InvalidInputError("times and fields differ in length")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise InvalidInputError("times must be strictly increasing")
        object.__setattr__(self, "times", t)

    def __len__(self):
        return len(self.times)

    @property
    def grid(self) -> PeriodicGrid:
        return self.fields[0].grid

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    def values(self) -> np.ndarray:
        return np.array([f.values for f in self.fields])

    def at(self, t: float) -> PeriodicField:
        """Linear interpolation in time (exact at the recorded times)."""
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise InvalidInputError(f"t = {t} outside recorded range [{times[0]}, {times[-1]}]")
        k = int(np.searchsorted(times, t))
        if k < len(times) and abs(times[k] - t) <= 1e-12:
            return self.fields[k]
        if k > 0 and abs(times[k - 1] - t) <= 1e-12:
            return self.fields[k - 1]
        k = min(max(k, 1), len(times) - 1)
        t0, t1 = times[k - 1], times[k]
        lam = (t - t0) / (t1 - t0)
        return (1 - lam) * self.fields[k - 1] + lam * self.fields[k]


class _Spectral1D:
    """Array-level operators for the integrator's inner loop."""

    def __init__(self, grid: PeriodicGrid):
        n = grid.n
        k = grid.wavenumbers
        self.n = n
        self.ik = 2j * np.pi * k
        self.ik[-1] = 0.0
        self.keep = 3 * k < n
        k2 = (2 * np.pi * k) ** 2
        k2[0] = 1.0
        self.inv_k2 = 1.0 / k2
        self.inv_k2[0] = 0.0

    def rhs(self, u, alpha):
        n = self.n
        uh = np.fft.rfft(u) * self.keep
        ut = np.fft.irfft(uh, n=n)
        ux = np.fft.irfft(self.ik * uh, n=n)
        adv = np.fft.rfft(ut * ux) * self.keep
        out = -adv
        c = (1.0 + alpha) / 2.0
        if c:
            sq = np.fft.rfft(ux * ux) * self.keep
            hh = self.ik * sq * self.inv_k2
            h = np.fft.irfft(hh, n=n)
            out = out - c * np.fft.rfft(h - h[0])
        return np.fft.irfft(out, n=n)

    def dx(self, u):
        return np.fft.irfft(self.ik * np.fft.rfft(u), n=self.n)


def pj_rhs(u: PeriodicField, alpha: float) -> PeriodicField:
    r"""Right side :math:`-u u_x - \tfrac{1+\alpha}{2}A^{-1}\partial_x(u_x^2)`, dealiased."""
    alpha = check_alpha(alpha)
    return PeriodicField(u.grid, _Spectral1D(u.grid).rhs(u.values, alpha))


def integrate_pj(u0: PeriodicField, alpha: float, T: float, dt: float,
                 save_every: int = 1) -> VelocityTrajectory:
    """Integrate the generalized Proudman-Johnson equation with RK4.

    The run halts at the first step where ``|u|`` or ``|u_x|`` exceeds 1e6,
    a value becomes non-finite, or the Lagrangian Jacobian of the flow map
    collapses; the partial trajectory is returned with ``breakdown`` set.
    """
    alpha = check_alpha(alpha)
    if not T > 0:
        raise InvalidInputError("T must be positive")
    if not 0 < dt <= MAX_DT:
        raise InvalidInputError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    if abs(u0.values[0]) > 1e-10:
        raise InvalidInputError("initial velocity must vanish at x = 0")
    ops = _Spectral1D(u0.grid)
    times, states, breakdown, h = _rk4.integrate_rk4(
        u0.values, lambda u: ops.rhs(u, alpha), ops.dx,
        lambda u: float(np.max(np.abs(ops.dx(u)))), alpha, T, dt, save_every)
    fields = [PeriodicField(u0.grid, s) for s in states]
    return VelocityTrajectory(times, fields, alpha, breakdown, {"dt": h})


def conserved_C(u: PeriodicField, alpha: float) -> float:
    r""":math:`C = -\tfrac{1+\alpha}{2}\int u_x^2\,dx`."""
    alpha = check_alpha(alpha)
    return -(1.0 + alpha) / 2.0 * integrate(derivative(u) ** 2)


def pj_residual(u_of_t, t: float, alpha: float, dt: float = 1e-4) -> PeriodicField:
    r"""Spectral residual of :math:`u_{txx} + (2-\alpha)u_xu_{xx} + uu_{xxx}`.

    ``u_of_t`` is a callable ``t -> PeriodicField``; the time derivative is
    a central difference with step ``dt``.
    """
    u = u_of_t(t)
    ut = (u_of_t(t + dt) - u_of_t(t - dt)) / (2 * dt)
    ux, uxx, uxxx = (derivative(u, k) for k in (1, 2, 3))
    return derivative(ut, 2) + (2.0 - alpha) * ux * uxx + u * uxxx


# -- alpha = 1 ------------------------------------------------------------

def affine_chart_phi(eta: CircleDiffeo) -> PeriodicField:
    """The affine chart of the (1)-connection: ``log eta_x`` minus its mean."""
    L = np.log(jacobian(eta).values)
    return PeriodicField(eta.grid, L - np.mean(L))


def _check_mean_zero(f: PeriodicField, name: str):
    m = integrate(f)
    if abs(m) > 1e-10 * max(1.0, f.max_abs()):
        raise DomainError(f"{name} must have zero mean, got {m:.3e}")


def inverse_phi(f: PeriodicField) -> CircleDiffeo:
    r"""The diffeomorphism :math:`\eta(x) = \int_0^x e^f / \int_0^1 e^f`."""
    _check_mean_zero(f, "chart value")
    E = f.apply(np.exp)
    return CircleDiffeo(f.grid, antiderivative(E) / integrate(E))


def alpha1_solution(a: PeriodicField, b: PeriodicField, t: float):
    """Closed-form (1)-geodesic through the chart line ``a t + b``.

    Returns ``(eta(t), u(t))`` with ``u = (d eta/dt) o eta^{-1}``.
    """
    _check_mean_zero(a, "a")
    _check_mean_zero(b, "b")
    E = (a * t + b).apply(np.exp)
    aE = a * E
    m0, m1 = integrate(E), integrate(aE)
    eta = CircleDiffeo(a.grid, antiderivative(E) / m0)
    eta_t = (antiderivative(aE) * m0 - antiderivative(E) * m1) / m0 ** 2
    u = compose_field(eta_t, invert(eta))
    return eta, PeriodicField(a.grid, u.values - u.values[0])


# -- alpha = -1 -----------------------------------------------------------

def _oversampled_min(f: PeriodicField, factor: int = 16) -> float:
    n = f.grid.n
    fh = np.fft.rfft(f.values)
    fh[-1] *= 0.5
    return float(np.min(np.fft.irfft(fh, n=factor * n) * factor))


def burgers_breakdown_time(u0: PeriodicField) -> float:
    """``-1/min(u0')`` if the slope is somewhere negative, else ``inf``."""
    m = _oversampled_min(derivative(u0))
    return -1.0 / m if m < 0 else np.inf


def alpham1_solution(u0: PeriodicField, t: float):
    """Straight-line (-1)-geodesic ``eta = id + t u0`` and its Eulerian velocity.

    Raises :class:`BreakdownError` for ``t`` at or past ``-1/min(u0')``.
    """
    if abs(u0.values[0]) > 1e-12:
        raise InvalidInputError("initial velocity must vanish at x = 0")
    tstar = burgers_breakdown_time(u0)
    if t >= tstar:
        raise BreakdownError(f"Burgers breakdown at t* = {tstar:.6g}", tstar)
    try:
        eta = CircleDiffeo(u0.grid, t * u0)
    except DegenerateDiffeoError as exc:
        raise BreakdownError(f"Burgers breakdown at t* = {tstar:.6g}: {exc}", tstar) from exc
    return eta, compose_field(u0, invert(eta))


# -- alpha = 0 ------------------------------------------------------------

def _hs_parts(u0: PeriodicField):
    w = 0.5 * derivative(u0)
    theta = np.sqrt(integrate(w * w))
    return w, theta


def hunter_saxton_breakdown_time(u0: PeriodicField) -> float:
    """First time the great circle of ``sqrt(eta_x)`` leaves the positive cone."""
    w, theta = _hs_parts(u0)
    if theta == 0:
        return np.inf
    return float(np.arctan2(theta, -_oversampled_min(w)) / theta)


def alpha0_solution(u0: PeriodicField, t: float):
    r"""Closed-form Hunter-Saxton geodesic from the identity with velocity ``u0``.

    :math:`\sqrt{\eta_x}` moves on the great circle
    :math:`\cos(\theta t) + \sin(\theta t)\,u_{0,x}/(2\theta)` with
    :math:`\theta = \|u_{0,x}/2\|_{L^2}`.
    """
    if abs(u0.values[0]) > 1e-12:
        raise InvalidInputError("initial velocity must vanish at x = 0")
    tstar = hunter_saxton_breakdown_time(u0)
    if t >= tstar:
        raise BreakdownError(f"Hunter-Saxton breakdown at t* = {tstar:.6g}", tstar)
    w, theta = _hs_parts(u0)
    if theta == 0:
        return CircleDiffeo.identity(u0.grid), u0.grid.zeros()
    r = np.cos(theta * t) + np.sin(theta * t) * w / theta
    r_t = -theta * np.sin(theta * t) + np.cos(theta * t) * w
    rho, rho_t = r * r, 2 * r * r_t
    try:
        eta = CircleDiffeo(u0.grid, antiderivative(rho))
    except DegenerateDiffeoError as exc:
        raise BreakdownError(f"Hunter-Saxton breakdown at t* = {tstar:.6g}: {exc}", tstar) from exc
    u = compose_field(antiderivative(rho_t), invert(eta))
    return eta, PeriodicField(u0.grid, u.values - u.values[0])


def alpha0_density_geodesic(rho0, rho1, t: float) -> Density:
    r"""Great-circle interpolation of :math:`\sqrt\rho` on the unit :math:`L^2` sphere."""
    theta = hellinger_distance(rho0, rho1)
    c = np.cos(theta)
    if c <= 1e-9:
        raise DomainError("densities are (nearly) antipodal; geodesic is not unique")
    s0, s1 = np.sqrt(rho0.values), np.sqrt(rho1.values)
    if theta == 0:
        return Density.normalized(rho0.grid, rho0.values)
    r = (np.sin((1 - t) * theta) * s0 + np.sin(t * theta) * s1) / np.sin(theta)
    return Density.normalized(rho0.grid, r * r)
