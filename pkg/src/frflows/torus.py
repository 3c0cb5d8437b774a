r"""Alpha-connections and their geodesics on the flat torus :math:`T^n = \mathbb{R}^n/\mathbb{Z}^n`.

Scalar fields are numpy arrays of shape ``(m,) * dim``; vector fields are
:class:`TorusVectorField` with components stacked on the first axis.  The
metric is flat, so the musical isomorphisms are trivial and the
Laplace-de Rham operator on functions is :math:`\Delta = -\sum_i\partial_i^2`,
diagonal in Fourier space with symbol :math:`|2\pi k|^2`.

At the identity coset the connection reads

.. math::

    \nabla^{(\alpha)}_v w = -\nabla\Delta^{-1}\Big(\nabla(\mathrm{div}\,w)\cdot v
        + \tfrac{1-\alpha}{2}\,\mathrm{div}\,w\,\mathrm{div}\,v\Big),

and the Eulerian geodesic equation is
:math:`u_t = \nabla\Delta^{-1}\big(\nabla\varphi\cdot u + \tfrac{1-\alpha}{2}\varphi^2\big)`
with :math:`\varphi = \mathrm{div}\,u`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson

from . import _rk4
from .calculus import shift
from .divergences import check_alpha
from .errors import InvalidInputError

__all__ = [
    "TorusGrid",
    "TorusVectorField",
    "TorusDensity",
    "TorusTrajectory",
    "LagrangianTrajectoryND",
    "div",
    "grad",
    "curl",
    "laplace_dR",
    "inv_laplace_mean_zero",
    "potential_velocity",
    "divergence_free_part",
    "h1_inner_nd",
    "nabla_alpha_identity",
    "geodesic_rhs_nd",
    "integrate_nd",
    "track_particles",
    "lagrangian_phi",
    "pjn_residual",
    "alpha1_solution_nd",
    "alpha1_trajectory_nd",
    "affine_chart_nd",
    "galilean_frame_1d",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid with ``m`` points per axis on ``[0, 1)^dim``."""

    dim: int = 2
    m: int = 64

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise InvalidInputError(f"dimension must be 1, 2 or 3, got {self.dim}")
        if int(self.m) != self.m or self.m < 16 or self.m % 2:
            raise InvalidInputError(f"samples per axis must be an even integer >= 16, got {self.m}")

    @classmethod
    def from_shape(cls, shape) -> "TorusGrid":
        if len(set(shape)) != 1:
            raise InvalidInputError(f"scalar fields must be cubic arrays, got shape {shape}")
        return cls(len(shape), shape[0])

    @property
    def shape(self):
        return (self.m,) * self.dim

    @cached_property
    def points(self) -> np.ndarray:
        """Coordinates, shape ``(dim, m, ..., m)``."""
        x = np.arange(self.m) / self.m
        return np.array(np.meshgrid(*([x] * self.dim), indexing="ij"))

    @cached_property
    def _k(self):
        ks = [np.fft.fftfreq(self.m, 1.0 / self.m)] * (self.dim - 1)
        ks.append(np.fft.rfftfreq(self.m, 1.0 / self.m))
        return np.meshgrid(*ks, indexing="ij", sparse=True)

    @cached_property
    def _ik(self):
        out = []
        for k in self._k:
            ik = 2j * np.pi * k
            out.append(np.where(np.abs(k) == self.m // 2, 0.0, ik))
        return out

    @cached_property
    def _k2(self):
        return sum((2 * np.pi * k) ** 2 for k in self._k)

    @cached_property
    def _keep(self):
        keep = True
        for k in self._k:
            keep = keep & (3 * np.abs(k) < self.m)
        return keep

    def fft(self, f):
        return np.fft.rfftn(f, axes=tuple(range(-self.dim, 0)))

    def ifft(self, fh):
        return np.fft.irfftn(fh, s=self.shape, axes=tuple(range(-self.dim, 0)))

    def sample(self, func) -> np.ndarray:
        """Evaluate ``func(*coords)`` on the grid."""
        return np.asarray(func(*self.points), dtype=float) * np.ones(self.shape)

    def mean(self, f) -> float:
        return float(np.mean(f))


@dataclass(frozen=True, eq=False)
class TorusVectorField:
    """Contravariant components ``u_i`` stacked as ``(dim, m, ..., m)``."""

    grid: TorusGrid
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.components, dtype=float)
        if c.shape != (self.grid.dim,) + self.grid.shape:
            raise InvalidInputError(f"expected components of shape {(self.grid.dim,) + self.grid.shape}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InvalidInputError("vector field contains non-finite values")
        c.flags.writeable = False
        object.__setattr__(self, "components", c)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "TorusVectorField":
        return cls(grid, np.zeros((grid.dim,) + grid.shape))

    def __add__(self, other):
        return TorusVectorField(self.grid, self.components + other.components)

    def __sub__(self, other):
        return TorusVectorField(self.grid, self.components - other.components)

    def __mul__(self, c):
        return TorusVectorField(self.grid, self.components * c)

    __rmul__ = __mul__

    def __neg__(self):
        return TorusVectorField(self.grid, -self.components)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))


@dataclass(frozen=True, eq=False)
class TorusDensity:
    """Positive scalar field of unit mass on the torus."""

    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise InvalidInputError("density has the wrong shape")
        if np.min(v) <= 0:
            raise InvalidInputError("density must be strictly positive")
        if abs(np.mean(v) - 1.0) > 1e-10:
            raise InvalidInputError(f"density must have unit mass, got {np.mean(v)!r}")
        object.__setattr__(self, "values", v)


# -- spectral calculus ----------------------------------------------------

def _grid_of(f) -> TorusGrid:
    if isinstance(f, (TorusVectorField, TorusDensity)):
        return f.grid
    return TorusGrid.from_shape(np.shape(f))


def grad(f) -> TorusVectorField:
    g = _grid_of(f)
    fh = g.fft(f)
    return TorusVectorField(g, np.array([g.ifft(ik * fh) for ik in g._ik]))


def _partial(g, f, i):
    return g.ifft(g._ik[i] * g.fft(f))


def div(u: TorusVectorField) -> np.ndarray:
    """Spectral divergence ``sum_i d_i u_i``; its mean is zero."""
    g = u.grid
    return g.ifft(sum(ik * g.fft(ui) for ik, ui in zip(g._ik, u.components)))


def curl(u: TorusVectorField) -> np.ndarray:
    """Antisymmetrised derivatives ``d_i u_j - d_j u_i`` for ``i < j``."""
    g = u.grid
    out = [_partial(g, u.components[j], i) - _partial(g, u.components[i], j)
           for i in range(g.dim) for j in range(i + 1, g.dim)]
    return np.array(out) if out else np.zeros((0,) + g.shape)


def laplace_dR(f) -> np.ndarray:
    """Laplace-de Rham operator on functions, ``-sum_i d_i^2 f``."""
    g = _grid_of(f)
    return g.ifft(g._k2 * g.fft(f))


def inv_laplace_mean_zero(f) -> np.ndarray:
    """Inverse Laplace-de Rham operator on ``f - mean(f)``; output has zero mean."""
    g = _grid_of(f)
    k2 = g._k2.copy()
    k2.flat[0] = 1.0
    gh = g.fft(f) / k2
    gh.flat[0] = 0.0
    return g.ifft(gh)


def potential_velocity(phi) -> TorusVectorField:
    """The gradient field ``-grad(Delta^{-1} phi)`` whose divergence is ``phi - mean(phi)``."""
    return -grad(inv_laplace_mean_zero(phi))


def divergence_free_part(u: TorusVectorField) -> TorusVectorField:
    """Helmholtz projection onto divergence-free fields (mean flow included)."""
    return u - potential_velocity(div(u))


def _dealias(g, f):
    return g.ifft(g.fft(f) * g._keep)


def _product(g, a, b):
    return _dealias(g, _dealias(g, a) * _dealias(g, b))


def h1_inner_nd(v: TorusVectorField, w: TorusVectorField) -> float:
    """``(1/4) int div v div w``."""
    return 0.25 * float(np.mean(div(v) * div(w)))


def _connection_source(g, v, w, alpha, dealiased=False):
    dv, dw = div(v), div(w)
    gw = grad(dw).components
    if dealiased:
        f = sum(_product(g, gw[i], v.components[i]) for i in range(g.dim))
        return f + (1 - alpha) / 2 * _product(g, dw, dv)
    return np.einsum("i...,i...->...", gw, v.components) + (1 - alpha) / 2 * dw * dv


def nabla_alpha_identity(v: TorusVectorField, w: TorusVectorField, alpha: float) -> TorusVectorField:
    r"""``nabla^(alpha)_v w`` at the identity coset for the right-invariant field ``w``."""
    alpha = check_alpha(alpha)
    f = _connection_source(v.grid, v, w, alpha)
    return -grad(inv_laplace_mean_zero(f))


def geodesic_rhs_nd(u: TorusVectorField, alpha: float) -> TorusVectorField:
    r"""Eulerian geodesic velocity tendency :math:`u_t = \nabla\Delta^{-1}(f - \bar f)`.

    ``f = grad(div u) . u + (1 - alpha)/2 (div u)^2`` with 2/3-rule
    dealiased products.  For ``dim = 1`` this differs from the
    Proudman-Johnson right side only by a Galilean frame change (see
    :func:`galilean_frame_1d`).
    """
    alpha = check_alpha(alpha)
    f = _connection_source(u.grid, u, u, alpha, dealiased=True)
    return grad(inv_laplace_mean_zero(f))


# -- integration ----------------------------------------------------------

@dataclass(frozen=True)
class TorusTrajectory:
    """Eulerian record of an n-dimensional geodesic: velocities and ``phi = div u``."""

    times: np.ndarray
    velocities: list
    phi: list
    alpha: float
    breakdown: float | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def grid(self) -> TorusGrid:
        return self.velocities[0].grid


@dataclass(frozen=True)
class LagrangianTrajectoryND:
    """Label-space record: Jacobians and ``phi o eta`` at the grid labels."""

    times: np.ndarray
    jacobians: list
    phi: list
    alpha: float

    def __len__(self):
        return len(self.times)


def integrate_nd(u0: TorusVectorField, alpha: float, T: float, dt: float,
                 save_every: int = 1) -> TorusTrajectory:
    """RK4 integration of the n-dimensional geodesic equation.

    Breakdown detection matches the 1-D integrator (magnitude caps and the
    Lagrangian Jacobian monitor).
    """
    alpha = check_alpha(alpha)
    if not T > 0 or not 0 < dt <= 0.05:
        raise InvalidInputError("need T > 0 and dt in (0, 0.05]")
    g = u0.grid

    def rhs(c):
        return geodesic_rhs_nd(TorusVectorField(g, c), alpha).components

    def phi_of(c):
        return g.ifft(sum(ik * g.fft(ci) for ik, ci in zip(g._ik, c)))

    def grad_sup(c):
        return max(float(np.max(np.abs(_partial(g, ci, i)))) for ci in c for i in range(g.dim))

    times, states, breakdown, h = _rk4.integrate_rk4(
        u0.components, rhs, phi_of, grad_sup, alpha, T, dt, save_every)
    vel = [TorusVectorField(g, s) for s in states]
    return TorusTrajectory(times, vel, [div(v) for v in vel], alpha, breakdown, {"dt": h})


def _coefficients(g: TorusGrid, f) -> np.ndarray:
    return np.fft.fftn(f) / f.size


def _phases(g: TorusGrid, pts) -> list:
    k = np.fft.fftfreq(g.m, 1.0 / g.m)
    return [np.exp(2j * np.pi * np.outer(p, k)) for p in pts]


def _eval_at(g: TorusGrid, coeffs, E) -> np.ndarray:
    # trigonometric interpolant at the points encoded by the phase matrices E
    if g.dim == 1:
        res = E[0] @ coeffs
    elif g.dim == 2:
        res = np.sum((E[0] @ coeffs) * E[1], axis=1)
    else:
        tmp = (E[0] @ coeffs.reshape(g.m, -1)).reshape(-1, g.m, g.m)
        res = np.einsum("pab,pa,pb->p", tmp, E[1], E[2])
    return res.real


def track_particles(traj: TorusTrajectory, labels=None) -> tuple:
    r"""Forward particle paths :math:`\dot X = u(t, X)` from the recorded velocities.

    RK4 with step twice the recording interval, so every stage uses a
    recorded field.  Returns ``(times, positions)`` with positions of shape
    ``(len(times), dim, P)``.
    """
    steps = np.diff(traj.times)
    if len(traj.times) < 3:
        raise InvalidInputError("particle tracking needs at least 3 recorded times")
    if np.ptp(steps) > 1e-9 * steps.mean():
        raise InvalidInputError("particle tracking needs uniformly spaced records")
    g = traj.grid
    X = np.array(labels if labels is not None else g.points.reshape(g.dim, -1), dtype=float)
    coeffs = [[_coefficients(g, c) for c in v.components] for v in traj.velocities]

    def vel(k, X):
        E = _phases(g, X)
        return np.array([_eval_at(g, c, E) for c in coeffs[k]])

    times = [traj.times[0]]
    out = [X.copy()]
    for k in range(0, len(traj.times) - 2, 2):
        h = traj.times[k + 2] - traj.times[k]
        k1 = vel(k, X)
        k2 = vel(k + 1, X + h / 2 * k1)
        k3 = vel(k + 1, X + h / 2 * k2)
        k4 = vel(k + 2, X + h * k3)
        X = X + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        times.append(traj.times[k + 2])
        out.append(X.copy())
    return np.array(times), np.array(out)


def lagrangian_phi(traj: TorusTrajectory, times, positions) -> np.ndarray:
    """Evaluate the Eulerian ``phi(t)`` along particle positions, ``phi(t, X(t))``."""
    g = traj.grid
    idx = [int(np.argmin(np.abs(traj.times - t))) for t in times]
    return np.array([_eval_at(g, _coefficients(g, traj.phi[k]), _phases(g, X))
                     for k, X in zip(idx, positions)])


def _time_derivative(values, times):
    """Fourth-order centred differences on uniform samples (one-sided near the ends)."""
    n = len(times)
    steps = np.diff(times)
    if n < 5 or np.ptp(steps) > 1e-9 * steps.mean():
        return np.gradient(values, times, axis=0, edge_order=2)
    h = steps.mean()
    v = values
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    first = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * h)
    second = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12 * h)
    out[0] = np.tensordot(first, v[:5], axes=1)
    out[1] = np.tensordot(second, v[:5], axes=1)
    out[-1] = -np.tensordot(first, v[::-1][:5], axes=1)
    out[-2] = -np.tensordot(second, v[::-1][:5], axes=1)
    return out


def pjn_residual(traj, alpha: float) -> np.ndarray:
    r"""L-infinity norm, per recorded time, of the residual 1-form of

    .. math:: d\varphi_t + d\,\iota_u d\varphi + (1-\alpha)\varphi\,d\varphi = 0 .

    Eulerian trajectories (:class:`TorusTrajectory`) are checked directly,
    with fourth-order centred differences in time (second order when the
    samples are fewer than 5 or non-uniform) and dealiased products.
    Label-space trajectories (:class:`LagrangianTrajectoryND`) are checked
    through the equivalent statement that
    :math:`\partial_t(\varphi\circ\eta) + \tfrac{1-\alpha}{2}(\varphi\circ\eta)^2`
    does not depend on the label.
    """
    alpha = check_alpha(alpha)
    times = np.asarray(traj.times, dtype=float)
    if len(times) < 3:
        raise InvalidInputError("need at least 3 time samples")
    phi = np.array(traj.phi)
    phi_t = _time_derivative(phi, times)
    g = TorusGrid.from_shape(phi.shape[1:])
    out = []
    if isinstance(traj, LagrangianTrajectoryND):
        for k in range(len(times)):
            q = phi_t[k] + (1 - alpha) / 2 * phi[k] ** 2
            out.append(grad(q).max_abs())
        return np.array(out)
    for k, u in enumerate(traj.velocities):
        gphi = grad(phi[k]).components
        adv = sum(_product(g, u.components[i], gphi[i]) for i in range(g.dim))
        scalar = phi_t[k] + adv + (1 - alpha) / 2 * _product(g, phi[k], phi[k])
        out.append(grad(scalar).max_abs())
    return np.array(out)


# -- alpha = 1 closed form ------------------------------------------------

def _check_mean_zero(f, name):
    m = float(np.mean(f))
    if abs(m) > 1e-10 * max(1.0, float(np.max(np.abs(f)))):
        raise InvalidInputError(f"{name} must have zero mean, got {m:.3e}")


def alpha1_solution_nd(a, b, t: float):
    r"""Closed-form :math:`\alpha = 1` geodesic in label space.

    Returns ``(Jac, phi_o_eta)``: :math:`\mathrm{Jac}\,\eta = e^{at+b}/\int e^{at+b}`
    and :math:`\varphi\circ\eta = a - \int a e^{at+b}/\int e^{at+b}`.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _check_mean_zero(a, "a")
    _check_mean_zero(b, "b")
    g = TorusGrid.from_shape(a.shape)
    E = np.exp(a * t + b)
    m0 = np.mean(E)
    return TorusDensity(g, E / m0), a - np.mean(a * E) / m0


def alpha1_trajectory_nd(a, b, times) -> LagrangianTrajectoryND:
    times = np.asarray(times, dtype=float)
    sols = [alpha1_solution_nd(a, b, t) for t in times]
    return LagrangianTrajectoryND(times, [s[0] for s in sols], [s[1] for s in sols], 1.0)


def affine_chart_nd(jac: TorusDensity) -> np.ndarray:
    """``log Jac - mean(log Jac)``, the affine chart of the (1)-connection."""
    L = np.log(jac.values)
    return L - np.mean(L)


# -- one-dimensional reduction --------------------------------------------

def galilean_frame_1d(traj) -> list:
    r"""Re-express a 1-D Proudman-Johnson trajectory in the torus normalisation.

    The 1-D integrator fixes the rotation gauge by ``u(t, 0) = 0``; the
    torus equation instead keeps ``u_t`` mean-free.  The two are related by
    :math:`\tilde u(t,x) = u(t, x - s(t)) + s'(t)` with
    :math:`s' = \bar u(0) - \bar u(t)`.  Returns the list of
    :math:`\tilde u(t_k)`.
    """
    times = np.asarray(traj.times, dtype=float)
    means = np.array([f.mean() for f in traj.fields])
    sdot = means[0] - means
    s = cumulative_simpson(sdot, x=times, initial=0.0)
    return [shift(f, sk) + sd for f, sk, sd in zip(traj.fields, s, sdot)]
