r"""The :math:`\dot H^1` metric and the alpha-connections on :math:`\mathcal{D}(S^1)/\mathrm{Rot}(S^1)`.

Tangent vectors at :math:`\eta` are periodic fields :math:`V` with
:math:`V(0) = 0`; their right translates :math:`v = V\circ\eta^{-1}` live at
the identity.  The covariant derivative is
:math:`\nabla_V W = DW\cdot V - \Gamma^{(\alpha)}_\eta(W, V)` with

.. math::

    \Gamma^{(\alpha)}_\eta(W, V) = -\frac{1+\alpha}{2}
        \big\{A^{-1}\partial_x\big[(V\circ\eta^{-1})_x (W\circ\eta^{-1})_x\big]\big\}\circ\eta ,

so that geodesics satisfy :math:`\ddot\gamma = \Gamma_\gamma(\dot\gamma, \dot\gamma)`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calculus import PeriodicField, derivative, inverse_A_dx, trig_eval
from .diffeo import CircleDiffeo, DiffeoTrajectory, compose_field, invert
from .divergences import check_alpha
from .errors import InvalidInputError

__all__ = [
    "h1_inner",
    "christoffel",
    "nabla_right_invariant",
    "covariant_derivative",
    "duality_residual",
    "CurvatureReport",
    "curvature_eval",
    "chart_christoffel",
]

TANGENT_TOL = 1e-12


def _check_tangent(*fields):
    for f in fields:
        if abs(f.values[0]) > TANGENT_TOL:
            raise InvalidInputError(
                f"tangent vectors must vanish at x = 0 (got {f.values[0]:.3e})")


def h1_inner(V: PeriodicField, W: PeriodicField, eta: CircleDiffeo) -> float:
    r""":math:`\tfrac14\int V_x W_x/\eta_x\,dx`."""
    if V.grid != eta.grid or W.grid != eta.grid:
        raise InvalidInputError("arguments live on different grids")
    Vx = derivative(V).values
    Wx = derivative(W).values
    return 0.25 * float(np.mean(Vx * Wx / eta.jacobian_values))


def christoffel(alpha: float, eta: CircleDiffeo, W: PeriodicField, V: PeriodicField,
                eta_inv: CircleDiffeo | None = None) -> PeriodicField:
    """The Christoffel map ``Gamma^(alpha)_eta(W, V)``; symmetric and bilinear.

    The output is shifted by a constant to vanish at 0.
    """
    alpha = check_alpha(alpha)
    _check_tangent(V, W)
    c = (1.0 + alpha) / 2.0
    if c == 0.0:
        return eta.grid.zeros()
    if eta_inv is None:
        eta_inv = invert(eta)
    v = compose_field(V, eta_inv)
    w = compose_field(W, eta_inv)
    g = inverse_A_dx(derivative(v) * derivative(w))
    out = -c * trig_eval(g, eta.values)
    return PeriodicField(eta.grid, out - out[0])


def nabla_right_invariant(alpha: float, eta: CircleDiffeo, V: PeriodicField, W: PeriodicField,
                          eta_inv: CircleDiffeo | None = None) -> PeriodicField:
    r"""``nabla_V W^R`` at ``eta`` for the right-invariant extension of ``W``.

    With :math:`W^R_\xi = w\circ\xi`, :math:`w = W\circ\eta^{-1}`, one has
    :math:`DW^R\cdot V = (w_x\circ\eta)\,V`.
    """
    if eta_inv is None:
        eta_inv = invert(eta)
    w = compose_field(W, eta_inv)
    wx_eta = trig_eval(derivative(w), eta.values)
    return PeriodicField(eta.grid, wx_eta * V.values) - christoffel(alpha, eta, W, V, eta_inv)


def covariant_derivative(alpha: float, curve: DiffeoTrajectory, fields) -> list:
    r"""``nabla_{gamma'} W`` along a sampled curve.

    Returns :math:`\dot W(t) - \Gamma_{\gamma(t)}(W(t), \dot\gamma(t))` at
    every sample, using second-order central differences in time
    (one-sided at the ends).
    """
    times = np.asarray(curve.times, dtype=float)
    fields = list(fields)
    if len(times) < 3 or len(fields) != len(times):
        raise InvalidInputError("need at least 3 time samples of curve and field")
    D = curve.displacements()
    Wv = np.array([f.values for f in fields])
    gdot = np.gradient(D, times, axis=0, edge_order=2)
    Wdot = np.gradient(Wv, times, axis=0, edge_order=2)
    grid = curve.grid
    out = []
    for i, eta in enumerate(curve.diffeos):
        G = PeriodicField(grid, gdot[i] - gdot[i][0])
        Wi = fields[i]
        out.append(PeriodicField(grid, Wdot[i]) - christoffel(alpha, eta, Wi, G))
    return out


def duality_residual(alpha: float, eta: CircleDiffeo, V: PeriodicField, W: PeriodicField,
                     Z: PeriodicField, h: float = 1e-3) -> float:
    r"""Defect of :math:`X\langle Y,Z\rangle = \langle\nabla^{(\alpha)}_X Y,Z\rangle + \langle Y,\nabla^{(-\alpha)}_X Z\rangle`.

    ``X = V`` is a tangent vector at ``eta``; ``Y`` and ``Z`` are the
    right-invariant extensions of ``W`` and ``Z``.  The left side is a
    central difference along ``eta + s V``.
    """
    alpha = check_alpha(alpha)
    _check_tangent(V, W, Z)
    eta_inv = invert(eta)
    y = compose_field(W, eta_inv)
    z = compose_field(Z, eta_inv)

    def metric_at(s):
        xi = eta.perturb(V, s)
        return h1_inner(compose_field(y, xi) - y.values[0], compose_field(z, xi) - z.values[0], xi)

    lhs = (metric_at(h) - metric_at(-h)) / (2 * h)
    t1 = h1_inner(nabla_right_invariant(alpha, eta, V, W, eta_inv), Z, eta)
    t2 = h1_inner(W, nabla_right_invariant(-alpha, eta, V, Z, eta_inv), eta)
    return abs(lhs - t1 - t2)


@dataclass(frozen=True)
class CurvatureReport:
    """Commutator curvature field and the comparison scalar ``(1 - a^2)(X<Y,Z> + Y<X,Z>)``."""

    commutator: PeriodicField
    formula_value: float


def _metric_derivative(eta, X, Y, Z):
    # X<Y,Z> for constant fields of the displacement chart
    Xx, Yx, Zx = (derivative(f).values for f in (X, Y, Z))
    return -0.25 * float(np.mean(Xx * Yx * Zx / eta.jacobian_values ** 2))


def curvature_eval(alpha: float, eta: CircleDiffeo, X: PeriodicField, Y: PeriodicField,
                   Z: PeriodicField, h: float = 1e-3) -> CurvatureReport:
    r"""Curvature :math:`R(X,Y)Z = \nabla_X\nabla_Y Z - \nabla_Y\nabla_X Z` (experimental).

    ``X``, ``Y``, ``Z`` are extended as constant fields of the displacement
    chart, so :math:`[X, Y] = 0` and

    .. math::

        R(X,Y)Z = -(D\Gamma\cdot X)(Z,Y) + (D\Gamma\cdot Y)(Z,X)
                  + \Gamma(\Gamma(Z,Y),X) - \Gamma(\Gamma(Z,X),Y),

    with :math:`D\Gamma` by central differences at steps ``h`` and ``h/2``
    combined by one Richardson step.
    """
    alpha = check_alpha(alpha)
    _check_tangent(X, Y, Z)

    def central(direction, A, B, step):
        plus = christoffel(alpha, eta.perturb(direction, step), A, B)
        minus = christoffel(alpha, eta.perturb(direction, -step), A, B)
        return (plus - minus) / (2 * step)

    def dgamma(direction, A, B):
        return (4 * central(direction, A, B, h / 2) - central(direction, A, B, h)) / 3

    eta_inv = invert(eta)
    G_ZY = christoffel(alpha, eta, Z, Y, eta_inv)
    G_ZX = christoffel(alpha, eta, Z, X, eta_inv)
    R = (-dgamma(X, Z, Y) + dgamma(Y, Z, X)
         + christoffel(alpha, eta, G_ZY, X, eta_inv)
         - christoffel(alpha, eta, G_ZX, Y, eta_inv))
    formula = (1 - alpha ** 2) * (_metric_derivative(eta, X, Y, Z) + _metric_derivative(eta, Y, X, Z))
    return CurvatureReport(R, formula)


def chart_christoffel(eta: CircleDiffeo, W: PeriodicField, V: PeriodicField) -> PeriodicField:
    r"""Christoffel map of :math:`\nabla^{(1)}` in the chart :math:`\phi(\eta) = \log\eta_x - \int\log\eta_x`.

    Returns :math:`D^2\phi(W,V) + D\phi(\Gamma^{(1)}_\eta(W,V))`, which
    vanishes identically when the chart is affine.
    """
    J = eta.jacobian_values

    def dphi(F):
        q = derivative(F).values / J
        return q - np.mean(q)

    q2 = derivative(V).values * derivative(W).values / J ** 2
    d2 = -q2 + np.mean(q2)
    return PeriodicField(eta.grid, d2 + dphi(christoffel(1.0, eta, W, V)))
