r"""Alpha-divergences between densities and the geometry they induce.

For :math:`-1 < \alpha < 1`

.. math::

    D^{(\alpha)}(\rho_1\|\rho_2) = \frac{1}{1-\alpha^2}
        \Big(1 - \int \rho_1^{(1-\alpha)/2}\rho_2^{(1+\alpha)/2}\,dx\Big),

and at the endpoints the logarithmic forms
:math:`D^{(-1)}(\rho_1\|\rho_2) = D^{(1)}(\rho_2\|\rho_1)
= \tfrac14\int(\log\rho_1 - \log\rho_2)\rho_1\,dx`.

The metric and Christoffel symbols of a divergence are its second and third
mixed derivatives on the diagonal.  Here they are estimated with central
differences along straight lines in the displacement chart of
:class:`~frflows.diffeo.CircleDiffeo`, with one Richardson step.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from .calculus import PeriodicField, derivative
from .diffeo import CircleDiffeo, Density, jacobian
from .errors import DegenerateDiffeoError, InvalidInputError

__all__ = [
    "ENDPOINT_SWITCH",
    "check_alpha",
    "alpha_divergence",
    "alpha_divergence_diffeo",
    "divergence_evaluator",
    "hellinger_distance",
    "metric_from_divergence",
    "christoffel_from_divergence",
    "ParametricFamily",
    "fisher_rao_matrix",
]

ENDPOINT_SWITCH = 1e-9


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not -1.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [-1, 1], got {alpha}")
    return alpha


def _as_density(rho) -> Density:
    if isinstance(rho, Density):
        return rho
    if isinstance(rho, PeriodicField):
        return Density(rho.grid, rho.values)
    raise InvalidInputError(f"expected a Density, got {type(rho).__name__}")


def _kl_quarter(r1: np.ndarray, r2: np.ndarray) -> float:
    return 0.25 * float(np.mean((np.log(r1) - np.log(r2)) * r1))


def alpha_divergence(rho1, rho2, alpha: float) -> float:
    """The alpha-divergence ``D^(alpha)(rho1 || rho2)``."""
    alpha = check_alpha(alpha)
    rho1, rho2 = _as_density(rho1), _as_density(rho2)
    if rho1.grid != rho2.grid:
        raise InvalidInputError("densities live on different grids")
    r1, r2 = rho1.values, rho2.values
    if alpha <= -1.0 + ENDPOINT_SWITCH:
        return _kl_quarter(r1, r2)
    if alpha >= 1.0 - ENDPOINT_SWITCH:
        return _kl_quarter(r2, r1)
    p, q = (1.0 - alpha) / 2, (1.0 + alpha) / 2
    return float((1.0 - np.mean(r1 ** p * r2 ** q)) / (1.0 - alpha * alpha))


def alpha_divergence_diffeo(xi: CircleDiffeo, eta: CircleDiffeo, alpha: float) -> float:
    """``D^(alpha)`` evaluated on the Jacobian densities of two diffeomorphisms."""
    return alpha_divergence(jacobian(xi), jacobian(eta), alpha)


def divergence_evaluator(alpha: float) -> Callable[[CircleDiffeo, CircleDiffeo], float]:
    """``D^(alpha)`` as a two-argument callable on diffeomorphisms."""
    return partial(alpha_divergence_diffeo, alpha=check_alpha(alpha))


def hellinger_distance(rho1, rho2) -> float:
    """Spherical Hellinger distance ``arccos int sqrt(rho1 rho2)``, in [0, pi]."""
    rho1, rho2 = _as_density(rho1), _as_density(rho2)
    if rho1.grid != rho2.grid:
        raise InvalidInputError("densities live on different grids")
    c = float(np.mean(np.sqrt(rho1.values * rho2.values)))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def _evaluator(D):
    if callable(D):
        return D
    return divergence_evaluator(D)


def _check_tangent(*fields):
    for f in fields:
        if abs(f.values[0]) > 1e-12:
            raise InvalidInputError("tangent vectors must vanish at x = 0")


def _normalise(*fields):
    """Rescale tangent fields to unit ``max |f_x|``; returns the fields and the product of scales.

    The difference quotients are multilinear in the fields, so working with
    unit fields keeps the step (and the roundoff it amplifies) matched to
    the size of the perturbation whatever the input amplitude.
    """
    scales = [derivative(f).max_abs() for f in fields]
    if min(scales) == 0.0:
        return None, 0.0
    return [f * (1.0 / c) for f, c in zip(fields, scales)], float(np.prod(scales))


def _richardson(estimate, h):
    return (4.0 * estimate(h / 2) - estimate(h)) / 3.0


def _with_retry(estimate, h):
    try:
        return _richardson(estimate, h)
    except DegenerateDiffeoError:
        return _richardson(estimate, h / 4)


def metric_from_divergence(D, eta: CircleDiffeo, V: PeriodicField, W: PeriodicField,
                           h: float = 1e-3) -> float:
    r"""Estimate :math:`-\partial_s\partial_t D(\eta + sV \,\|\, \eta + tW)|_0`.

    ``D`` is a callable ``(xi, eta) -> float`` or an ``alpha`` value.  For
    every alpha-divergence the result approximates the :math:`\dot H^1`
    inner product of ``V`` and ``W`` at ``eta``.
    """
    if not 0 < h <= 0.1:
        raise InvalidInputError("step h must lie in (0, 0.1]")
    _check_tangent(V, W)
    D = _evaluator(D)
    fields, scale = _normalise(V, W)
    if scale == 0.0:
        return 0.0
    V, W = fields

    def estimate(step):
        total = 0.0
        for s, t in itertools.product((1, -1), repeat=2):
            total += s * t * D(eta.perturb(V, s * step), eta.perturb(W, t * step))
        return -total / (4 * step * step)

    return scale * _with_retry(estimate, h)


def christoffel_from_divergence(D, eta: CircleDiffeo, V: PeriodicField, W: PeriodicField,
                                Z: PeriodicField, h: float = 1e-2) -> float:
    r"""Estimate :math:`\langle \Gamma_\eta(W, V), Z\rangle_{\dot H^1}` from a divergence.

    The third mixed difference :math:`-\partial_s\partial_t\partial_r
    D(\eta + sV + tW \,\|\, \eta + rZ)|_0` equals
    :math:`\langle\nabla_V W, Z\rangle` for the constant fields ``V``, ``W``
    of the displacement chart, i.e. :math:`-\langle\Gamma_\eta(W,V), Z\rangle`
    since :math:`\nabla_V W = DW\cdot V - \Gamma(W, V)`.  The returned
    value is its negative, directly comparable with
    ``h1_inner(christoffel(alpha, eta, W, V), Z, eta)``.

    A third difference loses about :math:`\epsilon/h^3` to roundoff, hence
    the larger default step; Richardson extrapolation removes the
    :math:`O(h^2)` truncation term.
    """
    if not 0 < h <= 0.1:
        raise InvalidInputError("step h must lie in (0, 0.1]")
    _check_tangent(V, W, Z)
    D = _evaluator(D)
    fields, scale = _normalise(V, W, Z)
    if scale == 0.0:
        return 0.0
    V, W, Z = fields

    def estimate(step):
        total = 0.0
        for s, t, r in itertools.product((1, -1), repeat=3):
            p = CircleDiffeo(eta.grid, eta.displacement + (s * step) * V + (t * step) * W)
            total += s * t * r * D(p, eta.perturb(Z, r * step))
        return total / (8 * step ** 3)

    return scale * _with_retry(estimate, h)


@dataclass(frozen=True)
class ParametricFamily:
    """A smooth finite-dimensional family ``theta -> Density``."""

    dim: int
    evaluator: Callable[[np.ndarray], Density]
    step: float = 1e-4

    def __call__(self, theta) -> Density:
        return _as_density(self.evaluator(np.asarray(theta, dtype=float)))


def fisher_rao_matrix(family: ParametricFamily, theta) -> np.ndarray:
    r"""Fisher-Rao matrix :math:`g_{ij} = \int \partial_i\log\rho\,\partial_j\log\rho\,\rho`.

    Score functions are central differences of ``log rho`` with the
    family's step; the result is symmetrised.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape != (family.dim,):
        raise InvalidInputError(f"expected a parameter vector of length {family.dim}")
    rho = family(theta).values
    h = family.step
    scores = []
    for i in range(family.dim):
        e = np.zeros(family.dim)
        e[i] = h
        lp = np.log(family(theta + e).values)
        lm = np.log(family(theta - e).values)
        scores.append((lp - lm) / (2 * h))
    S = np.array(scores)
    g = (S * rho) @ S.T / rho.size
    return 0.5 * (g + g.T)
