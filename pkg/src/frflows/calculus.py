r"""Fourier calculus on the circle :math:`S^1 = \mathbb{R}/\mathbb{Z}`.

Fields are sampled on the uniform grid :math:`x_j = j/n`.  Differentiation,
antidifferentiation and the inverse of :math:`A = -\partial_x^2` act
diagonally on the discrete Fourier coefficients.  The Nyquist mode is
treated as :math:`\cos(\pi n x)`, so its derivative is zero and it
interpolates as a real cosine.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, InvalidInputError

__all__ = [
    "PeriodicGrid",
    "PeriodicField",
    "derivative",
    "integrate",
    "antiderivative",
    "integral_from_zero",
    "inverse_A",
    "inverse_A_dx",
    "dealias",
    "dealiased_product",
    "trig_eval",
    "trig_eval_multi",
    "shift",
    "MEAN_ZERO_TOL",
]

MEAN_ZERO_TOL = 1e-12
_CHUNK = 1024


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid of ``n`` points on [0, 1)."""

    n: int = 256

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16 or self.n % 2:
            raise InvalidInputError(f"grid size must be an even integer >= 16, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @cached_property
    def points(self) -> np.ndarray:
        x = np.arange(self.n) / self.n
        x.flags.writeable = False
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Non-negative integer wavenumbers of the real FFT, 0..n/2."""
        return np.arange(self.n // 2 + 1)

    @cached_property
    def _ik(self) -> np.ndarray:
        ik = 2j * np.pi * self.wavenumbers
        ik[-1] = 0.0
        return ik

    def field(self, values) -> "PeriodicField":
        return PeriodicField(self, values)

    def sample(self, func) -> "PeriodicField":
        """Sample a vectorised callable at the grid points."""
        return PeriodicField(self, func(self.points))

    def zeros(self) -> "PeriodicField":
        return PeriodicField(self, np.zeros(self.n))

    def constant(self, c: float) -> "PeriodicField":
        return PeriodicField(self, np.full(self.n, float(c)))


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """Real samples of a smooth 1-periodic function on a :class:`PeriodicGrid`.

    Supports pointwise arithmetic with scalars and fields on the same grid,
    and evaluation at arbitrary points by trigonometric interpolation
    (``f(x)``).
    """

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    # numpy scalars and arrays defer to the reflected operators below
    __array_ufunc__ = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise InvalidInputError(
                f"expected {self.grid.n} samples, got array of shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("field contains non-finite values")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other):
        if isinstance(other, PeriodicField):
            if other.grid != self.grid:
                raise InvalidInputError("fields live on different grids")
            return other.values
        return other

    def _new(self, values):
        return PeriodicField(self.grid, values)

    def __add__(self, other):
        return self._new(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.values - self._other(other))

    def __rsub__(self, other):
        return self._new(self._other(other) - self.values)

    def __mul__(self, other):
        return self._new(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._new(self.values / self._other(other))

    def __rtruediv__(self, other):
        return self._new(self._other(other) / self.values)

    def __neg__(self):
        return self._new(-self.values)

    def __pow__(self, p):
        return self._new(self.values ** p)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __len__(self):
        return self.grid.n

    def __call__(self, x, deriv: int = 0):
        return trig_eval(self, x, deriv=deriv)

    # -- conveniences -----------------------------------------------------
    def mean(self) -> float:
        return integrate(self)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def apply(self, func) -> "PeriodicField":
        """Apply a pointwise numpy function, e.g. ``f.apply(np.log)``."""
        return self._new(func(self.values))

    @cached_property
    def coefficients(self) -> np.ndarray:
        """Coefficients ``c_k`` with ``f(x) = Re sum_k c_k exp(2 pi i k x)``."""
        n = self.grid.n
        c = np.fft.rfft(self.values) / n
        c[1:n // 2] *= 2.0
        return c


def _check(f) -> PeriodicField:
    if not isinstance(f, PeriodicField):
        raise InvalidInputError(f"expected a PeriodicField, got {type(f).__name__}")
    return f


def derivative(f: PeriodicField, order: int = 1) -> PeriodicField:
    """Spectral derivative; exact for trigonometric polynomials of degree < n/2."""
    f = _check(f)
    fh = np.fft.rfft(f.values) * f.grid._ik ** order
    return PeriodicField(f.grid, np.fft.irfft(fh, n=f.grid.n))


def integrate(f: PeriodicField) -> float:
    """Uniform quadrature ``(1/n) sum f(x_j)``; exact for degree < n."""
    return float(np.mean(_check(f).values))


def antiderivative(f: PeriodicField) -> PeriodicField:
    """Periodic antiderivative of the mean-zero part of ``f``, vanishing at 0."""
    f = _check(f)
    fh = np.fft.rfft(f.values)
    ik = f.grid._ik.copy()
    ik[0] = ik[-1] = 1.0
    gh = fh / ik
    gh[0] = 0.0
    gh[-1] = 0.0
    g = np.fft.irfft(gh, n=f.grid.n)
    return PeriodicField(f.grid, g - g[0])


def integral_from_zero(f: PeriodicField) -> PeriodicField:
    r"""Samples of :math:`\int_0^x f(y)\,dy` (not periodic unless mean-zero)."""
    return antiderivative(f) + integrate(f) * f.grid.points


def inverse_A(u: PeriodicField, tol: float = MEAN_ZERO_TOL) -> PeriodicField:
    r"""Solve :math:`-h'' = u` with :math:`h` periodic and :math:`h(0) = 0`.

    ``u`` must have zero mean; the mean is projected out after checking that
    it is below ``tol``.  For such ``u`` the result coincides with the
    double-integral representation

    .. math:: h(x) = -\int_0^x\!\!\int_0^y u + x\int_0^1\!\!\int_0^y u .
    """
    u = _check(u)
    m = integrate(u)
    if abs(m) > tol:
        raise DomainError(f"inverse_A requires a mean-zero field, got mean {m:.3e}")
    n = u.grid.n
    uh = np.fft.rfft(u.values)
    k2 = (2 * np.pi * u.grid.wavenumbers) ** 2
    k2[0] = 1.0
    hh = uh / k2
    hh[0] = 0.0
    h = np.fft.irfft(hh, n=n)
    return PeriodicField(u.grid, h - h[0])


def inverse_A_dx(f: PeriodicField) -> PeriodicField:
    r"""The composite :math:`A^{-1}\partial_x f`; always well defined."""
    return inverse_A(derivative(f), tol=np.inf)


def dealias(f: PeriodicField) -> PeriodicField:
    """Keep only modes with ``|k| < n/3`` (2/3 rule)."""
    f = _check(f)
    fh = np.fft.rfft(f.values)
    fh[3 * f.grid.wavenumbers >= f.grid.n] = 0.0
    return PeriodicField(f.grid, np.fft.irfft(fh, n=f.grid.n))


def dealiased_product(f: PeriodicField, g: PeriodicField) -> PeriodicField:
    """Product of the 2/3-truncated factors, truncated again."""
    return dealias(dealias(f) * dealias(g))


def trig_eval(f: PeriodicField, x, deriv: int = 0) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``f`` (or its derivative) at ``x``."""
    return trig_eval_multi(f, x, (deriv,))[0]


def trig_eval_multi(f: PeriodicField, x, derivs=(0, 1)) -> list:
    """Evaluate several derivatives of the interpolant, sharing the exponentials."""
    f = _check(f)
    c = f.coefficients
    cs = np.stack([c * f.grid._ik ** d if d else c for d in derivs], axis=1)
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty((flat.size, len(derivs)))
    k = 2j * np.pi * f.grid.wavenumbers
    for start in range(0, flat.size, _CHUNK):
        xs = flat[start:start + _CHUNK]
        out[start:start + _CHUNK] = (np.exp(np.outer(xs, k)) @ cs).real
    return [out[:, i].reshape(x.shape) for i in range(len(derivs))]


def shift(f: PeriodicField, s: float) -> PeriodicField:
    """Translate: returns samples of ``f(x - s)``."""
    f = _check(f)
    fh = np.fft.rfft(f.values)
    nyq = fh[-1].real * np.cos(np.pi * f.grid.n * s)
    fh = fh * np.exp(-2j * np.pi * f.grid.wavenumbers * s)
    fh[-1] = nyq
    return PeriodicField(f.grid, np.fft.irfft(fh, n=f.grid.n))
