"""Named initial data and a small grammar for trigonometric polynomials.

A *trig spec* is a comma-separated list of terms ``c<k>=<coef>`` or
``s<k>=<coef>``, standing for ``coef * cos(2 pi k.x)`` or
``coef * sin(2 pi k.x)``.  On the torus the wavevector ``k`` is written with
colons, e.g. ``c1:0=0.3,s1:1=0.2``.  The empty string is the zero function.

Geodesic initial data are given by two mean-zero trig specs:

``a``
    the initial slope ``u0'`` (the divergence of ``u0`` on the torus);
``b``
    the initial chart position ``log Jac(eta0)`` (used by the alpha = 1
    closed form; ``b = 0`` means the geodesic starts at the identity).

In one dimension the initial velocity for every alpha is the velocity of the
chart line ``a t + b`` at ``t = 0``, which for ``b = 0`` is simply
``u0(x) = int_0^x a``.  On the torus ``u0 = -grad(Delta^{-1} a)`` plus the
optional divergence-free swirl ``(-d2 psi, d1 psi)`` (two dimensions only).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = ["TrigTerm", "parse_trig", "format_trig", "eval_trig", "GEODESIC_PRESETS",
           "DENSITY_PRESETS", "geodesic_preset", "density_preset"]

_TERM = re.compile(r"^([cs])(-?\d+(?::-?\d+)*)=([-+0-9.eE]+)$")


@dataclass(frozen=True)
class TrigTerm:
    kind: str
    k: tuple
    coef: float


def parse_trig(spec: str, dim: int = 1, field: str = "spec") -> list:
    """Parse a trig spec; errors name ``field``."""
    terms = []
    for raw in filter(None, (t.strip() for t in spec.split(","))):
        m = _TERM.match(raw)
        if not m:
            raise InvalidInputError(f"{field}: cannot parse term {raw!r} (expected e.g. 'c1=0.3' or 's1:2=0.1')")
        k = tuple(int(v) for v in m.group(2).split(":"))
        if len(k) != dim:
            raise InvalidInputError(f"{field}: term {raw!r} has a {len(k)}-component wavevector, expected {dim}")
        try:
            coef = float(m.group(3))
        except ValueError as exc:
            raise InvalidInputError(f"{field}: bad coefficient in {raw!r}") from exc
        if not np.isfinite(coef):
            raise InvalidInputError(f"{field}: coefficient must be finite in {raw!r}")
        terms.append(TrigTerm(m.group(1), k, coef))
    return terms


def format_trig(terms) -> str:
    return ",".join(f"{t.kind}{':'.join(map(str, t.k))}={t.coef!r}" for t in terms)


def eval_trig(terms, coords) -> np.ndarray:
    """Evaluate on coordinate arrays ``coords`` (a sequence of length dim)."""
    coords = [np.asarray(c, dtype=float) for c in coords]
    out = np.zeros(np.broadcast(*coords).shape) if coords else 0.0
    for t in terms:
        phase = 2 * np.pi * sum(k * c for k, c in zip(t.k, coords))
        out = out + t.coef * (np.cos(phase) if t.kind == "c" else np.sin(phase))
    return out


def require_mean_zero(terms, field: str):
    for t in terms:
        if t.kind == "c" and all(k == 0 for k in t.k) and t.coef != 0:
            raise InvalidInputError(f"{field}: must have zero mean (constant term {t.coef!r})")


# Initial data for the geodesic command.  Keys: a, b, swirl (2-D stream function).
GEODESIC_PRESETS = {
    1: {
        "standard": {"a": "s1=0.3", "b": "c1=0.2", "swirl": ""},
        "burgers": {"a": "c1=-2", "b": "", "swirl": ""},
        "hunter-saxton": {"a": "c1=0.5,c2=0.2", "b": "", "swirl": ""},
        "zero": {"a": "", "b": "", "swirl": ""},
    },
    2: {
        "standard": {"a": "c1:0=0.24,s1:1=0.18,s0:2=0.12", "b": "",
                     "swirl": "s1:1=0.025,s1:-1=0.025"},
        "zero": {"a": "", "b": "", "swirl": ""},
    },
    3: {
        "standard": {"a": "c1:0:0=0.24,s0:1:1=0.18", "b": "", "swirl": ""},
        "zero": {"a": "", "b": "", "swirl": ""},
    },
}

# Density pairs: rho = normalised (1 + trig spec).
DENSITY_PRESETS = {
    "standard": {"rho1": "", "rho2": "c1=0.3"},
    "skewed": {"rho1": "s1=0.2", "rho2": "c1=0.4,s2=0.1"},
    "equal": {"rho1": "c1=0.3", "rho2": "c1=0.3"},
}


def geodesic_preset(name: str, dim: int) -> dict:
    try:
        return dict(GEODESIC_PRESETS[dim][name])
    except KeyError:
        names = sorted(GEODESIC_PRESETS.get(dim, {}))
        raise InvalidInputError(f"preset: unknown geodesic preset {name!r} for dim {dim}; choose from {names}") from None


def density_preset(name: str) -> dict:
    try:
        return dict(DENSITY_PRESETS[name])
    except KeyError:
        raise InvalidInputError(f"preset: unknown density preset {name!r}; choose from {sorted(DENSITY_PRESETS)}") from None
