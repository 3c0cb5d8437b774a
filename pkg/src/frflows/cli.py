"""Command-line entry point: ``frflows {divergence,geodesic,validate,fisher-rao}``.

Exit codes: 0 on success (a reported breakdown counts as success), 2 on a
configuration error, 1 on an internal failure.  Every JSON document carries
``"schema": 1`` and an echo of the :class:`RunConfig`, which can be fed back
through ``--config`` to reproduce the run byte for byte.
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import presets
from .calculus import PeriodicGrid, derivative
from .connections import h1_inner
from .diffeo import CircleDiffeo, Density
from .divergences import ParametricFamily, alpha_divergence, fisher_rao_matrix, hellinger_distance
from .errors import BreakdownError, InvalidInputError
from .geodesics import (MAX_DT, alpha0_solution, alpha1_solution, alpham1_solution,
                        burgers_breakdown_time, conserved_C, hunter_saxton_breakdown_time,
                        integrate_pj)
from .torus import (TorusGrid, TorusVectorField, alpha1_solution_nd, grad, integrate_nd,
                    potential_velocity)
from .validation import SUITES, run_suites, worker_threads

SCHEMA = 1
COMMANDS = ("divergence", "geodesic", "validate", "fisher-rao")
MAX_CLOSED_FORM_CHECKS = 21
CHECK_WINDOW = 0.8
DIVERGENCE_ALPHAS = (-1.0, -0.5, 0.0, 0.5, 1.0)


class ConfigError(Exception):
    """Invalid configuration; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int = 256
    dim: int = 1
    alpha: tuple = (1.0,)
    t_final: float = 0.5
    dt: float = 1e-3
    save_every: int = 10
    method: str = "pde"
    preset: str = "standard"
    a: str | None = None
    b: str | None = None
    swirl: str | None = None
    rho1: str | None = None
    rho2: str | None = None
    theta: tuple = (0.0,)
    suite: str = "all"
    out: str | None = None
    format: str = "json"

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        if "command" not in d:
            raise ConfigError("command: missing")
        d = dict(d)
        if d["command"] == "divergence" and "alpha" not in d:
            d["alpha"] = DIVERGENCE_ALPHAS
        for key in ("alpha", "theta"):
            if key in d:
                v = d[key]
                d[key] = tuple(v) if isinstance(v, (list, tuple)) else (v,)
        return cls(**d).validated()

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["alpha"] = list(self.alpha)
        d["theta"] = list(self.theta)
        return d

    def validated(self) -> "RunConfig":
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.command in COMMANDS, f"command: must be one of {', '.join(COMMANDS)}")
        need(isinstance(self.n, int) and self.n >= 16 and self.n % 2 == 0,
             f"n: must be an even integer >= 16, got {self.n!r}")
        need(self.dim in (1, 2, 3), f"dim: must be 1, 2 or 3, got {self.dim!r}")
        need(len(self.alpha) >= 1, "alpha: at least one value required")
        for a in self.alpha:
            need(isinstance(a, (int, float)) and -1.0 <= a <= 1.0,
                 f"alpha: must lie in the range [-1, 1], got {a!r}")
        need(isinstance(self.t_final, (int, float)) and self.t_final > 0,
             f"t_final: must be positive, got {self.t_final!r}")
        need(isinstance(self.dt, (int, float)) and 0 < self.dt <= MAX_DT,
             f"dt: must lie in (0, {MAX_DT}], got {self.dt!r}")
        need(isinstance(self.save_every, int) and self.save_every >= 1,
             f"save_every: must be a positive integer, got {self.save_every!r}")
        need(self.method in ("pde", "closed-form"), f"method: must be 'pde' or 'closed-form', got {self.method!r}")
        need(self.format in ("csv", "json"), f"format: must be 'csv' or 'json', got {self.format!r}")
        need(self.suite == "all" or self.suite in SUITES,
             f"suite: unknown suite {self.suite!r}; choose from all, {', '.join(SUITES)}")
        if self.command == "geodesic":
            need(len(self.alpha) == 1, "alpha: the geodesic command takes a single value")
            if self.method == "closed-form":
                need(self.alpha[0] in (-1.0, 0.0, 1.0) if self.dim == 1 else self.alpha[0] == 1.0,
                     "alpha: closed-form solutions exist for alpha in {-1, 0, 1} (dim 1) and alpha = 1 (dim > 1)")
        if self.command == "fisher-rao":
            need(len(self.theta) >= 1 and all(isinstance(t, (int, float)) for t in self.theta),
                 "theta: at least one numeric parameter required")
        if self.out is not None and self.format == "csv":
            need(Path(self.out).suffix != ".json", "out: a CSV output path must not end in .json")
        return self


# -- helpers ----------------------------------------------------------------

def _f(x) -> float:
    return float(x)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write_text(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _sidecar_path(out: Path) -> Path:
    return out.with_suffix(".json")


def _trig(spec, dim, name):
    try:
        return presets.parse_trig(spec, dim, name)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None


def _density(grid, spec, name):
    terms = _trig(spec, 1, name)
    v = 1.0 + presets.eval_trig(terms, [grid.points])
    if np.min(v) <= 0:
        raise ConfigError(f"{name}: density 1 + ({spec}) is not positive")
    return Density.normalized(grid, v)


def _header_doc(cfg: RunConfig) -> dict:
    return {"schema": SCHEMA, "command": cfg.command, "config": cfg.to_dict()}


# -- divergence -------------------------------------------------------------

def cmd_divergence(cfg: RunConfig, stdout) -> int:
    try:
        pair = presets.density_preset(cfg.preset)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None
    grid = PeriodicGrid(cfg.n)
    rho1 = _density(grid, cfg.rho1 if cfg.rho1 is not None else pair["rho1"], "rho1")
    rho2 = _density(grid, cfg.rho2 if cfg.rho2 is not None else pair["rho2"], "rho2")
    rows = [(_f(a), alpha_divergence(rho1, rho2, a)) for a in cfg.alpha]
    dh = hellinger_distance(rho1, rho2)
    for a, d in rows:
        print(f"D^({a:g}) = {d:.17g}", file=stdout)
    print(f"hellinger = {dh:.17g}", file=stdout)
    doc = _header_doc(cfg)
    doc["divergences"] = [{"alpha": a, "value": d} for a, d in rows]
    doc["hellinger_distance"] = dh
    if cfg.out:
        out = Path(cfg.out)
        if cfg.format == "csv":
            buf = io.StringIO(newline="")
            buf.write("alpha,divergence\n")
            for a, d in rows:
                buf.write(f"{a:.17g},{d:.17g}\n")
            _write_text(out, buf.getvalue())
            _write_text(_sidecar_path(out), _dump_json(doc))
        else:
            _write_text(out, _dump_json(doc))
    return 0


# -- fisher-rao ---------------------------------------------------------------

def cmd_fisher_rao(cfg: RunConfig, stdout) -> int:
    r"""Cosine family ``rho_theta = 1 + sum_i theta_i cos(2 pi i x)`` and its lift.

    The lift ``eta_theta = x + sum_i theta_i sin(2 pi i x)/(2 pi i)`` has
    Jacobian ``rho_theta``; the report gives the Fisher-Rao matrix, the
    H-dot-1 metric of the lifted tangents and their ratio.
    """
    grid = PeriodicGrid(cfg.n)
    x = grid.points
    theta = np.array(cfg.theta, dtype=float)
    m = len(theta)
    modes = np.arange(1, m + 1)

    def rho(th):
        v = 1.0 + sum(t * np.cos(2 * np.pi * k * x) for t, k in zip(th, modes))
        if np.min(v) <= 0:
            raise ConfigError(f"theta: density not positive at theta = {list(th)}")
        return Density(grid, v)

    rho(theta)
    fam = ParametricFamily(m, rho)
    g = fisher_rao_matrix(fam, theta)
    eta = CircleDiffeo(grid, sum(t * np.sin(2 * np.pi * k * x) / (2 * np.pi * k) for t, k in zip(theta, modes)))
    V = [grid.field(np.sin(2 * np.pi * k * x) / (2 * np.pi * k)) for k in modes]
    G = np.array([[h1_inner(V[i], V[j], eta) for j in range(m)] for i in range(m)])
    ratio = float(np.trace(G) / np.trace(g))
    print(f"fisher_rao = {g.tolist()}", file=stdout)
    print(f"h1_lifted = {G.tolist()}", file=stdout)
    print(f"ratio = {ratio:.17g}", file=stdout)
    doc = _header_doc(cfg)
    doc.update({"family": "1 + sum_i theta_i cos(2 pi i x)", "fisher_rao": g.tolist(),
                "h1_lifted": G.tolist(), "ratio": ratio})
    if cfg.out:
        _write_text(Path(cfg.out), _dump_json(doc))
    return 0


# -- geodesic -----------------------------------------------------------------

def _initial_data(cfg: RunConfig):
    try:
        base = presets.geodesic_preset(cfg.preset, cfg.dim)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None
    specs = {k: (getattr(cfg, k) if getattr(cfg, k) is not None else base[k]) for k in ("a", "b", "swirl")}
    terms = {k: _trig(v, cfg.dim, k) for k, v in specs.items()}
    for k in ("a", "b"):
        try:
            presets.require_mean_zero(terms[k], k)
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from None
    if terms["swirl"] and cfg.dim != 2:
        raise ConfigError("swirl: only supported for dim = 2")
    return terms


def _geodesic_1d(cfg, terms):
    grid = PeriodicGrid(cfg.n)
    x = grid.points
    alpha = cfg.alpha[0]
    a = grid.field(presets.eval_trig(terms["a"], [x]))
    b = grid.field(presets.eval_trig(terms["b"], [x]))
    _, u0 = alpha1_solution(a, b, 0.0)

    def closed(t):
        if alpha == 1.0:
            return alpha1_solution(a, b, t)[1]
        if alpha == -1.0:
            return alpham1_solution(u0, t)[1]
        return alpha0_solution(u0, t)[1]

    predicted = {-1.0: burgers_breakdown_time, 0.0: hunter_saxton_breakdown_time}.get(alpha)
    tstar = predicted(u0) if predicted else None
    info = {"predicted_time": tstar if tstar is not None and np.isfinite(tstar) else None}
    nsteps = max(1, int(np.ceil(cfg.t_final / cfg.dt - 1e-9)))
    h = cfg.t_final / nsteps

    if cfg.method == "pde":
        tr = integrate_pj(u0, alpha, cfg.t_final, cfg.dt, cfg.save_every)
        times, fields = list(tr.times), list(tr.fields)
        info["occurred"] = tr.breakdown is not None
        info["time"] = tr.breakdown
    else:
        times, fields = [], []
        info["occurred"], info["time"] = False, None
        for i in range(0, nsteps + 1):
            if i % cfg.save_every and i != nsteps:
                continue
            t = i * h
            try:
                fields.append(closed(t))
            except BreakdownError as exc:
                info["occurred"], info["time"] = True, exc.time
                break
            times.append(t)

    check = None
    if cfg.method == "pde" and alpha in (-1.0, 0.0, 1.0):
        # near a breakdown both routes are resolution limited; compare on t <= 0.8 t*
        horizon = CHECK_WINDOW * tstar if tstar is not None else np.inf
        usable = [k for k, t in enumerate(times) if t <= horizon]
        idx = np.unique(np.linspace(0, len(usable) - 1, min(len(usable), MAX_CLOSED_FORM_CHECKS))
                        .round().astype(int)) if usable else []
        diffs = [(closed(times[usable[k]]) - fields[usable[k]]).max_abs() for k in idx]
        check = {"max_abs_du": max(diffs) if diffs else None, "times_checked": len(diffs),
                 "t_max": _f(times[usable[idx[-1]]]) if diffs else None}

    header = "t,x,u,div_u"
    rows = []
    for t, f in zip(times, fields):
        du = derivative(f).values
        rows.append(np.column_stack([np.full(grid.n, t), x, f.values, du]))
    C = [[_f(t), conserved_C(f, alpha)] for t, f in zip(times, fields)]
    return header, rows, C, info, check, h, {"times": [_f(t) for t in times]}


def _geodesic_nd(cfg, terms):
    grid = TorusGrid(cfg.dim, cfg.n)
    coords = list(grid.points)
    alpha = cfg.alpha[0]
    a = presets.eval_trig(terms["a"], coords)
    b = presets.eval_trig(terms["b"], coords)
    nsteps = max(1, int(np.ceil(cfg.t_final / cfg.dt - 1e-9)))
    h = cfg.t_final / nsteps
    labels = np.column_stack([c.ravel() for c in coords])
    names = [f"x{i + 1}" for i in range(cfg.dim)]
    rows, C = [], []
    info = {"occurred": False, "time": None, "predicted_time": None}
    if cfg.method == "closed-form":
        header = ",".join(["t"] + names + ["jac", "phi"])
        times = [i * h for i in range(nsteps + 1) if i % cfg.save_every == 0 or i == nsteps]
        for t in times:
            jac, phi = alpha1_solution_nd(a, b, t)
            rows.append(np.column_stack([np.full(len(labels), t), labels, jac.values.ravel(), phi.ravel()]))
            C.append([_f(t), -(1 + alpha) / 2 * float(np.mean(phi ** 2 * jac.values))])
        return header, rows, C, info, None, h, {"times": times, "columns": "Lagrangian labels"}
    if terms["b"]:
        raise ConfigError("b: the torus PDE route starts at the identity; b must be zero")
    u0 = potential_velocity(a)
    if terms["swirl"]:
        gp = grad(presets.eval_trig(terms["swirl"], coords)).components
        u0 = u0 + TorusVectorField(grid, np.array([-gp[1], gp[0]]))
    tr = integrate_nd(u0, alpha, cfg.t_final, cfg.dt, cfg.save_every)
    info["occurred"], info["time"] = tr.breakdown is not None, tr.breakdown
    header = ",".join(["t"] + names + [f"u{i + 1}" for i in range(cfg.dim)] + ["div_u"])
    for t, v, phi in zip(tr.times, tr.velocities, tr.phi):
        comps = [c.ravel() for c in v.components]
        rows.append(np.column_stack([np.full(len(labels), t), labels, *comps, phi.ravel()]))
        C.append([_f(t), -(1 + alpha) / 2 * float(np.mean(phi ** 2))])
    return header, rows, C, info, None, h, {"times": [_f(t) for t in tr.times]}


def _csv_text(header, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(header + "\n")
    if rows:
        np.savetxt(buf, np.vstack(rows), fmt="%.17g", delimiter=",", newline="\n")
    return buf.getvalue()


def cmd_geodesic(cfg: RunConfig, stdout) -> int:
    terms = _initial_data(cfg)
    run = _geodesic_1d if cfg.dim == 1 else _geodesic_nd
    header, rows, C, info, check, h, extra = run(cfg, terms)
    doc = _header_doc(cfg)
    doc.update({"dt_used": h, "conserved_C": C, "breakdown": info, "closed_form_check": check,
                "n_times": len(extra["times"])})
    if cfg.out:
        out = Path(cfg.out)
        if cfg.format == "csv":
            _write_text(out, _csv_text(header, rows))
            _write_text(_sidecar_path(out), _dump_json(doc))
        else:
            full = dict(doc)
            full["columns"] = header.split(",")
            full["data"] = np.vstack(rows).tolist() if rows else []
            _write_text(out, _dump_json(full))
    summary = {k: doc[k] for k in ("breakdown", "closed_form_check", "n_times", "dt_used")}
    print(_dump_json(summary), end="", file=stdout)
    return 0


# -- validate -----------------------------------------------------------------

def cmd_validate(cfg: RunConfig, stdout) -> int:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    try:
        threads = worker_threads()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    reports = run_suites(names, threads)
    ok = all(r["passed"] for r in reports)
    for r in reports:
        for c in r["checks"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'} [{r['suite']}] {c['name']}: "
                  f"{c['value']:.3e} (tol {c['tol']:.1e})", file=stdout)
    print(f"{'PASS' if ok else 'FAIL'} overall", file=stdout)
    doc = _header_doc(cfg)
    doc.update({"passed": ok, "suites": reports})
    if cfg.out:
        _write_text(Path(cfg.out), _dump_json(doc))
    return 0 if ok else 1


HANDLERS = {"divergence": cmd_divergence, "geodesic": cmd_geodesic,
            "validate": cmd_validate, "fisher-rao": cmd_fisher_rao}


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="frflows", description="Alpha-geometry of densities and diffeomorphism groups.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with a RunConfig (or a sidecar with a 'config' entry)")
    p.add_argument("--n", type=int, help="grid size (samples per axis)")
    p.add_argument("--dim", type=int, help="dimension: 1 (circle) or 2, 3 (torus)")
    p.add_argument("--alpha", type=float, nargs="+", help="alpha value(s) in [-1, 1]")
    p.add_argument("--t-final", type=float, dest="t_final", help="time horizon T")
    p.add_argument("--dt", type=float, help="RK4 step")
    p.add_argument("--save-every", type=int, dest="save_every", help="record every k-th step")
    p.add_argument("--method", choices=("pde", "closed-form"))
    p.add_argument("--preset", help="named initial data or density pair")
    p.add_argument("--a", help="trig spec for the initial slope / divergence")
    p.add_argument("--b", help="trig spec for the initial chart position (alpha = 1 closed form)")
    p.add_argument("--swirl", help="trig spec for a 2-D stream function added to u0")
    p.add_argument("--rho1", help="trig spec: rho1 = normalised 1 + spec")
    p.add_argument("--rho2", help="trig spec: rho2 = normalised 1 + spec")
    p.add_argument("--theta", type=float, nargs="+", help="Fisher-Rao parameter vector")
    p.add_argument("--suite", help="validation suite: all, " + ", ".join(SUITES))
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=("csv", "json"))
    return p


def config_from_args(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    base = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config: expected a JSON object")
        base = loaded.get("config", loaded) if "schema" in loaded else loaded
        if base.get("command", args.command) != args.command:
            raise ConfigError(f"config: file is for command {base.get('command')!r}, not {args.command!r}")
    overrides = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    base.update(overrides)
    return RunConfig.from_dict(base)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        return HANDLERS[cfg.command](cfg, stdout)
    except ConfigError as exc:
        print(f"frflows: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - top-level guard
        print(f"frflows: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
