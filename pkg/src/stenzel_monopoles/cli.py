"""Command-line interface: ``stenzel-monopoles <subcommand> [options]``.

Configuration
-------------
Options may come from a JSON file (``--config run.json``) and are
overridden by flags.  The schema (all keys optional except ``epsilon``)::

    {
      "epsilon":     1.0,      # Stenzel parameter ε > 0 (0 selects the cone where allowed)
      "rho0":        0.01,     # seed radius of the series at the zero section
      "rho_max":     800.0,    # end of the tabulated geometry profile
      "tol":         1e-11,    # ODE relative tolerance
      "check_tol":   1e-9,     # tolerance for residual assertions
      "shoot_tol":   1e-7,     # mass tolerance for shooting
      "n_radii":     10,       # radii per residual check
      "output_dir":  "out",    # CSV/JSON destination
      "params":      {}        # subcommand-specific values
    }

``--write-config PATH`` stores the effective configuration; reading it back
gives the same object.

Reports
-------
Every subcommand writes ``<output_dir>/<subcommand>.json``, a list of
``{check, params, value, tolerance, pass}`` records, and prints a summary.
Exit status is 0 when every check passes, 1 when one fails and 2 for usage
or configuration errors.  CSV files use 12 significant digits.  Sweeps use
``STENZEL_WORKERS`` worker processes (default 1).

CSV columns
-----------
geometry.csv   r, t, rho, Fprime, G, Gdot, h2, Rplus, Rminus
shoot.csv      alpha, mass, tail, drift, steps      (mass is |m|)
moduli.csv     alpha, mass, tail, drift, steps      (mass is |m|)
dirac.csv      rho, phi, phi_minus_m
cone.csv       rho, b1, b4_squared                  (massless irreducible branch)
hym.csv        r, rho, residual, lambda_f, f20, theta45_t1
bubble.csv     lam, eta, alpha, mass, bps_error, dirac_error,
               dirac_derivative_error, eta_best, bps_error_best
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bubbling_analysis as bubbling
from . import monopole_ode as ode
from . import special_solutions as special
from .invariant_fields import (
    InvariantConnection,
    closed_form_curvature,
    fields_from_ode_state,
    monopole_residuals,
)
from .lie_coframe import ScalarJet, curvature, wedge
from .stenzel_geometry import (
    GeometryParams,
    assemble_kahler_data,
    build_profile,
    monge_ampere_residual,
)

__all__ = ["RunConfig", "ConfigError", "CheckRecord", "run", "main"]

SUBCOMMANDS = ("geometry", "verify", "shoot", "moduli", "dirac", "cone", "hym", "bubble")
WORKERS_ENV = "STENZEL_WORKERS"


class ConfigError(ValueError):
    """Invalid configuration; maps to exit status 2."""


@dataclass
class RunConfig:
    epsilon: float
    rho0: float = 1e-2
    rho_max: float = 800.0
    tol: float = 1e-11
    check_tol: float = 1e-9
    shoot_tol: float = 1e-7
    n_radii: int = 10
    output_dir: str = "out"
    params: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if not isinstance(self.epsilon, (int, float)) or not math.isfinite(self.epsilon):
            raise ConfigError("epsilon must be a finite number")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")
        for name in ("tol", "check_tol", "shoot_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.rho0 < self.rho_max:
            raise ConfigError("need 0 < rho0 < rho_max")
        if int(self.n_radii) != self.n_radii or self.n_radii < 1:
            raise ConfigError("n_radii must be a positive integer")
        return self

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "epsilon" not in data or data["epsilon"] is None:
            raise ConfigError("epsilon is required")
        return cls(**data).validate()

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


@dataclass
class CheckRecord:
    check: str
    params: dict
    value: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {"check": self.check, "params": self.params, "value": _jsonable(self.value),
                "tolerance": self.tolerance, "pass": bool(self.passed)}


def _jsonable(x):
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _record(check, value, tolerance, passed, **params) -> CheckRecord:
    return CheckRecord(check, {k: _jsonable(v) for k, v in params.items()}, value,
                       tolerance, bool(passed))


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.12g}"


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError(f"{WORKERS_ENV} must be ≥ 1")
    return n


class _Mapper:
    """Ordered map over a process pool, or the builtin map for one worker."""

    def __init__(self, workers: int):
        self.workers = workers
        self.pool = ProcessPoolExecutor(workers) if workers > 1 else None

    def __call__(self, fn, items):
        if self.pool is None:
            return list(map(fn, items))
        return list(self.pool.map(fn, items))

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown()


def _stenzel_params(cfg: RunConfig) -> GeometryParams:
    if cfg.epsilon == 0:
        raise ConfigError("this subcommand needs epsilon > 0")
    return GeometryParams(cfg.epsilon)


def _radii(cfg: RunConfig, lo_factor: float = 1.01, hi_factor: float = 20.0) -> np.ndarray:
    eps = cfg.epsilon if cfg.epsilon > 0 else 0.1
    return eps * np.geomspace(lo_factor, hi_factor, cfg.n_radii)


# --------------------------------------------------------------------------
# subcommands

def cmd_geometry(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    params = _stenzel_params(cfg)
    profile = build_profile(cfg.epsilon, rho_max=cfg.rho_max)
    (out / "geometry.csv").parent.mkdir(parents=True, exist_ok=True)
    (out / "geometry.csv").write_text(profile.to_csv())
    recs = []
    worst = max(monge_ampere_residual(r, params) for r in _radii(cfg))
    recs.append(_record("monge_ampere_relative", worst, 1e-7, worst <= 1e-7, epsilon=cfg.epsilon))
    worst_vol = 0.0
    for r in _radii(cfg):
        kd = assemble_kahler_data(r, params)
        vol = kd.volume_coefficient()
        quarter = 0.25 * float(wedge(kd.Omega1, kd.Omega2).coefficient(0, 1, 2, 3, 4, 5))
        worst_vol = max(worst_vol, abs(vol - quarter) / abs(vol))
    recs.append(_record("volume_identity_relative", worst_vol, 1e-9, worst_vol <= 1e-9))
    expo = profile.fit_large_exponent()
    recs.append(_record("h2_large_rho_exponent", expo, 0.02, abs(expo - 5.0) <= 0.02,
                        window=[0.6 * cfg.rho_max, cfg.rho_max]))
    rho_small = np.geomspace(1e-4, 1e-2, 10)
    ratio = np.sqrt(profile.h2(rho_small)) / rho_small
    dev = float(np.max(np.abs(ratio - 1.0)))
    recs.append(_record("h_over_rho_small", dev, 1e-3, dev <= 1e-3))
    return recs


def cmd_verify(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    family = cfg.params.get("family", "hym")
    tol = cfg.check_tol
    recs = []
    if family == "hym":
        params = _stenzel_params(cfg)
        for r in _radii(cfg):
            rep = special.hym_stenzel(params, r)
            val = max(rep.residuals.max, rep.lambda_f, rep.f20)
            recs.append(_record("hym_residual", val, tol, val <= tol, radius=r))
    elif family == "dirac":
        params = _stenzel_params(cfg)
        mono = special.DiracMonopole(int(cfg.params.get("l", 1)), float(cfg.params.get("m", -1.0)),
                                     float(cfg.params.get("C", 0.5)))
        for r in _radii(cfg):
            val = special.dirac_residuals(mono, r, params).max
            recs.append(_record("dirac_residual", val, tol, val <= tol, radius=r))
    elif family == "cone":
        mono = special.cone_monopole(int(cfg.params.get("l", 1)), float(cfg.params.get("C", 0.5)),
                                     float(cfg.params.get("m", 1.0)))
        for r in np.geomspace(0.5, 20.0, cfg.n_radii):
            res, lam = special.cone_monopole_residuals(mono, r)
            val = max(res.max, lam)
            recs.append(_record("cone_residual", val, tol, val <= tol, radius=r))
    elif family == "random":
        params = _stenzel_params(cfg)
        rng = np.random.default_rng(int(cfg.params.get("seed", 0)))
        for r in _radii(cfg):
            kd = assemble_kahler_data(r, params)
            state = rng.normal(size=6)
            state[4] = -state[1] * state[3] / state[2]
            conn, higgs = fields_from_ode_state(r, state, kd.jets)
            val = monopole_residuals(conn, higgs, kd).max
            recs.append(_record("ode_state_residual", val, tol, val <= tol, radius=r))
            jets = [ScalarJet(*rng.normal(size=3)) for _ in range(5)]
            c = InvariantConnection(1, *jets)
            diff = (curvature(c.form()) - closed_form_curvature(c)).max_abs()
            recs.append(_record("curvature_engine_vs_formula", diff, 1e-10, diff <= 1e-10, radius=r))
    else:
        raise ConfigError(f"unknown family {family!r}")
    return recs


def _shoot_row(res: ode.ShootResult) -> list:
    return [res.alpha, abs(res.mass), res.tail_estimate, res.constraint_drift, res.steps]


SHOOT_HEADER = ("alpha", "mass", "tail", "drift", "steps")


def cmd_shoot(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    profile = build_profile(cfg.epsilon, rho_max=cfg.rho_max)
    recs = []
    if "mass" in cfg.params:
        magnitude = abs(float(cfg.params["mass"]))
        if magnitude == 0:
            raise ConfigError("mass 0 is the fixed point α = 0; nothing to shoot")
        res = ode.shoot_for_mass(-magnitude, profile, tol=cfg.shoot_tol, rho0=cfg.rho0,
                                 ode_tol=cfg.tol)
        err = abs(abs(res.mass) - magnitude)
        recs.append(_record("shoot_round_trip", err, cfg.shoot_tol, err <= cfg.shoot_tol,
                            mass=magnitude, alpha=res.alpha))
    elif "alpha" in cfg.params:
        res = ode.mass_of_alpha(float(cfg.params["alpha"]), profile, cfg.rho0, tol=cfg.tol)
        ok = math.isfinite(res.mass) and res.mass < 0
        recs.append(_record("mass_extracted", abs(res.mass), cfg.shoot_tol, ok, alpha=res.alpha))
    else:
        raise ConfigError("shoot needs --mass or --alpha")
    write_csv(out / "shoot.csv", SHOOT_HEADER, [_shoot_row(res)])
    return recs


@dataclass(frozen=True)
class _MassJob:
    profile: object
    rho0: float
    tol: float

    def __call__(self, alpha: float) -> ode.ShootResult:
        return ode.mass_of_alpha(alpha, self.profile, self.rho0, tol=self.tol)


def parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ConfigError(f"grid must be lo:hi:n, got {text!r}") from exc
    if n < 2 or lo == hi:
        raise ConfigError("grid needs n ≥ 2 and lo ≠ hi")
    return np.linspace(lo, hi, n)


def cmd_moduli(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    profile = build_profile(cfg.epsilon, rho_max=cfg.rho_max)
    alphas = parse_grid(cfg.params.get("alpha_grid", "-5:-0.1:20"))
    if np.any(alphas >= 0):
        raise ConfigError("α grid must be negative")
    with _Mapper(worker_count()) as mapper:
        results = mapper(_MassJob(profile, cfg.rho0, cfg.tol), sorted(alphas))
    write_csv(out / "moduli.csv", SHOOT_HEADER, [_shoot_row(r) for r in results])
    masses = np.array([r.mass for r in results])
    steps = np.diff(masses)
    monotone = bool(np.all(steps > 0))
    return [_record("mass_strictly_monotone", float(np.min(steps)), 0.0, monotone,
                    alpha_grid=cfg.params.get("alpha_grid", "-5:-0.1:20"))]


def cmd_dirac(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    l = int(cfg.params.get("l", 1))
    m = float(cfg.params.get("m", 0.0))
    C = float(cfg.params.get("C", 0.0))
    recs = []
    if cfg.epsilon == 0:
        harm = float(np.max(special.dirac_harmonicity(l, m, special.CONE, np.geomspace(0.5, 20, cfg.n_radii))))
        return [_record("dirac_harmonic_cone", harm, 1e-8, harm <= 1e-8, l=l)]
    params = GeometryParams(cfg.epsilon)
    profile = build_profile(cfg.epsilon, rho_max=cfg.rho_max)
    mono = special.DiracMonopole(l, m, C)
    worst = max(special.dirac_residuals(mono, r, params).max for r in _radii(cfg))
    recs.append(_record("dirac_residual", worst, cfg.check_tol, worst <= cfg.check_tol, l=l, C=C))
    harm = float(np.max(special.dirac_harmonicity(l, m, params, _radii(cfg))))
    recs.append(_record("dirac_harmonic", harm, 1e-8, harm <= 1e-8, l=l))
    if l != 0:
        far = np.geomspace(0.25 * cfg.rho_max, cfg.rho_max, 10)
        slope = special.loglog_slope(far, special.dirac_higgs(l, m, far, profile) - m)
        recs.append(_record("dirac_tail_exponent", slope, 0.04, abs(slope + 4.0) <= 0.04))
        near = np.geomspace(1e-4, 1e-3, 10)
        slope0 = special.loglog_slope(near, special.dirac_higgs(l, m, near, profile) - m)
        coef = float((special.dirac_higgs(l, m, near[0], profile) - m) * near[0])
        recs.append(_record("dirac_small_rho_exponent", slope0, 1e-3, abs(slope0 + 1.0) <= 1e-3,
                            leading_coefficient=coef))
    rho = np.geomspace(1e-2, cfg.rho_max, 200)
    phi = special.dirac_higgs(l, m, rho, profile)
    write_csv(out / "dirac.csv", ("rho", "phi", "phi_minus_m"), zip(rho, phi, phi - m))
    return recs


def cmd_cone(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    l = int(cfg.params.get("l", 1))
    C = float(cfg.params.get("C", 1.0))
    m = float(cfg.params.get("m", 1.0))
    mono = special.cone_monopole(l, C, m)
    recs = []
    worst = 0.0
    for r in np.geomspace(0.5, 20.0, cfg.n_radii):
        res, lam = special.cone_monopole_residuals(mono, r)
        worst = max(worst, res.max, lam)
    recs.append(_record("cone_residual", worst, cfg.check_tol, worst <= cfg.check_tol, l=l, C=C, m=m))
    if C != 0:
        slope = special.cone_decay_exponent(mono, np.geomspace(2.0, 100.0, 10))
        recs.append(_record("cone_decay_exponent", slope, 1e-2, abs(slope + 5.0) <= 1e-2))
    seed = cfg.params.get("hym_seed")
    if seed is not None:
        b1, b4 = (float(x) for x in str(seed).split(","))
        traj = special.cone_hym_irreducible(b1, b4, rho0=1.0, rho_max=50.0, tol=cfg.tol)
        recs.append(_record("cone_hym_dual_route", traj.residual, 1e-6, traj.residual <= 1e-6,
                            b1=b1, b4=b4, blew_up=traj.blew_up, b4_decays=traj.b4_decays))
        write_csv(out / "cone.csv", ("rho", "b1", "b4_squared"), zip(traj.rho, traj.b1, traj.b4_sq))
    return recs


def cmd_hym(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    params = _stenzel_params(cfg)
    profile = build_profile(cfg.epsilon, rho_max=cfg.rho_max)
    rows = []
    worst = 0.0
    for r in _radii(cfg):
        rep = special.hym_stenzel(params, r)
        val = max(rep.residuals.max, rep.lambda_f, rep.f20, rep.display_error)
        worst = max(worst, val)
        rows.append([r, profile.rho_of_r(r), rep.residuals.max, rep.lambda_f, rep.f20, rep.theta45_t1])
    write_csv(out / "hym.csv", ("r", "rho", "residual", "lambda_f", "f20", "theta45_t1"), rows)
    return [_record("hym_residual", worst, cfg.check_tol, worst <= cfg.check_tol)]


def cmd_bubble(cfg: RunConfig, out: Path) -> list[CheckRecord]:
    profile = build_profile(cfg.epsilon, rho_max=cfg.rho_max)
    try:
        lambdas = [float(x) for x in str(cfg.params.get("lambdas", "2,4,8,16")).split(",")]
        lo, hi = (float(x) for x in str(cfg.params.get("annulus", "1:3")).split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad bubble parameters: {exc}") from exc
    R = float(cfg.params.get("R", 3.0))
    with _Mapper(worker_count()) as mapper:
        rep = bubbling.bubble_report(lambdas, profile, R, (lo, hi), mapper=mapper)
    write_csv(out / "bubble.csv", rep.COLUMNS,
              [[getattr(r, c) for c in rep.COLUMNS] for r in rep.rows])
    recs = []
    for col in ("bps_error", "dirac_error"):
        recs.append(_record(f"{col}_strictly_decreasing", float(np.max(np.diff(rep.column(col)))),
                            0.0, rep.strictly_decreasing(col), lambdas=lambdas,
                            decreasing_from=rep.decreasing_from(col)))
    cov = max(bubbling.flat_scale_covariance(lam, R) for lam in lambdas)
    recs.append(_record("flat_scale_covariance", cov, 1e-7, cov <= 1e-7))
    return recs


COMMANDS = {
    "geometry": cmd_geometry,
    "verify": cmd_verify,
    "shoot": cmd_shoot,
    "moduli": cmd_moduli,
    "dirac": cmd_dirac,
    "cone": cmd_cone,
    "hym": cmd_hym,
    "bubble": cmd_bubble,
}


def run(subcommand: str, cfg: RunConfig) -> tuple[int, list[CheckRecord]]:
    """Execute one subcommand; returns the exit status and its check records."""
    if subcommand not in COMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    cfg.validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = COMMANDS[subcommand](cfg, out)
    report = [r.to_dict() for r in records]
    (out / f"{subcommand}.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return (0 if all(r.passed for r in records) else 1), records


# --------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--write-config", help="store the effective configuration here")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--rho0", type=float)
    common.add_argument("--rho-max", dest="rho_max", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--check-tol", dest="check_tol", type=float)
    common.add_argument("--shoot-tol", dest="shoot_tol", type=float)
    common.add_argument("--n-radii", dest="n_radii", type=int)
    common.add_argument("--out", dest="output_dir")

    parser = argparse.ArgumentParser(prog="stenzel-monopoles",
                                     description="Invariant monopoles on T*S³ and the conifold.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("geometry", parents=[common], help="tabulate the Stenzel profile")
    p = sub.add_parser("verify", parents=[common], help="residual checks of a family")
    p.add_argument("--family", choices=("hym", "dirac", "cone", "random"))
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--seed", type=int)
    p = sub.add_parser("shoot", parents=[common], help="solve for one monopole")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--mass", type=float, help="mass magnitude |m|")
    g.add_argument("--alpha", type=float, help="seed parameter α < 0")
    p = sub.add_parser("moduli", parents=[common], help="mass as a function of α")
    p.add_argument("--alpha-grid", dest="alpha_grid", help="lo:hi:n")
    p = sub.add_parser("dirac", parents=[common], help="Dirac monopole checks")
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=float)
    p.add_argument("--C", type=float)
    p = sub.add_parser("cone", parents=[common], help="cone monopoles")
    p.add_argument("--l", type=int)
    p.add_argument("--C", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--hym-seed", dest="hym_seed", help="b1,b4 at ρ=1 for the massless branch")
    sub.add_parser("hym", parents=[common], help="explicit HYM connection")
    p = sub.add_parser("bubble", parents=[common], help="large-mass comparisons")
    p.add_argument("--lambdas")
    p.add_argument("--R", type=float)
    p.add_argument("--annulus", help="rho1:rho2")
    return parser


_TOP_LEVEL = {"epsilon", "rho0", "rho_max", "tol", "check_tol", "shoot_tol", "n_radii", "output_dir"}
_META = {"config", "write_config", "subcommand"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    data.setdefault("params", {})
    for key, value in vars(args).items():
        if value is None or key in _META:
            continue
        if key in _TOP_LEVEL:
            data[key] = value
        else:
            data["params"][key] = value
    return RunConfig.from_dict(data)


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--opt -5:…`` as ``--opt=-5:…`` so negative values parse."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if (tok.startswith("--") and "=" not in tok and len(nxt) > 1 and nxt[0] == "-"
                and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        if args.write_config:
            Path(args.write_config).write_text(cfg.to_json() + "\n")
        status, records = run(args.subcommand, cfg)
    except ConfigError as exc:
        print(f"stenzel-monopoles: error: {exc}", file=sys.stderr)
        return 2
    for r in records:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag} {r.check} value={_jsonable(r.value)} tolerance={r.tolerance}")
    if status:
        failed = [r.to_dict() for r in records if not r.passed]
        print(json.dumps({"failed": failed}, sort_keys=True), file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
