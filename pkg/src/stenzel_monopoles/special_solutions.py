"""Closed-form solution families and the zero-section extension analysis.

* Dirac monopoles on the Stenzel manifold, ``A = A_c^l + (C/𝒢²)θ¹T₁`` and
  ``φ = m + l∫_ρ^∞ dρ'/(2h²)``;
* cone monopoles ``A = A_c^l + Cρ⁻⁴θ¹T₁``, ``Φ = mT₁`` and the massless
  irreducible cone family;
* the irreducible HYM connection ``A_c¹ + (ε/(2R₊))(θ⁴T₂ + θ⁵T₃)``;
* orthonormal curvature components I₁…I₈ and exponent fits near ρ = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .invariant_fields import (
    HiggsField,
    InvariantConnection,
    MonopoleResiduals,
    monopole_residuals,
    project_11,
)
from .lie_coframe import (
    InvariantForm,
    ScalarJet,
    curvature,
    dr,
    hodge_star,
    lambda_op,
    lie,
    mc_derivative,
    theta,
    wedge,
)
from .monopole_ode import SolutionProfile, four_field_rhs
from .stenzel_geometry import (
    DomainError,
    GeometryParams,
    assemble_kahler_data,
    metric_at,
    radial_jets,
)

__all__ = [
    "DiracMonopole",
    "ConeMonopole",
    "ConeHYMTrajectory",
    "HYMReport",
    "CurvatureComponents",
    "ExtensionReport",
    "dirac_higgs",
    "dirac_connection",
    "dirac_residuals",
    "dirac_harmonicity",
    "cone_rho",
    "cone_monopole",
    "cone_monopole_residuals",
    "cone_decay_exponent",
    "cone_hym_irreducible",
    "cone_hym_residuals",
    "hym_stenzel",
    "curvature_components",
    "extension_fit",
    "loglog_slope",
]

CONE = GeometryParams(0.0)
# (φ - m)ρ⁴/(lε²) → 27/16 at large ρ; on the cone this is the exact profile
CONE_DIRAC_COEF = 27.0 / 16.0


def _params(p) -> GeometryParams:
    return p if isinstance(p, GeometryParams) else GeometryParams(float(p))


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if np.any(y == 0):
        raise ValueError("cannot fit a power law through zeros")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# --------------------------------------------------------------------------
# Dirac monopoles

@dataclass(frozen=True)
class DiracMonopole:
    """Abelian monopole on ``L^l`` singular along the zero section.

    ``variant="G2"`` uses ``A₁ = C/𝒢²``; ``"G"`` is the ``C/𝒢`` form, which
    fails ``ΛF = 0`` and is kept only for comparison.
    """

    l: int
    m: float
    C: float = 0.0
    variant: str = "G2"

    def __post_init__(self):
        if self.variant not in ("G2", "G"):
            raise ValueError("variant must be 'G2' or 'G'")


def dirac_higgs(l: int, m: float, rho, profile):
    """``φ = m + l ∫_ρ^∞ dρ'/(2h²)``, normalised so that ``φ → m``."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0):
        raise DomainError("Dirac Higgs field is singular at ρ = 0")
    if l == 0:
        return np.full_like(rho_arr, float(m)) if rho_arr.ndim else float(m)
    tails = np.array([profile.tail_integral(float(x)) for x in rho_arr.ravel()])
    out = m + l * tails.reshape(rho_arr.shape)
    return float(out) if rho_arr.ndim == 0 else out


def _dirac_phi_jet(l: int, jets: dict, order: int) -> ScalarJet:
    """Jet of ``dφ/dr = -l ε² r / (4R₊R₋𝒢²)`` (uses ``dρ/dr = 2𝒢/r``)."""
    r, rp, rm, G = jets["r"], jets["Rp"], jets["Rm"], jets["G"]
    eps2 = float(np.real(rp.value ** 2 - rm.value ** 2))
    return (-0.25 * l * eps2) * r / (rp * rm * G * G)


def dirac_connection(mono: DiracMonopole, r: float, params, order: int = 1) -> InvariantConnection:
    jets = radial_jets(r, params, order)
    G = jets["G"]
    a1 = mono.C / (G * G) if mono.variant == "G2" else mono.C / G
    return InvariantConnection(l=mono.l, a1=a1.truncate(order), r=r)


def dirac_residuals(mono: DiracMonopole, r: float, params, profile=None) -> MonopoleResiduals:
    """Engine residuals at ``r``; φ's value is taken from ``profile`` if given."""
    p = _params(params)
    kd = assemble_kahler_data(r, p, order=2)
    conn = dirac_connection(mono, r, p)
    dphi = _dirac_phi_jet(mono.l, kd.jets, 1)
    value = mono.m
    if profile is not None:
        value = dirac_higgs(mono.l, mono.m, profile.rho_of_r(r), profile)
    phi = ScalarJet(value, float(np.real(dphi.value)))
    return monopole_residuals(conn, HiggsField(phi), kd)


def _laplacian(dphi_dr: ScalarJet, r: float, params) -> float:
    """``⋆d⋆dφ`` for a radial function given the jet of ``dφ/dr``."""
    g = metric_at(r, params, order=dphi_dr.order)
    star_d = hodge_star(dr(dphi_dr), g)
    top = mc_derivative(star_d)
    if not top.terms:
        return 0.0
    return float(np.real(hodge_star(top, g).coefficient()))


def dirac_harmonicity(l: int, m: float, params, r_grid) -> np.ndarray:
    """``|Δφ|`` of the Dirac Higgs field on a grid of radii.

    On the cone the profile is the exact limit ``φ = m + (27l/16)ρ⁻⁴``.
    The constant ``m`` does not enter.
    """
    p = _params(params)
    out = []
    for r in np.atleast_1d(r_grid):
        r = float(r)
        if l == 0:
            out.append(0.0)
            continue
        jets = radial_jets(r, p, order=2)
        if p.is_cone:
            rho = cone_rho(jets["r"])
            dphi = (-4.0 * CONE_DIRAC_COEF * l) * rho ** -5.0 * _cone_drho_dr(jets["r"])
        else:
            dphi = _dirac_phi_jet(l, jets, 2)
        out.append(abs(_laplacian(dphi.truncate(1), r, p)))
    return np.asarray(out)


# --------------------------------------------------------------------------
# cone

def cone_rho(r):
    """Cone distance ``ρ = (3/2)^{2/3} r^{2/3}``; accepts floats or jets."""
    return 1.5 ** (2.0 / 3.0) * r ** (2.0 / 3.0)


def _cone_drho_dr(r):
    return (2.0 / 3.0) ** (1.0 / 3.0) * r ** (-1.0 / 3.0)


@dataclass(frozen=True)
class ConeMonopole:
    """``A = A_c^l + Cρ⁻⁴θ¹T₁``, ``Φ = mT₁`` on the conifold."""

    l: int
    C: float
    m: float

    def connection(self, r: float, order: int = 1) -> InvariantConnection:
        rj = ScalarJet.variable(r, order)
        return InvariantConnection(l=self.l, a1=self.C * cone_rho(rj) ** -4.0, r=r)

    def deviation_norm(self, r: float) -> float:
        """``|A - A_c^l|`` in the cone metric."""
        g = metric_at(r, CONE, order=1)
        a1 = self.C * cone_rho(r) ** -4.0
        return abs(a1) / math.sqrt(float(np.real(g.jet(1).value)))


def cone_monopole(l: int, C: float, m: float) -> ConeMonopole:
    if m == 0:
        raise ValueError("cone monopoles with constant |Φ| need m ≠ 0")
    return ConeMonopole(int(l), float(C), float(m))


def cone_monopole_residuals(mono: ConeMonopole, r: float) -> tuple[MonopoleResiduals, float]:
    """Engine residuals and ``|ΛF|`` at cone radius ``r``."""
    kd = assemble_kahler_data(r, CONE, order=2)
    conn = mono.connection(r)
    res = monopole_residuals(conn, HiggsField(ScalarJet(mono.m, 0.0)), kd)
    F = curvature(conn.form())
    lam = lambda_op(F, kd.metric, kd.omega)
    return res, lam.max_abs()


def cone_decay_exponent(mono: ConeMonopole, rho_grid) -> float:
    """Slope of ``log|A - A_c|`` against ``log ρ``."""
    rho_grid = np.asarray(rho_grid, dtype=float)
    r = (rho_grid / 1.5 ** (2.0 / 3.0)) ** 1.5
    return loglog_slope(rho_grid, [mono.deviation_norm(x) for x in r])


@dataclass
class ConeHYMTrajectory:
    """Massless cone solution with ``B₂ = B₅ = 0`` and ``B₃ = sign·B₄``."""

    rho: np.ndarray
    b1: np.ndarray
    b4_sq: np.ndarray
    sign: int
    variant: str
    blew_up: bool
    b4_decays: bool
    residual: float
    dense: object = field(repr=False, default=None)

    def b4(self) -> np.ndarray:
        return np.sqrt(np.maximum(self.b4_sq, 0.0))


def _cone_hym_rhs(sign: int, variant: str):
    if variant == "derived":
        c1, c2 = 18.0 * sign, 6.0 * sign
    elif variant == "alternate":
        c1, c2 = -18.0 * sign, 3.0 * sign
    else:
        raise ValueError("variant must be 'derived' or 'alternate'")

    def rhs(rho, y):
        b1, u = y
        return np.array([c1 * u, c2 * b1 * u / rho ** 5])
    return rhs


def cone_hym_irreducible(b1_0: float, b4_0: float, rho0: float, rho_max: float = 50.0,
                         sign: int = 1, variant: str = "derived", tol: float = 1e-11,
                         n_out: int = 200, blowup: float = 1e12) -> ConeHYMTrajectory:
    """Integrate ``dB₁/dρ = 18sB₄²``, ``d(B₄²)/dρ = (6s/ρ⁵)B₁B₄²``.

    ``residual`` is the largest relative gap to an independent Radau
    integration of the same system.  ``variant="alternate"`` uses ``-18s`` and
    ``3s`` instead; only the derived pair makes the engine residuals vanish
    (see :func:`cone_hym_residuals`).
    """
    if b4_0 == 0:
        raise ValueError("b4_0 must be nonzero for the irreducible branch")
    if sign not in (1, -1):
        raise ValueError("sign must be ±1")
    rhs = _cone_hym_rhs(sign, variant)

    def too_big(rho, y):
        return blowup - max(abs(y[0]), abs(y[1]))
    too_big.terminal = True
    sol = solve_ivp(rhs, (rho0, rho_max), [b1_0, b4_0 ** 2], method="DOP853",
                    rtol=tol, atol=tol * 1e-3, dense_output=True, events=[too_big])
    end = float(sol.t[-1])
    grid = np.geomspace(rho0, end, n_out)
    y = sol.sol(grid)
    # independent re-integration (implicit Radau) on the region below blow-up
    tame = grid[np.max(np.abs(y), axis=0) < 1e6]
    check = solve_ivp(rhs, (rho0, float(tame[-1])), [b1_0, b4_0 ** 2], method="Radau",
                      rtol=tol, atol=tol * 1e-3, t_eval=tame)
    scale = np.maximum(np.abs(sol.sol(tame)), 1.0)
    residual = float(np.max(np.abs(check.y - sol.sol(tame)) / scale))
    blew = sol.status == 1
    decays = (not blew) and y[1, -1] < 1e-3 * y[1, 0]
    return ConeHYMTrajectory(grid, y[0], y[1], sign, variant, blew, bool(decays),
                             residual, sol.sol)


def cone_hym_residuals(traj: ConeHYMTrajectory, rho: float) -> MonopoleResiduals:
    """Engine residuals (Φ = 0) of the connection encoded by ``traj`` at ``ρ``.

    ``A₁ = B₁/ρ⁴``, ``A₃ = B₃/r``, ``A₄ = B₄/r`` with derivatives taken from
    the integrated system.
    """
    r = (rho / 1.5 ** (2.0 / 3.0)) ** 1.5
    b1, u = traj.dense(rho)
    d_b1, d_u = _cone_hym_rhs(traj.sign, traj.variant)(rho, (b1, u))
    b4 = math.sqrt(u)
    d_b4 = d_u / (2.0 * b4)
    drho = _cone_drho_dr(r)
    B1 = ScalarJet(b1, d_b1 * drho)
    B4 = ScalarJet(b4, d_b4 * drho)
    B3 = traj.sign * B4
    rj = ScalarJet.variable(r, 1)
    conn = InvariantConnection(l=1, a1=B1 * cone_rho(rj) ** -4.0, a3=B3 / rj, a4=B4 / rj, r=r)
    kd = assemble_kahler_data(r, CONE, order=2)
    return monopole_residuals(conn, HiggsField(ScalarJet(0.0, 0.0)), kd)


# --------------------------------------------------------------------------
# explicit HYM connection

@dataclass(frozen=True)
class HYMReport:
    r: float
    residuals: MonopoleResiduals
    lambda_f: float
    f20: float
    display_error: float
    theta45_t1: float
    deviation_norm: float


def hym_connection(r: float, params, order: int = 1) -> InvariantConnection:
    """``A_c¹ + (ε/(2R₊))(θ⁴T₂ + θ⁵T₃)``."""
    p = _params(params)
    jets = radial_jets(r, p, order + 1)
    return InvariantConnection(l=1, a4=(0.5 * p.epsilon / jets["Rp"]).truncate(order), r=r)


def hym_curvature_display(r: float, params) -> InvariantForm:
    """Closed form of the HYM curvature, built from R± directly."""
    p = _params(params)
    eps = p.epsilon
    rp = math.sqrt((r * r + eps * eps) / 2.0)
    rm = math.sqrt((r - eps) * (r + eps) / 2.0)
    t1 = -0.5 * (theta(2, 3) + theta(4, 5, coef=rm * rm / (rp * rp)))
    k = eps / (2.0 * rp)
    d = -0.25 * eps * r / rp ** 3
    t2 = theta(1, 2, coef=k) + wedge(dr(d), theta(4))
    t3 = theta(1, 3, coef=k) + wedge(dr(d), theta(5))
    return lie(t1, 1) + lie(t2, 2) + lie(t3, 3)


def hym_stenzel(params, r: float) -> HYMReport:
    """Residuals, ``ΛF``, ``(2,0)+(0,2)`` part and display agreement at ``r``."""
    p = _params(params)
    if p.is_cone:
        raise ValueError("the explicit HYM connection needs ε > 0")
    kd = assemble_kahler_data(r, p, order=2)
    conn = hym_connection(r, p)
    res = monopole_residuals(conn, HiggsField(ScalarJet(0.0, 0.0)), kd)
    F = curvature(conn.form())
    lam = lambda_op(F, kd.metric, kd.omega)
    f20, _ = project_11(F, kd.jets)
    diff = F - hym_curvature_display(r, p)
    t45 = float(np.real(F.coefficient(4, 5, component=1)))
    g = kd.metric
    dev = abs(float(np.real(conn.jets[3].value))) / math.sqrt(float(np.real(g.jet(4).value)))
    return HYMReport(r, res, lam.max_abs(), f20.max_abs(), diff.max_abs(), t45,
                     math.sqrt(2.0) * dev)


# --------------------------------------------------------------------------
# curvature components and extension

COMPONENT_NAMES = tuple(f"I{k}" for k in range(1, 9))


@dataclass
class CurvatureComponents:
    """Orthonormal curvature components in the gauge ``B₂ = B₅ = 0``.

    With ``εh = √(R₊R₋𝒢)`` and ``d/dρ`` of the trajectory:

    ``I₁ = (B₁' - 4𝒢̇B₁/r)/(ε²h²)``, ``I₂ = (B₃' - 𝒢B₃/R₋²)/(εh)``,
    ``I₃ = (B₄' - 𝒢B₄/R₊²)/(εh)``, ``I₄ = (4B₃² - R₋²)/(2ε²h²)``,
    ``I₅ = (4B₄² - R₊²)/(2ε²h²)``, ``I₆ = (B₄/R₊ - 2B₁B₃/(𝒢²R₋))√(𝒢/(R₊R₋))/R₊``,
    ``I₇ = (B₃/R₋ - 2B₁B₄/(𝒢²R₊))√(𝒢/(R₊R₋))/R₋``,
    ``I₈ = (B₁/𝒢² - 2B₃B₄/(R₊R₋))/𝒢``.
    """

    rho: np.ndarray
    values: dict

    def slopes(self, zero_tol: float = 1e-13) -> dict:
        """Log-log slope of each ``|Iₖ|`` (``inf`` for identically small ones)."""
        out = {}
        for name, v in self.values.items():
            if np.max(np.abs(v)) < zero_tol or np.any(v == 0):
                out[name] = math.inf
            else:
                out[name] = loglog_slope(self.rho, v)
        return out

    def bounded(self, slope_floor: float = -0.5) -> dict:
        """Per-component boundedness verdict on the sampled window."""
        return {k: s > slope_floor for k, s in self.slopes().items()}


def _frame_functions(profile, rho):
    eps = profile.epsilon
    t = np.asarray(profile.t_of_rho(rho), dtype=float)
    rp = eps * np.cosh(t / 2.0)
    rm = eps * np.sinh(t / 2.0)
    r = eps * np.sqrt(np.cosh(t))
    h2 = np.asarray(profile.h2(rho), dtype=float)
    G = eps * eps * h2 / (rp * rm)
    Gdot = r * rp * rm / (2.0 * G * G)
    return r, rp, rm, G, Gdot, h2


def _b_derivatives(traj: SolutionProfile, profile):
    b = traj.b_fields()
    if np.max(np.abs(b["b2"])) > 0 or np.max(np.abs(b["b5"])) > 0:
        raise ValueError("curvature components need the gauge B₂ = B₅ = 0")
    phi = traj.phi
    d = np.array([four_field_rhs(x, (p, b1, b3, b4), profile)
                  for x, p, b1, b3, b4 in zip(traj.rho, phi, b["b1"], b["b3"], b["b4"])]).T
    return b["b1"], b["b3"], b["b4"], d[1], d[2], d[3]


def curvature_components(traj: SolutionProfile, profile) -> CurvatureComponents:
    mask = traj.rho > 0
    sub = SolutionProfile(traj.kind, traj.rho[mask], traj.y[:, mask], traj.epsilon)
    rho = sub.rho
    b1, b3, b4, db1, db3, db4 = _b_derivatives(sub, profile)
    r, rp, rm, G, Gdot, h2 = _frame_functions(profile, rho)
    eps = profile.epsilon
    e2h2 = eps * eps * h2
    eh = np.sqrt(e2h2)
    root = np.sqrt(G / (rp * rm))
    vals = {
        "I1": (db1 - 4.0 * Gdot / r * b1) / e2h2,
        "I2": (db3 - G / rm ** 2 * b3) / eh,
        "I3": (db4 - G / rp ** 2 * b4) / eh,
        "I4": (4.0 * b3 ** 2 - rm ** 2) / (2.0 * e2h2),
        "I5": (4.0 * b4 ** 2 - rp ** 2) / (2.0 * e2h2),
        "I6": (b4 / rp - 2.0 * b1 * b3 / (G ** 2 * rm)) * root / rp,
        "I7": (b3 / rm - 2.0 * b1 * b4 / (G ** 2 * rp)) * root / rm,
        "I8": (b1 / G ** 2 - 2.0 * b3 * b4 / (rp * rm)) / G,
    }
    return CurvatureComponents(rho, vals)


@dataclass
class ExtensionReport:
    """Power-law fits of the B-fields near the zero section.

    Exponents are ``inf`` for fields that vanish to round-off.  The verdict
    requires ``B₁ = O(ρ³)``, ``B₃ = O(ρ²)`` and ``B₄ = ε/2 + O(ρ²)``.
    """

    window: tuple
    exponents: dict
    b4_at_zero: float
    b4_target: float
    conditions: dict
    curvature_bounded: dict
    extends: bool

    @property
    def curvature_verdict(self) -> bool:
        return all(self.curvature_bounded.values())


def extension_fit(traj: SolutionProfile, profile, span: float = 10.0,
                  exponent_tol: float = 0.05, b4_tol: float = 1e-4,
                  zero_tol: float = 1e-13) -> ExtensionReport:
    rho0 = float(traj.rho[0])
    mask = traj.rho <= span * rho0 * (1 + 1e-12)
    if mask.sum() < 6:
        raise ValueError("need at least six samples in [ρ₀, span·ρ₀]")
    rho = traj.rho[mask]
    if rho[-1] / rho[0] < 0.5 * span:
        raise ValueError("insufficient dynamic range for exponent fits")
    b = traj.b_fields()
    eps = traj.epsilon
    fields = {"b1": b["b1"][mask], "b3": b["b3"][mask]}
    b4 = b["b4"][mask]
    # B₄ = c₀ + c₂ρ² + c₄ρ⁴ gives the value at the zero section
    design = np.vstack([np.ones_like(rho), rho ** 2, rho ** 4]).T
    c0 = float(np.linalg.lstsq(design, b4, rcond=None)[0][0])
    fields["b4_shift"] = b4 - 0.5 * eps

    def exponent(v):
        if np.max(np.abs(v)) < zero_tol or np.any(v == 0):
            return math.inf
        return loglog_slope(rho, v)

    exps = {k: exponent(v) for k, v in fields.items()}
    conditions = {
        "b1": exps["b1"] >= 3.0 - exponent_tol,
        "b3": exps["b3"] >= 2.0 - exponent_tol,
        "b4": abs(c0 - 0.5 * eps) <= b4_tol and exps["b4_shift"] >= 2.0 - exponent_tol,
    }
    sub = SolutionProfile(traj.kind, rho, traj.y[:, mask], eps)
    bounded = curvature_components(sub, profile).bounded()
    return ExtensionReport((float(rho[0]), float(rho[-1])), exps, c0, 0.5 * eps,
                           conditions, bounded, all(conditions.values()))
