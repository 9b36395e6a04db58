"""Radial data of the Stenzel Calabi-Yau structure on T*S³ and of the conifold.

The deformation parameter ``epsilon`` selects the smoothing
``z₁² + … + z₄² = ε²``; ``epsilon == 0`` is the cone.  Away from the zero
section everything is parametrised by ``t`` with ``r² = ε² cosh t``, where

    R₋ = ε sinh(t/2),  R₊ = ε cosh(t/2),  𝒢 = (3ε⁴/16)^{1/3} k(cosh t)^{1/3}.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline

from .lie_coframe import (
    CoframeMetric,
    InvariantForm,
    ScalarJet,
    dr,
    theta,
    wedge,
)

__all__ = [
    "DomainError",
    "ExtrapolationError",
    "GeometryParams",
    "RadialPoint",
    "KahlerData",
    "GeometryProfile",
    "FlatProfile",
    "k_fn",
    "fprime",
    "fprime_k_form",
    "g_fn",
    "gdot",
    "t_of_r",
    "radial_point",
    "radial_jets",
    "rho_of_r",
    "metric_at",
    "assemble_kahler_data",
    "monge_ampere_residual",
    "kahler_ode_residual",
    "ma_ode_residual_t",
    "small_rho_series",
    "build_profile",
]

CONE_G_COEF = 0.5 * 1.5 ** (1.0 / 3.0)


class DomainError(ValueError):
    """Evaluation outside the domain of a radial function."""


class ExtrapolationError(DomainError):
    """Requested ρ lies beyond a tabulated profile."""


@dataclass(frozen=True)
class GeometryParams:
    epsilon: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.epsilon) or self.epsilon < 0:
            raise ValueError("epsilon must be finite and non-negative")

    @property
    def is_cone(self) -> bool:
        return self.epsilon == 0.0


def _as_params(params) -> GeometryParams:
    if isinstance(params, GeometryParams):
        return params
    return GeometryParams(float(params))


# --------------------------------------------------------------------------
# closed forms

def _shmx(u):
    """``sinh(u) - u`` without cancellation for small ``u``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore"):
        out = np.sinh(u) - u
    small = np.abs(u) < 0.5
    if np.any(small):
        us = u[small]
        u2 = us * us
        term = us * u2 / 6.0
        acc = term.copy()
        for n in range(4, 40, 2):
            term = term * u2 / (n * (n + 1))
            acc = acc + term
        out = np.where(small, 0.0, out)
        out[small] = acc
    return out if out.ndim else float(out)


def _k_of_t(t):
    """``k(cosh t) = (sinh 2t - 2t)/2``."""
    return 0.5 * _shmx(2.0 * np.asarray(t, dtype=float))


def k_fn(x):
    """``k(x) = x√(x²-1) - log(√(x²-1) + x)`` for ``x ≥ 1``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise DomainError("k(x) needs x >= 1")
    t = 2.0 * np.arcsinh(np.sqrt((x - 1.0) / 2.0))
    out = _k_of_t(t)
    return float(out) if np.ndim(out) == 0 else out


def t_of_r(r, params) -> float:
    p = _as_params(params)
    eps = p.epsilon
    if p.is_cone:
        raise DomainError("t is undefined on the cone")
    if r < eps:
        raise DomainError(f"r={r} below the zero section r=ε={eps}")
    return 2.0 * math.asinh(math.sqrt((r - eps) * (r + eps) / 2.0) / eps)


def _g_of_t(t, eps):
    return (3.0 * eps ** 4 / 16.0) ** (1.0 / 3.0) * np.cbrt(_k_of_t(t))


def _check_radius(r, p: GeometryParams, strict: bool = True) -> None:
    lo = p.epsilon
    if (strict and r <= lo) or r < lo:
        raise DomainError(f"r={r} not above the zero section r={lo}")


def g_fn(r, params) -> float:
    """𝒢(r) = √(r⁴-ε⁴) F'/2."""
    p = _as_params(params)
    if p.is_cone:
        _check_radius(r, p)
        return CONE_G_COEF * r ** (4.0 / 3.0)
    _check_radius(r, p, strict=False)
    return float(_g_of_t(t_of_r(r, p), p.epsilon))


def _rplus_rminus(r, p: GeometryParams) -> tuple[float, float]:
    eps = p.epsilon
    rp = math.sqrt((r * r + eps * eps) / 2.0)
    rm = math.sqrt(max((r - eps) * (r + eps), 0.0) / 2.0)
    return rp, rm


def gdot(r, params) -> float:
    """d𝒢/dr from the Monge-Ampère identity ``2 𝒢̇ 𝒢² = r R₊ R₋``."""
    p = _as_params(params)
    _check_radius(r, p)
    rp, rm = _rplus_rminus(r, p)
    return r * rp * rm / (2.0 * g_fn(r, p) ** 2)


def fprime(r, params) -> float:
    """F'(r²) from the closed form in ``t``; cone: ``(3/2)^{1/3} r^{-2/3}``."""
    p = _as_params(params)
    _check_radius(r, p)
    if p.is_cone:
        return 1.5 ** (1.0 / 3.0) * r ** (-2.0 / 3.0)
    eps = p.epsilon
    t = t_of_r(r, p)
    return (3.0 / (4.0 * eps ** 2)) ** (1.0 / 3.0) * np.cbrt(2.0 * _k_of_t(t)) / math.sinh(t)


def fprime_k_form(r, params) -> float:
    """F'(r²) through ``k(r²/ε²)``; independent route to :func:`fprime`."""
    p = _as_params(params)
    _check_radius(r, p)
    eps = p.epsilon
    x = r * r / (eps * eps)
    return (1.5 ** (1.0 / 3.0) * eps ** (-2.0 / 3.0) / math.sqrt(x * x - 1.0)
            * k_fn(x) ** (1.0 / 3.0))


@dataclass(frozen=True)
class RadialPoint:
    r: float
    t: float
    Fprime: float
    G: float
    Gdot: float
    rho: float
    h2: float
    Rplus: float
    Rminus: float


def radial_point(r, params, rho: float | None = None) -> RadialPoint:
    p = _as_params(params)
    _check_radius(r, p)
    rp, rm = _rplus_rminus(r, p)
    G = g_fn(r, p)
    if p.is_cone:
        t = math.nan
        h2 = math.nan
        rho_val = 1.5 ** (2.0 / 3.0) * r ** (2.0 / 3.0)
    else:
        t = t_of_r(r, p)
        h2 = rp * rm * G / p.epsilon ** 2
        rho_val = rho_of_r(r, p) if rho is None else rho
    return RadialPoint(r, t, fprime(r, p), G, gdot(r, p), rho_val, h2, rp, rm)


# --------------------------------------------------------------------------
# jets

def radial_jets(r, params, order: int = 2) -> dict:
    """Taylor jets in ``r`` of r, R₊, R₋, 𝒢, 𝒢̇, F' at ``r``.

    𝒢 is expanded by solving ``𝒢' = r R₊ R₋ / (2𝒢²)`` order by order, so
    the jet of 𝒢̇ is exact to the requested order.
    """
    p = _as_params(params)
    _check_radius(r, p)
    eps = p.epsilon
    n = order + 2
    rj = ScalarJet.from_taylor(np.r_[r, 1.0, np.zeros(n - 2)])
    plus = np.zeros(n)
    minus = np.zeros(n)
    plus[:3] = ((r * r + eps * eps) / 2.0, r, 0.5)
    minus[:3] = ((r - eps) * (r + eps) / 2.0, r, 0.5)
    rp = ScalarJet.from_taylor(plus) ** 0.5
    rm = ScalarJet.from_taylor(minus) ** 0.5
    g = np.zeros(n)
    g[0] = g_fn(r, p)
    for k in range(1, n):
        partial = ScalarJet.from_taylor(g[:k])
        rhs = (rj.truncate(k - 1) * rp.truncate(k - 1) * rm.truncate(k - 1)) / (
            2.0 * partial * partial)
        g[k] = rhs.coeffs[k - 1] / k
    G = ScalarJet.from_taylor(g)
    Gdot = G.derivative()
    return {
        "r": rj.truncate(order),
        "Rp": rp.truncate(order),
        "Rm": rm.truncate(order),
        "G": G.truncate(order),
        "Gdot": Gdot.truncate(order),
        "Fprime": (G / (rp * rm)).truncate(order),
    }


def metric_at(r, params, order: int = 2, jets: dict | None = None) -> CoframeMetric:
    """Diagonal coframe metric on ``dr, θ¹..θ⁵`` with the Kähler orientation."""
    j = radial_jets(r, params, order) if jets is None else jets
    r_, rp, rm, G, Gd = j["r"], j["Rp"], j["Rm"], j["G"], j["Gdot"]
    g0 = Gd * r_ / (2.0 * rp * rm)
    g1 = Gd * 2.0 * rp * rm / r_
    g23 = G * rp / rm
    g45 = G * rm / rp
    return CoframeMetric((g0, g1, g23, g23, g45, g45), orientation=-1)


@dataclass(frozen=True)
class KahlerData:
    r: float
    omega: InvariantForm
    Omega1: InvariantForm
    Omega2: InvariantForm
    metric: CoframeMetric
    jets: dict = field(repr=False)

    @property
    def omega_sq_half(self) -> InvariantForm:
        return 0.5 * wedge(self.omega, self.omega)

    def volume_coefficient(self) -> float:
        """Coefficient of ``dr∧θ¹²³⁴⁵`` in ``ω³/3!``."""
        w3 = wedge(self.omega, wedge(self.omega, self.omega))
        return float(w3.coefficient(0, 1, 2, 3, 4, 5)) / 6.0


def assemble_kahler_data(r, params, order: int = 2) -> KahlerData:
    """ω, Ω₁ = Re Ω, Ω₂ = Im Ω and the metric as invariant forms at ``r``."""
    p = _as_params(params)
    j = radial_jets(r, p, order)
    r_, rp, rm, G, Gd = j["r"], j["Rp"], j["Rm"], j["G"], j["Gdot"]
    omega = wedge(dr(Gd), theta(1)) + theta(2, 4, coef=G) + theta(3, 5, coef=G)
    half_r = 0.5 * r_
    Omega1 = (-theta(1, 2, 3, coef=rp * rp) + theta(1, 4, 5, coef=rm * rm)
              - theta(0, 2, 5, coef=half_r) + theta(0, 3, 4, coef=half_r))
    Omega2 = (theta(0, 2, 3, coef=half_r * rp / rm) - theta(0, 4, 5, coef=half_r * rm / rp)
              + theta(1, 3, 4, coef=rp * rm) - theta(1, 2, 5, coef=rp * rm))
    return KahlerData(r, omega, Omega1, Omega2, metric_at(r, p, order, j), j)


# --------------------------------------------------------------------------
# residuals of the Monge-Ampère reduction

def monge_ampere_residual(r, params, step: float | None = None) -> float:
    """Relative residual of ``2𝒢̇𝒢² = rR₊R₋`` with 𝒢̇ by central differences."""
    p = _as_params(params)
    _check_radius(r, p)
    h = step if step is not None else 1e-4 * (r - p.epsilon if not p.is_cone else r)
    stencil = (-2, -1, 1, 2)
    weights = (1.0, -8.0, 8.0, -1.0)
    gd = sum(w * g_fn(r + s * h, p) for s, w in zip(stencil, weights)) / (12.0 * h)
    rp, rm = _rplus_rminus(r, p)
    target = r * rp * rm
    return abs(2.0 * gd * g_fn(r, p) ** 2 - target) / abs(target)


def kahler_ode_residual(r, params, step: float | None = None) -> float:
    """Residual of ``r²F'³ + (r⁴-ε⁴)/3 · d(F'³)/d(r²) = 1``."""
    p = _as_params(params)
    eps = p.epsilon
    s = r * r
    h = step if step is not None else 1e-4 * (s - eps * eps if not p.is_cone else s)

    def cube(x):
        return fprime(math.sqrt(x), p) ** 3

    deriv = (cube(s - 2 * h) - 8 * cube(s - h) + 8 * cube(s + h) - cube(s + 2 * h)) / (12 * h)
    return abs(s * cube(s) + (s * s - eps ** 4) / 3.0 * deriv - 1.0)


def ma_ode_residual_t(t, params, step: float = 1e-4) -> float:
    """Residual of the Monge-Ampère ODE written in the ``t`` coordinate."""
    p = _as_params(params)
    eps = p.epsilon

    def cube(tt):
        return fprime(eps * math.sqrt(math.cosh(tt)), p) ** 3

    h = min(step, t / 4.0)
    deriv = (cube(t - 2 * h) - 8 * cube(t - h) + 8 * cube(t + h) - cube(t + 2 * h)) / (12 * h)
    return abs(eps ** 2 * math.cosh(t) * cube(t) + eps ** 2 * math.sinh(t) / 3.0 * deriv - 1.0)


# --------------------------------------------------------------------------
# distance function

def rho_of_r(r, params) -> float:
    """Geodesic distance to the zero section, ``∫_ε^r l/(2𝒢) dl``.

    The substitution ``u = √(l²-ε²)`` removes the endpoint square root; the
    integrand ``u/(2𝒢)`` is smooth up to ``u = 0``.
    """
    p = _as_params(params)
    eps = p.epsilon
    if r < eps:
        raise DomainError(f"r={r} below the zero section")
    if p.is_cone:
        return 1.5 ** (2.0 / 3.0) * r ** (2.0 / 3.0)
    if r == eps:
        return 0.0
    umax = math.sqrt((r - eps) * (r + eps))

    def integrand(u):
        if u == 0.0:
            return 0.5 * eps ** (2.0 / 3.0) / math.sqrt(2.0)
        t = 2.0 * math.asinh(u / (math.sqrt(2.0) * eps))
        return u / (2.0 * float(_g_of_t(t, eps)))

    pieces = np.unique(np.r_[0.0, np.geomspace(min(umax, eps) * 1e-3, umax, 12)])
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, _ = quad(integrand, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        total += val
    return total


# --------------------------------------------------------------------------
# series in t about the zero section

def _poly_compose(outer: np.ndarray, inner: np.ndarray, n: int) -> np.ndarray:
    """Truncated ``outer(inner(x))`` with ``inner[0] == 0``."""
    out = np.zeros(n)
    power = np.zeros(n)
    power[0] = 1.0
    for c in outer[:n]:
        out += c * power
        power = np.convolve(power, inner)[:n]
    return out


def _series_reciprocal(a: np.ndarray) -> np.ndarray:
    return ScalarJet.from_taylor(a).__pow__(-1.0).coeffs


@dataclass(frozen=True)
class SmallRhoSeries:
    """``h²(ρ) = ρ² ψ(ρ)`` and ``t(ρ)`` as power series in ρ."""

    psi: np.ndarray
    t_of_rho: np.ndarray

    def psi_at(self, rho):
        return np.polynomial.polynomial.polyval(rho, self.psi)

    def h2_at(self, rho):
        return rho * rho * self.psi_at(rho)


def small_rho_series(params, order: int = 12) -> SmallRhoSeries:
    """Power series of ψ(ρ) = h²/ρ² and of t(ρ) near the zero section.

    Built from Taylor series in ``t``: with ``S = sinh t / t`` and
    ``K = (3 k(cosh t) / 2t³)^{1/3}`` one has ``ρ = (ε^{2/3}/2) ∫ S/K dt`` and
    ``h² = (ε^{4/3}/4) t² S K``; the ``ρ`` series is then reverted.
    """
    p = _as_params(params)
    if p.is_cone:
        raise DomainError("no zero section on the cone")
    eps = p.epsilon
    n = order + 2
    fact = np.array([math.factorial(i) for i in range(2 * n + 4)], dtype=float)
    S = np.array([1.0 / fact[i + 1] if i % 2 == 0 else 0.0 for i in range(n)])
    # k(cosh t)/t³ = Σ_{odd m≥3} 2^{m-1} t^{m-3}/m!
    kser = np.array([2.0 ** (i + 2) / fact[i + 3] if i % 2 == 0 else 0.0 for i in range(n)])
    K = ScalarJet.from_taylor(1.5 * kser) ** (1.0 / 3.0)
    integrand = (ScalarJet.from_taylor(S) / K).coeffs
    P = np.r_[0.0, integrand[: n - 1] / np.arange(1, n)]
    # revert P(t) = t + …  by fixed point t = x - (P(t) - t)
    x = np.zeros(n)
    x[1] = 1.0
    tser = x.copy()
    for _ in range(n):
        tser = x - (_poly_compose(P, tser, n) - tser)
    h2_over_t2 = (ScalarJet.from_taylor(S) * K).coeffs
    t2 = np.convolve(tser, tser)[:n]
    h2_in_x = np.convolve(_poly_compose(h2_over_t2, tser, n), t2)[:n]
    # ψ(P) = h2/(P²) with normalised units (ε^{4/3}/4 cancels)
    psi_in_x = h2_in_x[2:]
    scale = 2.0 / eps ** (2.0 / 3.0)
    psi = psi_in_x * scale ** np.arange(n - 2)
    t_rho = tser * scale ** np.arange(n)
    return SmallRhoSeries(psi=psi[: order + 1], t_of_rho=t_rho[: order + 1])


# --------------------------------------------------------------------------
# tabulated profiles

class FlatProfile:
    """Euclidean ℝ³ radial data, ``h(ρ) = ρ``; the BPS reference geometry."""

    epsilon = 1.0
    psi_coeffs = np.array([1.0])
    rho_max = math.inf

    def h2(self, rho, extrapolate: bool = False):
        rho = np.asarray(rho, dtype=float)
        return rho * rho

    def tail_integral(self, rho: float) -> float:
        return 1.0 / (2.0 * rho)

    def tail_power_law(self, rho: float) -> float:
        return self.tail_integral(rho)

    def __repr__(self) -> str:
        return "FlatProfile()"


@dataclass(frozen=True)
class _Table:
    t: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    Fprime: np.ndarray
    G: np.ndarray
    Gdot: np.ndarray
    h2: np.ndarray
    Rplus: np.ndarray
    Rminus: np.ndarray


class GeometryProfile:
    """Tabulated Stenzel radial data for one ε with ρ ↔ r interpolation.

    Built on a ``t``-grid refined logarithmically near the zero section.
    ``h²(ρ)`` is interpolated as ``log(h²/ρ²)`` by cubic Hermite splines
    with exact slopes; below the first node the small-ρ series is used.
    """

    def __init__(self, params, rho_max: float = 800.0, n_log: int = 400,
                 dt: float = 0.01, series_order: int = 12):
        p = _as_params(params)
        if p.is_cone:
            raise DomainError("profiles are built for ε > 0")
        if rho_max <= 0:
            raise ValueError("rho_max must be positive")
        self.params = p
        self.epsilon = p.epsilon
        self.series = small_rho_series(p, series_order)
        self.psi_coeffs = self.series.psi
        eps = p.epsilon
        # t where the leading large-ρ law reaches rho_max, plus margin
        x_max = (rho_max / (3.0 * (eps ** 2 / 12.0) ** (1.0 / 3.0))) ** 3 * 1.2 + 2.0
        t_max = math.acosh(x_max) + 0.1
        t_lo = 1e-3
        t = np.unique(np.r_[np.geomspace(t_lo, 0.5, n_log, endpoint=False),
                            np.arange(0.5, t_max + dt, dt)])
        self._table = self._tabulate(t)
        self.rho_max = float(self._table.rho[-1])
        tb = self._table
        dtdrho = 4.0 * tb.G / (eps ** 2 * np.sinh(tb.t))
        self._t_spline = CubicHermiteSpline(tb.rho, tb.t, dtdrho)
        dlogh2_dt = 1.0 / np.tanh(tb.t) + eps ** 4 * np.sinh(tb.t) ** 2 / (8.0 * tb.G ** 3)
        y = np.log(tb.h2 / tb.rho ** 2)
        dy = dlogh2_dt * dtdrho - 2.0 / tb.rho
        self._y_spline = CubicHermiteSpline(tb.rho, y, dy)
        self._rho_min = float(tb.rho[0])

    def _tabulate(self, t: np.ndarray) -> _Table:
        eps = self.epsilon
        nodes, weights = np.polynomial.legendre.leggauss(16)
        edges = np.r_[0.0, t]
        a, b = edges[:-1, None], edges[1:, None]
        tq = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        integrand = eps ** 2 * np.sinh(tq) / (4.0 * _g_of_t(tq, eps))
        seg = 0.5 * (b - a)[:, 0] * (integrand @ weights)
        rho = np.cumsum(seg)
        G = _g_of_t(t, eps)
        rm = eps * np.sinh(t / 2.0)
        rp = eps * np.cosh(t / 2.0)
        r = eps * np.sqrt(np.cosh(t))
        Gdot = r * rp * rm / (2.0 * G ** 2)
        h2 = rp * rm * G / eps ** 2
        return _Table(t, r, rho, G / (rp * rm), G, Gdot, h2, rp, rm)

    # table access -----------------------------------------------------------
    @property
    def table(self) -> _Table:
        return self._table

    def points(self) -> list[RadialPoint]:
        tb = self._table
        return [RadialPoint(*(float(getattr(tb, f)[i]) for f in
                              ("r", "t", "Fprime", "G", "Gdot", "rho", "h2", "Rplus", "Rminus")))
                for i in range(len(tb.t))]

    # interpolation ------------------------------------------------------------
    def t_of_rho(self, rho):
        rho = np.asarray(rho, dtype=float)
        self._check_rho(rho, extrapolate=False)
        small = rho < self._rho_min
        out = self._t_spline(np.clip(rho, self._rho_min, None))
        if np.any(small):
            out = np.where(small, np.polynomial.polynomial.polyval(rho, self.series.t_of_rho), out)
        return out

    def r_of_rho(self, rho):
        return self.epsilon * np.sqrt(np.cosh(self.t_of_rho(rho)))

    def rho_of_r(self, r):
        """Direct quadrature of ρ(r); inverse of :meth:`r_of_rho`."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([rho_of_r(float(x), self.params) for x in r])
        return out if out.size > 1 else float(out[0])

    def _check_rho(self, rho, extrapolate: bool) -> None:
        if np.any(rho < 0):
            raise DomainError("ρ must be non-negative")
        if not extrapolate and np.any(rho > self.rho_max):
            raise ExtrapolationError(
                f"ρ={np.max(rho):.6g} beyond table end {self.rho_max:.6g}; "
                "pass extrapolate=True for the c₅ρ⁵ law")

    def h2(self, rho, extrapolate: bool = False):
        """h²(ρ); beyond the table only with ``extrapolate=True`` (c₅ ρ⁵ law)."""
        rho = np.asarray(rho, dtype=float)
        self._check_rho(rho, extrapolate)
        inside = np.clip(rho, self._rho_min, self.rho_max)
        out = inside ** 2 * np.exp(self._y_spline(inside))
        small = rho < self._rho_min
        if np.any(small):
            out = np.where(small, self.series.h2_at(rho), out)
        if extrapolate:
            big = rho > self.rho_max
            if np.any(big):
                out = np.where(big, self.c5 * rho ** 5, out)
        return out

    def h2_direct(self, r) -> float:
        """(1/ε²) R₊R₋𝒢 at ``r`` without interpolation."""
        rp, rm = _rplus_rminus(r, self.params)
        return rp * rm * g_fn(r, self.params) / self.epsilon ** 2

    # asymptotics --------------------------------------------------------------
    def _window(self, lo_frac: float = 0.6):
        tb = self._table
        mask = tb.rho >= lo_frac * self.rho_max
        return tb.rho[mask], tb.h2[mask]

    @cached_property
    def c5(self) -> float:
        """Least-squares coefficient of ``h² ≈ c₅ ρ⁵`` on [0.6ρmax, ρmax]."""
        rho, h2 = self._window()
        return float(np.sum(h2 * rho ** 5) / np.sum(rho ** 10))

    def fit_large_exponent(self, lo_frac: float = 0.6) -> float:
        rho, h2 = self._window(lo_frac)
        slope, _ = np.polyfit(np.log(rho), np.log(h2), 1)
        return float(slope)

    def tail_integral(self, rho: float) -> float:
        """``∫_ρ^∞ dρ'/(2h²) = (ε²/4) ∫_{t(ρ)}^∞ 𝒢(t)⁻² dt`` by quadrature."""
        if rho <= 0:
            raise DomainError("tail integral diverges at ρ = 0")
        eps = self.epsilon
        if rho <= self.rho_max:
            t0 = float(self.t_of_rho(rho))
        else:
            x = (rho / (3.0 * (eps ** 2 / 12.0) ** (1.0 / 3.0))) ** 3
            t0 = math.acosh(max(x, 1.0))

        def f(t):
            return float(_g_of_t(t, eps)) ** -2

        a, _ = quad(f, t0, t0 + 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
        b, _ = quad(f, t0 + 1.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
        return 0.25 * eps ** 2 * (a + b)

    def tail_power_law(self, rho: float) -> float:
        """Leading-order estimate ``1/(8 c₅ ρ⁴)`` of :meth:`tail_integral`."""
        return 1.0 / (8.0 * self.c5 * rho ** 4)

    # export ---------------------------------------------------------------------
    def to_csv(self, stride: int = 1) -> str:
        tb = self._table
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        cols = ("r", "t", "rho", "Fprime", "G", "Gdot", "h2", "Rplus", "Rminus")
        writer.writerow(cols)
        for i in range(0, len(tb.t), stride):
            writer.writerow([f"{float(getattr(tb, c)[i]):.12g}" for c in cols])
        return buf.getvalue()

    def __repr__(self) -> str:
        return f"GeometryProfile(epsilon={self.epsilon}, rho_max={self.rho_max:.4g})"


def build_profile(epsilon: float = 1.0, rho_max: float = 800.0, **kw) -> GeometryProfile:
    return GeometryProfile(GeometryParams(epsilon), rho_max=rho_max, **kw)
