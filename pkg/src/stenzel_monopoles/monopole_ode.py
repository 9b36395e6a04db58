"""Radial ODE systems for invariant monopoles and their shooting solution.

Three equivalent formulations in the geodesic coordinate ρ:

* the full system for ``(φ, B₁, …, B₅)`` with ``B₁ = 𝒢²A₁``,
  ``B₂,₃ = R₋A₂,₃`` and ``B₄,₅ = R₊A₄,₅``;
* the complexified system in ``f₁ = B₂ + iB₃``, ``f₂ = B₄ + iB₅``;
* the reduced system for ``(a, φ)`` with ``a = (2/ε)B₄``, governing the
  solutions that extend over the zero section.

Sign convention: φ ≤ 0 along regular solutions and the mass is
``m = lim φ < 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, astuple
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .stenzel_geometry import FlatProfile, GeometryProfile

__all__ = [
    "IntegrationError",
    "MassExtractionError",
    "BracketError",
    "FullState",
    "ReducedState",
    "ShootResult",
    "SolutionProfile",
    "full_rhs",
    "complex_rhs",
    "reduced_rhs",
    "four_field_rhs",
    "reduced_series",
    "series_seed",
    "integrate",
    "integrate_reduced",
    "integrate_full",
    "extract_mass",
    "mass_of_alpha",
    "shoot_for_mass",
    "series_recurrence",
    "flat_oracle",
    "b1_rigidity_harness",
    "RigidityReport",
    "FlatProfile",
]


class IntegrationError(RuntimeError):
    """Integrator failure: step-size underflow or non-finite state."""


class MassExtractionError(RuntimeError):
    """The trajectory did not decay far enough for a mass read-out."""


class BracketError(RuntimeError):
    """No α bracket for the requested mass."""


# --------------------------------------------------------------------------
# states

@dataclass(frozen=True)
class FullState:
    phi: float
    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0
    b4: float = 0.0
    b5: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, y) -> "FullState":
        return cls(*(float(v) for v in y))

    @property
    def constraint(self) -> float:
        return self.b2 * self.b4 + self.b3 * self.b5

    @property
    def f1(self) -> complex:
        return complex(self.b2, self.b3)

    @property
    def f2(self) -> complex:
        return complex(self.b4, self.b5)


@dataclass(frozen=True)
class ReducedState:
    a: float
    phi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.phi])

    def embed(self, epsilon: float) -> FullState:
        """Full-system state with ``B₄ = (ε/2)a`` and the other B's zero."""
        return FullState(phi=self.phi, b4=0.5 * epsilon * self.a)


# --------------------------------------------------------------------------
# right-hand sides

def _h2(profile, rho):
    return float(profile.h2(rho))


def _check_rho(rho: float) -> None:
    if not rho > 0:
        raise ValueError(f"ρ must be positive, got {rho}")


def _full_rhs_array(rho: float, y: np.ndarray, h2: float, eps: float) -> np.ndarray:
    phi, b1, b2, b3, b4, b5 = y
    k = 2.0 / (eps * eps * h2)
    dphi = -(1.0 - 4.0 / (eps * eps) * ((b4 * b4 + b5 * b5) - (b2 * b2 + b3 * b3))) / (2.0 * h2)
    return np.array([
        dphi,
        -4.0 * (b2 * b5 - b4 * b3),
        -k * b1 * b5 - 2.0 * phi * b2,
        k * b1 * b4 - 2.0 * phi * b3,
        k * b1 * b3 + 2.0 * phi * b4,
        -k * b1 * b2 + 2.0 * phi * b5,
    ])


def full_rhs(rho: float, s: FullState, profile) -> FullState:
    """ρ-derivative of the six rescaled fields."""
    _check_rho(rho)
    h2 = _h2(profile, rho)
    if not h2 > 0:
        raise ValueError("h² must be positive")
    return FullState.from_array(_full_rhs_array(rho, s.as_array(), h2, profile.epsilon))


def complex_rhs(rho: float, state: dict, profile) -> dict:
    """Complexified system; ``state`` has keys phi, b1 (real) and f1, f2 (complex)."""
    _check_rho(rho)
    h2 = _h2(profile, rho)
    eps = profile.epsilon
    phi, b1 = state["phi"], state["b1"]
    f1, f2 = complex(state["f1"]), complex(state["f2"])
    k = 2.0 / (eps * eps * h2)
    return {
        "phi": -(1.0 - 4.0 / (eps * eps) * (abs(f2) ** 2 - abs(f1) ** 2)) / (2.0 * h2),
        "b1": 4.0 * (f1 * f2.conjugate()).imag,
        "f1": 1j * k * b1 * f2 - 2.0 * phi * f1,
        "f2": -1j * k * b1 * f1 + 2.0 * phi * f2,
    }


def reduced_rhs(rho: float, s: ReducedState, profile) -> ReducedState:
    """``dφ/dρ = -(1-a²)/(2h²)``, ``da/dρ = 2φa``."""
    _check_rho(rho)
    h2 = _h2(profile, rho)
    return ReducedState(a=2.0 * s.phi * s.a, phi=-(1.0 - s.a * s.a) / (2.0 * h2))


def four_field_rhs(rho: float, y, profile, k_parity: int = 0) -> np.ndarray:
    """System for ``(φ, B₁, B₃, B₄)`` in the gauge ``B₂ = B₅ = 0``."""
    _check_rho(rho)
    phi, b1, b3, b4 = y
    h2 = _h2(profile, rho)
    eps = profile.epsilon
    sgn = -1.0 if k_parity % 2 else 1.0
    k = 2.0 * sgn / (eps * eps * h2)
    return np.array([
        -(1.0 - 4.0 / (eps * eps) * (b4 * b4 - b3 * b3)) / (2.0 * h2),
        4.0 * sgn * b3 * b4,
        k * b1 * b4 - 2.0 * phi * b3,
        k * b1 * b3 + 2.0 * phi * b4,
    ])


# --------------------------------------------------------------------------
# series at the singular origin

def _psi_series(profile, n: int) -> np.ndarray:
    psi = np.zeros(n)
    c = np.asarray(profile.psi_coeffs, dtype=float)[:n]
    psi[: len(c)] = c
    return psi


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: len(a)]


def _recip(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[0] = 1.0 / a[0]
    for k in range(1, len(a)):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1][:k]) / a[0]
    return out


def reduced_series(alpha: float, profile, order: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Power series of ``a`` and ``φ`` about ρ = 0 with ``a = 1 + αρ² + …``.

    At even order ``n ≥ 4`` the pair ``(a_n, φ_{n-1})`` solves the 2×2 system

        n a_n - 2φ_{n-1} = 2[φ a]_{n-1},   (n-1)φ_{n-1} - a_n = -½[(1-a²)/ψ]_n,

    with the unknowns removed from the brackets; the determinant is
    ``(n-2)(n+1)``, so ``n = 2`` is the free order.
    """
    n = order + 1
    q = _recip(_psi_series(profile, n))
    a = np.zeros(n)
    phi = np.zeros(n)
    a[0] = 1.0
    if n > 2:
        a[2] = alpha
        phi[1] = alpha
    for m in range(4, n, 2):
        r1 = 2.0 * _mul(phi, a)[m - 1]
        one_minus = -_mul(a, a)
        one_minus[0] += 1.0
        r2 = -0.5 * _mul(one_minus, q)[m]
        # r2 already excludes a_m (zero); the a_m part of the bracket is +a_m
        mat = np.array([[m, -2.0], [-1.0, m - 1.0]])
        a[m], phi[m - 1] = np.linalg.solve(mat, [r1, r2])
    return a, phi


def series_seed(alpha: float, rho0: float, profile, order: int = 10,
                max_scaled_radius: float = 0.1) -> ReducedState:
    """Reduced state at ``rho0`` from the regular power series.

    Requires ``rho0 ≤ max_scaled_radius · min(1, |α|^{-1/2}, ε^{2/3})`` so that
    the truncated series is accurate to round-off.
    """
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    limit = max_scaled_radius * min(1.0, abs(alpha) ** -0.5 if alpha else 1.0,
                                    getattr(profile, "epsilon", 1.0) ** (2.0 / 3.0))
    if rho0 > limit:
        raise ValueError(f"rho0={rho0:.3g} outside series validity (≤ {limit:.3g})")
    a, phi = reduced_series(alpha, profile, order)
    P = np.polynomial.polynomial.polyval
    return ReducedState(a=float(P(rho0, a)), phi=float(P(rho0, phi)))


def series_recurrence(phi_coeffs, b2: float, n_terms: int = 12) -> np.ndarray:
    """Coefficients ``b_i`` of ``B₁ = Σ b_i ρ^i`` solving ``B₁'' = (Σφ_jρ^{j-2}) B₁``.

    ``b₀ = b₁ = 0`` and ``b₂`` is free; resonant denominators raise.
    """
    phi = np.zeros(n_terms)
    pc = np.asarray(phi_coeffs, dtype=float)[:n_terms]
    phi[: len(pc)] = pc
    b = np.zeros(n_terms)
    if n_terms > 2:
        b[2] = b2
    for i in range(1, n_terms - 2):
        denom = (i + 1) * (i + 2) - phi[0]
        if denom == 0:
            raise ZeroDivisionError(f"resonant denominator at i={i}")
        b[i + 2] = sum(phi[j] * b[i + 2 - j] for j in range(1, i + 1)) / denom
    return b


# --------------------------------------------------------------------------
# closed-form flat oracle

def flat_oracle(mu: float, rho) -> ReducedState:
    """Mass ``-μ`` BPS solution of the reduced system with ``h = ρ``."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    x = 2.0 * mu * np.asarray(rho, dtype=float)
    if np.any(x <= 0):
        raise ValueError("rho must be positive")
    small = x < 1e-3
    xs = np.where(small, x, 1.0)
    xl = np.where(small, 1.0, x)
    # x/sinh x and 1/x - coth x with series near 0
    a = np.where(small, 1 - xs ** 2 / 6 + 7 * xs ** 4 / 360, xl / np.sinh(np.minimum(xl, 700)))
    a = np.where(x > 700, 0.0, a)
    g = np.where(small, -xs / 3 + xs ** 3 / 45, 1.0 / xl - 1.0 / np.tanh(xl))
    phi = mu * g
    if np.ndim(rho) == 0:
        return ReducedState(float(a), float(phi))
    return ReducedState(a, phi)


# --------------------------------------------------------------------------
# integration

@dataclass
class SolutionProfile:
    """Solved trajectory sampled on a ρ-grid.

    ``kind`` is ``"reduced"`` (columns a, φ), ``"full"`` (φ, B₁…B₅) or
    ``"four"`` (φ, B₁, B₃, B₄).
    """

    kind: str
    rho: np.ndarray
    y: np.ndarray
    epsilon: float
    alpha: float | None = None
    nfev: int = 0
    steps: int = 0
    constraint_drift: float = 0.0
    status: str = "ok"
    dense: Callable | None = field(default=None, repr=False)

    @property
    def rho_end(self) -> float:
        return float(self.rho[-1])

    def column(self, name: str) -> np.ndarray:
        names = {"reduced": ("a", "phi"),
                 "full": ("phi", "b1", "b2", "b3", "b4", "b5"),
                 "four": ("phi", "b1", "b3", "b4")}[self.kind]
        return self.y[names.index(name)]

    @property
    def phi(self) -> np.ndarray:
        return self.column("phi")

    @property
    def a(self) -> np.ndarray:
        if self.kind == "reduced":
            return self.column("a")
        return 2.0 / self.epsilon * self.column("b4")

    def b_fields(self) -> dict:
        """B₁…B₅ on the grid (zero where the formulation omits them)."""
        z = np.zeros_like(self.rho)
        if self.kind == "reduced":
            return {"b1": z, "b2": z, "b3": z, "b4": 0.5 * self.epsilon * self.column("a"), "b5": z}
        if self.kind == "four":
            return {"b1": self.column("b1"), "b2": z, "b3": self.column("b3"),
                    "b4": self.column("b4"), "b5": z}
        return {k: self.column(k) for k in ("b1", "b2", "b3", "b4", "b5")}

    def connection_coefficients(self, profile: GeometryProfile) -> dict:
        """A₁…A₅ and φ on the grid, through ``r(ρ)`` of the profile."""
        eps = profile.epsilon
        t = profile.t_of_rho(self.rho)
        rp = eps * np.cosh(t / 2.0)
        rm = eps * np.sinh(t / 2.0)
        G = profile.h2(self.rho) * eps ** 2 / (rp * rm)
        b = self.b_fields()
        return {"r": eps * np.sqrt(np.cosh(t)), "a1": b["b1"] / G ** 2,
                "a2": b["b2"] / rm, "a3": b["b3"] / rm,
                "a4": b["b4"] / rp, "a5": b["b5"] / rp, "phi": self.phi}


def integrate(rhs: Callable, seed, rho0: float, rho_max: float, tol: float = 1e-11,
              rho_grid=None, events=None, kind: str = "reduced", epsilon: float = 1.0,
              atol: float | None = None) -> SolutionProfile:
    """Adaptive DOP853 integration of ``y' = rhs(ρ, y)`` on ``[rho0, rho_max]``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not rho_max > rho0:
        raise ValueError("need rho_max > rho0")
    y0 = np.asarray(seed.as_array() if hasattr(seed, "as_array") else seed, dtype=float)

    def wrapped(rho, y):
        out = rhs(rho, y)
        if not np.all(np.isfinite(out)):
            raise IntegrationError(f"non-finite derivative at ρ={rho:.6g}")
        return out

    sol = solve_ivp(wrapped, (rho0, rho_max), y0, method="DOP853", rtol=tol,
                    atol=tol * 1e-3 if atol is None else atol, dense_output=True,
                    events=events)
    if sol.status == -1:
        raise IntegrationError(f"integration failed near ρ={sol.t[-1]:.6g}: {sol.message}")
    end = float(sol.t[-1])
    if rho_grid is None:
        grid = sol.t
        y = sol.y
    else:
        grid = np.asarray(rho_grid, dtype=float)
        grid = grid[(grid >= rho0) & (grid <= end)]
        y = sol.sol(grid)
    status = "event" if sol.status == 1 else "ok"
    return SolutionProfile(kind, grid, y, epsilon, nfev=sol.nfev, steps=len(sol.t) - 1,
                           status=status, dense=sol.sol)


def _reduced_array_rhs(profile):
    h2 = profile.h2

    def rhs(rho, y):
        # y = (log a, φ): a > 0 is built in and 1 - a² = -expm1(2 log a)
        loga, phi = y
        return np.array([2.0 * phi, math.expm1(2.0 * loga) / (2.0 * float(h2(rho)))])
    return rhs


def integrate_reduced(alpha: float, profile, rho0: float = 1e-2, rho_max: float | None = None,
                      tol: float = 1e-11, rho_grid=None, decay: float | None = None,
                      series_order: int = 10) -> SolutionProfile:
    """Integrate the reduced system from the series seed with parameter α.

    The integration variable is ``log a``, so exponentially small ``a`` keeps
    full relative precision.  With ``decay`` set, integration stops once
    ``a`` falls below it.  The seed radius shrinks as ``0.1/√|α|`` for
    large |α|.
    """
    eps = getattr(profile, "epsilon", 1.0)
    rho0 = min(rho0, 0.1 * min(1.0, abs(alpha) ** -0.5 if alpha else 1.0, eps ** (2.0 / 3.0)))
    a_ser, phi_ser = reduced_series(alpha, profile, series_order)
    P = np.polynomial.polynomial.polyval
    # log a as a series avoids cancellation in a - 1 at the seed
    loga0 = float(np.log1p(P(rho0, np.r_[0.0, a_ser[1:]])))
    seed = series_seed(alpha, rho0, profile, series_order)
    if rho_max is None:
        rho_max = profile.rho_max
    events = None
    if decay is not None:
        log_decay = math.log(decay)

        def decayed(rho, y):
            return y[0] - log_decay
        decayed.terminal = True
        decayed.direction = -1
        events = [decayed]
    y0 = np.array([loga0, seed.phi])
    out = integrate(_reduced_array_rhs(profile), y0, rho0, rho_max, tol, rho_grid,
                    events=events, kind="reduced", epsilon=eps, atol=tol * 1e-3)
    out.log_a = out.y[0].copy()
    out.y = np.vstack([np.exp(out.y[0]), out.y[1]])
    out.alpha = alpha
    return out


def integrate_full(seed: FullState, profile, rho0: float, rho_max: float,
                   tol: float = 1e-11, rho_grid=None,
                   blowup: float | None = None) -> SolutionProfile:
    """Integrate the six-field system; records the drift of ``b2b4 + b3b5``.

    Generic seeds reach infinity at finite ρ.  With ``blowup`` set the run
    stops (status ``"event"``) once any field exceeds it in magnitude.
    """
    eps = profile.epsilon
    h2 = profile.h2

    def rhs(rho, y):
        return _full_rhs_array(rho, y, float(h2(rho)), eps)

    events = None
    if blowup is not None:
        def too_big(rho, y):
            return blowup - np.max(np.abs(y))
        too_big.terminal = True
        events = [too_big]
    out = integrate(rhs, seed, rho0, rho_max, tol, rho_grid, events=events, kind="full",
                    epsilon=eps)
    c = out.y[2] * out.y[4] + out.y[3] * out.y[5]
    out.constraint_drift = float(np.max(np.abs(c - c[0])))
    return out


# --------------------------------------------------------------------------
# mass

def extract_mass(traj: SolutionProfile, profile, decay: float = 1e-8) -> tuple[float, float]:
    """Mass ``φ(ρmax) - ∫_{ρmax}^∞ dρ/(2h²)`` and the tail magnitude.

    The neglected ``a²/(2h²)`` part of the tail is below ``decay²``.
    """
    a_end = float(traj.a[-1])
    if abs(a_end - 1.0) < 1e-14 and np.all(np.abs(traj.a - 1.0) < 1e-14):
        return float(traj.phi[-1]), 0.0
    if abs(a_end) > decay:
        raise MassExtractionError(
            f"a(ρmax={traj.rho_end:.4g}) = {a_end:.3g} has not decayed below {decay:g}; "
            "increase ρmax")
    tail = profile.tail_integral(traj.rho_end)
    return float(traj.phi[-1]) - tail, tail


@dataclass(frozen=True)
class ShootResult:
    alpha: float
    mass: float
    tail_estimate: float
    constraint_drift: float
    steps: int
    rho0: float = 0.0
    rho_max: float = 0.0
    iterations: int = 0


def mass_of_alpha(alpha: float, profile, rho0: float = 1e-2, rho_max: float | None = None,
                  tol: float = 1e-11, decay: float = 1e-12) -> ShootResult:
    """Integrate from the seed with parameter α and read off the mass.

    Without ``rho_max`` the run stops once ``a < decay`` (capped at the
    profile's table end).
    """
    if alpha == 0:
        return ShootResult(0.0, 0.0, 0.0, 0.0, 0, rho0, 0.0)
    if alpha > 0:
        raise ValueError("α > 0 gives solutions with a → ∞; no finite mass")
    traj = integrate_reduced(alpha, profile, rho0, rho_max, tol,
                             decay=None if rho_max is not None else decay)
    m, tail = extract_mass(traj, profile, decay=max(decay, 1e-8))
    return ShootResult(alpha, m, tail, 0.0, traj.steps, float(traj.rho[0]), traj.rho_end)


def shoot_for_mass(target_m: float, profile, tol: float = 1e-7, rho0: float = 1e-2,
                   ode_tol: float = 1e-11, alpha_floor: float = -1e6) -> ShootResult:
    """Find α with ``m(α) = target_m`` by bracketed root finding.

    m(α) is decreasing as α decreases; the bracket starts from the flat-space
    guess ``α = -2m²/3`` and is widened geometrically.
    """
    if not target_m < 0:
        raise ValueError("target mass must be negative (internal sign convention)")

    def f(alpha):
        return mass_of_alpha(alpha, profile, rho0, tol=ode_tol).mass - target_m

    guess = -2.0 * target_m ** 2 / 3.0
    lo = hi = guess
    flo = fhi = f(guess)
    it = 0
    while flo > 0:
        lo *= 4.0
        if lo < alpha_floor:
            raise BracketError(f"m(α) > {target_m} down to α={alpha_floor}")
        flo = f(lo)
        it += 1
    while fhi < 0:
        hi /= 4.0
        if hi > -1e-8:
            raise BracketError(f"m(α) < {target_m} up to α≈0")
        fhi = f(hi)
        it += 1
    if flo == 0:
        root = lo
    elif fhi == 0:
        root = hi
    else:
        root, info = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                            full_output=True, maxiter=200)
        it += info.iterations
    res = mass_of_alpha(root, profile, rho0, tol=ode_tol)
    if abs(res.mass - target_m) > tol:
        raise BracketError(f"shooting converged to m={res.mass} (target {target_m})")
    return ShootResult(res.alpha, res.mass, res.tail_estimate, res.constraint_drift,
                       res.steps, res.rho0, res.rho_max, it)


# --------------------------------------------------------------------------
# rigidity of B₁

@dataclass(frozen=True)
class RigidityReport:
    delta: float
    b1_exponent: float
    diverged: bool
    violates_extension: bool


def b1_rigidity_harness(delta: float, alpha: float, profile, rho0: float = 1e-3,
                        span: float = 10.0, tol: float = 1e-11) -> RigidityReport:
    """Seed the four-field system with ``B₁(ρ₀) = δρ₀³``, ``B₃ = 0``.

    Reports the log-log exponent of B₁ on ``[ρ₀, span·ρ₀]``; a value below 3
    (or a blow-up) violates the extension condition ``B₁ = O(ρ³)``.
    """
    eps = profile.epsilon
    s = series_seed(alpha, rho0, profile)
    y0 = np.array([s.phi, delta * rho0 ** 3, 0.0, 0.5 * eps * s.a])
    grid = np.geomspace(rho0, span * rho0, 40)
    try:
        traj = integrate(lambda r, y: four_field_rhs(r, y, profile), y0, rho0,
                         span * rho0, tol, grid, kind="four", epsilon=eps)
    except IntegrationError:
        return RigidityReport(delta, math.nan, True, True)
    b1 = np.abs(traj.column("b1"))
    half = len(grid) // 2
    slope = float(np.polyfit(np.log(grid[half:]), np.log(b1[half:]), 1)[0])
    return RigidityReport(delta, slope, False, slope < 3.0 - 0.05)

