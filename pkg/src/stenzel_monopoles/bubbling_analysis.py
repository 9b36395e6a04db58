"""Large-mass limits of the invariant monopoles.

Two comparisons on the radial profile of the mass ``-λ`` solution:

* rescaled near the zero section, ``(a(ηρ̃), ηφ(ηρ̃))`` against the flat BPS
  profile of mass ``-1`` on the ball ``ρ̃ ≤ R``;
* mass-recentred away from it, ``φ - m`` against the zero-mass Dirac field
  ``∫_ρ^∞ dρ'/(2h²)`` on an annulus, together with ``|a|``.

Convergence is asserted only over the computed λ grid.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .monopole_ode import (
    SolutionProfile,
    flat_oracle,
    integrate_reduced,
    reduced_series,
    shoot_for_mass,
)
from .stenzel_geometry import FlatProfile

__all__ = [
    "BubbleRow",
    "BubbleReport",
    "ReducedSolution",
    "solve_mass",
    "bps_comparison",
    "bps_eta_scan",
    "dirac_comparison",
    "flat_scale_covariance",
    "bubble_row",
    "bubble_report",
]


@dataclass
class ReducedSolution:
    """Reduced trajectory evaluable on ``(0, ρ_end]``.

    Below the seed radius the regular power series is used.
    """

    alpha: float
    mass: float
    traj: SolutionProfile = field(repr=False)
    a_series: np.ndarray = field(repr=False)
    phi_series: np.ndarray = field(repr=False)

    @property
    def rho0(self) -> float:
        return float(self.traj.rho[0])

    def __call__(self, rho) -> tuple[np.ndarray, np.ndarray]:
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if np.any(rho <= 0) or np.any(rho > self.traj.rho_end * (1 + 1e-12)):
            raise ValueError(f"ρ outside (0, {self.traj.rho_end:.4g}]")
        a = np.empty_like(rho)
        phi = np.empty_like(rho)
        inner = rho < self.rho0
        P = np.polynomial.polynomial.polyval
        a[inner] = P(rho[inner], self.a_series)
        phi[inner] = P(rho[inner], self.phi_series)
        if np.any(~inner):
            loga, ph = self.traj.dense(rho[~inner])
            a[~inner] = np.exp(loga)
            phi[~inner] = ph
        return a, phi


def solve_mass(target_m: float, profile, rho_max: float, tol: float = 1e-8,
               ode_tol: float = 1e-11) -> ReducedSolution:
    """Shoot for mass ``target_m`` and integrate the solution to ``rho_max``."""
    if isinstance(profile, FlatProfile):
        alpha = -2.0 * target_m ** 2 / 3.0
        mass = target_m
    else:
        shot = shoot_for_mass(target_m, profile, tol=tol, ode_tol=ode_tol)
        alpha, mass = shot.alpha, shot.mass
    traj = integrate_reduced(alpha, profile, rho_max=rho_max, tol=ode_tol)
    a_ser, phi_ser = reduced_series(alpha, profile)
    return ReducedSolution(alpha, mass, traj, a_ser, phi_ser)


def _ball_grid(R: float, n: int) -> np.ndarray:
    # half-open (0, R]; the origin is covered by the limit (a, φ) → (1, 0)
    return np.linspace(R / n, R, n)


def bps_comparison(sol: ReducedSolution, R: float = 3.0, eta: float | None = None,
                   n: int = 300) -> float:
    """``sup_{ρ̃≤R} |a(ηρ̃) - a_BPS(ρ̃)| + |ηφ(ηρ̃) - φ_BPS(ρ̃)|`` with ``η = 1/|m|``."""
    lam = -sol.mass
    if not lam > 0:
        raise ValueError("need a negative mass")
    eta = 1.0 / lam if eta is None else eta
    if eta <= 0:
        raise ValueError("eta must be positive")
    if eta * R > sol.traj.rho_end:
        raise ValueError("solved range shorter than ηR")
    x = _ball_grid(R, n)
    a, phi = sol(eta * x)
    ref = flat_oracle(1.0, x)
    return float(np.max(np.abs(a - ref.a) + np.abs(eta * phi - ref.phi)))


def bps_eta_scan(sol: ReducedSolution, R: float = 3.0, n_eta: int = 21) -> tuple[float, float]:
    """Minimise the BPS error over η in a decade around ``1/|m|``."""
    lam = -sol.mass
    etas = np.geomspace(10 ** -0.5 / lam, 10 ** 0.5 / lam, n_eta)
    etas = etas[etas * R <= sol.traj.rho_end]
    errs = [bps_comparison(sol, R, e) for e in etas]
    i = int(np.argmin(errs))
    return float(etas[i]), float(errs[i])


def dirac_comparison(sol: ReducedSolution, profile, annulus=(1.0, 3.0),
                     n: int = 60) -> tuple[float, float]:
    """Errors against the zero-mass Dirac field on an annulus.

    Returns ``(sup |φ - m - φ_D| + |a|, sup |φ' - φ_D'| + |a'|)`` where
    ``φ_D = ∫_ρ^∞ dρ'/(2h²)``.
    """
    lo, hi = annulus
    if not 0 < lo < hi:
        raise ValueError("annulus must satisfy 0 < ρ₁ < ρ₂")
    rho = np.linspace(lo, hi, n)
    a, phi = sol(rho)
    dirac = np.array([profile.tail_integral(float(x)) for x in rho])
    h2 = np.asarray(profile.h2(rho), dtype=float)
    value_err = np.abs(phi - sol.mass - dirac) + np.abs(a)
    # φ' - φ_D' = a²/(2h²) and a' = 2φa
    deriv_err = a * a / (2.0 * h2) + np.abs(2.0 * phi * a)
    return float(np.max(value_err)), float(np.max(deriv_err))


def flat_scale_covariance(lam: float, R: float = 3.0, n: int = 300,
                          tol: float = 1e-11) -> float:
    """Pipeline error of ``(a, φ)(ρ) ↦ (a(ρ/λ), φ(ρ/λ)/λ)`` in flat space.

    Both the mass ``-λ`` and the mass ``-1`` solutions are integrated; the
    rescaled first must reproduce the second.
    """
    flat = FlatProfile()
    big = solve_mass(-lam, flat, rho_max=1.01 * R / lam, ode_tol=tol)
    unit = solve_mass(-1.0, flat, rho_max=1.01 * R, ode_tol=tol)
    x = _ball_grid(R, n)
    a_big, phi_big = big(x / lam)
    a_unit, phi_unit = unit(x)
    return float(np.max(np.abs(a_big - a_unit) + np.abs(phi_big / lam - phi_unit)))


@dataclass(frozen=True)
class BubbleRow:
    lam: float
    eta: float
    alpha: float
    mass: float
    bps_error: float
    dirac_error: float
    dirac_derivative_error: float
    eta_best: float
    bps_error_best: float


def bubble_row(lam: float, profile, R: float = 3.0, annulus=(1.0, 3.0),
               tol: float = 1e-8) -> BubbleRow:
    reach = max(annulus[1], 3.0 * R / lam)
    sol = solve_mass(-lam, profile, rho_max=reach, tol=tol)
    bps = bps_comparison(sol, R)
    dval, dder = dirac_comparison(sol, profile, annulus)
    eta_best, err_best = bps_eta_scan(sol, R)
    return BubbleRow(lam, 1.0 / lam, sol.alpha, sol.mass, bps, dval, dder, eta_best, err_best)


@dataclass
class BubbleReport:
    rows: list

    COLUMNS = ("lam", "eta", "alpha", "mass", "bps_error", "dirac_error",
               "dirac_derivative_error", "eta_best", "bps_error_best")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def strictly_decreasing(self, name: str) -> bool:
        return bool(np.all(np.diff(self.column(name)) < 0))

    def decreasing_from(self, name: str) -> float:
        """Smallest λ on the grid beyond which ``name`` is non-increasing."""
        col = self.column(name)
        lams = self.column("lam")
        for i in range(len(col)):
            if np.all(np.diff(col[i:]) <= 0):
                return float(lams[i])
        return math.inf

    def to_records(self) -> list[dict]:
        return [asdict(r) for r in self.rows]


def bubble_report(lambdas, profile, R: float = 3.0, annulus=(1.0, 3.0),
                  mapper=map) -> BubbleReport:
    """Rows for each λ; ``mapper`` may be a pool's ordered map."""
    lambdas = sorted(float(x) for x in lambdas)
    rows = list(mapper(_RowJob(profile, R, tuple(annulus)), lambdas))
    return BubbleReport(rows)


@dataclass(frozen=True)
class _RowJob:
    profile: object
    R: float
    annulus: tuple

    def __call__(self, lam: float) -> BubbleRow:
        return bubble_row(lam, self.profile, self.R, self.annulus)
