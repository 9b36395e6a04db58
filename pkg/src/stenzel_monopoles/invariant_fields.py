"""Invariant connections and Higgs fields on the homogeneous bundles P_l.

Connections are written in radial gauge as ``A = A_c^l + (A - A_c^l)`` with
``A_c^l = -(l/2) θ⁶ ⊗ T₁`` and, for ``l = 1``, the Wang-type part

    A₁θ¹T₁ + (A₂θ² - A₃θ³ + A₄θ⁴ - A₅θ⁵)T₂ + (A₃θ² + A₂θ³ + A₅θ⁴ + A₄θ⁵)T₃.

Coefficients are :class:`ScalarJet` objects in ``r`` so that radial
derivatives enter the exterior derivative exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie_coframe import (
    InvariantForm,
    ScalarJet,
    apply_complex_structure,
    covariant_derivative,
    curvature,
    lie,
    monomial,
    theta,
    wedge,
)
from .stenzel_geometry import KahlerData

__all__ = [
    "InvariantConnection",
    "HiggsField",
    "MonopoleResiduals",
    "canonical_connection",
    "closed_form_curvature",
    "closed_form_covariant_derivative",
    "monopole_residuals",
    "ode_rhs_r",
    "fields_from_ode_state",
    "project_11",
]


def _jet(x, order: int = 1) -> ScalarJet:
    if isinstance(x, ScalarJet):
        return x
    return ScalarJet.constant(x, order)


@dataclass(frozen=True)
class InvariantConnection:
    """Radial-gauge invariant connection on ``P_l``."""

    l: int = 1
    a1: ScalarJet | float = 0.0
    a2: ScalarJet | float = 0.0
    a3: ScalarJet | float = 0.0
    a4: ScalarJet | float = 0.0
    a5: ScalarJet | float = 0.0
    r: float | None = None

    def __post_init__(self):
        if int(self.l) != self.l:
            raise ValueError("l must be an integer")
        if self.l != 1 and any(np.any(_jet(c).coeffs != 0)
                               for c in (self.a2, self.a3, self.a4, self.a5)):
            raise ValueError("for l != 1 only a1 may be nonzero")

    @property
    def jets(self) -> tuple[ScalarJet, ...]:
        order = max(_jet(c).order for c in (self.a1, self.a2, self.a3, self.a4, self.a5))
        return tuple(_jet(c, order) for c in (self.a1, self.a2, self.a3, self.a4, self.a5))

    def deviation(self) -> InvariantForm:
        """``A - A_c^l`` as an su(2)-valued 1-form."""
        a1, a2, a3, a4, a5 = self.jets
        t1 = theta(1, coef=a1)
        t2 = theta(2, coef=a2) - theta(3, coef=a3) + theta(4, coef=a4) - theta(5, coef=a5)
        t3 = theta(2, coef=a3) + theta(3, coef=a2) + theta(4, coef=a5) + theta(5, coef=a4)
        return lie(t1, 1) + lie(t2, 2) + lie(t3, 3)

    def form(self) -> InvariantForm:
        order = self.jets[0].order
        return canonical_form(self.l, order) + self.deviation()

    def constraint(self) -> float:
        _, a2, a3, a4, a5 = self.jets
        return float(np.real((a2 * a4 + a3 * a5).value))


@dataclass(frozen=True)
class HiggsField:
    """Invariant Higgs field ``Φ = φ T₁``."""

    phi: ScalarJet | float = 0.0

    def form(self, order: int = 1) -> InvariantForm:
        return lie(monomial(coef=_jet(self.phi, order)), 1)


def canonical_form(l: int, order: int = 1) -> InvariantForm:
    return lie(theta(6, coef=ScalarJet.constant(-0.5 * l, order)), 1)


def canonical_connection(l: int) -> InvariantConnection:
    """``A_c^l = -(l/2) θ⁶ ⊗ T₁``."""
    return InvariantConnection(l=l)


# --------------------------------------------------------------------------
# closed formulas

def closed_form_curvature(conn: InvariantConnection) -> InvariantForm:
    """Curvature assembled term by term from the component formulas."""
    l = conn.l
    a1, a2, a3, a4, a5 = conn.jets
    order = a1.order
    radial = _radial_part(conn)
    if l != 1:
        t1 = (theta(2, 3, coef=ScalarJet.constant(-0.5 * l, order))
              + theta(4, 5, coef=ScalarJet.constant(-0.5 * l, order))
              + theta(2, 4, coef=a1) + theta(3, 5, coef=a1))
        return lie(t1, 1) + radial
    t1 = (theta(2, 3, coef=2.0 * (a2 * a2 + a3 * a3) - 0.5)
          + theta(4, 5, coef=2.0 * (a4 * a4 + a5 * a5) - 0.5)
          + (theta(2, 5) - theta(3, 4)) * (2.0 * (a2 * a4 + a5 * a3))
          + (theta(2, 4) + theta(3, 5)) * (a1 + 2.0 * (a2 * a5 - a4 * a3)))
    p = a4 - 2.0 * a1 * a3
    q = a5 + 2.0 * a1 * a2
    s = a2 + 2.0 * a1 * a5
    u = a3 - 2.0 * a1 * a4
    t2 = (theta(1, 2, coef=p) - theta(1, 3, coef=q)
          - theta(1, 4, coef=s) + theta(1, 5, coef=u))
    t3 = (theta(1, 3, coef=p) + theta(1, 2, coef=q)
          - theta(1, 5, coef=s) - theta(1, 4, coef=u))
    return lie(t1, 1) + lie(t2, 2) + lie(t3, 3) + radial


def _radial_part(conn: InvariantConnection) -> InvariantForm:
    """``dr ∧ ∂_r (A - A_c)``."""
    dev = conn.deviation()
    items = {(0,) + key: _shift(v) for key, v in dev.terms.items()}
    return InvariantForm(2, items, lie=True)


def _shift(coef: np.ndarray) -> np.ndarray:
    n = coef.shape[-1]
    if n < 2:
        return np.zeros_like(coef)
    return coef[..., 1:] * np.arange(1, n)


def closed_form_covariant_derivative(conn: InvariantConnection,
                                     higgs: HiggsField) -> InvariantForm:
    """Covariant derivative of ``φT₁`` from the component formula."""
    order = conn.jets[0].order
    phi = _jet(higgs.phi, order)
    dphi = ScalarJet.from_taylor(_shift(phi.coeffs))
    out = lie(monomial(0, coef=dphi), 1)
    if conn.l != 1:
        return out
    _, a2, a3, a4, a5 = conn.jets
    c2 = (theta(3, coef=a2) + theta(2, coef=a3) + theta(5, coef=a4) + theta(4, coef=a5)) * (2.0 * phi)
    c3 = (-theta(2, coef=a2) + theta(3, coef=a3) - theta(4, coef=a4) + theta(5, coef=a5)) * (2.0 * phi)
    return out + lie(c2, 2) + lie(c3, 3)


# --------------------------------------------------------------------------
# monopole equations

@dataclass(frozen=True)
class MonopoleResiduals:
    """Residuals of the invariant Calabi-Yau monopole equations at one radius.

    ``mix`` and ``lam`` are normalised by ``|dr∧θ¹²³⁴⁵|`` so they are the
    components in the orthonormal coframe.
    """

    r: float
    mix: float
    lam: float
    constraint: float
    mix_form: InvariantForm = field(repr=False)
    lam_form: InvariantForm = field(repr=False)

    @property
    def max(self) -> float:
        return max(self.mix, self.lam, abs(self.constraint))


def _ortho_max(form: InvariantForm, kd: KahlerData) -> float:
    out = 0.0
    for key, coef in form.terms.items():
        scale = kd.metric.norm_factor(key).value
        out = max(out, float(np.max(np.abs(coef[..., 0]))) / float(np.real(scale)))
    return out


def monopole_residuals(conn: InvariantConnection, higgs: HiggsField,
                       kd: KahlerData) -> MonopoleResiduals:
    """``∇Φ∧ω²/2 + F∧Ω₂`` and ``F∧ω²`` evaluated with the engine."""
    if conn.r is not None and abs(conn.r - kd.r) > 1e-12 * max(1.0, abs(kd.r)):
        raise ValueError(f"connection sampled at r={conn.r}, geometry at r={kd.r}")
    A = conn.form()
    F = curvature(A)
    order = conn.jets[0].order
    dphi = covariant_derivative(A, higgs.form(order))
    w2 = wedge(kd.omega, kd.omega)
    mix = wedge(dphi, 0.5 * w2) + wedge(F, kd.Omega2)
    lam = wedge(F, w2)
    return MonopoleResiduals(kd.r, _ortho_max(mix, kd), _ortho_max(lam, kd),
                             conn.constraint(), mix, lam)


def ode_rhs_r(r: float, state, jets: dict) -> np.ndarray:
    """Radial ODE system in ``r`` for ``(A₁..A₅, φ)`` at ``l = 1``.

    ``state = (a1, a2, a3, a4, a5, phi)``; ``jets`` from
    :func:`~stenzel_monopoles.stenzel_geometry.radial_jets`.
    """
    a1, a2, a3, a4, a5, phi = state
    rp, rm, G, Gd = (float(np.real(jets[k].value)) for k in ("Rp", "Rm", "G", "Gdot"))
    da1 = -2.0 * Gd / G * (a1 + 2.0 * (a2 * a5 - a4 * a3))
    dphi = (r / 4.0 * (rm / rp) * (1 - 4 * (a2 ** 2 + a3 ** 2))
            - r / 4.0 * (rp / rm) * (1 - 4 * (a4 ** 2 + a5 ** 2))) / G ** 2
    km = r / (2.0 * rm * rm)
    kp = r / (2.0 * rp * rp)
    da2 = -km * (a2 + 2 * a1 * a5) - r / G * phi * a2
    da3 = -km * (a3 - 2 * a1 * a4) - r / G * phi * a3
    da4 = -kp * (a4 - 2 * a1 * a3) + r / G * phi * a4
    da5 = -kp * (a5 + 2 * a1 * a2) + r / G * phi * a5
    return np.array([da1, da2, da3, da4, da5, dphi])


def fields_from_ode_state(r: float, state, jets: dict) -> tuple[InvariantConnection, HiggsField]:
    """Connection and Higgs jets whose radial derivatives solve the r-ODE."""
    state = np.asarray(state, dtype=float)
    deriv = ode_rhs_r(r, state, jets)
    a = [ScalarJet(v, d) for v, d in zip(state, deriv)]
    return InvariantConnection(1, *a[:5], r=r), HiggsField(a[5])


# --------------------------------------------------------------------------
# type decomposition

def project_11(F: InvariantForm, jets: dict) -> tuple[InvariantForm, InvariantForm]:
    """Split a 2-form into its ``(2,0)+(0,2)`` and ``(1,1)`` parts.

    Uses ``(I·β)(X,Y) = β(IX, IY)``: the (1,1) part is ``(β + I·β)/2``.
    """
    if F.degree != 2:
        raise ValueError("project_11 acts on 2-forms")
    Ib = _complex_structure_2form(F, jets)
    f11 = 0.5 * (F + Ib)
    f20 = 0.5 * (F - Ib)
    return f20, f11


def _complex_structure_2form(b: InvariantForm, jets: dict) -> InvariantForm:
    """Pullback of a 2-form by the complex structure acting on 1-forms."""
    if b.lie:
        return sum((lie(_complex_structure_2form(b.component(i), jets), i) for i in (1, 2, 3)),
                   InvariantForm(2, lie=True))
    out = InvariantForm(2)
    for (i, j), coef in b.terms.items():
        ai = apply_complex_structure(monomial(i), jets)
        aj = apply_complex_structure(monomial(j), jets)
        out = out + wedge(ai, aj) * ScalarJet.from_taylor(coef)
    return out
