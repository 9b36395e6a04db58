import math

import numpy as np
import pytest

from stenzel_monopoles import monopole_ode as ode
from stenzel_monopoles import special_solutions as sp
from stenzel_monopoles.invariant_fields import InvariantConnection
from stenzel_monopoles.lie_coframe import ScalarJet, curvature
from stenzel_monopoles.stenzel_geometry import (
    DomainError,
    build_profile,
    metric_at,
    radial_jets,
    rho_of_r,
)

RADII = np.geomspace(1.01, 20.0, 8)


# --------------------------------------------------------------------------
# Dirac

@pytest.mark.parametrize("l", (1, 2, -3))
def test_dirac_solves_monopole_equations(profile, l):
    mono = sp.DiracMonopole(l, -0.5, 0.7)
    assert max(sp.dirac_residuals(mono, r, 1.0, profile).max for r in RADII) <= 1e-9


def test_dirac_variant_with_single_power_fails():
    mono = sp.DiracMonopole(1, -0.5, 0.7, variant="G")
    assert sp.dirac_residuals(mono, 1.5, 1.0).max > 1.0
    with pytest.raises(ValueError):
        sp.DiracMonopole(1, 0.0, variant="G3")


def test_dirac_higgs_harmonic():
    assert np.max(sp.dirac_harmonicity(1, 0.0, 1.0, RADII)) <= 1e-12
    assert np.max(sp.dirac_harmonicity(2, 0.0, 0.0, [0.5, 1.0, 4.0])) <= 1e-12
    assert np.all(sp.dirac_harmonicity(0, 3.0, 1.0, RADII) == 0)


def test_dirac_higgs_asymptotics(profile):
    rho = np.geomspace(0.25 * profile.rho_max, profile.rho_max, 20)
    tail = sp.dirac_higgs(1, -1.0, rho, profile) + 1.0
    assert sp.loglog_slope(rho, tail) == pytest.approx(-4.0, rel=0.01)
    coef = tail[-1] * rho[-1] ** 4
    assert coef == pytest.approx(1 / (8 * profile.c5), rel=0.02)
    small = np.geomspace(1e-4, 1e-3, 10)
    phi = sp.dirac_higgs(3, 0.0, small, profile)
    assert sp.loglog_slope(small, phi) == pytest.approx(-1.0, abs=2e-3)
    # φ ≈ (l/2)/ρ near the zero section
    assert phi[0] * small[0] == pytest.approx(1.5, rel=1e-3)


def test_dirac_higgs_edge_cases(profile):
    assert sp.dirac_higgs(0, 2.5, 1.0, profile) == 2.5
    with pytest.raises(DomainError):
        sp.dirac_higgs(1, 0.0, 0.0, profile)


# --------------------------------------------------------------------------
# cone

@pytest.mark.parametrize("l, C, m", [(1, 0.8, 1.3), (2, -0.4, 0.7), (-1, 0.0, 2.0)])
def test_cone_monopoles(l, C, m):
    mono = sp.cone_monopole(l, C, m)
    for r in (0.5, 2.0, 10.0):
        res, lam = sp.cone_monopole_residuals(mono, r)
        assert res.max <= 1e-9 and lam <= 1e-12


def test_cone_decay_and_errors():
    mono = sp.cone_monopole(1, 0.8, 1.3)
    assert sp.cone_decay_exponent(mono, np.geomspace(2, 100, 20)) == pytest.approx(-5.0, rel=0.01)
    with pytest.raises(ValueError):
        sp.cone_monopole(1, 0.5, 0.0)


def test_cone_hym_engine_residual():
    traj = sp.cone_hym_irreducible(1.0, 0.5, 1.0, 20.0, sign=-1)
    assert not traj.blew_up and traj.residual <= 1e-8
    assert max(sp.cone_hym_residuals(traj, x).max for x in (1.2, 2.0, 5.0, 15.0)) <= 1e-9
    alternate = sp.cone_hym_irreducible(1.0, 0.5, 1.0, 20.0, sign=-1, variant="alternate")
    assert sp.cone_hym_residuals(alternate, 2.0).max > 1e-3


def test_cone_hym_blow_up_stays_in_range():
    traj = sp.cone_hym_irreducible(0.3, 0.5, 1.0, 20.0, sign=1)
    assert traj.blew_up and traj.residual <= 1e-8
    inside = traj.rho[traj.rho < 0.5 * (traj.rho[0] + traj.rho[-1])]
    assert max(sp.cone_hym_residuals(traj, x).max for x in inside[::40]) <= 1e-9


def test_cone_hym_mirror_symmetry():
    a = sp.cone_hym_irreducible(0.3, 0.5, 1.0, 10.0, sign=1)
    b = sp.cone_hym_irreducible(-0.3, 0.5, 1.0, 10.0, sign=-1)
    n = min(len(a.rho), len(b.rho))
    assert a.blew_up == b.blew_up
    rho = a.rho[: n // 2]
    assert np.allclose(a.dense(rho)[0], -b.dense(rho)[0], rtol=1e-8)
    assert np.allclose(a.dense(rho)[1], b.dense(rho)[1], rtol=1e-8)


def test_cone_hym_errors():
    with pytest.raises(ValueError):
        sp.cone_hym_irreducible(0.3, 0.0, 1.0)
    with pytest.raises(ValueError):
        sp.cone_hym_irreducible(0.3, 0.5, 1.0, sign=2)
    with pytest.raises(ValueError):
        sp.cone_hym_irreducible(0.3, 0.5, 1.0, variant="other")


# --------------------------------------------------------------------------
# explicit HYM connection

@pytest.mark.parametrize("eps", (0.5, 1.0, 2.0))
def test_hym_connection(eps):
    for r in eps * np.array([1.001, 1.3, 4.0, 20.0]):
        rep = sp.hym_stenzel(eps, r)
        assert max(rep.residuals.max, rep.lambda_f, rep.f20) <= 1e-9
        assert rep.display_error <= 1e-12
        rp2, rm2 = (r * r + eps * eps) / 2, (r * r - eps * eps) / 2
        assert rep.theta45_t1 == pytest.approx(-rm2 / (2 * rp2), rel=1e-12, abs=1e-15)


def test_hym_decays_and_needs_stenzel():
    near = sp.hym_stenzel(1.0, 3.0).deviation_norm
    far = sp.hym_stenzel(1.0, 30.0).deviation_norm
    assert far < near
    with pytest.raises(ValueError):
        sp.hym_stenzel(0.0, 2.0)


# --------------------------------------------------------------------------
# curvature components and extension

def test_curvature_components_match_engine():
    eps = 1.3
    prof = build_profile(eps, rho_max=50.0)
    rng = np.random.default_rng(1)
    for _ in range(4):
        r = eps * (1 + rng.uniform(0.05, 2))
        rho = rho_of_r(r, eps)
        state = rng.normal(size=4)
        traj = ode.SolutionProfile("four", np.array([rho]), state[:, None], eps)
        comps = sp.curvature_components(traj, prof).values
        j = radial_jets(r, eps, 2)
        g = metric_at(r, eps, 2, j)
        d = ode.four_field_rhs(rho, state, prof)
        drho_dr = math.sqrt(float(g.jet(0).value))
        B1, B3, B4 = (ScalarJet(state[k], d[k] * drho_dr) for k in (1, 2, 3))
        G, rp, rm = (j[k].truncate(1) for k in ("G", "Rp", "Rm"))
        F = curvature(InvariantConnection(1, a1=B1 / (G * G), a3=B3 / rm, a4=B4 / rp).form())

        def ortho(gen, *key):
            return float(F.coefficient(*key, component=gen)) / float(np.real(g.norm_factor(key).value))

        engine = {"I1": ortho(1, 0, 1), "I2": ortho(3, 0, 2), "I3": ortho(2, 0, 4),
                  "I4": ortho(1, 2, 3), "I5": ortho(1, 4, 5), "I6": ortho(2, 1, 2),
                  "I7": ortho(2, 1, 5), "I8": ortho(1, 2, 4)}
        for name, value in engine.items():
            assert comps[name][0] == pytest.approx(value, rel=1e-10, abs=1e-12), name


def _near_zero_grid():
    return np.geomspace(1e-3, 1e-2, 30)


def test_shot_monopole_extends(profile):
    shot = ode.shoot_for_mass(-1.0, profile, tol=1e-7)
    g = _near_zero_grid()
    traj = ode.integrate_reduced(shot.alpha, profile, rho0=1e-3, rho_max=1e-2, rho_grid=g)
    rep = sp.extension_fit(traj, profile)
    assert rep.extends and rep.curvature_verdict
    assert rep.b4_at_zero == pytest.approx(0.5, abs=1e-4)
    assert rep.exponents["b4_shift"] == pytest.approx(2.0, abs=0.05)


def test_dirac_type_branch_does_not_extend(profile):
    g = _near_zero_grid()
    traj = ode.integrate(lambda r, y: ode.four_field_rhs(r, y, profile), [0.5 / 1e-3, 0, 0, 0],
                         1e-3, 1e-2, 1e-11, g, kind="four")
    rep = sp.extension_fit(traj, profile)
    assert not rep.extends
    assert not rep.curvature_bounded["I5"]
    assert rep.conditions["b4"] is False


def test_b1_perturbation_does_not_extend(profile):
    g = _near_zero_grid()
    s = ode.series_seed(-1.0, 1e-3, profile)
    traj = ode.integrate(lambda r, y: ode.four_field_rhs(r, y, profile),
                         [s.phi, 0.3e-6, 0, 0.5 * s.a], 1e-3, 1e-2, 1e-11, g, kind="four")
    rep = sp.extension_fit(traj, profile)
    assert not rep.conditions["b1"] and not rep.extends
    assert not rep.curvature_verdict


def test_extension_needs_samples(profile):
    traj = ode.integrate_reduced(-1.0, profile, rho0=1e-3, rho_max=1e-2,
                                 rho_grid=np.geomspace(1e-3, 1e-2, 4))
    with pytest.raises(ValueError):
        sp.extension_fit(traj, profile)


def test_loglog_slope():
    x = np.geomspace(1, 10, 5)
    assert sp.loglog_slope(x, 3 * x ** -2.5) == pytest.approx(-2.5)
    with pytest.raises(ValueError):
        sp.loglog_slope(x, np.zeros(5))
