"""The ten acceptance criteria at their stated tolerances and time limits.

Each test prints one PASS/FAIL line (also collected in the terminal summary).
"""

import math
import time

import numpy as np

from stenzel_monopoles import bubbling_analysis as bub
from stenzel_monopoles import monopole_ode as ode
from stenzel_monopoles import special_solutions as sp
from stenzel_monopoles.invariant_fields import (
    HiggsField,
    InvariantConnection,
    closed_form_covariant_derivative,
    closed_form_curvature,
)
from stenzel_monopoles.lie_coframe import (
    InvariantForm,
    ScalarJet,
    covariant_derivative,
    curvature,
    maurer_cartan,
    mc_derivative,
    wedge,
)
from stenzel_monopoles.stenzel_geometry import (
    FlatProfile,
    GeometryParams,
    assemble_kahler_data,
    build_profile,
    monge_ampere_residual,
    radial_point,
)


class Criterion:
    """Times a block and emits a single summary line."""

    def __init__(self, log, number, title, limit):
        self.log, self.number, self.title, self.limit = log, number, title, limit
        self.details = []
        self.checks = []

    def check(self, name, ok, detail):
        self.checks.append((name, bool(ok)))
        self.details.append(f"{name}={detail}")

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        self.check("runtime", elapsed < self.limit, f"{elapsed:.2f}s<{self.limit}s")
        ok = exc_type is None and all(ok for _, ok in self.checks)
        failed = [n for n, good in self.checks if not good]
        line = (f"[{self.number:2d}] {'PASS' if ok else 'FAIL'} {self.title}: "
                + "; ".join(self.details)
                + (f" (failed: {', '.join(failed)})" if failed else ""))
        print(line)
        self.log(line)
        if exc_type is None:
            assert not failed, line
        return False


def random_jet(rng, order=2):
    return ScalarJet.from_taylor(rng.normal(size=order + 1))


def random_form(rng, degree, lie=False):
    import itertools
    keys = list(itertools.combinations(range(7), degree))
    pick = rng.choice(len(keys), size=min(4, len(keys)), replace=False)
    shape = (3, 3) if lie else (3,)
    return InvariantForm(degree, {keys[i]: rng.normal(size=shape) for i in pick}, lie)


# --------------------------------------------------------------------------

def test_01_maurer_cartan(acceptance_log):
    expected = {
        6: {(2, 3): 1, (4, 5): 1},
        1: {(2, 4): 1, (3, 5): 1},
        3: {(1, 5): -1, (2, 6): -1},
        5: {(1, 3): 1, (4, 6): -1},
        2: {(1, 4): -1, (3, 6): 1},
    }
    with Criterion(acceptance_log, 1, "Maurer-Cartan", 1.0) as c:
        mc = maurer_cartan()
        exact = all(mc[k] == v for k, v in expected.items())
        c.check("relations", exact, "exact" if exact else "mismatch")
        rng = np.random.default_rng(1)
        worst = 0.0
        for i in range(100):
            f = random_form(rng, int(rng.integers(0, 6)), lie=bool(i % 2))
            worst = max(worst, mc_derivative(mc_derivative(f)).max_abs())
        c.check("d2_max", worst <= 1e-12, f"{worst:.1e}")


def test_02_monge_ampere_and_volume(acceptance_log):
    with Criterion(acceptance_log, 2, "Monge-Ampere and volume identity", 5.0) as c:
        worst_ma = worst_vol = worst_parts = opposite_gap = 0.0
        for eps in (0.5, 1.0, 2.0):
            params = GeometryParams(eps)
            for r in eps * np.geomspace(1.01, 30.0, 50):
                worst_ma = max(worst_ma, monge_ampere_residual(r, params))
                kd = assemble_kahler_data(r, params)
                w3 = kd.volume_coefficient()
                # (i/8)Ω∧Ω̄ = (1/4)Ω₁∧Ω₂ for a complex 3-form
                i8 = 0.25 * float(wedge(kd.Omega1, kd.Omega2).coefficient(0, 1, 2, 3, 4, 5))
                pt = radial_point(r, params)
                parts = max(abs(w3 + pt.Gdot * pt.G ** 2),
                            abs(i8 + 0.5 * r * pt.Rplus * pt.Rminus)) / abs(w3)
                worst_parts = max(worst_parts, parts)
                worst_vol = max(worst_vol, abs(w3 - i8) / abs(w3))
                opposite_gap = max(opposite_gap, abs(w3 + i8) / abs(w3))
        c.check("ma_rel", worst_ma <= 1e-7, f"{worst_ma:.1e}")
        c.check("components_rel", worst_parts <= 1e-9, f"{worst_parts:.1e}")
        c.check("volume_rel", worst_vol <= 1e-9, f"{worst_vol:.1e}")
        # informational: the opposite sign of the combined identity
        c.details.append(f"opposite_sign_gap={opposite_gap:.2f}")


def test_03_h_asymptotics(acceptance_log):
    with Criterion(acceptance_log, 3, "h(rho) asymptotics", 5.0) as c:
        prof = build_profile(1.0, rho_max=800.0)
        rho = np.geomspace(1e-4, 1e-2, 20)
        ratio = np.sqrt(prof.h2(rho)) / rho
        dev = float(np.max(np.abs(ratio - 1.0)))
        c.check("h_over_rho_dev", dev <= 1e-3, f"{dev:.1e}")
        expo = prof.fit_large_exponent()
        c.check("h2_exponent", abs(expo - 5.0) <= 0.02, f"{expo:.4f}")


def test_04_engine_vs_formula(acceptance_log):
    with Criterion(acceptance_log, 4, "engine vs closed forms", 5.0) as c:
        rng = np.random.default_rng(4)
        worst_f = worst_d = 0.0
        for i in range(20):
            l = 1 if i < 15 else int(rng.choice([-2, 0, 2, 3]))
            jets = [random_jet(rng) for _ in range(5)]
            if l != 1:
                jets = [jets[0]] + [ScalarJet.constant(0.0, 2)] * 4
            conn = InvariantConnection(l, *jets)
            higgs = HiggsField(random_jet(rng))
            A = conn.form()
            worst_f = max(worst_f, (curvature(A) - closed_form_curvature(conn)).max_abs())
            dphi = covariant_derivative(A, higgs.form(2))
            worst_d = max(worst_d, (dphi - closed_form_covariant_derivative(conn, higgs)).max_abs())
        c.check("curvature", worst_f <= 1e-10, f"{worst_f:.1e}")
        c.check("covariant_derivative", worst_d <= 1e-10, f"{worst_d:.1e}")


def test_05_flat_bps_oracle(acceptance_log):
    flat = FlatProfile()
    with Criterion(acceptance_log, 5, "flat BPS oracle", 10.0) as c:
        worst = worst_m = 0.0
        for mu in (0.5, 1.0, 2.0):
            alpha = -2.0 * mu * mu / 3.0
            rho_end = 30.0 / mu
            grid = np.linspace(1e-2, 5.0, 400)
            traj = ode.integrate_reduced(alpha, flat, rho0=1e-2, rho_max=rho_end,
                                         rho_grid=np.r_[grid, rho_end])
            ref = ode.flat_oracle(mu, grid)
            sel = traj.rho <= 5.0
            err = np.max(np.abs(traj.a[sel] - ref.a) + np.abs(traj.phi[sel] - ref.phi))
            worst = max(worst, float(err))
            m, _ = ode.extract_mass(traj, flat)
            worst_m = max(worst_m, abs(m + mu))
        c.check("sup_error", worst <= 1e-7, f"{worst:.1e}")
        c.check("mass_error", worst_m <= 1e-5, f"{worst_m:.1e}")


def test_06_moduli_bijection(acceptance_log):
    with Criterion(acceptance_log, 6, "moduli bijection witness", 120.0) as c:
        prof = build_profile(1.0, rho_max=800.0)
        alphas = -np.geomspace(0.05, 20.0, 20)[::-1]     # increasing α
        masses = np.array([ode.mass_of_alpha(a, prof).mass for a in alphas])
        steps = np.diff(masses)
        c.check("strictly_monotone", np.all(steps > 0), f"min_step={steps.min():.2e}")
        worst_rt = 0.0
        for target in (-0.25, -1.0, -4.0):
            shot = ode.shoot_for_mass(target, prof, tol=1e-7)
            again = ode.mass_of_alpha(shot.alpha, prof).mass
            worst_rt = max(worst_rt, abs(again - target))
        c.check("round_trip", worst_rt <= 1e-5, f"{worst_rt:.1e}")
        wide = build_profile(1.0, rho_max=1600.0)
        worst_rmax = worst_rho0 = 0.0
        for a in (-0.1, -1.0, -10.0):
            base = ode.mass_of_alpha(a, prof, rho_max=800.0).mass
            worst_rmax = max(worst_rmax, abs(ode.mass_of_alpha(a, wide, rho_max=1600.0).mass - base))
            for rho0 in (5e-3, 2.5e-3, 1e-3, 1e-4, 1e-5, 1e-6):
                m = ode.mass_of_alpha(a, prof, rho0=rho0, rho_max=800.0).mass
                worst_rho0 = max(worst_rho0, abs(m - base))
        c.check("rho_max_doubling", worst_rmax <= 1e-6, f"{worst_rmax:.1e}")
        c.check("rho0_halving", worst_rho0 <= 1e-6, f"{worst_rho0:.1e}")


def _constraint_seed(rng):
    """Random (φ, b1, f1, f2) with Re(f1·conj f2) = 0 and f1·f2 ≠ 0.

    φ < 0 and |f| < ε/2 keep the trajectory in the decaying regime.
    """
    chi = rng.uniform(0, 2 * math.pi)
    k = int(rng.integers(0, 2))
    f2 = rng.uniform(0.05, 0.45) * complex(math.cos(chi), math.sin(chi))
    turn = 1j if k == 0 else -1j
    f1 = rng.uniform(0.05, 0.45) * turn * f2 / abs(f2)
    return ode.FullState(float(rng.uniform(-1.0, -0.05)), float(rng.uniform(-0.3, 0.3)),
                         f1.real, f1.imag, f2.real, f2.imag)


def _rotate(s, ang):
    u = complex(math.cos(ang), math.sin(ang))
    f1, f2 = s.f1 * u, s.f2 * u
    return ode.FullState(s.phi, s.b1, f1.real, f1.imag, f2.real, f2.imag)


def _invariants(traj):
    b = traj.b_fields()
    return np.vstack([np.hypot(b["b2"], b["b3"]), np.hypot(b["b4"], b["b5"]), b["b1"], traj.phi])


def test_07_constraint_and_gauge(acceptance_log):
    with Criterion(acceptance_log, 7, "constraint and gauge invariants", 60.0) as c:
        prof = build_profile(1.0, rho_max=50.0)
        rng = np.random.default_rng(7)
        grid = np.linspace(0.5, 10.0, 400)
        worst_c = worst_p = worst_g = worst_diff = 0.0
        spans = []
        crossings = 0
        for _ in range(50):
            seed = _constraint_seed(rng)
            # generic seeds blow up at finite ρ; invariants are checked where |y| ≤ 10
            traj = ode.integrate_full(seed, prof, 0.5, 10.0, tol=1e-12, rho_grid=grid,
                                      blowup=10.0)
            spans.append(traj.rho_end - 0.5)
            worst_c = max(worst_c, traj.constraint_drift, float(np.max(np.abs(
                traj.column("b2") * traj.column("b4") + traj.column("b3") * traj.column("b5")))))
            f1 = traj.column("b2") + 1j * traj.column("b3")
            f2 = traj.column("b4") + 1j * traj.column("b5")
            ph1, ph2 = np.angle(f1), np.angle(f2)
            # each f moves on a fixed line through 0: arg is constant mod π
            for ph in (ph1, ph2):
                shift = np.mod(ph - ph[0], math.pi)
                worst_p = max(worst_p, float(np.max(np.minimum(shift, math.pi - shift))))
                crossings += int(np.any(np.cos(ph - ph[0]) < 0))
            gap = np.mod(ph1 - ph2 - math.pi / 2, math.pi)
            worst_diff = max(worst_diff, float(np.max(np.minimum(gap, math.pi - gap))))
            rot = ode.integrate_full(_rotate(seed, float(rng.uniform(0, 2 * math.pi))), prof,
                                     0.5, traj.rho_end, tol=1e-12, rho_grid=traj.rho)
            worst_g = max(worst_g, float(np.max(np.abs(_invariants(rot) - _invariants(traj)))))
        c.check("min_span", min(spans) >= 0.5, f"{min(spans):.2f}")
        c.check("constraint_drift", worst_c <= 1e-8, f"{worst_c:.1e}")
        c.check("phase_drift_mod_pi", worst_p <= 1e-6,
                f"{worst_p:.1e} ({crossings} amplitude sign changes)")
        c.check("phase_gap", worst_diff <= 1e-6, f"{worst_diff:.1e}")
        c.check("gauge_orbit", worst_g <= 1e-9, f"{worst_g:.1e}")


def test_08_closed_form_solutions(acceptance_log):
    with Criterion(acceptance_log, 8, "closed-form solutions", 30.0) as c:
        prof = build_profile(1.0, rho_max=800.0)
        params = GeometryParams(1.0)
        radii = np.geomspace(1.01, 20.0, 10)
        hym = max(max(rep.residuals.max, rep.lambda_f, rep.f20)
                  for rep in (sp.hym_stenzel(params, r) for r in radii))
        c.check("hym_residual", hym <= 1e-9, f"{hym:.1e}")
        dirac = 0.0
        for l in (1, 2, -1):
            mono = sp.DiracMonopole(l, -0.5, 0.7)
            dirac = max(dirac, max(sp.dirac_residuals(mono, r, params, prof).max for r in radii))
        harm = float(np.max(sp.dirac_harmonicity(1, 0.0, params, radii)))
        c.check("dirac_residual", max(dirac, harm) <= 1e-9, f"{max(dirac, harm):.1e}")
        cone = 0.0
        for l, C, m in ((1, 0.8, 1.3), (2, -0.4, 0.7), (-1, 1.5, -2.0)):
            mono = sp.cone_monopole(l, C, m)
            for r in np.geomspace(0.5, 20.0, 10):
                res, lam = sp.cone_monopole_residuals(mono, r)
                cone = max(cone, res.max, lam)
        c.check("cone_residual", cone <= 1e-9, f"{cone:.1e}")
        cone_exp = sp.cone_decay_exponent(sp.cone_monopole(1, 0.8, 1.3), np.geomspace(2.0, 100.0, 20))
        c.check("cone_decay", abs(cone_exp / -5.0 - 1) <= 0.01, f"{cone_exp:.4f}")
        rho = np.geomspace(0.25 * prof.rho_max, prof.rho_max, 20)
        tail = sp.dirac_higgs(1, -1.0, rho, prof) + 1.0
        slope = sp.loglog_slope(rho, tail)
        c.check("dirac_tail_decay", abs(slope / -4.0 - 1) <= 0.01, f"{slope:.4f}")


def test_09_extension_conditions(acceptance_log):
    with Criterion(acceptance_log, 9, "extension conditions", 30.0) as c:
        prof = build_profile(1.0, rho_max=800.0)
        g = np.geomspace(1e-3, 1e-2, 30)
        worst_b4 = 0.0
        ok = True
        for target in (-0.5, -1.0, -2.0):
            shot = ode.shoot_for_mass(target, prof, tol=1e-7)
            traj = ode.integrate_reduced(shot.alpha, prof, rho0=1e-3, rho_max=1e-2, rho_grid=g)
            rep = sp.extension_fit(traj, prof)
            worst_b4 = max(worst_b4, abs(rep.b4_at_zero - 0.5))
            ok = ok and rep.extends and rep.curvature_verdict
        c.check("b4_at_zero", worst_b4 <= 1e-4, f"{worst_b4:.1e}")
        c.check("shot_extend", ok, ok)
        # B₄ ≡ 0 (the reducible, Dirac-like branch)
        zero = ode.integrate(lambda r, y: ode.four_field_rhs(r, y, prof), [0.5 / 1e-3, 0, 0, 0],
                             1e-3, 1e-2, 1e-11, g, kind="four")
        rep0 = sp.extension_fit(zero, prof)
        flagged = (not rep0.extends) and not rep0.curvature_bounded["I5"]
        c.check("b4_zero_flagged", flagged, f"I5_slope={sp.curvature_components(zero, prof).slopes()['I5']:.2f}")
        # B₁ rigidity witness
        rig = ode.b1_rigidity_harness(0.3, -1.0, prof)
        c.check("b1_rigidity", rig.violates_extension, f"exp={rig.b1_exponent:.2f}")


def test_10_bubbling(acceptance_log):
    with Criterion(acceptance_log, 10, "bubbling", 300.0) as c:
        prof = build_profile(1.0, rho_max=800.0)
        lambdas = (2.0, 4.0, 8.0, 16.0)
        rep = bub.bubble_report(lambdas, prof, R=3.0, annulus=(1.0, 3.0))
        bps, dirac = rep.column("bps_error"), rep.column("dirac_error")
        c.check("bps_decreasing", rep.strictly_decreasing("bps_error"),
                "/".join(f"{x:.2e}" for x in bps))
        c.check("dirac_decreasing", rep.strictly_decreasing("dirac_error"),
                "/".join(f"{x:.2e}" for x in dirac))
        cov = max(bub.flat_scale_covariance(lam, 3.0) for lam in lambdas)
        c.check("flat_covariance", cov <= 1e-7, f"{cov:.1e}")

