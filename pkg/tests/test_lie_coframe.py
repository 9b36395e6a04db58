import itertools

import numpy as np
import pytest
import sympy as smp
from hypothesis import given, strategies as st

from stenzel_monopoles.lie_coframe import (
    CoefficientTypeError,
    CoframeMetric,
    InvariantForm,
    ScalarJet,
    apply_complex_structure,
    bracket_wedge,
    curvature,
    dr,
    hodge_star,
    lambda_op,
    lie,
    maurer_cartan,
    mc_derivative,
    monomial,
    structure_constants,
    theta,
    wedge,
)
from stenzel_monopoles.stenzel_geometry import GeometryParams, assemble_kahler_data

ORDER = 3


@st.composite
def forms(draw, degree=None, lie_valued=None, horizontal=False):
    deg = draw(st.integers(0, 5)) if degree is None else degree
    is_lie = draw(st.booleans()) if lie_valued is None else lie_valued
    pool = range(6) if horizontal else range(7)
    keys = list(itertools.combinations(pool, deg))
    chosen = draw(st.lists(st.sampled_from(keys), min_size=1, max_size=4, unique=True))
    shape = (3, ORDER + 1) if is_lie else (ORDER + 1,)
    vals = st.floats(-3, 3, allow_nan=False)
    terms = {}
    for k in chosen:
        flat = draw(st.lists(vals, min_size=int(np.prod(shape)), max_size=int(np.prod(shape))))
        terms[k] = np.array(flat).reshape(shape)
    return InvariantForm(deg, terms, is_lie)


def test_structure_constants_antisymmetric_and_jacobi():
    c = structure_constants()
    assert np.array_equal(c, -c.transpose(0, 2, 1))
    # Σ_m c[m,i,j] c[n,m,k] + cyclic = 0
    jac = (np.einsum("mij,nmk->nijk", c, c) + np.einsum("mjk,nmi->nijk", c, c)
           + np.einsum("mki,nmj->nijk", c, c))
    assert np.abs(jac).max() == 0


def test_maurer_cartan_relations():
    mc = maurer_cartan()
    assert mc[6] == {(2, 3): 1, (4, 5): 1}
    assert mc[1] == {(2, 4): 1, (3, 5): 1}
    assert mc[3] == {(1, 5): -1, (2, 6): -1}
    assert mc[5] == {(1, 3): 1, (4, 6): -1}
    assert mc[2] == {(1, 4): -1, (3, 6): 1}


def test_d_theta_matches_table():
    for k, rel in maurer_cartan().items():
        expected = sum((theta(i, j, coef=float(v)) for (i, j), v in rel.items()),
                       InvariantForm(2))
        assert (mc_derivative(theta(k)) - expected).max_abs() == 0


@given(forms())
def test_d_squared_vanishes(f):
    assert mc_derivative(mc_derivative(f)).max_abs() <= 1e-12


@given(forms(lie_valued=False), forms(lie_valued=False))
def test_leibniz_rule(a, b):
    if a.degree + b.degree > 6:
        return
    lhs = mc_derivative(wedge(a, b))
    rhs = wedge(mc_derivative(a), b) + (-1) ** a.degree * wedge(a, mc_derivative(b))
    assert (lhs - rhs).max_abs() <= 1e-9


@given(forms(lie_valued=False), forms(lie_valued=False))
def test_graded_commutativity(a, b):
    if a.degree + b.degree > 7:
        return
    diff = wedge(a, b) - (-1) ** (a.degree * b.degree) * wedge(b, a)
    assert diff.max_abs() <= 1e-12


def test_lie_bracket_conventions():
    one = monomial(coef=ScalarJet.constant(1.0))
    t1, t2, t3 = (lie(one, i) for i in (1, 2, 3))
    # [T1, T2] = 2 T3 and cyclic
    assert (bracket_wedge(t1, t2) - 2 * t3).max_abs() == 0
    assert (bracket_wedge(t2, t3) - 2 * t1).max_abs() == 0
    assert (bracket_wedge(t3, t1) - 2 * t2).max_abs() == 0


def test_canonical_connection_curvature():
    A = lie(theta(6, coef=-1.5), 1)       # l = 3
    F = curvature(A)
    assert F.coefficient(2, 3, component=1) == pytest.approx(-1.5)
    assert F.coefficient(4, 5, component=1) == pytest.approx(-1.5)
    assert len(F.terms) == 2


def test_jet_arithmetic_against_sympy():
    r = smp.symbols("r")
    expr = smp.sqrt(1 + r ** 2) / (2 + r) ** 3
    r0 = 0.7
    oracle = [float(smp.diff(expr, r, k).subs(r, r0) / smp.factorial(k)) for k in range(5)]
    x = ScalarJet.variable(r0, 4)
    jet = (1 + x * x) ** 0.5 / (2 + x) ** 3
    assert np.allclose(jet.coeffs, oracle, rtol=1e-13, atol=0)


def test_jet_sqrt_and_polynomial():
    x = ScalarJet.from_polynomial([1.0, 0.0, 2.0], 1.5, order=3)
    assert x.coeffs == pytest.approx([5.5, 6.0, 2.0, 0.0])
    s = x.sqrt()
    assert (s * s).coeffs == pytest.approx(x.coeffs, rel=1e-14)


def _stenzel_kd(r=1.7, eps=1.0):
    return assemble_kahler_data(r, GeometryParams(eps))


def test_lambda_of_omega_is_three():
    kd = _stenzel_kd()
    lam = lambda_op(kd.omega, kd.metric, kd.omega)
    assert float(lam.coefficient()) == pytest.approx(3.0, rel=1e-13)


@given(forms(lie_valued=False, horizontal=True))
def test_hodge_star_involution(a):
    g = _stenzel_kd().metric
    twice = hodge_star(hodge_star(a, g), g)
    sign = (-1) ** (a.degree * (6 - a.degree))
    assert (twice - sign * a).max_abs() <= 1e-9 * max(1.0, a.max_abs())


def test_complex_structure_squares_to_minus_one():
    kd = _stenzel_kd()
    for k in range(6):
        e = dr() if k == 0 else theta(k)
        once = apply_complex_structure(e, kd.jets)
        twice = apply_complex_structure(once, kd.jets)
        assert (twice + e).max_abs() <= 1e-14


def test_errors():
    with pytest.raises(ValueError):
        InvariantForm(8)
    with pytest.raises(ValueError):
        InvariantForm(2, {(2, 1): np.ones(2)})
    with pytest.raises(CoefficientTypeError):
        theta(1) + lie(theta(1), 1)
    with pytest.raises(ValueError):
        hodge_star(theta(6), _stenzel_kd().metric)
    with pytest.raises(ValueError):
        CoframeMetric((1.0, 1.0, 1.0, -1.0, 1.0, 1.0))
