"""Exterior algebra on the invariant coframe {dr, θ¹, …, θ⁶} of Spin(4).

Forms are stored as sparse maps from sorted index tuples to coefficient
arrays.  Index 0 stands for ``dr`` and indices 1..6 for ``θ¹..θ⁶``.
Coefficients are truncated Taylor series in ``r`` about the sample point
(:class:`ScalarJet`), so the exterior derivative of a radial field is exact
at that point.  Lie-algebra valued forms carry a leading axis of length 3
for the components along ``T₁, T₂, T₃`` with ``[Tᵢ, Tⱼ] = 2 ε_ijk T_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from numbers import Number

import numpy as np

__all__ = [
    "CoefficientTypeError",
    "JetOrderError",
    "ScalarJet",
    "Su2Vector",
    "InvariantForm",
    "CoframeMetric",
    "structure_constants",
    "maurer_cartan",
    "dr",
    "theta",
    "monomial",
    "zero_form",
    "lie",
    "lie_form",
    "wedge",
    "bracket_wedge",
    "bracket",
    "mc_derivative",
    "curvature",
    "covariant_derivative",
    "exterior_covariant_derivative",
    "hodge_star",
    "lambda_op",
    "apply_complex_structure",
]

LABELS = ("dr", "θ1", "θ2", "θ3", "θ4", "θ5", "θ6")


class CoefficientTypeError(TypeError):
    """Raised when scalar and Lie-valued coefficients are mixed illegally."""


class JetOrderError(ValueError):
    """Raised when a derivative is requested beyond the stored jet order."""


# --------------------------------------------------------------------------
# truncated Taylor arithmetic on the last axis

def _cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = min(a.shape[-1], b.shape[-1])
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (n,)
    dtype = np.result_type(a, b)
    out = np.zeros(shape, dtype=dtype)
    for k in range(n):
        for j in range(k + 1):
            out[..., k] += a[..., j] * b[..., k - j]
    return out


def _series_pow(a: np.ndarray, p: float) -> np.ndarray:
    a0 = a[..., 0]
    if np.any(a0 == 0):
        raise ZeroDivisionError("power series with vanishing constant term")
    n = a.shape[-1]
    y = np.zeros(a.shape, dtype=np.result_type(a, float))
    y[..., 0] = a0 ** p
    for k in range(1, n):
        s = 0.0
        for j in range(1, k + 1):
            s = s + ((p + 1) * j - k) * a[..., j] * y[..., k - j]
        y[..., k] = s / (k * a0)
    return y


def _series_derivative(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    if n < 2:
        raise JetOrderError("jet has no stored derivative")
    return a[..., 1:] * np.arange(1, n)


class ScalarJet:
    """Truncated Taylor expansion of a radial function about a sample point.

    ``coeffs[k]`` is ``f⁽ᵏ⁾(r₀)/k!``.  The first two entries are exposed as
    ``value`` and ``dvalue``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, value, dvalue=0.0, *higher_taylor):
        self.coeffs = np.asarray((value, dvalue) + tuple(higher_taylor))
        if not np.iscomplexobj(self.coeffs):
            self.coeffs = self.coeffs.astype(float)

    @classmethod
    def from_taylor(cls, coeffs) -> "ScalarJet":
        jet = cls.__new__(cls)
        arr = np.asarray(coeffs)
        jet.coeffs = arr if np.iscomplexobj(arr) else arr.astype(float)
        return jet

    @classmethod
    def constant(cls, value, order: int = 1) -> "ScalarJet":
        c = np.zeros(order + 1, dtype=complex if isinstance(value, complex) else float)
        c[0] = value
        return cls.from_taylor(c)

    @classmethod
    def variable(cls, r0: float, order: int = 1) -> "ScalarJet":
        c = np.zeros(order + 1)
        c[0] = r0
        if order >= 1:
            c[1] = 1.0
        return cls.from_taylor(c)

    @classmethod
    def from_polynomial(cls, poly_coeffs, r0: float, order: int = 1) -> "ScalarJet":
        """Jet of ``Σ poly_coeffs[i] r^i`` at ``r0``."""
        p = np.polynomial.Polynomial(poly_coeffs)
        out = []
        for k in range(order + 1):
            out.append(p(r0) / float(np.prod(np.arange(1, k + 1))))
            p = p.deriv()
        return cls.from_taylor(out)

    @property
    def order(self) -> int:
        return self.coeffs.shape[-1] - 1

    @property
    def value(self):
        return self.coeffs[0]

    @property
    def dvalue(self):
        if self.order < 1:
            raise JetOrderError("jet has no stored derivative")
        return self.coeffs[1]

    def derivative(self) -> "ScalarJet":
        return ScalarJet.from_taylor(_series_derivative(self.coeffs))

    def truncate(self, order: int) -> "ScalarJet":
        return ScalarJet.from_taylor(self.coeffs[: order + 1])

    def __pow__(self, p: float) -> "ScalarJet":
        return ScalarJet.from_taylor(_series_pow(self.coeffs, p))

    def sqrt(self) -> "ScalarJet":
        return self ** 0.5

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, ScalarJet):
            return other.coeffs
        c = np.zeros_like(self.coeffs, dtype=np.result_type(self.coeffs, other))
        c[0] = other
        return c

    def __add__(self, other):
        o = self._coerce(other)
        n = min(len(o), len(self.coeffs))
        return ScalarJet.from_taylor(self.coeffs[:n] + o[:n])

    __radd__ = __add__

    def __neg__(self):
        return ScalarJet.from_taylor(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ScalarJet):
            return ScalarJet.from_taylor(_cauchy(self.coeffs, other.coeffs))
        if isinstance(other, Number):
            return ScalarJet.from_taylor(self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarJet):
            return self * other ** -1.0
        return ScalarJet.from_taylor(self.coeffs / other)

    def __rtruediv__(self, other):
        return (self ** -1.0) * other

    def __repr__(self) -> str:
        return f"ScalarJet({', '.join(f'{c:.6g}' for c in self.coeffs)})"


def _as_taylor(c, order: int = 1) -> np.ndarray:
    if isinstance(c, ScalarJet):
        return c.coeffs
    if isinstance(c, np.ndarray) and c.ndim >= 1:
        return c
    return ScalarJet.constant(c, order).coeffs


@dataclass(frozen=True)
class Su2Vector:
    """Element ``c1 T₁ + c2 T₂ + c3 T₃`` of su(2).

    The inner product ``⟨Tᵢ, Tⱼ⟩ = δᵢⱼ`` is Ad-invariant, so ``norm`` is
    unchanged by gauge rotations.
    """

    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])

    def bracket(self, other: "Su2Vector") -> "Su2Vector":
        return Su2Vector(*(2.0 * np.cross(self.as_array(), other.as_array())))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def __add__(self, other: "Su2Vector") -> "Su2Vector":
        return Su2Vector(*(self.as_array() + other.as_array()))

    def __mul__(self, s: float) -> "Su2Vector":
        return Su2Vector(*(s * self.as_array()))

    __rmul__ = __mul__


def _bracket_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Jet-valued [a, b] for arrays of shape (3, n)."""
    n = min(a.shape[-1], b.shape[-1])
    out = np.zeros((3, n), dtype=np.result_type(a, b))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        out[k] += 2.0 * (_cauchy(a[i], b[j]) - _cauchy(a[j], b[i]))
    return out


# --------------------------------------------------------------------------
# structure constants

def _c_matrix(i: int, j: int) -> np.ndarray:
    m = np.zeros((4, 4))
    m[i - 1, j - 1] = 1.0
    m[j - 1, i - 1] = -1.0
    return m


_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


@lru_cache(maxsize=None)
def _structure_table() -> tuple:
    basis = [_c_matrix(*p) for p in _PAIRS]
    flat = np.array([b.ravel() for b in basis]).T
    table = np.zeros((6, 6, 6), dtype=int)
    for i, j in itertools.product(range(6), repeat=2):
        comm = basis[i] @ basis[j] - basis[j] @ basis[i]
        coef, *_ = np.linalg.lstsq(flat, comm.ravel(), rcond=None)
        table[:, i, j] = np.rint(coef).astype(int)
    return tuple(map(tuple, table.reshape(6, 36)))


def structure_constants() -> np.ndarray:
    """Integer table ``c[k, i, j]`` with ``[X_{i+1}, X_{j+1}] = Σ_k c[k,i,j] X_{k+1}``.

    Basis ``X₁..X₆ = C₁₂, C₁₃, C₁₄, C₂₃, C₂₄, C₃₄`` of so(4).
    """
    return np.array(_structure_table()).reshape(6, 6, 6)


@lru_cache(maxsize=None)
def maurer_cartan() -> dict:
    """``{k: {(i, j): coeff}}`` with ``dθᵏ = Σ coeff θⁱ∧θʲ`` (i < j).

    From ``dθᵏ = -½ cᵏ_ij θⁱ∧θʲ``.
    """
    c = structure_constants()
    out = {}
    for k in range(1, 7):
        terms = {}
        for i in range(1, 7):
            for j in range(i + 1, 7):
                v = -int(c[k - 1, i - 1, j - 1])
                if v:
                    terms[(i, j)] = v
        out[k] = terms
    return out


# --------------------------------------------------------------------------
# forms

def _sort_indices(idx: tuple) -> tuple[int, tuple | None]:
    if len(set(idx)) != len(idx):
        return 0, None
    perm = sorted(range(len(idx)), key=idx.__getitem__)
    sign = 1
    seen = [False] * len(idx)
    for start in range(len(idx)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign, tuple(sorted(idx))


@dataclass(frozen=True)
class InvariantForm:
    """Homogeneous invariant form of a given degree.

    ``terms`` maps a sorted index tuple to Taylor coefficients: shape ``(n,)``
    for scalar forms, ``(3, n)`` for su(2)-valued forms.
    """

    degree: int
    terms: dict = field(default_factory=dict)
    lie: bool = False

    def __post_init__(self):
        if not 0 <= self.degree <= 7:
            raise ValueError(f"degree {self.degree} outside 0..7")
        for key, coef in self.terms.items():
            if len(key) != self.degree or tuple(sorted(key)) != key:
                raise ValueError(f"bad monomial {key} for degree {self.degree}")
            if self.lie != (np.ndim(coef) == 2):
                raise CoefficientTypeError("coefficient shape disagrees with lie flag")

    # construction helpers -------------------------------------------------
    @staticmethod
    def _accumulate(degree: int, lie: bool, items) -> "InvariantForm":
        terms: dict = {}
        for key, coef in items:
            if key in terms:
                prev = terms[key]
                n = min(prev.shape[-1], coef.shape[-1])
                terms[key] = prev[..., :n] + coef[..., :n]
            else:
                terms[key] = coef
        terms = {k: v for k, v in terms.items() if np.any(v != 0)}
        return InvariantForm(degree, terms, lie)

    def _check_compatible(self, other: "InvariantForm") -> None:
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        if self.lie != other.lie:
            raise CoefficientTypeError("cannot add scalar and Lie-valued forms")

    def __add__(self, other):
        if isinstance(other, Number) and other == 0:
            return self
        self._check_compatible(other)
        return InvariantForm._accumulate(
            self.degree, self.lie, itertools.chain(self.terms.items(), other.terms.items())
        )

    __radd__ = __add__

    def __neg__(self):
        return InvariantForm(self.degree, {k: -v for k, v in self.terms.items()}, self.lie)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, ScalarJet):
            return InvariantForm(
                self.degree, {k: _cauchy(v, s.coeffs) for k, v in self.terms.items()}, self.lie
            )
        if isinstance(s, Number):
            return InvariantForm(self.degree, {k: v * s for k, v in self.terms.items()}, self.lie)
        return NotImplemented

    __rmul__ = __mul__

    # inspection -------------------------------------------------------------
    def coefficient(self, *indices, component: int | None = None):
        """Value (not jet) of the coefficient of the given monomial.

        Indices may be unsorted; the sign of the reordering is applied.
        ``component`` selects ``T_component`` (1-based) for Lie forms.
        """
        sign, key = _sort_indices(tuple(indices))
        if key is None or key not in self.terms:
            if self.lie and component is None:
                return np.zeros(3)
            return 0.0
        c = self.terms[key][..., 0] * sign
        if self.lie and component is not None:
            return c[component - 1]
        return c

    def component(self, i: int) -> "InvariantForm":
        """Scalar form multiplying ``T_i`` (1-based)."""
        if not self.lie:
            raise CoefficientTypeError("component() needs a Lie-valued form")
        return InvariantForm(self.degree, {k: v[i - 1] for k, v in self.terms.items()})

    def values(self) -> dict:
        return {k: v[..., 0] for k, v in self.terms.items()}

    def max_abs(self) -> float:
        if not self.terms:
            return 0.0
        return max(float(np.max(np.abs(v[..., 0]))) for v in self.terms.values())

    def pruned(self, tol: float = 0.0) -> "InvariantForm":
        return InvariantForm(
            self.degree,
            {k: v for k, v in self.terms.items() if np.max(np.abs(v)) > tol},
            self.lie,
        )

    def indices_present(self) -> set:
        return {i for key in self.pruned().terms for i in key}

    def dump(self, tol: float = 0.0) -> str:
        """Sorted monomials ``coef * dr^θ.. ⊗ T_i``, one per line."""
        lines = []
        for key in sorted(self.terms):
            coef = self.terms[key][..., 0]
            mono = "^".join(LABELS[i] for i in key) or "1"
            if self.lie:
                for i, c in enumerate(coef, start=1):
                    if abs(c) > tol:
                        lines.append(f"{c:+.12g} * {mono} ⊗ T{i}")
            elif abs(coef) > tol:
                lines.append(f"{coef:+.12g} * {mono}")
        return "\n".join(lines)

    def __repr__(self) -> str:
        kind = "su(2)-valued " if self.lie else ""
        return f"<{kind}{self.degree}-form, {len(self.terms)} terms>"


def zero_form(value, order: int = 1) -> InvariantForm:
    return InvariantForm(0, {(): _as_taylor(value, order)})


def monomial(*indices, coef=1.0, order: int = 1) -> InvariantForm:
    sign, key = _sort_indices(tuple(indices))
    if key is None:
        return InvariantForm(len(indices))
    return InvariantForm(len(key), {key: _as_taylor(coef, order) * sign})


def dr(coef=1.0, order: int = 1) -> InvariantForm:
    return monomial(0, coef=coef, order=order)


def theta(*ks, coef=1.0, order: int = 1) -> InvariantForm:
    """``θ^{k1 k2 …}`` times ``coef``."""
    return monomial(*ks, coef=coef, order=order)


def lie(form: InvariantForm, generator: int | Su2Vector) -> InvariantForm:
    """Tensor a scalar form with ``T_generator`` or with a constant su(2) vector."""
    if form.lie:
        raise CoefficientTypeError("form is already Lie-valued")
    vec = np.zeros(3)
    if isinstance(generator, Su2Vector):
        vec = generator.as_array()
    else:
        vec[generator - 1] = 1.0
    return InvariantForm(form.degree, {k: np.outer(vec, v) for k, v in form.terms.items()}, True)


def lie_form(c1: InvariantForm | None = None, c2: InvariantForm | None = None,
             c3: InvariantForm | None = None) -> InvariantForm:
    """``c1 ⊗ T₁ + c2 ⊗ T₂ + c3 ⊗ T₃`` from scalar forms of equal degree."""
    parts = [lie(c, i) for i, c in enumerate((c1, c2, c3), start=1) if c is not None]
    if not parts:
        raise ValueError("need at least one component")
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """Graded product.  Scalar×scalar or scalar×Lie only."""
    if a.lie and b.lie:
        raise CoefficientTypeError("use bracket_wedge for two Lie-valued forms")
    items = []
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            sign, key = _sort_indices(ka + kb)
            if key is None:
                continue
            items.append((key, sign * _cauchy(ca, cb)))
    return InvariantForm._accumulate(a.degree + b.degree, a.lie or b.lie, items)


def bracket_wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """``[a ∧ b]`` for su(2)-valued forms."""
    if not (a.lie and b.lie):
        raise CoefficientTypeError("bracket_wedge needs two Lie-valued forms")
    items = []
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            sign, key = _sort_indices(ka + kb)
            if key is None:
                continue
            items.append((key, sign * _bracket_coeffs(ca, cb)))
    return InvariantForm._accumulate(a.degree + b.degree, True, items)


def bracket(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """Alias of :func:`bracket_wedge`; reads better when one side is a 0-form."""
    return bracket_wedge(a, b)


@lru_cache(maxsize=None)
def _d_monomial(key: tuple) -> tuple:
    mc = maurer_cartan()
    out: dict = {}
    for p, k in enumerate(key):
        if k == 0:
            continue
        for pair, c in mc[k].items():
            sign, new = _sort_indices(key[:p] + pair + key[p + 1:])
            if new is None:
                continue
            out[new] = out.get(new, 0) + (-1) ** p * c * sign
    return tuple((k, v) for k, v in out.items() if v)


def mc_derivative(a: InvariantForm) -> InvariantForm:
    """Exterior derivative: Maurer-Cartan part plus ``dr ∧ ∂_r`` of coefficients."""
    items = []
    for key, coef in a.terms.items():
        for new, c in _d_monomial(key):
            items.append((new, c * coef))
        if 0 not in key:
            items.append(((0,) + key, _series_derivative(coef)))
    return InvariantForm._accumulate(a.degree + 1, a.lie, items)


def curvature(A: InvariantForm) -> InvariantForm:
    """``F = dA + ½[A∧A]`` for an su(2)-valued 1-form."""
    if not A.lie or A.degree != 1:
        raise CoefficientTypeError("curvature needs an su(2)-valued 1-form")
    return mc_derivative(A) + 0.5 * bracket_wedge(A, A)


def covariant_derivative(A: InvariantForm, Phi: InvariantForm) -> InvariantForm:
    """``∇_A Φ = dΦ + [A, Φ]`` for an su(2)-valued 0-form Φ."""
    if not (A.lie and Phi.lie):
        raise CoefficientTypeError("connection and Higgs field must be Lie-valued")
    return mc_derivative(Phi) + bracket_wedge(A, Phi)


def exterior_covariant_derivative(A: InvariantForm, a: InvariantForm) -> InvariantForm:
    """``d_A a = da + [A∧a]``; with ``a = F`` this is the Bianchi expression."""
    return mc_derivative(a) + bracket_wedge(A, a)


# --------------------------------------------------------------------------
# metric operations

@dataclass(frozen=True)
class CoframeMetric:
    """Diagonal metric ``g = Σ gᵢ (eⁱ)²`` on ``dr, θ¹..θ⁵`` at one radius.

    ``coeffs`` are jets so that ``⋆`` commutes correctly with ``d``.  The
    orientation form is ``orientation · √det · dr∧θ¹²³⁴⁵``; the Kähler
    orientation of the Stenzel structure is ``orientation = -1``.
    """

    coeffs: tuple
    orientation: int = -1
    complex_structure: dict | None = None

    def __post_init__(self):
        if len(self.coeffs) != 6:
            raise ValueError("need six metric coefficients")
        if any(np.real(ScalarJet.from_taylor(_as_taylor(c)).value) <= 0 for c in self.coeffs):
            raise ValueError("metric coefficients must be positive")

    def jet(self, i: int) -> ScalarJet:
        c = self.coeffs[i]
        return c if isinstance(c, ScalarJet) else ScalarJet.constant(c)

    def norm_factor(self, key: tuple) -> ScalarJet:
        """``√(g_{i1}⋯g_{ik})`` for ``key = (i1..ik)``, i.e. ``1/|θ^key|_g``."""
        out = ScalarJet.constant(1.0, self.jet(0).order)
        for i in key:
            out = out * self.jet(i)
        return out ** 0.5


def _require_horizontal(a: InvariantForm) -> None:
    if any(6 in key for key in a.terms):
        raise ValueError("form has θ⁶ components; not a form on the base")


def hodge_star(a: InvariantForm, g: CoframeMetric) -> InvariantForm:
    _require_horizontal(a)
    full = (0, 1, 2, 3, 4, 5)
    items = []
    for key, coef in a.terms.items():
        comp = tuple(i for i in full if i not in key)
        sign, _ = _sort_indices(key + comp)
        factor = (g.norm_factor(comp) / g.norm_factor(key)).coeffs
        items.append((comp, g.orientation * sign * _cauchy(coef, factor)))
    return InvariantForm._accumulate(6 - a.degree, a.lie, items)


def lambda_op(beta: InvariantForm, g: CoframeMetric, omega: InvariantForm) -> InvariantForm:
    """``Λβ = ⋆(β ∧ ω²/2)``."""
    if beta.degree != 2:
        raise ValueError("Λ acts on 2-forms")
    return hodge_star(wedge(beta, 0.5 * wedge(omega, omega)), g)


def apply_complex_structure(a: InvariantForm, jets: dict) -> InvariantForm:
    """Complex structure on invariant 1-forms.

    ``jets`` supplies ``r``, ``Rp``, ``Rm`` as :class:`ScalarJet`.
    """
    if a.degree != 1:
        raise ValueError("complex structure acts on 1-forms")
    _require_horizontal(a)
    r, rp, rm = jets["r"], jets["Rp"], jets["Rm"]
    if np.real(rm.value) <= 0:
        raise ValueError("complex structure undefined on the zero section")
    images = {
        1: (0, r / (2.0 * rp * rm)),
        0: (1, -(2.0 * rp * rm) / r),
        2: (4, -(rm / rp)),
        4: (2, rp / rm),
        3: (5, -(rm / rp)),
        5: (3, rp / rm),
    }
    items = []
    for (k,), coef in a.terms.items():
        target, factor = images[k]
        items.append(((target,), _cauchy(coef, factor.coeffs)))
    return InvariantForm._accumulate(1, a.lie, items)
