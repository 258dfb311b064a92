"""Ladder normal forms for the deformed sphere algebra.

Every element is stored as ``sum_s L(s) p_s(z)`` with ``L(s) = J+^s`` for
``s > 0``, ``J-^|s|`` for ``s < 0`` and ``1`` for ``s = 0``.  Products are
normal ordered with

    p(z) J+ = J+ p(z + eps)        p(z) J- = J- p(z - eps)
    J- J+ = a2 (Rsq - z^2 - eps z)  J+ J- = a2 (Rsq - z^2 + eps z)

where ``a2`` is alpha squared (1 on the sphere).  Mixed ladder products never
survive, so the representation is unique.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from ..coefficients import factorial
from ..surd import Surd
from .scalar import EPS, RING, RSQ, Z, ExactScalar, as_poly, _qq


class SpanError(ValueError):
    """Raised when an element is not in the span of the requested basis."""

    def __init__(self, message: str, residual: "NormalForm"):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class AlgebraParams:
    """eps and Rsq are either ``None`` (kept symbolic) or exact rationals."""

    epsilon: Fraction | None = None
    Rsq: Fraction | None = None
    alpha_sq: Fraction = Fraction(1)

    def __post_init__(self):
        if self.alpha_sq == 0:
            raise ValueError("alpha_sq must be nonzero")
        for name in ("epsilon", "Rsq", "alpha_sq"):
            val = getattr(self, name)
            if val is not None and not isinstance(val, Fraction):
                object.__setattr__(self, name, Fraction(val))

    @property
    def eps(self):
        return EPS if self.epsilon is None else as_poly(_qq(self.epsilon))

    @property
    def rsq(self):
        return RSQ if self.Rsq is None else as_poly(_qq(self.Rsq))

    @property
    def a2(self):
        return as_poly(_qq(self.alpha_sq))

    @property
    def is_symbolic(self) -> bool:
        return self.epsilon is None and self.Rsq is None

    def symbolic(self) -> "AlgebraParams":
        return AlgebraParams(alpha_sq=self.alpha_sq)

    @property
    def Rhat_sq(self):
        """Rhat^2 = R^2 + eps^2/4 as a ring element."""
        return self.rsq + self.eps**2 / 4


SPHERE = AlgebraParams()


@lru_cache(maxsize=None)
def _ladder_product(s1: int, s2: int, params: AlgebraParams):
    """L(s1) L(s2) = L(s1 + s2) c(z); returns the polynomial c."""
    if s1 == 0 or s2 == 0 or (s1 > 0) == (s2 > 0):
        return RING.one
    eps, rsq, a2 = params.eps, params.rsq, params.a2
    if s1 > 0:
        # J+^a J-^b = (J+^(a-1) J-^(b-1)) g(z - (b-1) eps)
        a, b = s1, -s2
        g = a2 * (rsq - Z**2 + eps * Z)
        inner = _ladder_product(a - 1, -(b - 1), params)
        return inner * g.compose(Z, Z - (b - 1) * eps)
    # J-^a J+^b = (J-^(a-1) J+^(b-1)) h(z + (b-1) eps)
    a, b = -s1, s2
    h = a2 * (rsq - Z**2 - eps * Z)
    inner = _ladder_product(-(a - 1), b - 1, params)
    return inner * h.compose(Z, Z + (b - 1) * eps)


class NormalForm:
    """An element of the algebra in ladder normal form (immutable)."""

    __slots__ = ("params", "_terms")

    def __init__(self, terms: Mapping[int, ExactScalar] | None = None, params: AlgebraParams = SPHERE):
        self.params = params
        acc: dict[int, ExactScalar] = {}
        for s, c in (terms or {}).items():
            c = ExactScalar.coerce(c)
            acc[s] = acc[s] + c if s in acc else c
        self._terms = {s: acc[s] for s in sorted(acc) if not acc[s].is_zero()}

    @property
    def terms(self) -> dict[int, ExactScalar]:
        return dict(self._terms)

    def ladder_powers(self) -> list[int]:
        return list(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree counting J+, J- and z each as one."""
        return max((abs(s) + c.z_degree() for s, c in self._terms.items()), default=-1)

    def _check(self, other: "NormalForm"):
        if self.params != other.params:
            raise ValueError("elements belong to algebras with different parameters")

    def __add__(self, other):
        if not isinstance(other, NormalForm):
            other = NormalForm.scalar(other, self.params)
        self._check(other)
        acc = dict(self._terms)
        for s, c in other._terms.items():
            acc[s] = acc[s] + c if s in acc else c
        return NormalForm(acc, self.params)

    __radd__ = __add__

    def __neg__(self):
        return NormalForm({s: -c for s, c in self._terms.items()}, self.params)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NormalForm):
            return multiply(self, other)
        return NormalForm({s: c * ExactScalar.coerce(other) for s, c in self._terms.items()}, self.params)

    def __rmul__(self, other):
        return NormalForm({s: ExactScalar.coerce(other) * c for s, c in self._terms.items()}, self.params)

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.params == other.params and self._terms == other._terms

    def __hash__(self):
        return hash((self.params, tuple(self._terms.items())))

    def subs(self, epsilon=None, Rsq=None) -> "NormalForm":
        """Specialize symbolic eps and/or Rsq to exact rationals."""
        p = self.params
        new = AlgebraParams(
            epsilon=p.epsilon if epsilon is None else Fraction(epsilon),
            Rsq=p.Rsq if Rsq is None else Fraction(Rsq),
            alpha_sq=p.alpha_sq,
        )
        return NormalForm(
            {s: c.subs(eps=epsilon, Rsq=Rsq) for s, c in self._terms.items()}, new
        )

    @classmethod
    def scalar(cls, value, params: AlgebraParams = SPHERE) -> "NormalForm":
        return cls({0: ExactScalar.coerce(value)}, params)

    def to_json(self) -> dict:
        out = []
        for s, c in self._terms.items():
            out.append({"s": s, "poly": [c.z_coeff(d).to_json() for d in range(c.z_degree() + 1)]})
        return {"terms": out}

    def __repr__(self):
        return f"NormalForm({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for s, c in self._terms.items():
            lad = "" if s == 0 else (f"Jp^{s}*" if s > 0 else f"Jm^{-s}*")
            parts.append(f"{lad}[{c}]")
        return " + ".join(parts)


def multiply(a: NormalForm, b: NormalForm) -> NormalForm:
    """Normal-ordered product a*b."""
    a._check(b)
    params = a.params
    eps = params.eps
    acc: dict[int, ExactScalar] = {}
    for s1, p in a._terms.items():
        for s2, q in b._terms.items():
            c = _ladder_product(s1, s2, params)
            term = p.compose_z(s2 * eps) * q * c
            s = s1 + s2
            acc[s] = acc[s] + term if s in acc else term
    return NormalForm(acc, params)


def dagger(a: NormalForm) -> NormalForm:
    """Hermitian conjugate: J+ <-> J-, z fixed, coefficients conjugated."""
    eps = a.params.eps
    # (L(s) p(z))^dagger = conj(p)(z) L(-s) = L(-s) conj(p)(z - s eps)
    return NormalForm(
        {-s: c.conjugate().compose_z(-s * eps) for s, c in a._terms.items()}, a.params
    )


def commutator(a: NormalForm, b: NormalForm) -> NormalForm:
    return multiply(a, b) - multiply(b, a)


# generators ---------------------------------------------------------------

def one(params: AlgebraParams = SPHERE) -> NormalForm:
    return NormalForm.scalar(1, params)


def zgen(params: AlgebraParams = SPHERE) -> NormalForm:
    return NormalForm({0: ExactScalar({1: Z})}, params)


def jplus(params: AlgebraParams = SPHERE, power: int = 1) -> NormalForm:
    return NormalForm({power: 1}, params)


def jminus(params: AlgebraParams = SPHERE, power: int = 1) -> NormalForm:
    return NormalForm({-power: 1}, params)


def xgen(params: AlgebraParams = SPHERE) -> NormalForm:
    half = Fraction(1, 2)
    return NormalForm({1: half, -1: half}, params)


def ygen(params: AlgebraParams = SPHERE) -> NormalForm:
    # (J+ - J-)/(2i) = -i/2 J+ + i/2 J-
    return NormalForm(
        {1: ExactScalar({-1: as_poly(Fraction(-1, 2))}), -1: ExactScalar({-1: as_poly(Fraction(1, 2))})},
        params,
    )


def casimir(params: AlgebraParams = SPHERE) -> NormalForm:
    """J0^2 + (J+J- + J-J+)/(2 alpha^2)."""
    jp, jm, z = jplus(params), jminus(params), zgen(params)
    half_inv = ExactScalar.coerce(1 / (2 * params.alpha_sq))
    return multiply(z, z) + (multiply(jp, jm) + multiply(jm, jp)) * half_inv


# basis ----------------------------------------------------------------------

def _check_label(n: int, m: int):
    if n < 0 or abs(m) > n or int(n) != n or int(m) != m:
        raise ValueError(f"invalid basis label (n={n}, m={m})")


@lru_cache(maxsize=None)
def _pmn_symbolic(n: int, m: int, alpha_sq: Fraction) -> NormalForm:
    params = AlgebraParams(alpha_sq=alpha_sq)
    f = jplus(params, n) if n else one(params)
    jm = jminus(params)
    for _ in range(n - m):
        f = commutator(jm, f)
    pref = Surd.sqrt(Fraction(factorial(n + m), factorial(2 * n) * factorial(n - m)))
    terms = {s: c.exquo_eps(n - m) * pref for s, c in f.terms.items()}
    return NormalForm(terms, params)


def build_pmn(n: int, m: int, params: AlgebraParams = SPHERE) -> NormalForm:
    """Basis element eps^(m-n) sqrt((n+m)!/((2n)!(n-m)!)) (ad J-)^(n-m) J+^n.

    The construction runs with symbolic eps (which divides out exactly) and is
    then specialized, so eps = 0 is allowed.
    """
    _check_label(n, m)
    f = _pmn_symbolic(int(n), int(m), params.alpha_sq)
    if params.epsilon is None and params.Rsq is None:
        return f
    return f.subs(epsilon=params.epsilon, Rsq=params.Rsq)


def expand_in_basis(f: NormalForm, nmax: int | None = None) -> dict[tuple[int, int], ExactScalar]:
    """Coefficients c with f = sum c[n, m] P^m_n, solved block by block.

    Within a ladder block s the basis elements P^s_n (n >= |s|) have z-degree
    n - |s| with constant leading coefficients, so back substitution from the
    top degree is exact Gaussian elimination on a triangular system.
    """
    if nmax is None:
        nmax = max(f.degree(), 0)
    coeffs: dict[tuple[int, int], ExactScalar] = {}
    for s, block in f.terms.items():
        rest = block
        while not rest.is_zero():
            d = rest.z_degree()
            n = d + abs(s)
            if n > nmax:
                raise SpanError(
                    f"component of degree {n} exceeds nmax={nmax}",
                    NormalForm({s: rest}, f.params),
                )
            basis = build_pmn(n, s, f.params).terms[s]
            lead = basis.z_coeff(d)
            if not lead.is_constant():
                raise SpanError("basis leading coefficient is not constant", NormalForm({s: rest}, f.params))
            c = rest.z_coeff(d).div_constant(lead)
            coeffs[(n, s)] = c
            rest = rest - basis * c
    return coeffs


def pi0(f: NormalForm) -> ExactScalar:
    """Identity component of f."""
    block = f.terms.get(0)
    if block is None:
        return ExactScalar()
    return expand_in_basis(NormalForm({0: block}, f.params)).get((0, 0), ExactScalar())


def inner(f: NormalForm, g: NormalForm) -> ExactScalar:
    """Sesquilinear form pi0(f^dagger g)."""
    return pi0(multiply(dagger(f), g))


def norm_formula(n: int, params: AlgebraParams = SPHERE) -> ExactScalar:
    """(n!)^2/(2n+1)! prod_{r=1..n} (4 Rsq + eps^2 (1 - r^2)) in the ring."""
    eps, rsq = params.eps, params.rsq
    acc = RING.one * QQ_frac(factorial(n) ** 2, factorial(2 * n + 1))
    for r in range(1, n + 1):
        acc = acc * (4 * rsq + eps**2 * (1 - r * r))
    return ExactScalar({1: acc})


def QQ_frac(a: int, b: int):
    return as_poly(Fraction(a, b))


def ad(a: NormalForm):
    return lambda f: commutator(a, f)


def laplacian(f: NormalForm) -> NormalForm:
    """ad_z^2 + (ad_J+ ad_J- + ad_J- ad_J+)/2 applied to f.

    The factor 1/2 makes this ad_x^2 + ad_y^2 + ad_z^2; without it the
    operator is not diagonal on the basis (its value on P^m_n depends on m).
    """
    p = f.params
    z, jp, jm = zgen(p), jplus(p), jminus(p)
    adz, adp, adm = ad(z), ad(jp), ad(jm)
    return adz(adz(f)) + (adp(adm(f)) + adm(adp(f))) * Fraction(1, 2)


def eigen_residuals(n: int, m: int, params: AlgebraParams = SPHERE) -> dict[str, NormalForm]:
    """Residuals of the weight, ladder and Laplacian eigenrelations of P^m_n.

    Every value is exactly zero when the relations hold.
    """
    _check_label(n, m)
    eps = ExactScalar({1: params.eps})
    f = build_pmn(n, m, params)
    z, jp, jm = zgen(params), jplus(params), jminus(params)
    zero = NormalForm({}, f.params)

    def neighbour(mm):
        return build_pmn(n, mm, params) if abs(mm) <= n else zero

    up = Surd.sqrt((n - m) * (n + m + 1))
    down = Surd.sqrt((n + m) * (n - m + 1))
    out = {
        "ad_z": commutator(z, f) - f * (eps * m),
        "ad_jplus": commutator(jp, f) - neighbour(m + 1) * (eps * ExactScalar.from_surd(up)),
        "ad_jminus": commutator(jm, f) - neighbour(m - 1) * (eps * ExactScalar.from_surd(down)),
        "laplacian": laplacian(f) - f * (eps * eps * (n * (n + 1))),
    }
    return out
