"""Coefficient ring for the symbolic algebra.

An :class:`ExactScalar` is a finite sum ``q * sqrt(p)`` where ``q`` is a
polynomial in ``z, eps, Rsq`` over the rationals and ``p`` is a signed
squarefree integer.  A negative radicand ``-p`` stands for ``i*sqrt(p)``, so
Gaussian coefficients need no separate complex type.
"""
from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.rings import PolyElement, ring

from ..surd import Surd, _radical_product

RING, Z, EPS, RSQ = ring("z,eps,Rsq", QQ)
Z_INDEX, EPS_INDEX, RSQ_INDEX = 0, 1, 2


def _radical_mul(p1: int, p2: int) -> tuple[int, int]:
    """sqrt(p1) * sqrt(p2) for signed radicands -> (integer factor, signed radicand)."""
    c, p = _radical_product(abs(p1), abs(p2))
    if p1 < 0 and p2 < 0:
        return -c, p
    if p1 < 0 or p2 < 0:
        return c, -p
    return c, p


def as_poly(value) -> PolyElement:
    if isinstance(value, PolyElement):
        return value
    if isinstance(value, Fraction):
        return RING.ground_new(QQ(value.numerator, value.denominator))
    return RING.ground_new(value)


class ExactScalar:
    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        acc: dict[int, PolyElement] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for p, q in items:
                q = as_poly(q)
                if not q:
                    continue
                acc[p] = acc[p] + q if p in acc else q
        self._terms = {p: acc[p] for p in sorted(acc) if acc[p]}

    # construction ---------------------------------------------------------
    @classmethod
    def from_surd(cls, s: Surd) -> "ExactScalar":
        return cls({p: as_poly(q) for p, q in s.terms.items()})

    @classmethod
    def coerce(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, Surd):
            return cls.from_surd(value)
        if isinstance(value, complex):
            raise TypeError("use ExactScalar.i() for imaginary parts")
        return cls({1: as_poly(value)})

    @classmethod
    def i(cls) -> "ExactScalar":
        return cls({-1: as_poly(1)})

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict[int, PolyElement]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def z_degree(self) -> int:
        return max((q.degree(Z) for q in self._terms.values()), default=-1)

    def z_coeff(self, d: int) -> "ExactScalar":
        """Coefficient of z**d (a scalar free of z)."""
        return ExactScalar({p: q.coeff_wrt(Z, d) for p, q in self._terms.items()})

    def is_constant(self) -> bool:
        return all(q.is_ground for q in self._terms.values())

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = ExactScalar.coerce(other)
        return ExactScalar(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar({p: -q for p, q in self._terms.items()})

    def __sub__(self, other):
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, PolyElement):
            return ExactScalar({p: q * other for p, q in self._terms.items()})
        other = ExactScalar.coerce(other)
        out = []
        for p1, q1 in self._terms.items():
            for p2, q2 in other._terms.items():
                c, p = _radical_mul(p1, p2)
                out.append((p, q1 * q2 * c))
        return ExactScalar(out)

    __rmul__ = __mul__

    def div_constant(self, other) -> "ExactScalar":
        """Divide by a nonzero single-radical constant."""
        other = ExactScalar.coerce(other)
        if len(other._terms) != 1:
            raise ZeroDivisionError("divisor must be a single radical term")
        ((p, q),) = other._terms.items()
        if not q.is_ground:
            raise ZeroDivisionError("divisor must be constant")
        qc = q.LC
        # 1/(q sqrt(p)) = sqrt(p)/(q p); for p < 0 that is i sqrt|p| / (q p)
        inv = ExactScalar({p: as_poly(QQ(1) / (qc * p))})
        return self * inv

    def exquo_eps(self, power: int) -> "ExactScalar":
        """Exact division by eps**power; raises if eps does not divide."""
        if power == 0:
            return self
        divisor = EPS**power
        out = {}
        for p, q in self._terms.items():
            quo, rem = q.div(divisor)
            if rem:
                raise ArithmeticError(f"eps**{power} does not divide {q}")
            out[p] = quo
        return ExactScalar(out)

    def conjugate(self) -> "ExactScalar":
        """Complex conjugate; z, eps and Rsq are real."""
        return ExactScalar({p: (-q if p < 0 else q) for p, q in self._terms.items()})

    def compose_z(self, shift: PolyElement) -> "ExactScalar":
        """Substitute z -> z + shift."""
        if not shift:
            return self
        return ExactScalar({p: q.compose(Z, Z + shift) for p, q in self._terms.items()})

    def subs(self, eps=None, Rsq=None, z=None) -> "ExactScalar":
        out = {}
        for p, q in self._terms.items():
            if eps is not None:
                q = q.subs(EPS, _qq(eps))
            if Rsq is not None:
                q = q.subs(RSQ, _qq(Rsq))
            if z is not None:
                q = q.subs(Z, _qq(z))
            out[p] = q
        return ExactScalar(out)

    # comparison / output --------------------------------------------------
    def __eq__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple((p, str(q)) for p, q in self._terms.items()))

    def to_complex(self, eps: float = 0.0, Rsq: float = 0.0, z: float = 0.0) -> complex:
        total = 0j
        for p, q in self._terms.items():
            val = sum(
                float(c) * z ** mon[0] * eps ** mon[1] * Rsq ** mon[2] for mon, c in q.items()
            )
            root = abs(p) ** 0.5
            total += val * root * (1j if p < 0 else 1)
        return total

    def to_json(self) -> list[dict]:
        return [
            {"radicand": abs(p), "imag": p < 0, "coeff": str(q.as_expr())}
            for p, q in self._terms.items()
        ]

    def __repr__(self):
        return f"ExactScalar({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for p, q in self._terms.items():
            rad = "" if abs(p) == 1 else f"sqrt({abs(p)})*"
            unit = "I*" if p < 0 else ""
            parts.append(f"{unit}{rad}({q.as_expr()})")
        return " + ".join(parts)


def _qq(value):
    if isinstance(value, PolyElement):
        return value
    f = Fraction(value)
    return QQ(f.numerator, f.denominator)
