"""Conversion between sympy expressions and normal forms."""
from __future__ import annotations

from fractions import Fraction

import sympy as sp

from .algebra import SPHERE, AlgebraParams, NormalForm
from .scalar import RING, ExactScalar

Jp, Jm, z, eps, R, Rsq = sp.symbols("Jp Jm z eps R Rsq")


def sympy_number_to_scalar(c) -> ExactScalar:
    """Convert an exact sympy number (sums of rational*sqrt(int), possibly times I)."""
    out = ExactScalar()
    for term in sp.Add.make_args(sp.expand(c)):
        if term == 0:
            continue
        imag = False
        if term.has(sp.I):
            term = sp.expand(term / sp.I)
            imag = True
        q, rest = term.as_coeff_Mul()
        if not q.is_Rational:
            raise ValueError(f"inexact coefficient {c}")
        if rest == 1:
            rad = 1
        else:
            sq = rest**2
            if not (sq.is_Integer and sq > 0):
                raise ValueError(f"cannot interpret coefficient {c}")
            rad = int(sq)
        q = Fraction(int(sp.Rational(q).p), int(sp.Rational(q).q))
        out = out + ExactScalar({(-rad if imag else rad): q})
    return out


def from_sympy(expr, params: AlgebraParams = SPHERE) -> NormalForm:
    """Read ``sum L(s) p(z)`` written with commuting symbols Jp, Jm, z, eps, R/Rsq.

    Ladder symbols are taken to stand to the left of the z-polynomial, which is
    how normal-form tables are written.
    """
    expr = sp.expand(sp.sympify(expr).subs(R**2, Rsq))
    acc: dict[int, ExactScalar] = {}
    for term in sp.Add.make_args(expr):
        if term == 0:
            continue
        coeff, mono = term.as_independent(Jp, Jm, z, eps, Rsq, R, as_Add=False)
        powers = mono.as_powers_dict() if mono != 1 else {}
        if R in powers:
            raise ValueError("odd powers of R do not occur in the algebra")
        a, b = int(powers.get(Jp, 0)), int(powers.get(Jm, 0))
        if a and b:
            raise ValueError("mixed ladder monomial is not in normal form")
        s = a - b
        poly = RING({(int(powers.get(z, 0)), int(powers.get(eps, 0)), int(powers.get(Rsq, 0))): 1})
        piece = sympy_number_to_scalar(coeff) * poly
        acc[s] = acc[s] + piece if s in acc else piece
    nf = NormalForm(acc, params.symbolic())
    if params.epsilon is not None or params.Rsq is not None:
        nf = nf.subs(epsilon=params.epsilon, Rsq=params.Rsq)
    return nf


def to_sympy(f: NormalForm):
    """Commutative sympy rendering of a normal form (ladder factor written first)."""
    total = sp.Integer(0)
    for s, c in f.terms.items():
        lad = Jp**s if s > 0 else (Jm ** (-s) if s < 0 else 1)
        val = sp.Integer(0)
        for p, q in c.terms.items():
            root = sp.sqrt(abs(p)) * (sp.I if p < 0 else 1)
            val += root * q.as_expr(z, eps, Rsq)
        total += lad * val
    return total
