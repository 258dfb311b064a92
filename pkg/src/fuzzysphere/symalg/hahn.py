"""Hahn polynomials and the Hahn-polynomial form of the basis elements.

Convention (Nikiforov-Suslov-Uvarov, discrete variable x = 0..N-1)::

    h_n^(a,b)(x, N) = (-1)^n Gamma(N) (b+1)_n / (n! Gamma(N-n))
                      * 3F2(-n, a+b+n+1, -x; b+1, 1-N; 1)

with leading coefficient (a+b+n+1)_n / n!.  Gamma(N)/Gamma(N-n) is expanded
as the polynomial (N-1)(N-2)...(N-n), so N may stay symbolic.
"""
from __future__ import annotations

from functools import lru_cache

import sympy as sp

from .algebra import SPHERE, AlgebraParams, NormalForm
from .convert import Jm, Jp, Rsq, eps, from_sympy, z

x_sym, N_sym = sp.symbols("x N")


def hahn_poly(alpha: int, beta: int, n: int, N=N_sym, x=x_sym):
    """h_n^(alpha,beta)(x, N) as an expanded sympy expression."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if n == 0:
        return sp.Integer(1)
    falling = sp.Mul(*[(N - i) for i in range(1, n + 1)])
    pref = (-1) ** n * falling * sp.rf(beta + 1, n) / sp.factorial(n)
    series = sp.Integer(0)
    for k in range(n + 1):
        num = sp.rf(-n, k) * sp.rf(alpha + beta + n + 1, k) * sp.rf(-x, k)
        den = sp.rf(beta + 1, k) * sp.rf(1 - N, k) * sp.factorial(k)
        series += num / den
    return sp.expand(sp.cancel(sp.together(pref * series)))


def _eliminate_N(expr):
    """Reduce with N^2 = 4 Rsq/eps^2 + 1; the result must be free of N.

    At Rsq = eps^2 k(k+1) this makes N = 2k+1, the dimension of the
    representation, matching the range x = 0..N-1 of the Hahn variable.
    """
    expr = sp.expand(expr)
    reduced = sp.rem(sp.Poly(expr, N_sym), sp.Poly(N_sym**2 - (4 * Rsq / eps**2 + 1), N_sym))
    out = sp.expand(sp.cancel(reduced.as_expr()))
    if out.has(N_sym):
        raise ArithmeticError("Hahn form did not reduce to an N-free expression")
    return out


@lru_cache(maxsize=None)
def _hahn_pmn_expr(n: int, m: int):
    a = abs(m)
    deg = n - a
    pref = (-eps) ** deg / sp.sqrt(sp.binomial(2 * n, deg))
    if m >= 0:
        arg = z / eps + (N_sym - 1) / 2
        ladder = Jp**a
        sign = 1
    else:
        # mirror image of the m > 0 case under the hermitian conjugate
        arg = z / eps - a + (N_sym - 1) / 2
        ladder = Jm**a
        sign = -1 if a % 2 else 1
    h = hahn_poly(a, a, deg, N_sym - a, x_sym).subs(x_sym, arg)
    poly = _eliminate_N(pref * h)
    poly = sp.expand(sp.cancel(poly))
    if any(t.as_powers_dict().get(eps, 0) < 0 for t in sp.Add.make_args(poly)):
        raise ArithmeticError("Hahn form is not polynomial in eps")
    return sign * ladder * poly


def hahn_pmn(n: int, m: int, params: AlgebraParams = SPHERE) -> NormalForm:
    """P^m_n assembled from the Hahn polynomial formula (independent of build_pmn)."""
    if params.alpha_sq != 1:
        raise ValueError("the Hahn form is implemented for the sphere (alpha^2 = 1)")
    if n < 0 or abs(m) > n:
        raise ValueError(f"invalid basis label (n={n}, m={m})")
    return from_sympy(_hahn_pmn_expr(int(n), int(m)), params)
