"""Exact Clebsch-Gordan, Wigner 3-j and 6-j coefficients.

Phases follow the Condon-Shortley convention: <j1 j1; j2 (J-j1) | J J> > 0
and the lowering operator has nonnegative matrix elements.  Every function
takes half-integer arguments in any form accepted by :meth:`HalfInt.of` and
returns an exact :class:`Surd`.  Couplings that violate a selection rule
evaluate to exact zero.
"""
from __future__ import annotations

import os
import threading
from fractions import Fraction
from functools import lru_cache

from .surd import HalfInt, Surd

FACTORIAL_CAP = int(os.environ.get("NC_SPHERE_FACTORIAL_CAP", "200"))

_fact_lock = threading.Lock()
_fact_table = [1]


def factorial(n: int) -> int:
    """Memoized exact factorial, bounded by ``FACTORIAL_CAP``."""
    if n < 0:
        raise ValueError("negative factorial")
    if n > FACTORIAL_CAP:
        raise OverflowError(f"{n}! exceeds the factorial cap {FACTORIAL_CAP}")
    if n >= len(_fact_table):
        with _fact_lock:
            while len(_fact_table) <= n:
                _fact_table.append(_fact_table[-1] * len(_fact_table))
    return _fact_table[n]


def _tw(*args) -> tuple[int, ...]:
    return tuple(HalfInt.of(a).twice for a in args)


def triangle_ok(a2: int, b2: int, c2: int) -> bool:
    """Triangle and parity condition on doubled spins."""
    if min(a2, b2, c2) < 0:
        return False
    if (a2 + b2 + c2) % 2:
        return False
    return abs(a2 - b2) <= c2 <= a2 + b2


def _magnetic_ok(j2: int, m2: int) -> bool:
    return abs(m2) <= j2 and (j2 - m2) % 2 == 0


@lru_cache(maxsize=None)
def _cg_twice(j1: int, j2: int, j: int, m1: int, m2: int, m: int) -> Surd:
    if m1 + m2 != m or not triangle_ok(j1, j2, j):
        return Surd()
    if not (_magnetic_ok(j1, m1) and _magnetic_ok(j2, m2) and _magnetic_ok(j, m)):
        return Surd()
    f = factorial
    # every (x +- y)/2 below is an integer once the checks above pass
    pre = Fraction(
        (j + 1)
        * f((j + j1 - j2) // 2)
        * f((j - j1 + j2) // 2)
        * f((j1 + j2 - j) // 2),
        f((j1 + j2 + j) // 2 + 1),
    )
    pre *= (
        f((j + m) // 2)
        * f((j - m) // 2)
        * f((j1 - m1) // 2)
        * f((j1 + m1) // 2)
        * f((j2 - m2) // 2)
        * f((j2 + m2) // 2)
    )
    total = Fraction(0)
    kmin = max(0, (j2 - j - m1) // 2, (j1 - j + m2) // 2)
    kmax = min((j1 + j2 - j) // 2, (j1 - m1) // 2, (j2 + m2) // 2)
    for k in range(kmin, kmax + 1):
        den = (
            f(k)
            * f((j1 + j2 - j) // 2 - k)
            * f((j1 - m1) // 2 - k)
            * f((j2 + m2) // 2 - k)
            * f((j - j2 + m1) // 2 + k)
            * f((j - j1 - m2) // 2 + k)
        )
        total += Fraction((-1) ** k, den)
    return Surd.sqrt(pre) * total


def clebsch_gordan(j1, j2, j, m1, m2, m) -> Surd:
    """<j1 m1; j2 m2 | j m> (argument order follows the product-law notation)."""
    return _cg_twice(*_tw(j1, j2, j, m1, m2, m))


def wigner_3j(j1, j2, j3, m1, m2, m3) -> Surd:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3)."""
    t1, t2, t3, u1, u2, u3 = _tw(j1, j2, j3, m1, m2, m3)
    cg = _cg_twice(t1, t2, t3, u1, u2, -u3)
    if cg.is_zero():
        return cg
    phase = (t1 - t2 - u3) // 2
    return Surd.signed_sqrt((-1) ** phase, Fraction(1, t3 + 1)) * cg


def _delta(a: int, b: int, c: int) -> Fraction:
    f = factorial
    return Fraction(
        f((a + b - c) // 2) * f((a - b + c) // 2) * f((-a + b + c) // 2),
        f((a + b + c) // 2 + 1),
    )


@lru_cache(maxsize=None)
def _sixj_twice(a: int, b: int, c: int, d: int, e: int, g: int) -> Surd:
    if not (
        triangle_ok(a, b, c)
        and triangle_ok(a, e, g)
        and triangle_ok(d, b, g)
        and triangle_ok(d, e, c)
    ):
        return Surd()
    f = factorial
    pre = _delta(a, b, c) * _delta(a, e, g) * _delta(d, b, g) * _delta(d, e, c)
    tmin = max(a + b + c, a + e + g, d + b + g, d + e + c) // 2
    tmax = min(a + b + d + e, a + c + d + g, b + c + e + g) // 2
    total = Fraction(0)
    for t in range(tmin, tmax + 1):
        den = (
            f(t - (a + b + c) // 2)
            * f(t - (a + e + g) // 2)
            * f(t - (d + b + g) // 2)
            * f(t - (d + e + c) // 2)
            * f((a + b + d + e) // 2 - t)
            * f((a + c + d + g) // 2 - t)
            * f((b + c + e + g) // 2 - t)
        )
        total += Fraction((-1) ** t * f(t + 1), den)
    return Surd.sqrt(pre) * total


def wigner_6j(j1, j2, j3, j4, j5, j6) -> Surd:
    """Wigner 6-j symbol {j1 j2 j3; j4 j5 j6} via the Racah sum."""
    return _sixj_twice(*_tw(j1, j2, j3, j4, j5, j6))


# ---------------------------------------------------------------------------
# Independent oracle: explicit Gram-Schmidt on the tensor-product space.
#
# Each factor uses the unnormalized basis e_a (a = j - m) with J_- e_a = e_{a+1};
# its Gram matrix is diagonal and integral: g_{a+1} = g_a (2j - a)(a + 1).
# Orthogonalization and lowering then stay inside the rationals, and a single
# square root is taken when reading off a coefficient.


def _gram_diag(j2: int) -> list[int]:
    g = [1]
    for a in range(j2):
        g.append(g[-1] * (j2 - a) * (a + 1))
    return g


@lru_cache(maxsize=None)
def _coupled_states(j1: int, j2: int):
    g1, g2 = _gram_diag(j1), _gram_diag(j2)

    def gram(u, v):
        return sum(c * v.get(key, 0) * g1[key[0]] * g2[key[1]] for key, c in u.items())

    def lower(v):
        out: dict[tuple[int, int], Fraction] = {}
        for (a1, a2), c in v.items():
            if a1 + 1 <= j1:
                out[(a1 + 1, a2)] = out.get((a1 + 1, a2), 0) + c
            if a2 + 1 <= j2:
                out[(a1, a2 + 1)] = out.get((a1, a2 + 1), 0) + c
        return {k: c for k, c in out.items() if c != 0}

    states: dict[int, dict[int, dict]] = {}
    for jj in range(j1 + j2, abs(j1 - j2) - 1, -2):
        a2 = (j1 + j2 - jj) // 2
        v: dict[tuple[int, int], Fraction] = {(0, a2): Fraction(1)}
        for higher in states.values():
            u = higher[jj]
            coef = gram(u, v) / gram(u, u)
            for key, c in u.items():
                v[key] = v.get(key, 0) - coef * c
            v = {k: c for k, c in v.items() if c != 0}
        if v.get((0, a2), 0) <= 0:
            raise ArithmeticError("Condon-Shortley phase violated in oracle")
        ladder = {jj: v}
        for mm in range(jj - 2, -jj - 1, -2):
            ladder[mm] = lower(ladder[mm + 2])
        states[jj] = ladder
    norms = {
        jj: {mm: gram(vec, vec) for mm, vec in ladder.items()} for jj, ladder in states.items()
    }
    return states, norms, g1, g2


def coupling_oracle_cg(j1, j2, j, m1, m2, m) -> Surd:
    """Clebsch-Gordan coefficient by explicit construction of coupled states."""
    t1, t2, t, u1, u2, u = _tw(j1, j2, j, m1, m2, m)
    if u1 + u2 != u or not triangle_ok(t1, t2, t):
        return Surd()
    if not (_magnetic_ok(t1, u1) and _magnetic_ok(t2, u2) and _magnetic_ok(t, u)):
        return Surd()
    states, norms, g1, g2 = _coupled_states(t1, t2)
    a1, a2 = (t1 - u1) // 2, (t2 - u2) // 2
    c = states[t][u].get((a1, a2), Fraction(0))
    if c == 0:
        return Surd()
    value_sq = c * c * g1[a1] * g2[a2] / norms[t][u]
    return Surd.signed_sqrt(1 if c > 0 else -1, value_sq)


def recoupling_oracle_6j(j1, j2, j3, j4, j5, j6) -> Surd:
    """6-j symbol from a contraction of four oracle CG coefficients.

    Uses <(j1 j2)j12, j3; J | j1, (j2 j3)j23; J> with j12 = j3_arg, J = j5,
    j23 = j6, i.e. {j1 j2 j12; j3 J j23} in the usual layout.
    """
    a, b, c, d, e, f = _tw(j1, j2, j3, j4, j5, j6)
    # layout {a b c; d e f}: j1=a, j2=b, j12=c, j3=d, J=e, j23=f
    if not (triangle_ok(a, b, c) and triangle_ok(c, d, e) and triangle_ok(b, d, f) and triangle_ok(a, f, e)):
        return Surd()
    big_m = e  # any projection works; the top one keeps the sum short
    total = Surd()
    for m1 in range(-a, a + 1, 2):
        for m2 in range(-b, b + 1, 2):
            m3 = big_m - m1 - m2
            if abs(m3) > d or (d - m3) % 2:
                continue
            h = Fraction(1, 2)
            term = (
                coupling_oracle_cg(a * h, b * h, c * h, m1 * h, m2 * h, (m1 + m2) * h)
                * coupling_oracle_cg(c * h, d * h, e * h, (m1 + m2) * h, m3 * h, big_m * h)
                * coupling_oracle_cg(b * h, d * h, f * h, m2 * h, m3 * h, (m2 + m3) * h)
                * coupling_oracle_cg(a * h, f * h, e * h, m1 * h, (m2 + m3) * h, big_m * h)
            )
            total = total + term
    phase = (-1) ** ((a + b + d + e) // 2)
    return total * Surd.signed_sqrt(phase, Fraction(1, (c + 1) * (f + 1)))


def sixj_symmetries(j1, j2, j3, j4, j5, j6) -> list[tuple]:
    """The 24 argument orderings that leave a 6-j symbol invariant."""
    cols = [(j1, j4), (j2, j5), (j3, j6)]
    from itertools import permutations

    out = []
    for perm in permutations(range(3)):
        c = [cols[i] for i in perm]
        for flip in ((False, False, False), (True, True, False), (True, False, True), (False, True, True)):
            upper = [col[1] if fl else col[0] for col, fl in zip(c, flip)]
            lower = [col[0] if fl else col[1] for col, fl in zip(c, flip)]
            out.append(tuple(upper + lower))
    return out
