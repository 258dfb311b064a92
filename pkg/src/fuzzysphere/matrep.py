"""Finite (2k+1)-dimensional representations of the algebra.

Basis vectors |k, j> are ordered j = k, k-1, ..., -k, so J0 is diagonal with
decreasing entries and J+ is strictly upper triangular.  Matrices are dense
complex numpy arrays; ``exact=True`` switches to sympy matrices with exact
entries (intended for k <= 2, where it is cheap).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy as sp

from .coefficients import _gram_diag, clebsch_gordan, factorial
from .surd import HalfInt, Surd
from .symalg import NormalForm, build_pmn
from .symalg.scalar import ExactScalar

DEFAULT_K_CAP = 24
EXACT_K_MAX = 2


@dataclass(frozen=True)
class Rep:
    k: HalfInt
    epsilon: float | Fraction
    J0: object = field(repr=False)
    Jp: object = field(repr=False)
    Jm: object = field(repr=False)
    exact: bool = False

    @property
    def dim(self) -> int:
        return self.k.twice + 1

    @property
    def Rsq(self):
        kf = self.k.fraction()
        return self.epsilon**2 * (kf * (kf + 1) if self.exact else float(kf * (kf + 1)))

    @property
    def Rhat(self):
        return self.epsilon * (self.k.fraction() + Fraction(1, 2) if self.exact else float(self.k) + 0.5)

    @property
    def weights(self) -> list[Fraction]:
        """The j values labelling the basis, top weight first."""
        return [Fraction(self.k.twice - 2 * i, 2) for i in range(self.dim)]

    def identity(self):
        return sp.eye(self.dim) if self.exact else np.eye(self.dim, dtype=complex)

    def casimir(self):
        return self.J0 @ self.J0 + (self.Jp @ self.Jm + self.Jm @ self.Jp) / 2


def k_cap() -> int:
    """Largest k accepted by make_rep; NC_SPHERE_KCAP is read on every call."""
    return int(os.environ.get("NC_SPHERE_KCAP", DEFAULT_K_CAP))


def make_rep(k, epsilon=1.0, exact: bool = False) -> Rep:
    """Spin-k representation with J0|k,j> = eps j |k,j>."""
    k = HalfInt.of(k)
    if k.twice < 0:
        raise ValueError("k must be nonnegative")
    cap = k_cap()
    if float(k) > cap:
        raise ValueError(f"k={k} exceeds the configured cap {cap} (NC_SPHERE_KCAP)")
    if epsilon == 0:
        raise ValueError("epsilon must be nonzero in a finite representation")
    dim = k.twice + 1
    kf = k.fraction()
    js = [kf - i for i in range(dim)]
    if exact:
        if float(k) > EXACT_K_MAX:
            raise ValueError(f"exact mode is limited to k <= {EXACT_K_MAX}")
        eps = sp.Rational(Fraction(epsilon).numerator, Fraction(epsilon).denominator)
        J0 = sp.diag(*[eps * sp.Rational(j.numerator, j.denominator) for j in js])
        Jp = sp.zeros(dim, dim)
        for i in range(1, dim):
            j = js[i]
            Jp[i - 1, i] = eps * sp.sqrt(sp.Rational((kf - j) * (kf + j + 1)))
        rep = Rep(k, Fraction(epsilon), sp.ImmutableMatrix(J0), sp.ImmutableMatrix(Jp),
                  sp.ImmutableMatrix(Jp.T), exact=True)
    else:
        eps = float(epsilon)
        J0 = np.diag([eps * float(j) for j in js]).astype(complex)
        Jp = np.zeros((dim, dim), dtype=complex)
        for i in range(1, dim):
            j = js[i]
            Jp[i - 1, i] = eps * math.sqrt(float((kf - j) * (kf + j + 1)))
        for a in (J0, Jp):
            a.setflags(write=False)
        Jm = Jp.conj().T.copy()
        Jm.setflags(write=False)
        rep = Rep(k, eps, J0, Jp, Jm)
    return rep


def dag(a):
    return a.H if isinstance(a, sp.MatrixBase) else a.conj().T


def _zeros_like(rep: Rep, rows: int | None = None, cols: int | None = None):
    rows = rep.dim if rows is None else rows
    cols = rep.dim if cols is None else cols
    return sp.zeros(rows, cols) if rep.exact else np.zeros((rows, cols), dtype=complex)


def _matpow(rep: Rep, a, n: int):
    out = rep.identity()
    for _ in range(n):
        out = out @ a
    return out


def _scalar_value(rep: Rep, c: ExactScalar, z):
    if rep.exact:
        const = c.subs(eps=rep.epsilon, Rsq=rep.Rsq, z=z)
        return sum(
            (sp.Rational(q.LC.numerator, q.LC.denominator) * sp.sqrt(abs(p)) * (sp.I if p < 0 else 1)
             for p, q in const.terms.items()),
            sp.Integer(0),
        )
    return c.to_complex(eps=float(rep.epsilon), Rsq=float(rep.Rsq), z=float(z))


def evaluate(rep: Rep, f: NormalForm):
    """Image of a normal form sum_s L(s) p_s(z) in the representation."""
    out = _zeros_like(rep)
    zs = [rep.epsilon * j if rep.exact else float(rep.epsilon) * float(j) for j in rep.weights]
    for s, c in f.terms.items():
        diag = [_scalar_value(rep, c, z) for z in zs]
        d = sp.diag(*diag) if rep.exact else np.diag(diag)
        ladder = _matpow(rep, rep.Jp if s > 0 else rep.Jm, abs(s))
        out = out + ladder @ d
    return sp.ImmutableMatrix(out) if rep.exact else out


# Exact construction.  In the basis e_a = (J-)^a |k,k>, a = 0..2k, and with
# eps = 1: J- e_a = e_{a+1}, J+ e_a = a(2k-a+1) e_{a-1}, J0 e_a = (k-a) e_a.
# All matrices are then rational; |e_a|^2 = g_a with g_{a+1} = g_a (2k-a)(a+1),
# and the orthonormal matrix element is M[a, b] sqrt(g_a / g_b).
# P^m_n is homogeneous of degree n, so general eps enters as eps^n.


Sparse = dict[tuple[int, int], Fraction]


def _smul(a: Sparse, b: Sparse) -> Sparse:
    rows: dict[int, list[tuple[int, Fraction]]] = {}
    for (i, j), v in b.items():
        rows.setdefault(i, []).append((j, v))
    out: Sparse = {}
    for (i, j), v in a.items():
        for l, w in rows.get(j, ()):
            out[(i, l)] = out.get((i, l), 0) + v * w
    return {key: v for key, v in out.items() if v != 0}


def _ssub(a: Sparse, b: Sparse) -> Sparse:
    out = dict(a)
    for key, v in b.items():
        out[key] = out.get(key, 0) - v
    return {key: v for key, v in out.items() if v != 0}


def _sscale(a: Sparse, c) -> Sparse:
    return {key: v * c for key, v in a.items() if v * c != 0}


@lru_cache(maxsize=None)
def _ladders_e(k2: int) -> tuple[Sparse, Sparse]:
    jp = {(a - 1, a): Fraction(a * (k2 - a + 1)) for a in range(1, k2 + 1)}
    jm = {(a, a - 1): Fraction(1) for a in range(1, k2 + 1)}
    return jp, jm


def _spower(a: Sparse, n: int, d: int) -> Sparse:
    out: Sparse = {(i, i): Fraction(1) for i in range(d)}
    for _ in range(n):
        out = _smul(out, a)
    return out


def _commutator_exact(k2: int, n: int, m: int) -> dict[int, Sparse]:
    jp, jm = _ladders_e(k2)
    f = _spower(jp, n, k2 + 1)
    for _ in range(n - m):
        f = _ssub(_smul(jm, f), _smul(f, jm))
    pref = Surd.sqrt(Fraction(factorial(n + m), factorial(2 * n) * factorial(n - m)))
    return {p: _sscale(f, q) for p, q in pref.terms.items()}


def _normal_form_exact(k2: int, n: int, m: int) -> dict[int, Sparse]:
    jp, jm = _ladders_e(k2)
    f = build_pmn(n, m).subs(epsilon=1, Rsq=Fraction(k2 * (k2 + 2), 4))
    parts: dict[int, Sparse] = {}
    for s, c in f.terms.items():
        ladder = _spower(jp if s > 0 else jm, abs(s), k2 + 1)
        for p, q in c.terms.items():
            coeffs = [(mon[0], Fraction(int(v.numerator), int(v.denominator))) for mon, v in q.items()]
            diag = {}
            for a in range(k2 + 1):
                z = Fraction(k2 - 2 * a, 2)
                v = sum((cf * z**e for e, cf in coeffs), Fraction(0))
                if v != 0:
                    diag[(a, a)] = v
            acc = parts.get(p, {})
            prod = _smul(ladder, diag)
            for key, v in prod.items():
                acc[key] = acc.get(key, 0) + v
            parts[p] = {key: v for key, v in acc.items() if v != 0}
    return parts


def _nonzero(parts: dict[int, Sparse]) -> dict[int, Sparse]:
    return {p: M for p, M in parts.items() if M}


def _same(a: dict[int, Sparse], b: dict[int, Sparse]) -> bool:
    return _nonzero(a) == _nonzero(b)


@lru_cache(maxsize=None)
def _pmn_parts(k2: int, n: int, m: int, method: str) -> tuple:
    if method == "commutator":
        parts = _commutator_exact(k2, n, m)
    else:
        parts = _normal_form_exact(k2, n, m)
        if method == "both" and not _same(parts, _commutator_exact(k2, n, m)):
            raise ArithmeticError(f"construction paths disagree for P^{m}_{n} at k={k2}/2")
    return tuple(sorted(_nonzero(parts).items()))


def _orthonormal(k2: int, parts: tuple, exact: bool):
    g = _gram_diag(k2)
    d = k2 + 1
    if exact:
        out = sp.zeros(d, d)
    else:
        out = np.zeros((d, d), dtype=complex)
    for p, M in parts:
        unit = (sp.I if exact else 1j) if p < 0 else 1
        for (a, b), v in M.items():
            ratio = Fraction(abs(p) * g[a], g[b])
            if exact:
                out[a, b] += unit * sp.Rational(v.numerator, v.denominator) * sp.sqrt(
                    sp.Rational(ratio.numerator, ratio.denominator)
                )
            else:
                out[a, b] += unit * float(v) * math.sqrt(ratio)
    return out


def pmn_matrix(rep: Rep, n: int, m: int, method: str = "normal_form"):
    """Matrix of P^m_n.

    ``method`` is ``"normal_form"`` (the symbolic normal form evaluated on the
    representation), ``"commutator"`` (iterated commutators of J+^n with J-)
    or ``"both"``, which also builds the commutator path and requires exact
    agreement.  Both paths run in exact rational arithmetic, so the float
    result is correct to rounding.  For n > 2k the matrix is zero.
    """
    if n < 0 or abs(m) > n:
        raise ValueError(f"invalid basis label (n={n}, m={m})")
    if method not in ("normal_form", "commutator", "both"):
        raise ValueError(f"unknown method {method!r}")
    k2 = rep.k.twice
    parts = _pmn_parts(k2, n, m, method)
    if n > k2 and parts:
        raise ArithmeticError(f"P^{m}_{n} does not vanish at k={rep.k}")
    mat = _orthonormal(k2, parts, rep.exact)
    if rep.exact:
        eps = Fraction(rep.epsilon)
        return sp.ImmutableMatrix(mat * sp.Rational(eps.numerator, eps.denominator) ** n)
    return mat * float(rep.epsilon) ** n


def matrix_rel_diff(rep: Rep, a, b) -> float:
    """Frobenius norm of a - b relative to max(1, |a|)."""
    if rep.exact:
        diff = (sp.Matrix(a) - sp.Matrix(b)).applyfunc(sp.simplify)
        return 0.0 if diff.is_zero_matrix else float(diff.norm())
    scale = max(1.0, float(np.linalg.norm(a)))
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) / scale


def trace_inner(rep: Rep, a, b):
    """(1/dim V) Tr(a^dagger b) over the source space of a and b."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    src = a.shape[1]
    if rep.exact:
        return sp.nsimplify(sp.simplify((dag(a) @ b).trace() / src))
    return complex(np.trace(dag(a) @ b)) / src


def norm_closed_form(n: int, epsilon=1.0, Rsq=None):
    """(n!)^2/(2n+1)! prod_{r=1..n} (4 Rsq + eps^2 (1 - r^2)).

    Exact when epsilon and Rsq are Fractions or ints, float otherwise.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    exact = isinstance(epsilon, (int, Fraction)) and isinstance(Rsq, (int, Fraction))
    acc = Fraction(factorial(n) ** 2, factorial(2 * n + 1))
    if not exact:
        acc = float(acc)
    for r in range(1, n + 1):
        acc *= 4 * Rsq + epsilon**2 * (1 - r * r)
    return acc


def rep_norm(rep: Rep, n: int) -> float:
    eps = rep.epsilon
    val = norm_closed_form(n, eps, rep.Rsq)
    return float(val)


@dataclass
class ExpansionReport:
    labels: tuple[int, int, int, int]
    k: HalfInt
    terms: list[tuple[int, complex]]
    residual: float
    quotient: list[int]
    comparisons: list[dict]

    @property
    def max_rm_dev(self) -> float:
        return max((c["abs_dev"] for c in self.comparisons), default=0.0)

    def coefficient(self, n: int) -> complex:
        return dict(self.terms).get(n, 0j)

    def to_json(self) -> dict:
        return {
            "terms": [{"n": n, "coeff": [c.real, c.imag]} for n, c in self.terms],
            "residual": self.residual,
            "k": str(self.k),
            "pair": list(self.labels),
            "quotient": self.quotient,
            "rm_check": self.comparisons,
        }


def decompose_product(rep: Rep, n1: int, m1: int, n2: int, m2: int) -> ExpansionReport:
    """Expand P^{m1}_{n1} P^{m2}_{n2} over P^{m1+m2}_n by trace-form projection.

    Each coefficient is also compared in magnitude with CG x RM from the
    reduced-matrix-element formula; ``comparisons`` records both values and
    the relative sign.
    """
    if rep.exact:
        raise ValueError("decompose_product runs in float mode")
    k2 = rep.k.twice
    if 2 * n1 > 2 * k2 or 2 * n2 > 2 * k2:
        raise ValueError(f"factors must have n <= 2k (k={rep.k})")
    prod = pmn_matrix(rep, n1, m1) @ pmn_matrix(rep, n2, m2)
    m = m1 + m2
    terms: list[tuple[int, complex]] = []
    quotient: list[int] = []
    comparisons: list[dict] = []
    recon = np.zeros_like(prod)
    if abs(m) <= n1 + n2:
        for n in range(max(abs(n1 - n2), abs(m)), n1 + n2 + 1):
            if n > k2:
                quotient.append(n)
                continue
            cg_exact = clebsch_gordan(n1, n2, n, m1, m2, m)
            if cg_exact.is_zero():
                # selection rule; any leakage shows up in the residual
                continue
            basis = pmn_matrix(rep, n, m)
            c = trace_inner(rep, basis, prod) / rep_norm(rep, n)
            recon = recon + c * basis
            terms.append((n, c))
            cg = float(cg_exact)
            rm = reduced_matrix_element(n1, n2, n, 0, 0, rep.k, rep.epsilon)
            expected = cg * rm
            comparisons.append({
                "n": n,
                "coeff_abs": abs(c),
                "cg_rm_abs": abs(expected),
                "abs_dev": abs(abs(c) - abs(expected)) / max(1.0, abs(expected)),
                "sign": _relative_sign(c, expected),
            })
    residual = float(np.linalg.norm(prod - recon)) / max(1.0, float(np.linalg.norm(prod)))
    return ExpansionReport((n1, m1, n2, m2), rep.k, terms, residual, quotient, comparisons)


def _relative_sign(c: complex, expected: float) -> int:
    if abs(expected) < 1e-300 or abs(c) < 1e-300:
        return 0
    return 1 if (c / expected).real > 0 else -1


def reduced_matrix_element(n1, n2, n, r1, r2, k, epsilon=1.0) -> float:
    """RM(n1, n2, n; r1, r2) at base k with Psi norms from :func:`psi.psi_norm`.

    (-1)^(2k+n1+n2+r1+r2) |Psi(n1,r1)|_{k+r2} |Psi(n2,r2)|_k / |Psi(n,r1+r2)|_k
    * sqrt((2k+2r2+1)(2n1+1)(2n2+1)) * {k+r1+r2 n1 k+r2; n2 k n}
    """
    from .coefficients import triangle_ok, wigner_6j
    from .psi import psi_norm

    k, n1, n2, n, r1, r2 = (HalfInt.of(v) for v in (k, n1, n2, n, r1, r2))
    r = r1 + r2
    if not triangle_ok(n1.twice, n2.twice, n.twice):
        return 0.0
    den = psi_norm(k, n, r, epsilon)
    if den == 0:
        raise ZeroDivisionError(f"Psi norm vanishes for the degenerate label (n={n}, r={r}) at k={k}")
    phase = k.twice + (n1.twice + n2.twice + r.twice) // 2
    sign = -1 if phase % 2 else 1
    sixj = float(wigner_6j(k + r, n1, k + r2, n2, k, n))
    mag = psi_norm(k + r2, n1, r1, epsilon) * psi_norm(k, n2, r2, epsilon) / den
    return sign * mag * math.sqrt((2 * float(k + r2) + 1) * (n1.twice + 1) * (n2.twice + 1)) * sixj
