"""Wigner-operator fields Psi(n, r, m) between neighbouring representations.

Psi(n, r, m) based at k maps V_k to V_{k+r}.  Its matrix is

    (-1)^(n-r) |Psi(n,r,.)|_k sqrt((2n+1)(2k+1)/(2k+2r+1)) U

with the unit tensor U[j', j] = <k j; n m | k+r j'>.  The norm |Psi(n,r,.)|_k
is fixed by the oscillator (Fock) realization, in which Psi(n, r, n) is
proportional to a+^(n+r) b-^(n-r):

    |Psi(n,r,.)|_k^2 = eps^(2n) (n+r)!(n-r)!/(2n+1)!
                       * (2k+n+r+1)! / ((2k+r-n)! (2k+1))

At r = 0 this reduces to the closed-form norm of P^m_n at Rsq = eps^2 k(k+1).

Scalars, 1-forms and vector fields are abstract :class:`Field` objects: finite
coefficient vectors over labels that can be realized at any base.  The product
rho at algebra parameter k realizes the right factor at k and the left factor
at k + r_right; its coefficients therefore depend on k, which is where
nonassociativity enters.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .coefficients import clebsch_gordan, factorial, triangle_ok
from .matrep import dag, make_rep, pmn_matrix
from .surd import HalfInt


@dataclass(frozen=True)
class PsiLabel:
    n: HalfInt
    r: HalfInt
    m: HalfInt

    def __init__(self, n, r, m):
        n, r, m = HalfInt.of(n), HalfInt.of(r), HalfInt.of(m)
        if n.twice < 0:
            raise ValueError("n must be nonnegative")
        if abs(r) > n or abs(m) > n:
            raise ValueError(f"|r| and |m| must not exceed n (n={n}, r={r}, m={m})")
        if not (n - r).is_integer or not (n - m).is_integer:
            raise ValueError(f"n-r and n-m must be integers (n={n}, r={r}, m={m})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "m", m)

    def __str__(self):
        return f"({self.n},{self.r},{self.m})"


def _weights(k: HalfInt) -> list[HalfInt]:
    return [HalfInt(k.twice - 2 * i) for i in range(k.twice + 1)]


# norms ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def psi_norm_sq(k, n, r, epsilon=Fraction(1)) -> Fraction | float:
    """Squared norm |Psi(n, r, .)|_k^2; zero when V_k (x) V_n misses V_{k+r}."""
    k, n, r = HalfInt.of(k), HalfInt.of(n), HalfInt.of(r)
    if (k + r).twice < 0 or not triangle_ok(k.twice, n.twice, (k + r).twice):
        return 0 * epsilon
    a, b = int(n + r), int(n - r)
    top = int(k + k + n + r + 1)
    bot = int(k + k + r - n)
    val = Fraction(
        factorial(a) * factorial(b) * factorial(top),
        factorial(int(n + n) + 1) * factorial(bot) * (k.twice + 1),
    )
    return val * epsilon ** int(n + n)


class PsiNormTable:
    """Read-mostly cache (k, n, r, eps) -> |Psi(n, r, .)|_k."""

    def __init__(self):
        self._table: dict[tuple, float] = {}

    def __call__(self, k, n, r, epsilon=1.0) -> float:
        key = (HalfInt.of(k), HalfInt.of(n), HalfInt.of(r), epsilon)
        if key not in self._table:
            eps = Fraction(epsilon) if isinstance(epsilon, (int, Fraction)) else epsilon
            self._table[key] = math.sqrt(float(psi_norm_sq(key[0], key[1], key[2], eps)))
        return self._table[key]

    def __len__(self):
        return len(self._table)


NORMS = PsiNormTable()


def psi_norm(k, n, r, epsilon=1.0) -> float:
    """|Psi(n, r, .)|_k (positive root)."""
    return NORMS(k, n, r, epsilon)


# operators --------------------------------------------------------------------

@dataclass(frozen=True)
class PsiOp:
    """A linear map V_k -> V_{k+r} with its bookkeeping."""

    base_k: HalfInt
    r: HalfInt
    matrix: np.ndarray
    epsilon: float = 1.0
    label: PsiLabel | None = None

    @property
    def target_k(self) -> HalfInt:
        return self.base_k + self.r

    def __add__(self, other: "PsiOp") -> "PsiOp":
        self._same_slot(other)
        return PsiOp(self.base_k, self.r, self.matrix + other.matrix, self.epsilon)

    def __sub__(self, other: "PsiOp") -> "PsiOp":
        self._same_slot(other)
        return PsiOp(self.base_k, self.r, self.matrix - other.matrix, self.epsilon)

    def scale(self, c) -> "PsiOp":
        return PsiOp(self.base_k, self.r, self.matrix * c, self.epsilon, self.label if c == 1 else None)

    def dagger(self) -> "PsiOp":
        return PsiOp(self.target_k, -self.r, dag(self.matrix), self.epsilon)

    def norm(self) -> float:
        """Trace-form norm sqrt(Tr(A^dagger A)/dim V_k)."""
        return math.sqrt(float(np.vdot(self.matrix, self.matrix).real) / self.matrix.shape[1])

    def _same_slot(self, other: "PsiOp"):
        if (self.base_k, self.r) != (other.base_k, other.r):
            raise ValueError(
                f"cannot combine maps based at {self.base_k} (r={self.r}) and {other.base_k} (r={other.r})"
            )


def unit_tensor(k, label: PsiLabel) -> np.ndarray:
    """U[j', j] = <k j; n m | k+r j'> with rows and columns ordered top weight first."""
    k = HalfInt.of(k)
    K = k + label.r
    if K.twice < 0:
        raise ValueError(f"target spin k+r={K} is negative")
    src, dst = _weights(k), _weights(K)
    out = np.zeros((len(dst), len(src)))
    index = {j.twice: i for i, j in enumerate(dst)}
    for col, j in enumerate(src):
        jp = j + label.m
        row = index.get(jp.twice)
        if row is not None:
            out[row, col] = float(clebsch_gordan(k, label.n, K, j, label.m, jp))
    return out


def build_psi(k, label: PsiLabel, epsilon=1.0) -> PsiOp:
    k = HalfInt.of(k)
    n, r = label.n, label.r
    sign = -1 if int(n - r) % 2 else 1
    K = k + r
    scale = sign * psi_norm(k, n, r, epsilon) * math.sqrt((n.twice + 1) * (k.twice + 1) / (K.twice + 1))
    mat = scale * unit_tensor(k, label).astype(complex)
    return PsiOp(k, r, mat, epsilon, label)


def rho(a: PsiOp, b: PsiOp) -> PsiOp:
    """Composition a o b; a must be based where b lands."""
    if a.base_k != b.target_k:
        raise ValueError(f"base mismatch: left factor based at {a.base_k}, right factor lands in {b.target_k}")
    return PsiOp(b.base_k, a.r + b.r, a.matrix @ b.matrix, b.epsilon)


def labels_for(k, r, nmax=None):
    """All Psi labels with shift r that are nonzero at base k (n <= nmax)."""
    k, r = HalfInt.of(k), HalfInt.of(r)
    K = k + r
    lo, hi = abs(r), k + K
    if nmax is not None:
        hi = min(hi, HalfInt.of(nmax))
    n = HalfInt(max(abs(lo.twice), abs(k.twice - K.twice)))
    while n <= hi:
        m = -n
        while m <= n:
            yield PsiLabel(n, r, m)
            m = m + 1
        n = n + 1


def expand_psi(op: PsiOp, nmax=None) -> tuple[dict[PsiLabel, complex], float]:
    """Coefficients of op over Psi(n, r, m) at its base, and the relative residual."""
    coeffs: dict[PsiLabel, complex] = {}
    recon = np.zeros_like(op.matrix)
    for label in labels_for(op.base_k, op.r, nmax):
        basis = build_psi(op.base_k, label, op.epsilon)
        nsq = psi_norm(op.base_k, label.n, label.r, op.epsilon) ** 2
        if nsq == 0:
            continue
        c = complex(np.vdot(basis.matrix, op.matrix)) / op.matrix.shape[1] / nsq
        if abs(c) > 1e-300:
            coeffs[label] = c
            recon = recon + c * basis.matrix
    scale = max(1.0, float(np.linalg.norm(op.matrix)))
    residual = float(np.linalg.norm(op.matrix - recon)) / scale
    return coeffs, residual


# convention ledger -------------------------------------------------------------

def psi_vs_pmn_phase(k, n: int, epsilon=1.0) -> complex:
    """The factor c with pmn_matrix(n, m) = c * Psi(n, 0, m), measured at m = n.

    Raises if the factor is not the same for every m.
    """
    rep = make_rep(k, epsilon)
    factors = []
    for m in range(-n, n + 1):
        p = pmn_matrix(rep, n, m)
        q = build_psi(k, PsiLabel(n, 0, m), epsilon).matrix
        idx = np.unravel_index(np.argmax(np.abs(q)), q.shape)
        factors.append(p[idx] / q[idx])
        if np.linalg.norm(p - factors[-1] * q) > 1e-9 * max(1.0, np.linalg.norm(p)):
            raise ArithmeticError(f"P^{m}_{n} is not proportional to Psi({n},0,{m}) at k={k}")
    if max(abs(f - factors[0]) for f in factors) > 1e-9:
        raise ArithmeticError(f"phase between P and Psi depends on m for n={n}")
    return factors[0]


def load_convention_ledger() -> dict:
    with resources.files("fuzzysphere.data").joinpath("conventions.json").open() as fh:
        return json.load(fh)


# abstract fields ----------------------------------------------------------------

class Field:
    """Finite combination sum c * Psi(n, r, m) at a common shift r."""

    def __init__(self, r, coeffs: dict[PsiLabel, complex] | None = None):
        self.r = HalfInt.of(r)
        self.coeffs = {}
        for label, c in (coeffs or {}).items():
            if label.r != self.r:
                raise ValueError(f"label {label} does not have shift {self.r}")
            if c != 0:
                self.coeffs[label] = self.coeffs.get(label, 0) + c

    @classmethod
    def basis(cls, n, r, m, coeff=1.0) -> "Field":
        label = PsiLabel(n, r, m)
        return cls(label.r, {label: coeff})

    def realize(self, k, epsilon=1.0) -> PsiOp:
        k = HalfInt.of(k)
        K = k + self.r
        mat = np.zeros((K.twice + 1, k.twice + 1), dtype=complex)
        for label, c in self.coeffs.items():
            if label.n.twice <= (k + K).twice and triangle_ok(k.twice, label.n.twice, K.twice):
                mat = mat + c * build_psi(k, label, epsilon).matrix
        return PsiOp(k, self.r, mat, epsilon)

    def __add__(self, other: "Field") -> "Field":
        if other.r != self.r:
            raise ValueError("cannot add fields with different shifts")
        out = dict(self.coeffs)
        for label, c in other.coeffs.items():
            out[label] = out.get(label, 0) + c
        return Field(self.r, out)

    def __neg__(self):
        return Field(self.r, {lab: -c for lab, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Field":
        return Field(self.r, {lab: c * v for lab, v in self.coeffs.items()})

    @classmethod
    def from_op(cls, op: PsiOp) -> "Field":
        coeffs, residual = expand_psi(op)
        if residual > 1e-9:
            raise ArithmeticError(f"operator is outside the Psi span (residual {residual:.3g})")
        return cls(op.r, coeffs)


def rho_fields(a: Field, b: Field, k, epsilon=1.0) -> Field:
    """Abstract product at algebra parameter k (b at base k, a at base k + r_b)."""
    k = HalfInt.of(k)
    prod = rho(a.realize(k + b.r, epsilon), b.realize(k, epsilon))
    return Field.from_op(prod)


def associativity_defect(a: Field, b: Field, c: Field, k, epsilon=1.0) -> float:
    """|rho(rho(a,b),c) - rho(a,rho(b,c))| at parameter k, in the trace norm at base k.

    rho(a, b) is formed at parameter k and then re-realized at base k + r_c by
    the outer product; when r_c != 0 this is not the base at which its
    coefficients were computed.
    """
    left = rho(rho_fields(a, b, k, epsilon).realize(HalfInt.of(k) + c.r, epsilon), c.realize(k, epsilon))
    right = rho(a.realize(HalfInt.of(k) + b.r + c.r, epsilon), rho_fields(b, c, k, epsilon).realize(k, epsilon))
    return (left - right).norm()


# geometry -----------------------------------------------------------------------

def frame_factor(k, epsilon=1.0) -> float:
    """(2 Rhat + eps)^(-1/2) with Rhat = eps (k + 1/2) on V_k."""
    k = HalfInt.of(k)
    return (2 * epsilon * (float(k) + 0.5) + epsilon) ** -0.5


def coordinate(k, m: int, epsilon=1.0) -> PsiOp:
    """x^m = (2 Rhat + eps)^(-1/2) Psi(1, 0, m) on V_k."""
    return build_psi(k, PsiLabel(1, 0, m), epsilon).scale(frame_factor(k, epsilon))


def one_form(k, m: int, epsilon=1.0, scale: str = "frame") -> PsiOp:
    """dx^m: V_k -> V_{k-1}.

    ``scale="frame"`` uses (2 Rhat + eps)^(-1/2) Psi(1, -1, m).  ``"metric"``
    rescales so that pi0 of the induced metric is the identity matrix.
    """
    op = build_psi(k, PsiLabel(1, -1, m), epsilon)
    if scale == "frame":
        return op.scale(frame_factor(k, epsilon))
    if scale == "metric":
        # pi0(g(X_i, X_i)) = Tr(dx dx^dagger)/(2k-1) = |Psi|^2 (2k+1)/(2k-1)
        k = HalfInt.of(k)
        nsq = psi_norm(k, 1, -1, epsilon) ** 2 * (k.twice + 1) / (k.twice - 1)
        return op.scale(nsq**-0.5)
    raise ValueError(f"unknown scale {scale!r}")


def vector_field(k, m: int, epsilon=1.0, scale: str = "frame") -> PsiOp:
    """X_m = (dx^m)^dagger: V_{k-1} -> V_k, based at k - 1."""
    return one_form(k, m, epsilon, scale).dagger()


def metric(X: PsiOp, Y: PsiOp) -> PsiOp:
    """g(X, Y) = rho(X^dagger, Y), a scalar on the base of Y."""
    return rho(X.dagger(), Y)


def pi0(op: PsiOp) -> complex:
    """Identity component of a scalar (r = 0) operator."""
    if op.r != 0:
        raise ValueError("pi0 is defined on scalars")
    return complex(np.trace(op.matrix)) / op.matrix.shape[0]


def vector_action(X: PsiOp, f: Field, scale: str = "frame") -> PsiOp:
    """X(f) = rho(df, X), with df formed on the space X lands in."""
    df = ext_d(f, X.target_k, X.epsilon, scale)
    return rho(df, X)


def ad(a: PsiOp, b: PsiOp) -> PsiOp:
    return rho(a, b) - rho(b, a)


def ext_d(f: Field | PsiOp, k=None, epsilon=1.0, scale: str = "frame") -> PsiOp:
    """df = sum_m (-1)^(m+1) dx^{-m} ad_{x^m}(f) on V_k, landing in V_{k-1}."""
    if isinstance(f, Field):
        if f.r != 0:
            raise ValueError("ext_d acts on scalars")
        f = f.realize(k, epsilon)
    if f.r != 0:
        raise ValueError("ext_d acts on scalars")
    k, epsilon = f.base_k, f.epsilon
    total = None
    for m in (-1, 0, 1):
        term = rho(one_form(k, -m, epsilon, scale), ad(coordinate(k, m, epsilon), f))
        term = term.scale((-1) ** (m + 1))
        total = term if total is None else total + term
    return total


def leibniz_defect(f: Field, g: Field, k, epsilon=1.0, scale: str = "frame") -> float:
    """|d(fg) - d(f) g - f d(g)| at parameter k, in the trace norm on V_k.

    f d(g) realizes f on V_{k-1}, where d(g) lands.
    """
    k = HalfInt.of(k)
    fk, gk = f.realize(k, epsilon), g.realize(k, epsilon)
    f_below = f.realize(k - 1, epsilon)
    lhs = ext_d(rho(fk, gk), scale=scale)
    rhs = rho(ext_d(fk, scale=scale), gk) + rho(f_below, ext_d(gk, scale=scale))
    return (lhs - rhs).norm()


def rotation_sign(label: PsiLabel, k, epsilon=1.0) -> float:
    """Factor picked up by Psi under conjugation with the 2 pi rotation exp(2 pi i J0/eps)."""
    op = build_psi(k, label, epsilon)
    src = np.array([np.exp(2j * np.pi * float(j)) for j in _weights(op.base_k)])
    dst = np.array([np.exp(2j * np.pi * float(j)) for j in _weights(op.target_k)])
    rotated = dst[:, None] * op.matrix * np.conj(src)[None, :]
    idx = np.unravel_index(np.argmax(np.abs(op.matrix)), op.matrix.shape)
    factor = rotated[idx] / op.matrix[idx]
    if np.linalg.norm(rotated - factor * op.matrix) > 1e-12 * max(1.0, np.linalg.norm(op.matrix)):
        raise ArithmeticError("rotation does not act by a scalar")
    return float(factor.real)
