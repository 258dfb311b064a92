"""Commutative-limit checks: Poisson bracket, sphere quadrature, Moebius maps.

On the sphere of radius R the generators at eps = 0 are

    z = R cos(theta),  J+ = x + i y = R sin(theta) e^{i phi},  J- = conj(J+).

The bracket is taken in the angular form

    {f, g} = (1/(R sin theta)) (d_phi f d_theta g - d_theta f d_phi g)

and ``POISSON_SIGN`` is the overall sign relating it to lim (1/(i eps)) [f, g]:
with the parametrization above [x, y] = i eps z gives lim = z while the
angular form gives {x, y} = -z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .matrep import make_rep, norm_closed_form, pmn_matrix, trace_inner
from .symalg import NormalForm, build_pmn, commutator, expand_in_basis
from .symalg.scalar import ExactScalar

POISSON_SIGN = -1


@dataclass(frozen=True)
class SpherePoint:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0 <= self.theta <= math.pi:
            raise ValueError("theta must lie in [0, pi]")
        if not 0 <= self.phi < 2 * math.pi:
            raise ValueError("phi must lie in [0, 2 pi)")


# evaluation on the sphere ------------------------------------------------------

def _z_polys(f: NormalForm, R: float) -> dict[int, np.ndarray]:
    """Per ladder power s, the eps = 0 coefficient polynomial in z (numpy, low order first)."""
    out = {}
    for s, c in f.terms.items():
        deg = max(c.z_degree(), 0)
        coeffs = np.zeros(deg + 1, dtype=complex)
        for d in range(deg + 1):
            coeffs[d] = c.z_coeff(d).to_complex(eps=0.0, Rsq=R * R)
        out[s] = coeffs
    return out


def _field_and_derivatives(f: NormalForm, R: float, theta, phi):
    """f, d_theta f and d_phi f on arrays of angles (eps = 0)."""
    theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    st, ct = np.sin(theta), np.cos(theta)
    z = R * ct
    val = np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
    dth = np.zeros_like(val)
    dph = np.zeros_like(val)
    for s, coeffs in _z_polys(f, R).items():
        a = abs(s)
        p = np.polynomial.polynomial.polyval(z, coeffs)
        dp = np.polynomial.polynomial.polyval(z, np.polynomial.polynomial.polyder(coeffs)) if len(coeffs) > 1 else 0 * z
        phase = np.exp(1j * s * phi)
        rad = (R * st) ** a
        drad = a * R * ct * (R * st) ** (a - 1) if a else 0 * st
        val = val + phase * rad * p
        dth = dth + phase * (drad * p + rad * dp * (-R * st))
        dph = dph + 1j * s * phase * rad * p
    return val, dth, dph


def eval_on_sphere(f: NormalForm, point: SpherePoint, R: float = 1.0) -> complex:
    """Value of an eps = 0 normal form at a point of the sphere of radius R."""
    val, _, _ = _field_and_derivatives(f, R, point.theta, point.phi)
    return complex(val)


@dataclass(frozen=True)
class Grid:
    theta: np.ndarray
    phi: np.ndarray
    weight: np.ndarray


@lru_cache(maxsize=None)
def sphere_grid(nmax: int) -> Grid:
    """Gauss-Legendre in cos(theta) (order 2 nmax + 8) times uniform phi (4 nmax + 8 points).

    Weights integrate to 1, i.e. they realize (1/4 pi) times the area element.
    """
    u, w = np.polynomial.legendre.leggauss(2 * nmax + 8)
    nphi = 4 * nmax + 8
    phi = 2 * np.pi * np.arange(nphi) / nphi
    th, ph = np.meshgrid(np.arccos(u), phi, indexing="ij")
    wt = np.outer(w / 2, np.full(nphi, 1.0 / nphi))
    for a in (th, ph, wt):
        a.setflags(write=False)
    return Grid(th, ph, wt)


def quadrature_inner(f: NormalForm, g: NormalForm, R: float = 1.0, nmax: int = 4) -> complex:
    """(1/4 pi) integral of conj(f) g over the sphere of radius R."""
    grid = sphere_grid(nmax)
    fv, _, _ = _field_and_derivatives(f, R, grid.theta, grid.phi)
    gv, _, _ = _field_and_derivatives(g, R, grid.theta, grid.phi)
    return complex(np.sum(grid.weight * np.conj(fv) * gv))


def _eps0(f: NormalForm) -> NormalForm:
    return f.subs(epsilon=0)


def poisson_values(f: NormalForm, g: NormalForm, R: float, theta, phi):
    """The angular bracket {f, g} on arrays of angles."""
    _, fth, fph = _field_and_derivatives(f, R, theta, phi)
    _, gth, gph = _field_and_derivatives(g, R, theta, phi)
    return (fph * gth - fth * gph) / (R * np.sin(theta))


def poisson_bracket_coeffs(n1, m1, n2, m2, nmax: int | None = None, R: float = 1.0) -> dict[tuple[int, int], complex]:
    """Coefficients of the angular bracket {P^{m1}_{n1}, P^{m2}_{n2}} over the eps = 0 basis.

    Every (n, m) with n <= nmax is projected, so the weight selection rule can
    be read off from the result.
    """
    if nmax is None:
        nmax = n1 + n2
    f, g = _eps0(build_pmn(n1, m1)), _eps0(build_pmn(n2, m2))
    grid = sphere_grid(max(nmax, n1 + n2))
    pb = poisson_values(f, g, R, grid.theta, grid.phi)
    out = {}
    for n in range(nmax + 1):
        nsq = norm_closed_form(n, 0.0, R * R)
        for m in range(-n, n + 1):
            basis, _, _ = _field_and_derivatives(_eps0(build_pmn(n, m)), R, grid.theta, grid.phi)
            out[(n, m)] = complex(np.sum(grid.weight * np.conj(basis) * pb)) / nsq
    return out


@lru_cache(maxsize=None)
def _symbolic_limit(n1, m1, n2, m2) -> dict[tuple[int, int], ExactScalar]:
    """lim_{eps -> 0} of the coefficients of [P1, P2]/(i eps), exact in Rsq."""
    c = commutator(build_pmn(n1, m1), build_pmn(n2, m2))
    minus_i = ExactScalar({-1: -1})
    out = {}
    for key, v in expand_in_basis(c).items():
        lim = (v.exquo_eps(1) * minus_i).subs(eps=0)
        if not lim.is_zero():
            out[key] = lim
    return out


def symbolic_limit_coeffs(n1, m1, n2, m2, R: float = 1.0) -> dict[tuple[int, int], complex]:
    return {key: v.to_complex(Rsq=R * R) for key, v in _symbolic_limit(n1, m1, n2, m2).items()}


def matrix_commutator_coeffs(n1, m1, n2, m2, k, R: float = 1.0) -> dict[tuple[int, int], complex]:
    """Coefficients of [P1, P2]/(i eps) in the spin-k representation with eps = R/sqrt(k(k+1))."""
    kf = float(k)
    eps = R / math.sqrt(kf * (kf + 1))
    rep = make_rep(k, eps)
    a, b = pmn_matrix(rep, n1, m1), pmn_matrix(rep, n2, m2)
    comm = (a @ b - b @ a) / (1j * eps)
    m = m1 + m2
    out = {}
    for n in range(abs(m), n1 + n2 + 1):
        if n > rep.k.twice:
            continue
        basis = pmn_matrix(rep, n, m)
        out[(n, m)] = trace_inner(rep, basis, comm) / norm_closed_form(n, eps, rep.Rsq)
    return out


def _max_dev(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(key, 0) - b.get(key, 0)) for key in keys), default=0.0)


def commutator_limit_check(n1, m1, n2, m2, method: str = "quadrature", R: float = 1.0, k=None) -> dict:
    """Compare the symbolic eps -> 0 commutator coefficients with another path.

    ``quadrature``: the angular Poisson bracket times POISSON_SIGN.
    ``matrix``: commutator coefficients in the spin-k representation at fixed R.
    """
    sym = symbolic_limit_coeffs(n1, m1, n2, m2, R)
    report = {"pair": [n1, m1, n2, m2], "method": method}
    if method == "symbolic":
        report["max_abs_dev"] = 0.0
    elif method == "quadrature":
        pb = poisson_bracket_coeffs(n1, m1, n2, m2, R=R)
        signed = {key: POISSON_SIGN * v for key, v in pb.items()}
        report["max_abs_dev"] = _max_dev(sym, signed)
        report["max_abs_dev_opposite_sign"] = _max_dev(sym, pb)
        report["sign"] = POISSON_SIGN
    elif method == "matrix":
        if k is None:
            raise ValueError("the matrix method needs k")
        mat = matrix_commutator_coeffs(n1, m1, n2, m2, k, R)
        report["k"] = str(k)
        report["max_abs_dev"] = _max_dev(sym, {key: v for key, v in mat.items() if key[0] <= float(k) * 2})
    else:
        raise ValueError(f"unknown method {method!r}")
    return report


def matrix_sequence_ratio(pairs, k_lo=8, k_hi=16, R: float = 1.0) -> dict:
    """Deviation of finite-k commutator coefficients from the limit, at two k values."""
    dev = {}
    for k in (k_lo, k_hi):
        dev[k] = max(commutator_limit_check(*p, method="matrix", R=R, k=k)["max_abs_dev"] for p in pairs)
    ratio = dev[k_lo] / dev[k_hi] if dev[k_hi] else math.inf
    eps = {k: R / math.sqrt(k * (k + 1)) for k in (k_lo, k_hi)}
    return {
        "deviation": {str(k): v for k, v in dev.items()},
        "ratio": ratio,
        "eps_ratio": eps[k_lo] / eps[k_hi],
        "eps_sq_ratio": (eps[k_lo] / eps[k_hi]) ** 2,
    }


# Moebius transform ---------------------------------------------------------------

@dataclass(frozen=True)
class MoebiusParams:
    epsilon: object
    Rhat: object
    alpha_sq: object = 1


def moebius_coefficients(p: MoebiusParams, uncorrected: bool = False):
    """(a, b, c, d) with rho(x) = (a x + b)/(c x + d).

    The denominator slope is -eps alpha^2/(8 Rhat^3); ``uncorrected=True``
    uses -eps alpha^2/(8 Rhat) instead, which is inconsistent with the
    quotient relation and with the iteration law.
    """
    e, R, a2 = p.epsilon, p.Rhat, p.alpha_sq
    a = 1 + e / (2 * R)
    b = 2 * e * R / a2
    c = -e * a2 / (8 * R) if uncorrected else -e * a2 / (8 * R**3)
    d = 1 - e / (2 * R)
    return a, b, c, d


def moebius(p: MoebiusParams, x, uncorrected: bool = False):
    a, b, c, d = moebius_coefficients(p, uncorrected)
    den = c * x + d
    if den == 0:
        raise ZeroDivisionError(f"pole of the Moebius transform at x={x}")
    return (a * x + b) / den


_eps, _Rhat, _a2, _x = sp.symbols("epsilon Rhat alpha2 x")


def _rho_expr(eps, x, uncorrected=False):
    a, b, c, d = moebius_coefficients(MoebiusParams(eps, _Rhat, _a2), uncorrected)
    return (a * x + b) / (c * x + d)


def _same_rational(lhs, rhs) -> bool:
    """Cross-multiplied polynomial equality of two rational functions."""
    n1, d1 = sp.fraction(sp.together(lhs))
    n2, d2 = sp.fraction(sp.together(rhs))
    return sp.expand(n1 * d2 - n2 * d1) == 0


def moebius_iteration_check(nmax: int = 5, uncorrected: bool = False) -> dict:
    """rho^n(eps, x) = rho(n eps, x) as exact rational functions of eps, Rhat, alpha^2, x."""
    results = {}
    cur = _x
    for n in range(1, nmax + 1):
        cur = sp.cancel(_rho_expr(_eps, cur, uncorrected))
        results[n] = _same_rational(cur, _rho_expr(n * _eps, _x, uncorrected))
    inverse_ok = _same_rational(sp.cancel(_rho_expr(-_eps, _rho_expr(_eps, _x, uncorrected), uncorrected)), _x)
    zero_ok = _same_rational(_rho_expr(0, _x, uncorrected), _x)
    return {
        "uncorrected": uncorrected,
        "iteration": {str(n): ok for n, ok in results.items()},
        "inverse": inverse_ok,
        "identity_at_eps0": zero_ok,
        "passed": all(results.values()) and inverse_ok and zero_ok,
    }


def stereo_consistency_check(alpha_sq_values=(1, -1)) -> dict:
    """(a) the quotient relation solved for zbar z equals rho(z zbar);
    (b) at eps = 0 the stereographic maps satisfy the Casimir relation with Rhat^2.
    """
    y = sp.Symbol("y")
    quotient = sp.Eq(
        _x - y,
        -_eps / (8 * _Rhat**3 * _a2) * (4 * _Rhat**2 + _a2 * _x) * (4 * _Rhat**2 + _a2 * y),
    )
    (solved,) = sp.solve(quotient, y)
    out = {
        "quotient_matches_rho": _same_rational(solved, _rho_expr(_eps, _x)),
        "quotient_matches_uncorrected_rho": _same_rational(solved, _rho_expr(_eps, _x, uncorrected=True)),
        "casimir": {},
    }
    zs, zb = sp.symbols("z zbar")
    for a2 in alpha_sq_values:
        x = zs * zb  # commuting at eps = 0
        den = 4 * _Rhat**2 + a2 * x
        J0 = _Rhat * (4 * _Rhat**2 - a2 * x) / den
        Jp = sp.I * zb * 4 * _Rhat**2 * a2 / den
        Jm = -sp.I * 4 * _Rhat**2 * a2 / den * zs
        cas = J0**2 + (Jp * Jm + Jm * Jp) / (2 * a2)
        out["casimir"][str(a2)] = _same_rational(cas, _Rhat**2)
    out["passed"] = out["quotient_matches_rho"] and all(out["casimir"].values())
    return out
