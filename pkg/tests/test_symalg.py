from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from fuzzysphere.symalg import (
    SPHERE,
    AlgebraParams,
    ExactScalar,
    NormalForm,
    SpanError,
    build_pmn,
    casimir,
    commutator,
    dagger,
    eigen_residuals,
    expand_in_basis,
    inner,
    jminus,
    jplus,
    laplacian,
    load_table1,
    multiply,
    norm_formula,
    one,
    pi0,
    table1_check,
    xgen,
    ygen,
    zgen,
)
from fuzzysphere.symalg.convert import from_sympy, to_sympy
from fuzzysphere.symalg.hahn import hahn_pmn, hahn_poly
from fuzzysphere.symalg.scalar import EPS, RSQ, Z

LABELS = [(n, m) for n in range(5) for m in range(-n, n + 1)]
SIGMA = AlgebraParams(alpha_sq=-1)


@st.composite
def elements(draw, params=SPHERE):
    f = NormalForm({}, params)
    for _ in range(draw(st.integers(1, 3))):
        s = draw(st.integers(-2, 2))
        d = draw(st.integers(0, 2))
        q = draw(st.fractions(min_value=-3, max_value=3, max_denominator=4))
        f = f + NormalForm({s: ExactScalar({1: Z**d * q})}, params)
    return f


def scalar(value, params=SPHERE):
    return NormalForm.scalar(value, params)


def test_su2_relations():
    z, jp, jm = zgen(), jplus(), jminus()
    assert commutator(z, jp) == jp * ExactScalar({1: EPS})
    assert commutator(z, jm) == jm * ExactScalar({1: -EPS})
    assert commutator(jp, jm) == z * ExactScalar({1: 2 * EPS})
    assert commutator(xgen(), ygen()) == z * (ExactScalar.i() * ExactScalar({1: EPS}))


@pytest.mark.parametrize("params", [SPHERE, SIGMA], ids=["sphere", "alpha2=-1"])
def test_casimir_is_rsq(params):
    assert casimir(params) == scalar(ExactScalar({1: RSQ}), params)


@settings(max_examples=40, deadline=None)
@given(elements(), elements(), elements())
def test_product_associative(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@settings(max_examples=40, deadline=None)
@given(elements(SIGMA), elements(SIGMA), elements(SIGMA))
def test_product_associative_general_alpha(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@settings(max_examples=40, deadline=None)
@given(elements())
def test_casimir_central(a):
    c = multiply(zgen(), zgen()) + (multiply(jplus(), jminus()) + multiply(jminus(), jplus())) * Fraction(1, 2)
    assert commutator(c, a).is_zero()


@settings(max_examples=40, deadline=None)
@given(elements(), elements())
def test_dagger_antimultiplicative(a, b):
    assert dagger(multiply(a, b)) == multiply(dagger(b), dagger(a))
    assert dagger(dagger(a)) == a


@pytest.mark.parametrize("n,m", LABELS)
def test_eigen_and_ladder_relations_exact(n, m):
    for name, res in eigen_residuals(n, m).items():
        assert res.is_zero(), name


def test_laplacian_eigenvalue():
    for n, m in LABELS:
        f = build_pmn(n, m)
        assert laplacian(f) == f * ExactScalar({1: EPS**2 * n * (n + 1)})


def test_conjugation_and_orthogonality():
    basis = {lab: build_pmn(*lab) for lab in LABELS}
    for (n, m), f in basis.items():
        assert dagger(f) == basis[(n, -m)] * (-1) ** m
        for lab, g in basis.items():
            expected = norm_formula(n) if lab == (n, m) else ExactScalar()
            assert inner(f, g) == expected


def test_norm_independent_of_m_and_closed_form():
    # (n!)^2/(2n+1)! prod (4R^2 + eps^2(1 - r^2)); n = 1 gives (4R^2)/6
    assert norm_formula(1) == ExactScalar({1: RSQ * Fraction(2, 3)})
    for n in range(4):
        vals = {inner(build_pmn(n, m), build_pmn(n, m)) for m in range(-n, n + 1)}
        assert len(vals) == 1


def test_expand_in_basis_roundtrip_and_span_error():
    f = multiply(build_pmn(2, 1), build_pmn(1, -1))
    coeffs = expand_in_basis(f)
    rebuilt = NormalForm({}, SPHERE)
    for (n, m), c in coeffs.items():
        rebuilt = rebuilt + build_pmn(n, m) * c
    assert rebuilt == f
    assert set(coeffs) <= {(n, 0) for n in range(4)}
    with pytest.raises(SpanError):
        expand_in_basis(build_pmn(3, 0), nmax=2)


def test_pi0_picks_identity_component():
    assert pi0(multiply(zgen(), zgen())) == ExactScalar({1: RSQ * Fraction(1, 3)})
    assert pi0(one()) == ExactScalar.coerce(1)
    assert pi0(jplus()).is_zero()


def test_specialisation_to_eps_zero_commutes():
    p0 = AlgebraParams(epsilon=0, Rsq=1)
    a, b = build_pmn(2, 1, p0), build_pmn(1, -1, p0)
    assert commutator(a, b).is_zero()


def test_invalid_labels_rejected():
    with pytest.raises(ValueError):
        build_pmn(1, 2)
    with pytest.raises(ValueError):
        build_pmn(-1, 0)


def test_hahn_form_matches_commutator_construction():
    for n, m in LABELS:
        assert hahn_pmn(n, m) == build_pmn(n, m)


def test_hahn_poly_low_degree():
    x, N = sp.symbols("x N")
    assert sp.expand(hahn_poly(0, 0, 1, N, x) - (2 * x - N + 1)) == 0


def test_sympy_conversion_roundtrip():
    for n, m in LABELS:
        f = build_pmn(n, m)
        assert from_sympy(to_sympy(f)) == f
    with pytest.raises(ValueError):
        from_sympy("Jp*Jm")
    with pytest.raises(ValueError):
        from_sympy("0.5*z")


def test_table1_fixture_and_check():
    data = load_table1()
    assert len(data["entries"]) == 16
    report = table1_check()
    assert report["passed"] == 14
    assert report["advisory"] == 2
    assert report["mismatches"] == []
    advisory = {(e["n"], e["m"]) for e in report["entries"] if e["status"] == "advisory"}
    assert advisory == {(3, -1), (3, -3)}
    p33 = next(e for e in report["entries"] if (e["n"], e["m"]) == (3, -3))
    assert not p33["matches"] and p33["ratio_to_expected"] == "-1"
