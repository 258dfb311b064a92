import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from fuzzysphere.coefficients import clebsch_gordan
from fuzzysphere.matrep import (
    decompose_product,
    evaluate,
    k_cap,
    make_rep,
    matrix_rel_diff,
    norm_closed_form,
    pmn_matrix,
    reduced_matrix_element,
    trace_inner,
)
from fuzzysphere.surd import HalfInt
from fuzzysphere.symalg import build_pmn, multiply

h = HalfInt.of
spins = st.integers(0, 8).map(HalfInt)


def test_spin_half_and_spin_one():
    r = make_rep(h("1/2"), 2.0)
    assert np.allclose(r.J0, np.diag([1.0, -1.0]))
    r1 = make_rep(1)
    assert np.allclose(np.diag(r1.Jp, 1), [math.sqrt(2)] * 2)
    assert np.allclose(r1.casimir(), 2 * np.eye(3))
    assert r1.Rsq == pytest.approx(2.0)
    assert r1.Rhat == pytest.approx(1.5)


@given(spins, st.floats(0.1, 3.0))
def test_rep_relations(k, eps):
    r = make_rep(k, eps)
    assert np.allclose(r.J0 @ r.Jp - r.Jp @ r.J0, eps * r.Jp)
    assert np.allclose(r.Jp @ r.Jm - r.Jm @ r.Jp, 2 * eps * r.J0)
    assert np.allclose(r.casimir(), r.Rsq * np.eye(r.dim))


def test_make_rep_errors(monkeypatch):
    with pytest.raises(ValueError):
        make_rep(HalfInt(-1))
    with pytest.raises(ValueError):
        make_rep(1, 0)
    with pytest.raises(ValueError):
        make_rep(3, Fraction(1), exact=True)
    monkeypatch.setenv("NC_SPHERE_KCAP", "2")
    assert k_cap() == 2
    with pytest.raises(ValueError, match="NC_SPHERE_KCAP"):
        make_rep(3)


def test_pmn_examples():
    r = make_rep(1)
    assert np.allclose(pmn_matrix(r, 1, 0), -math.sqrt(2) * np.diag([1, 0, -1]))
    assert np.allclose(pmn_matrix(r, 0, 0), np.eye(3))
    assert not pmn_matrix(r, 3, 2).any()
    assert trace_inner(r, pmn_matrix(r, 1, 0), pmn_matrix(r, 1, 0)) == pytest.approx(4 / 3)
    assert trace_inner(r, r.identity(), r.identity()) == pytest.approx(1)


def test_norm_closed_form_examples():
    assert norm_closed_form(0, 1.0, 2.0) == 1
    assert norm_closed_form(1, 1, 2) == Fraction(4, 3)
    assert norm_closed_form(3, 1, 2) == 0


@pytest.mark.parametrize("k", [h(v) for v in ("1/2", 1, "3/2", 2, 3)])
def test_both_construction_paths_agree(k):
    r = make_rep(k)
    for n in range(k.twice + 1):
        for m in range(-n, n + 1):
            a = pmn_matrix(r, n, m, method="commutator")
            b = pmn_matrix(r, n, m, method="normal_form")
            assert matrix_rel_diff(r, a, b) < 1e-14
            pmn_matrix(r, n, m, method="both")


def test_generic_evaluation_matches_pmn():
    r = make_rep(2, 0.7)
    f = multiply(build_pmn(2, 1), build_pmn(1, -1))
    got = evaluate(r, f)
    want = pmn_matrix(r, 2, 1) @ pmn_matrix(r, 1, -1)
    assert matrix_rel_diff(r, got, want) < 1e-13


def test_exact_mode_matches_float_mode():
    for k in (h("1/2"), h(1), h("3/2"), h(2)):
        ex = make_rep(k, Fraction(1, 2), exact=True)
        fl = make_rep(k, 0.5)
        assert ex.Rsq == Fraction(1, 4) * k.fraction() * (k.fraction() + 1)
        for n in range(k.twice + 1):
            for m in range(-n, n + 1):
                pe = pmn_matrix(ex, n, m)
                assert isinstance(pe, sp.MatrixBase)
                assert trace_inner(ex, pe, pe) == norm_closed_form(n, Fraction(1, 2), ex.Rsq)
                pf = np.array(pe.evalf(), dtype=complex)
                assert matrix_rel_diff(fl, pf, pmn_matrix(fl, n, m)) < 1e-13


def test_epsilon_scaling():
    a, b = make_rep(2, 1.0), make_rep(2, 0.3)
    assert np.allclose(pmn_matrix(b, 3, -1), 0.3**3 * pmn_matrix(a, 3, -1))


def test_product_expansion_examples():
    r = make_rep(3)
    rep = decompose_product(r, 1, 0, 1, 0)
    assert [n for n, _ in rep.terms] == [0, 2]
    assert rep.coefficient(0) == pytest.approx(2 / 3 * r.Rsq)
    assert rep.coefficient(2) == pytest.approx(math.sqrt(2 / 3))
    assert rep.residual < 1e-14
    js = rep.to_json()
    assert js["pair"] == [1, 0, 1, 0] and js["quotient"] == []


def test_stretched_product_single_term():
    r = make_rep(3)
    rep = decompose_product(r, 2, 2, 1, 1)
    assert [n for n, _ in rep.terms] == [3]
    want = trace_inner(r, pmn_matrix(r, 3, 3), pmn_matrix(r, 2, 2) @ pmn_matrix(r, 1, 1)) / norm_closed_form(3, 1.0, r.Rsq)
    assert rep.coefficient(3) == pytest.approx(want)


def test_truncated_product_flags_quotient():
    rep = decompose_product(make_rep(1), 2, 0, 2, 0)
    assert rep.quotient == [3, 4]
    assert rep.residual < 1e-12
    with pytest.raises(ValueError):
        decompose_product(make_rep(h("1/2")), 2, 0, 0, 0)


def test_reduced_matrix_element_matches_projection():
    for k in (h(2), h("5/2"), h(3)):
        r = make_rep(k)
        for n1, n2 in [(1, 1), (2, 1), (2, 2)]:
            rep = decompose_product(r, n1, 0, n2, 0)
            for n, c in rep.terms:
                cg = float(clebsch_gordan(n1, n2, n, 0, 0, 0))
                assert c == pytest.approx(cg * reduced_matrix_element(n1, n2, n, 0, 0, k), abs=1e-10)


def test_reduced_matrix_element_edge_cases():
    assert reduced_matrix_element(1, 1, 3, 0, 0, h(3)) == 0
    with pytest.raises(ZeroDivisionError, match="n=3"):
        reduced_matrix_element(2, 1, 3, 0, 0, h(1))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10).map(HalfInt), st.data())
def test_trace_norm_independent_of_m(k, data):
    r = make_rep(k)
    n = data.draw(st.integers(0, k.twice))
    vals = [trace_inner(r, p, p).real for p in (pmn_matrix(r, n, m) for m in range(-n, n + 1))]
    assert np.ptp(vals) <= 1e-10 * max(vals)
