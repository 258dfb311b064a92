import itertools
import math

import numpy as np
import pytest

from fuzzysphere.matrep import make_rep, norm_closed_form, pmn_matrix
from fuzzysphere.psi import (
    NORMS,
    Field,
    PsiLabel,
    associativity_defect,
    build_psi,
    coordinate,
    expand_psi,
    ext_d,
    labels_for,
    leibniz_defect,
    load_convention_ledger,
    metric,
    one_form,
    pi0,
    psi_norm,
    psi_norm_sq,
    psi_vs_pmn_phase,
    rho,
    rho_fields,
    rotation_sign,
    unit_tensor,
    vector_action,
    vector_field,
)
from fuzzysphere.surd import HalfInt

h = HalfInt.of


def test_label_validation():
    PsiLabel("1/2", "-1/2", "1/2")
    for bad in [(-1, 0, 0), (1, 2, 0), (1, 0, 2), (1, "1/2", 0), (1, 0, "1/2")]:
        with pytest.raises(ValueError):
            PsiLabel(*bad)


def test_unit_tensor_examples():
    assert np.allclose(unit_tensor(2, PsiLabel(0, 0, 0)), np.eye(5))
    u = unit_tensor(1, PsiLabel(1, 0, 0))
    assert np.allclose(u, np.diag(np.diag(u)))
    d = np.diag(u)
    assert np.allclose(d / d[0], [1, 0, -1])
    # V_0 -> V_1/2: a single CG entry <0 0; 1/2 1/2 | 1/2 1/2> = 1
    u = unit_tensor(0, PsiLabel("1/2", "1/2", "1/2"))
    assert u.shape == (2, 1) and np.allclose(u, [[1], [0]])
    assert unit_tensor(h("1/2"), PsiLabel("1/2", "1/2", "1/2")).shape == (3, 2)
    with pytest.raises(ValueError):
        unit_tensor(0, PsiLabel(1, -1, 0))


def test_norms():
    assert psi_norm(3, 0, 0) == pytest.approx(1)
    for k in (h(1), h("3/2"), h(4)):
        for n in range(k.twice + 2):
            closed = norm_closed_form(n, 1.0, make_rep(k).Rsq)
            assert psi_norm(k, n, 0) == pytest.approx(math.sqrt(closed), rel=1e-12, abs=1e-12)
    assert psi_norm_sq(1, 1, 1) > 0
    assert psi_norm_sq(1, 2, -2) == 0  # k + r < 0 ... target V_{-1}
    assert len(NORMS) > 0


def test_build_psi_norm_equals_table():
    for k in (h(1), h("5/2")):
        for r in (h(-1), h("-1/2"), h(0), h("1/2"), h(1)):
            for lab in labels_for(k, r):
                op = build_psi(k, lab)
                assert op.norm() == pytest.approx(psi_norm(k, lab.n, lab.r), rel=1e-12)
                assert op.matrix.shape == ((k + r).twice + 1, k.twice + 1)


def test_r0_sector_is_the_matrix_algebra():
    ledger = load_convention_ledger()
    for k in (h(1), h(2), h("5/2")):
        rep = make_rep(k)
        for n in range(k.twice + 1):
            assert psi_vs_pmn_phase(k, n) == pytest.approx(ledger["psi_r0_vs_pmn"]["phase_by_n"][str(n)])
            for m in range(-n, n + 1):
                assert np.allclose(build_psi(k, PsiLabel(n, 0, m)).matrix, pmn_matrix(rep, n, m), atol=1e-10)
        a, b = build_psi(k, PsiLabel(1, 0, 1)), build_psi(k, PsiLabel(1, 0, -1))
        assert np.allclose(rho(a, b).matrix, pmn_matrix(rep, 1, 1) @ pmn_matrix(rep, 1, -1))


def test_psi_orthogonality():
    k = h(2)
    for r in (h(-1), h("1/2"), h(1)):
        labs = list(labels_for(k, r))
        ops = [build_psi(k, lab).matrix for lab in labs]
        for (i, a), (j, b) in itertools.combinations(enumerate(ops), 2):
            assert abs(np.vdot(a, b)) < 1e-12 * max(1, np.linalg.norm(a) * np.linalg.norm(b))


def test_rho_identity_and_base_mismatch():
    k = h(2)
    b = build_psi(k, PsiLabel(1, 1, 0))
    ident = build_psi(k + 1, PsiLabel(0, 0, 0))
    assert np.allclose(rho(ident, b).matrix, b.matrix)
    with pytest.raises(ValueError, match="base mismatch"):
        rho(b, b)


def test_rho_selection_rules():
    k = h(2)
    a = build_psi(k + h("1/2"), PsiLabel(1, 1, 0))
    b = build_psi(k, PsiLabel("1/2", "1/2", "-1/2"))
    coeffs, res = expand_psi(rho(a, b))
    assert res < 1e-12
    assert coeffs
    for lab in coeffs:
        if abs(coeffs[lab]) > 1e-12:
            assert lab.r == h("3/2") and lab.m == h("-1/2") and lab.n <= h("3/2")


def test_field_realization_and_nonassociativity():
    a, b, c = Field.basis(1, 1, 0), Field.basis(1, 0, 1), Field.basis(1, -1, 0)
    assert associativity_defect(a, b, c, 2) > 1e-6
    s1, s2, s3 = Field.basis(1, 0, 0), Field.basis(2, 0, 1), Field.basis(1, 0, -1)
    assert associativity_defect(s1, s2, s3, 2) < 1e-12
    prod = rho_fields(s1, s2, 2)
    assert prod.r == 0
    f = (a + a).scale(0.5) - a
    assert f.realize(2).norm() < 1e-14


def test_coordinates_and_frame():
    k = h(3)
    for m in (-1, 0, 1):
        x = coordinate(k, m)
        assert x.r == 0
        assert one_form(k, m).target_k == k - 1
        X = vector_field(k, m)
        assert X.base_k == k - 1 and X.target_k == k
    with pytest.raises(ValueError):
        one_form(k, 0, scale="bogus")


@pytest.mark.parametrize("k", [h(1), h(2), h("5/2"), h(6)])
def test_sum_x_X_vanishes(k):
    s1 = s2 = None
    for m in (-1, 0, 1):
        X = vector_field(k, m)
        t1 = rho(coordinate(k, m), X)
        t2 = rho(X, coordinate(k - 1, m))
        s1 = t1 if s1 is None else s1 + t1
        s2 = t2 if s2 is None else s2 + t2
    assert np.abs(s1.matrix).max() < 1e-12
    assert np.abs(s2.matrix).max() < 1e-12


def test_metric_frame():
    k = h(3)
    for i, j in itertools.product((-1, 0, 1), repeat=2):
        g = metric(vector_field(k, i, scale="metric"), vector_field(k, j, scale="metric"))
        assert g.r == 0
        assert pi0(g) == pytest.approx(1.0 if i == j else 0.0, abs=1e-10)
        if i != j:
            assert g.norm() > 1e-6
    # the unrescaled frame gives 2 eps k (2k+1) / (3 (2k+2)) on the diagonal
    g = metric(vector_field(k, 0), vector_field(k, 0))
    assert pi0(g).real == pytest.approx(2 * 3 * 7 / (3 * 8))
    with pytest.raises(ValueError):
        pi0(vector_field(k, 0))


def test_exterior_derivative():
    k = h(3)
    assert np.abs(ext_d(Field.basis(0, 0, 0), k).matrix).max() < 1e-12
    dx = ext_d(coordinate(k, 1))
    assert dx.r == -1
    coeffs, res = expand_psi(dx)
    assert res < 1e-12
    assert {lab.n for lab, c in coeffs.items() if abs(c) > 1e-12} == {h(1)}
    with pytest.raises(ValueError):
        ext_d(Field.basis(1, 1, 0), k)
    X = vector_field(k, 0)
    assert vector_action(X, Field.basis(1, 0, 0)).r == 0


def test_leibniz_defect_shrinks():
    f, g = Field.basis(1, 0, 1), Field.basis(2, 0, 0)
    d4 = leibniz_defect(f, g, 4, 1 / math.sqrt(20))
    d8 = leibniz_defect(f, g, 8, 1 / math.sqrt(72))
    assert d8 < d4


@pytest.mark.parametrize("label,k,expected", [
    ((1, 0, 0), 1, 1.0),
    (("1/2", "1/2", "-1/2"), 1, -1.0),
    ((2, -1, 1), 2, 1.0),
    (("3/2", "-1/2", "1/2"), "3/2", -1.0),
])
def test_rotation_sign(label, k, expected):
    assert rotation_sign(PsiLabel(*label), h(k)) == pytest.approx(expected)
