import itertools
from fractions import Fraction

import pytest

from fuzzysphere.coefficients import (
    FACTORIAL_CAP,
    clebsch_gordan,
    coupling_oracle_cg,
    factorial,
    recoupling_oracle_6j,
    sixj_symmetries,
    wigner_3j,
    wigner_6j,
)
from fuzzysphere.surd import HalfInt, Surd

h = HalfInt.of


def spins(top_twice):
    return [HalfInt(t) for t in range(top_twice + 1)]


def mrange(j):
    return [HalfInt(t) for t in range(-j.twice, j.twice + 1, 2)]


def test_factorial_memo_and_cap():
    assert factorial(0) == 1 and factorial(10) == 3628800
    with pytest.raises(ValueError):
        factorial(-1)
    with pytest.raises(OverflowError):
        factorial(FACTORIAL_CAP + 1)


@pytest.mark.parametrize("args,expected", [
    (("1", "1", "2", "0", "0", "0"), Surd.sqrt(Fraction(2, 3))),
    (("1/2", "1/2", "1", "1/2", "1/2", "1"), Surd.rational(1)),
    (("1/2", "1/2", "0", "1/2", "-1/2", "0"), Surd.sqrt(Fraction(1, 2))),
    (("1", "1", "2", "1", "1", "2"), Surd.rational(1)),
    (("3/2", "0", "3/2", "-1/2", "0", "-1/2"), Surd.rational(1)),
])
def test_cg_known_values(args, expected):
    vals = [h(a) for a in args]
    assert clebsch_gordan(*vals) == expected
    assert coupling_oracle_cg(*vals) == expected


def test_cg_selection_rules_give_zero():
    assert clebsch_gordan(h(1), h(1), h(3), h(0), h(0), h(0)).is_zero()
    assert clebsch_gordan(h(1), h(1), h(1), h(1), h(0), h(0)).is_zero()
    assert clebsch_gordan(h(1), h(1), h(1), h(2), h(0), h(2)).is_zero()


def test_cg_exchange_symmetry():
    for j1, j2 in itertools.product(spins(4), repeat=2):
        for t in range(abs(j1.twice - j2.twice), j1.twice + j2.twice + 1, 2):
            j = HalfInt(t)
            phase = -1 if ((j1 + j2 - j).twice // 2) % 2 else 1
            for m1 in mrange(j1):
                for m2 in mrange(j2):
                    if abs(m1 + m2) > j:
                        continue
                    a = clebsch_gordan(j1, j2, j, m1, m2, m1 + m2)
                    b = clebsch_gordan(j2, j1, j, m2, m1, m1 + m2)
                    assert a == b * phase


def test_cg_orthogonality_over_m():
    for j1, j2 in itertools.product(spins(4), repeat=2):
        js = [HalfInt(t) for t in range(abs(j1.twice - j2.twice), j1.twice + j2.twice + 1, 2)]
        for j, jp in itertools.product(js, repeat=2):
            for m in mrange(min(j, jp)):
                total = Surd()
                for m1 in mrange(j1):
                    m2 = m - m1
                    if abs(m2) <= j2:
                        total = total + clebsch_gordan(j1, j2, j, m1, m2, m) * clebsch_gordan(j1, j2, jp, m1, m2, m)
                assert total == Surd.rational(1 if j == jp else 0)


def test_3j_relation():
    v = wigner_3j(h(1), h(1), h(2), h(0), h(0), h(0))
    assert v == Surd.sqrt(Fraction(2, 15))


def test_6j_with_zero_entry():
    for j1, j2, j3 in itertools.product(spins(4), repeat=3):
        if (j1.twice + j2.twice + j3.twice) % 2 or not (abs(j1 - j2) <= j3 <= j1 + j2):
            continue
        sign = -1 if ((j1 + j2 + j3).twice // 2) % 2 else 1
        expected = Surd.signed_sqrt(sign, Fraction(1, (j2.twice + 1) * (j3.twice + 1)))
        assert wigner_6j(j1, j2, j3, h(0), j3, j2) == expected


def test_6j_triangle_violation_is_zero():
    assert wigner_6j(h(1), h(1), h(3), h(1), h(1), h(1)).is_zero()


def test_6j_matches_recoupling_oracle():
    checked = 0
    for args in itertools.product(spins(3), repeat=6):
        if sum(a.twice for a in args[:3]) % 2:
            continue
        assert wigner_6j(*args) == recoupling_oracle_6j(*args)
        checked += 1
    assert checked > 100
    assert wigner_6j(*[h(1)] * 6) == Surd.rational(Fraction(1, 6))


def test_6j_symmetry_list_has_24_orderings():
    assert len(set(sixj_symmetries(*range(6)))) == 24
