from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spectra_lab import INFINITY, Mobius, conjugate, iterate, parse_normalize
from spectra_lab.errors import BadReduction, BudgetExceeded, DegeneratePair, DegreeTooSmall, InvalidInput
from spectra_lab.exact_poly import IntPoly
from spectra_lab.rational_map import (
    critical_classes,
    critical_form,
    derivative_parts,
    good_reduction,
    homogeneous_resultant,
    reduction_obstruction,
    require_good_reduction,
)

from conftest import FIXTURES

F = FIXTURES
MOBIUS = [Mobius(1, 1, 0, 1), Mobius(0, 1, 1, 0), Mobius(2, 1, 1, 1)]


def test_parse_normalize_examples():
    f = parse_normalize([1, 0, 1], [1])
    assert f.num == IntPoly([1, 0, 1]) and f.den == IntPoly([1]) and f.degree == 2
    with pytest.raises(DegreeTooSmall, match="degree too small"):
        parse_normalize([0, 2, 0, 2], [2, 0, 2])
    # common factor z - 1 removed before the degree check
    g = parse_normalize([-1, 1, -1, 1], [-1, 1])  # (z-1)(z^2+1)/(z-1)
    assert g == F["z2+1"]


def test_parse_normalize_clears_denominators_and_sign():
    f = parse_normalize([Fraction(1, 2), 0, Fraction(1, 2)], [Fraction(1, 2)])
    assert f == F["z2+1"]
    g = parse_normalize([-1, 0, -1], [-1])
    assert g == F["z2+1"]
    h = parse_normalize(["-1/10", "0", "1"], ["1"])
    assert h.num == IntPoly([-1, 0, 10]) and h.den == IntPoly([10])


def test_parse_normalize_errors():
    with pytest.raises(InvalidInput):
        parse_normalize([0], [0])
    with pytest.raises(InvalidInput):
        parse_normalize([1, 1], [0])
    with pytest.raises(DegreeTooSmall):
        parse_normalize([1, 1], [1])
    assert issubclass(DegeneratePair, InvalidInput)


def test_iterate_examples():
    f = F["z2+1"]
    assert iterate(f, 1) == f
    assert iterate(f, 2).num == IntPoly([2, 0, 2, 0, 1])
    z32 = iterate(F["z2"], 5)
    assert z32.degree == 32 and z32.num == IntPoly([0] * 32 + [1])


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_iterate_composes(name):
    f = F[name]
    assert iterate(iterate(f, 2), 2) == iterate(f, 4)
    assert iterate(f, 3).degree == f.degree ** 3
    # f^(m+n) = f^n o f^m, checked exactly at rational points
    for m, n in ((1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)):
        fm, fn, fmn = iterate(f, m), iterate(f, n), iterate(f, m + n)
        for z in (Fraction(1, 3), Fraction(-5, 2), Fraction(7)):
            assert fmn(z) == fn(fm(z))


def test_iterate_budget(monkeypatch):
    monkeypatch.setenv("SPECLAB_BUDGET_MB", "0.0001")
    with pytest.raises(BudgetExceeded):
        iterate(F["z2+1"], 8)


def test_derivative_parts_examples(frozen):
    W, Q2 = derivative_parts(F["z2+1"])
    assert W == IntPoly([0, 2]) and Q2 == IntPoly([1])
    inv2 = parse_normalize([1], [0, 0, 1])  # 1/z^2 (1/z itself has degree 1)
    W, Q2 = derivative_parts(inv2)
    assert W == IntPoly([0, -2]) and Q2 == IntPoly([0, 0, 0, 0, 1])
    lat = F["lattes"]
    W, Q2 = derivative_parts(lat)
    assert W == IntPoly([int(c) for c in frozen["lattes_W"]])
    assert Fraction(W(2), Q2(2)) == Fraction(frozen["lattes_derivative_at_2"])


def _exact_derivative(f, z):
    W, Q2 = derivative_parts(f)
    return Fraction(W(z)) / Q2(z)


@pytest.mark.parametrize("name", ["z2+1", "lattes", "wandering"])
def test_chain_rule_at_random_rationals(name):
    f = F[name]
    ff = iterate(f, 2)
    rng = random.Random(7)
    done = 0
    while done < 20:
        z = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
        fz = f(z)
        if fz is INFINITY or f.den(z) == 0 or f.den(fz) == 0:
            continue
        assert _exact_derivative(ff, z) == _exact_derivative(f, fz) * _exact_derivative(f, z)
        done += 1


def test_projective_evaluation_and_infinity():
    f = F["z2+1"]
    assert f(INFINITY) is INFINITY
    assert f(Fraction(2)) == 5
    inv2 = parse_normalize([1], [0, 0, 1])
    assert inv2(0) is INFINITY and inv2(INFINITY) == 0


def test_conjugate_examples():
    f = F["z2+1"]
    assert conjugate(f, Mobius.identity()) == f
    assert conjugate(F["z2"], Mobius(0, 1, 1, 0)) == F["z2"]
    g = conjugate(f, Mobius(1, 1, 0, 1))  # z -> z+1: (z-1)^2 + 2
    assert g == parse_normalize([3, -2, 1], [1])


@pytest.mark.parametrize("name", ["z2+1", "lattes", "wandering"])
def test_conjugation_is_group_action(name):
    f = F[name]
    for m1 in MOBIUS:
        for m2 in MOBIUS:
            assert conjugate(conjugate(f, m1), m2) == conjugate(f, m2.compose(m1))
        assert conjugate(conjugate(f, m1), m1.inverse()) == f


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
def test_conjugation_preserves_degree_and_pointwise(a, b, c, d):
    if a * d - b * c == 0:
        return
    m = Mobius(a, b, c, d)
    f = F["z2+1"]
    g = conjugate(f, m)
    assert g.degree == 2
    # g(m(z)) = m(f(z)) at a few rational points
    for z in (Fraction(1, 3), Fraction(-2, 7), Fraction(5)):
        mz = m(z)
        lhs = g(mz)
        rhs = m(f(z))
        assert lhs == rhs


def test_critical_form_examples():
    cf = critical_form(F["z2+1"])
    assert cf.degree == 2 and cf.affine() == IntPoly([0, 1]) and cf.infinity_multiplicity() == 1
    zinv = parse_normalize([1, 0, 1], [0, 1])  # z + 1/z
    cf = critical_form(zinv)
    assert cf.affine() == IntPoly([-1, 0, 1]) and cf.infinity_multiplicity() == 0
    classes = critical_classes(zinv)
    assert [c.minpoly for c in classes] == [IntPoly([-1, 1]), IntPoly([1, 1])]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_critical_count_is_2d_minus_2(name):
    f = F[name]
    cf = critical_form(f)
    assert cf.degree == 2 * f.degree - 2
    assert sum(c.degree() * c.multiplicity for c in critical_classes(f)) == 2 * f.degree - 2


def test_good_reduction_examples(frozen):
    assert good_reduction(F["z2+1"], 5)
    assert homogeneous_resultant(F["z2+1"]) == 1
    assert not good_reduction(F["lattes"], 2)
    assert "denominator vanishes" in reduction_obstruction(F["lattes"], 2)
    with pytest.raises(BadReduction):
        require_good_reduction(F["lattes"], 2)
    assert all(good_reduction(F["z2"], p) for p in (2, 3, 5, 7, 11, 101))
    assert homogeneous_resultant(F["lattes"]) == frozen["lattes_homogeneous_resultant"]


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_bad_reduction_only_at_resultant_primes(name):
    f = F[name]
    R = homogeneous_resultant(f)
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23):
        assert good_reduction(f, p) == (R % p != 0)
