from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spectra_lab import Mobius, conjugate
from spectra_lab.dynatomic import AlgebraicClass, galois_classes
from spectra_lab.errors import InvalidInput
from spectra_lab.exact_poly import IntPoly
from spectra_lab.rog import (
    ClassVector,
    RogVector,
    class_norm,
    fold_involution,
    independence_certificate,
    make_certificate,
    norm_vector,
    phi_p,
    rank,
    rog_of_rational,
    verify_upper_triangle,
)

from conftest import FIXTURES

F = FIXTURES
V = RogVector.from_dict
nonzero_q = st.fractions(min_value=-10 ** 6, max_value=10 ** 6, max_denominator=10 ** 4).filter(bool)


def _cv(d):
    """A ClassVector carrying just a vector (the class is irrelevant to the triangle check)."""
    return ClassVector(AlgebraicClass(IntPoly([-2, 1]), 1, 1), V(d), Fraction(2))


# -- rog ------------------------------------------------------------------------------------

def test_rog_examples():
    assert rog_of_rational(8).as_dict() == {2: 3}
    assert rog_of_rational(Fraction(-4, 9)).as_dict() == {2: 2, 3: -2}
    assert not rog_of_rational(1) and not rog_of_rational(-1)
    with pytest.raises(InvalidInput):
        rog_of_rational(0)


def test_rog_vector_has_no_zero_entries():
    v = V({2: 1, 3: 0, 5: Fraction(-1, 2)}) + V({2: -1})
    assert v.as_dict() == {5: Fraction(-1, 2)}
    assert list(v.to_json()) == ["5"]


def test_rog_homomorphism_500_pairs():
    rng = random.Random(3)
    for _ in range(500):
        a = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 5))
        b = Fraction(rng.choice([-1, 1]) * rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 5))
        assert rog_of_rational(a * b) == rog_of_rational(a) + rog_of_rational(b)


@given(nonzero_q)
def test_product_formula_bridge(q):
    v = rog_of_rational(q)
    total = sum(float(e) * math.log(p) for p, e in v.as_dict().items())
    assert total == pytest.approx(math.log(abs(q)), abs=1e-12 * max(1.0, abs(math.log(abs(q)))) + 1e-12)


def test_phi_p_examples():
    v = V({2: 3})
    assert phi_p(v, 2) == 3 and phi_p(v, 5) == 0
    w = rog_of_rational(Fraction(2 ** 5 * 7, 11))
    assert [p for p in range(2, 200) if phi_p(w, p) != 0] == [2, 7, 11]


def test_fold_involution_examples():
    v = V({2: 3, 5: Fraction(1, 2)})
    assert fold_involution(v, v) == v
    assert fold_involution(V({2: 1}), V({2: 3})) == V({2: 2})
    assert fold_involution(v, V({})) == v.scale(Fraction(1, 2))


# -- norms ----------------------------------------------------------------------------------

def test_norm_vector_examples():
    cv = norm_vector(AlgebraicClass(IntPoly([4, -2, 1]), 1, 1))
    assert cv.norm == 4 and cv.vector == V({2: 1})
    cv = norm_vector(AlgebraicClass(IntPoly([-8, 1]), 2, 1))
    assert cv.norm == 8 and cv.vector == V({2: 3})
    with pytest.raises(InvalidInput, match="zero multiplier"):
        norm_vector(AlgebraicClass(IntPoly([0, 1]), 1, 1))
    assert class_norm(IntPoly([-3, 0, 2])) == Fraction(-3, 2)


def test_period3_classes_carry_prime_5():
    vecs = [norm_vector(c) for c in galois_classes(F["z2+1"], 3)]
    total = sum(cv.vector.get(5) * cv.cls.degree() for cv in vecs)
    assert total == 1


# -- rank -----------------------------------------------------------------------------------

def test_rank_examples():
    assert rank([V({2: 1}), V({2: 3})]) == 1
    assert rank([V({2: 1}), V({2: 3}), V({2: 3, 5: Fraction(1, 2)})]) == 2
    assert rank([]) == 0
    assert rank([V({})]) == 0


def test_rank_with_composite_keys():
    # keys that are not primes (unfactored cofactors) are refined into a coprime basis
    assert rank([V({6: 1}), V({2: 1}), V({3: 1})]) == 2
    assert rank([V({10: 1}), V({4: 1})]) == 2


vectors = st.lists(
    st.dictionaries(st.sampled_from([2, 3, 5, 7, 11]), st.fractions(-5, 5, max_denominator=4), max_size=4),
    max_size=6,
)


@given(vectors, st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10))
def test_rank_bounds_and_invariance(vs, s):
    rows = [V(d) for d in vs]
    r = rank(rows)
    primes = {p for v in rows for p in v.keys()}
    assert r <= min(len(rows), len(primes))
    assert rank([v.scale(s) for v in rows]) == r
    assert rank([fold_involution(v, v) for v in rows]) == r


# -- triangle certificates ------------------------------------------------------------------

def test_verify_upper_triangle_examples():
    ok, w = verify_upper_triangle(make_certificate([(_cv({2: 1}), 2)]))
    assert ok and w is None
    cert = make_certificate([(_cv({2: 1}), 2), (_cv({2: 3, 5: Fraction(1, 2)}), 5)])
    assert cert.verified and cert.phi_matrix == [[1, 0], [3, Fraction(1, 2)]]
    bad = make_certificate([(_cv({2: 1, 5: -1}), 2), (_cv({5: 1}), 5)])
    ok, w = verify_upper_triangle(bad)
    assert not ok and w == (1, 2)
    bad = make_certificate([(_cv({2: 1}), 2), (_cv({2: 1}), 3)])
    assert verify_upper_triangle(bad) == (False, (2, 2))


def test_certificate_z2p1():
    cert = independence_certificate(F["z2+1"], 2, prime_max=100, period_max=4)
    assert cert.verified and cert.primes == [2, 5] and cert.achieved_dim == 2
    assert cert.source == "sieve"
    assert rank([cv.vector for cv, _ in cert.rows]) == 2
    assert cert.rows[1][0].cls.period == 3


def test_certificate_exceptional_is_flat():
    cert = independence_certificate(F["z2"], 2)
    assert cert.achieved_dim == 1 and cert.status == "budget exceeded" and cert.source == "norm-scan"


@pytest.mark.parametrize("name", ["z2+1", "z2-1", "wandering", "z2-2"])
def test_certificate_k1_succeeds(name):
    cert = independence_certificate(F[name], 1)
    assert cert.verified and cert.achieved_dim == 1


def test_certificate_is_conjugation_invariant():
    base = independence_certificate(F["z2+1"], 2).achieved_dim
    for m in (Mobius(1, 1, 0, 1), Mobius(2, 0, 0, 1)):
        assert independence_certificate(conjugate(F["z2+1"], m), 2).achieved_dim == base


def test_certificate_rows_always_independent():
    for name in ("z2+1", "wandering"):
        cert = independence_certificate(F[name], 3, prime_max=60)
        if cert.verified:
            assert rank([cv.vector for cv, _ in cert.rows]) == len(cert.rows)


def test_certificate_json_is_exact():
    js = independence_certificate(F["z2+1"], 2).to_json()
    assert js["primes"] == [2, 5] and js["verified"] is True
    assert all(isinstance(x, str) for row in js["phi_matrix"] for x in row)
