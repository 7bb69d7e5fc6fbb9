from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectra_lab import iterate, parse_normalize
from spectra_lab.dynatomic import exact_period_form, fixed_point_form
from spectra_lab.errors import InvalidInput
from spectra_lab.exact_poly import IntPoly
from spectra_lab.numeric import (
    TEST_FUNCTIONS,
    apply_float,
    chi_sequence,
    equidist_gap,
    evaluate_test_function,
    exact_multiplier_roots,
    fixed_point_index_sum,
    fixed_points_numeric,
    lyapunov_estimate,
    match_multisets,
    multipliers_numeric,
    sample_measure,
    spherical_derivative,
)
from spectra_lab.rational_map import derivative_parts
from spectra_lab.roots import complex_roots

from conftest import FIXTURES

F = FIXTURES
LOG2 = math.log(2)


# -- roots ----------------------------------------------------------------------------------

def test_complex_roots_examples(frozen):
    rs = complex_roots(IntPoly([1, 0, 1]))
    assert sorted(rs.roots, key=lambda z: z.imag) == pytest.approx([-1j, 1j], abs=1e-12)
    assert rs.max_residual <= 1e-12 and not rs.clustered
    cube = complex_roots(IntPoly([-1, 3, -3, 1]))  # (z - 1)^3
    assert cube.clustered and cube.distinct()[0][1] == 3
    assert abs(cube.distinct()[0][0] - 1) < 1e-5
    E3 = IntPoly([int(c) for c in frozen["E3_z2p1"]])
    roots = complex_roots(E3).roots
    assert len(roots) == 6
    # the product over both 3-cycles is the constant term 5 of E_3
    assert abs(np.prod(roots) - 5) < 1e-9


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=12).filter(lambda c: c[-1] != 0))
def test_complex_roots_residual_and_count(c):
    a = IntPoly(c)
    if a.degree() < 1:
        return
    rs = complex_roots(a)
    assert len(rs) == a.degree()
    assert rs.max_residual <= 1e-12 or rs.precision > 53


def test_complex_roots_high_precision():
    rs = complex_roots(IntPoly([-2, 0, 1]), precision=200)
    assert rs.precision >= 200
    assert sorted(abs(r) for r in rs.roots) == pytest.approx([math.sqrt(2)] * 2, rel=1e-15)
    with pytest.raises(InvalidInput):
        complex_roots(IntPoly([3]))


# -- multipliers ----------------------------------------------------------------------------

def test_multipliers_numeric_examples():
    ms = multipliers_numeric(F["z2"], 3)
    assert len(ms) == 6 and all(m.chi == pytest.approx(LOG2, abs=1e-12) for m in ms)
    ms = multipliers_numeric(F["z2+1"], 2)
    assert [m.rho for m in ms] == pytest.approx([8, 8], abs=1e-9)
    assert all(m.chi == pytest.approx(0.5 * math.log(8), abs=1e-12) for m in ms)
    ms = multipliers_numeric(F["z2+1"], 1)
    finite = [m for m in ms if abs(m.rho) > 0]
    assert len(finite) == 2 and all(m.chi == pytest.approx(LOG2, abs=1e-12) for m in finite)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_chain_rule_matches_sigma_roots(name):
    f = F[name]
    for n in range(1, 5 if f.degree == 2 else 4):
        num = [m.rho for m in multipliers_numeric(f, n)]
        ex = exact_multiplier_roots(f, n)
        assert match_multisets(num, ex) <= 1e-6, (name, n)


def test_match_multisets():
    assert match_multisets([1, 2j], [2j, 1]) == 0
    assert match_multisets([1], [1, 2]) == math.inf
    assert match_multisets([1.0 + 1e-7], [1.0]) == pytest.approx(1e-7)


def test_fixed_point_index_sum(frozen):
    s = fixed_point_index_sum(F["z2+1"])
    assert abs(s - complex(frozen["index_sum_z2p1"])) < 1e-9
    for name in ("wandering", "lattes", "z2-1"):
        assert abs(fixed_point_index_sum(F[name]) - 1) < 1e-9
    with pytest.raises(InvalidInput):
        fixed_point_index_sum(parse_normalize(["1/4", 0, 1], [1]))


# -- spherical derivative -------------------------------------------------------------------

def _flat_derivative(f, z):
    W, Q2 = derivative_parts(f)
    return W(z) / Q2(z)


@pytest.mark.parametrize("name", ["z2+1", "lattes", "wandering", "z2-1"])
def test_spherical_cocycle(name):
    f = F[name]
    rng = np.random.default_rng(5)
    for n in (1, 2, 3):
        fn = iterate(f, n)
        for z0 in rng.normal(size=5) + 1j * rng.normal(size=5):
            z0 = complex(z0)
            prod, z = 1.0, z0
            for _ in range(n):
                prod *= float(spherical_derivative(f, z)[0])
                z = complex(apply_float(f, z)[0])
            direct = abs(_flat_derivative(fn, z0)) * (1 + abs(z0) ** 2) / (1 + abs(z) ** 2)
            assert prod == pytest.approx(direct, rel=1e-9)


def test_spherical_derivative_at_infinity_and_poles():
    # z^2 at infinity: f^# = 0 (superattracting); 1/z^2 at 0 maps to infinity with f^# = 0
    assert spherical_derivative(F["z2"], complex(np.inf, 0))[0] == 0
    inv2 = parse_normalize([1], [0, 0, 1])
    assert spherical_derivative(inv2, 0j)[0] == 0
    # rotation-like behaviour on the unit circle for z^2: f^# = 2|z| (1+|z|^2) / (1+|z|^4) = 2
    assert spherical_derivative(F["z2"], np.exp(0.3j))[0] == pytest.approx(2.0)


# -- Lyapunov ---------------------------------------------------------------------------------

def test_lyapunov_seed_reproducible():
    a = lyapunov_estimate(F["z2-1"], 5000, seed=11)
    b = lyapunov_estimate(F["z2-1"], 5000, seed=11)
    assert a == b
    assert lyapunov_estimate(F["z2-1"], 5000, seed=12).value != a.value
    assert np.array_equal(sample_measure(F["lattes"], 200, seed=3), sample_measure(F["lattes"], 200, seed=3))


def test_lyapunov_z2_exact():
    est = lyapunov_estimate(F["z2"], 20000, seed=1)
    assert abs(est.value - LOG2) < 0.01
    assert est.stderr == pytest.approx(0, abs=1e-10)  # every sample on the unit circle


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_lyapunov_lower_bound_soft(name):
    f = F[name]
    est = lyapunov_estimate(f, 20000, seed=2)
    assert est.lower_bound_ok(f.degree)


def test_lyapunov_errors():
    with pytest.raises(InvalidInput):
        lyapunov_estimate(F["z2"], 0)
    js = lyapunov_estimate(F["z2"], 100, seed=0).to_json()
    assert set(js) == {"value", "stderr", "samples", "burn_in", "seed"}


# -- chi sequence -----------------------------------------------------------------------------

def test_chi_sequence_examples():
    rows = chi_sequence(F["z2"], 4).rows
    assert all(r.max_chi == pytest.approx(LOG2) and r.mean_repelling_chi == pytest.approx(LOG2) for r in rows)
    rows = chi_sequence(F["z2-2"], 5).rows
    # the fixed point 2 has multiplier 4; every other repelling cycle has chi = log 2
    assert rows[0].max_chi == pytest.approx(math.log(4))
    assert all(r.mean_repelling_chi == pytest.approx(LOG2, abs=1e-9) for r in rows[1:])
    lyap = lyapunov_estimate(F["z2+1"], 20000, seed=1)
    seq = chi_sequence(F["z2+1"], 6, lyap)
    assert abs(seq.rows[-1].mean_repelling_chi - lyap.value) < 0.1
    assert len(seq.to_json()["mean_minus_lyapunov"]) == 6


# -- fixed points and equidistribution ----------------------------------------------------------

@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fix_count_matches_exact_degree(name):
    f = F[name]
    for n in range(1, 5 if f.degree == 2 else 3):
        fp = fixed_points_numeric(f, n)
        assert fp.count() == fixed_point_form(f, n).degree == f.degree ** n + 1
        exact = complex_roots(fixed_point_form(f, n).affine()).roots
        assert match_multisets(list(fp.affine), exact) < 1e-6


def test_test_function_catalog():
    assert set(TEST_FUNCTIONS) == {"const", "coord1", "coord2", "coord3", "coord1sq"}
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 4001)[:-1])
    means = {k: float(np.mean(evaluate_test_function(k, z))) for k in TEST_FUNCTIONS}
    assert means["const"] == 1 and abs(means["coord1"]) < 1e-12 and abs(means["coord3"]) < 1e-12
    assert means["coord1sq"] == pytest.approx(0.5)
    with pytest.raises(InvalidInput):
        evaluate_test_function("nope", z)


def test_equidist_const_is_exact():
    res = equidist_gap(F["z2"], 4, "const", 1000, seed=1)
    assert res.gap == 0 and res.fix_count == 17


def test_equidist_z2_shrinks():
    gaps = [equidist_gap(F["z2"], n, "coord1sq", 20000, seed=1).gap for n in (2, 5, 8)]
    assert gaps[-1] < 0.02 and gaps[-1] <= gaps[0] + 0.01


def test_parabolic_infinity_rejected():
    # z + 1/z has a parabolic fixed point at infinity (multiplier 1)
    f = parse_normalize([1, 0, 1], [0, 1])
    with pytest.raises(InvalidInput, match="parabolic"):
        fixed_points_numeric(f, 1)


def test_exact_period_count_sanity():
    # numeric multipliers come one per point of exact period n
    for n in (1, 2, 3):
        assert len(multipliers_numeric(F["wandering"], n)) == exact_period_form(F["wandering"], n).degree
