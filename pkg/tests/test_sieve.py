from __future__ import annotations

import pytest

from spectra_lab import INFINITY, parse_normalize
from spectra_lab.errors import BadReduction, BudgetExceeded, InvalidInput, NoNonPreperiodicCritical
from spectra_lab.exact_poly import FpkElem
from spectra_lab.rational_map import good_reduction, homogeneous_resultant
from spectra_lab.rog import norm_vector, phi_p
from spectra_lab.dynatomic import galois_classes
from spectra_lab.sieve import (
    PrimeHit,
    attach_class,
    critical_points_mod_p,
    merge_reports,
    orbit_mod_p,
    reduce_map,
    sieve,
)

from conftest import FIXTURES

F = FIXTURES
ZINV = parse_normalize([1, 0, 1], [0, 1])  # z + 1/z


def _pt(p, v):
    return FpkElem.from_int(p, 1, v)


def test_reduce_map_examples():
    r = reduce_map(F["z2+1"], 5)
    assert r.num == (1, 0, 1) and r.den == (1, 0, 0)
    assert reduce_map(F["z2-2"], 7).num == (5, 0, 1)
    with pytest.raises(BadReduction, match="denominator vanishes"):
        reduce_map(F["lattes"], 2)


def test_critical_points_mod_p_examples():
    pts = critical_points_mod_p(F["z2+1"], 7)
    assert [(c.crit_id, c.key()) for c in pts] == [(0, ()), (1, ("inf",))]  # zero trims to ()
    pts = critical_points_mod_p(ZINV, 5)
    assert sorted(c.key() for c in pts) == [(1,), (4,)]


def test_quadratic_critical_point_needs_k2():
    # critical points +-sqrt 2 of the wandering map; 2 is a non-residue mod 3
    f = F["wandering"]
    marked = [c for c in critical_points_mod_p(f, 5, kmax=1) if c.crit_id == 0]
    assert marked == []
    marked = [c for c in critical_points_mod_p(f, 5, kmax=2) if c.crit_id == 0]
    assert len(marked) == 2 and all(c.k == 2 for c in marked)


def test_orbit_mod_p_examples():
    fbar5 = reduce_map(F["z2+1"], 5)
    assert orbit_mod_p(_pt(5, 0), fbar5) == (0, 3)
    fbar3 = reduce_map(F["z2+1"], 3)
    assert orbit_mod_p(_pt(3, 0), fbar3) == (2, 1)
    assert orbit_mod_p(INFINITY, fbar5) == (0, 1)
    # a fixed point of z^2 - 2 mod 7: z = 2 (4 - 2 = 2)
    assert orbit_mod_p(_pt(7, 2), reduce_map(F["z2-2"], 7)) == (0, 1)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101])
def test_orbit_bound_and_extension_orbits(p):
    fbar = reduce_map(F["wandering"], p) if good_reduction(F["wandering"], p) else None
    if fbar is None:
        return
    for cp in critical_points_mod_p(F["wandering"], p, kmax=2):
        tail, cyc = orbit_mod_p(cp.point, fbar)
        assert cyc >= 1 and tail + cyc <= p ** cp.k + 1


def test_sieve_z2p1_golden(frozen):
    rep = sieve(F["z2+1"], 2, 100)
    assert [[h.p, h.cycle_len] for h in rep.hits] == frozen["sieve_hits_z2p1_100"]
    assert all(h.tail == 0 and h.crit_id == 0 for h in rep.hits)
    assert [h.p for h in rep.hits] == sorted(h.p for h in rep.hits)
    assert rep.primes_scanned == 25 and not rep.bad_primes


def test_sieve_refuses_pcf_maps():
    with pytest.raises(NoNonPreperiodicCritical, match="no non-preperiodic critical point"):
        sieve(F["z2"], 2, 50)
    with pytest.raises(NoNonPreperiodicCritical):
        sieve(F["z2-2"], 2, 50)
    with pytest.raises(InvalidInput):
        sieve(F["z2+1"], 50, 10)


def test_sieve_quadratic_hits():
    rep = sieve(F["wandering"], 2, 60, kmax=2)
    assert rep.hits and any(h.k == 2 for h in rep.hits)
    assert all(good_reduction(F["wandering"], h.p) for h in rep.hits)
    assert set(rep.bad_primes) <= {p for p in range(2, 61) if homogeneous_resultant(F["wandering"]) % p == 0}


@pytest.mark.parametrize("name", ["z2+1", "wandering"])
def test_sieve_merge_determinism(name):
    f = F[name]
    whole = sieve(f, 2, 150)
    left, right = sieve(f, 2, 70), sieve(f, 71, 150)
    assert merge_reports(left, right).to_json() == whole.to_json()
    assert sieve(f, 2, 150, jobs=3).to_json() == whole.to_json()


def test_merge_rejects_mismatched_settings():
    with pytest.raises(InvalidInput):
        merge_reports(sieve(F["z2+1"], 2, 10, kmax=1), sieve(F["z2+1"], 11, 20, kmax=2))


def test_attach_class_examples():
    f = F["z2+1"]
    rep = sieve(f, 2, 100)
    hit5 = [h for h in rep.hits if h.p == 5][0]
    cv = attach_class(f, hit5)
    assert cv.cls.period == 3 and phi_p(cv.vector, 5) > 0
    with pytest.raises(BudgetExceeded):
        attach_class(f, hit5, period_budget=2)


def test_attach_class_fixed_point_hit():
    # z^2 - 6: 3 is a rational fixed point with multiplier 6, so p = 3 gives a cycle-1 hit
    f = parse_normalize([-6, 0, 1], [1])
    hit = PrimeHit(3, 0, 1, 0, 1, (0,))
    cv = attach_class(f, hit)
    assert cv.cls.minpoly.degree() == 1 and phi_p(cv.vector, 3) > 0


@pytest.mark.parametrize("name", ["z2+1", "wandering"])
def test_every_hit_attaches(name):
    f = F[name]
    for hit in sieve(f, 2, 100).hits:
        if hit.cycle_len <= 6:
            assert phi_p(attach_class(f, hit).vector, hit.p) > 0


@pytest.mark.parametrize("name", ["z2+1", "z2-1", "wandering"])
def test_good_reduction_valuations_nonnegative(name):
    f = F[name]
    R = homogeneous_resultant(f)
    for n in range(1, 5):
        for cls in galois_classes(f, n):
            if cls.is_superattracting():
                continue
            v = norm_vector(cls).vector
            assert all(e >= 0 for p, e in v.as_dict().items() if R % p != 0)


def test_hit_json():
    hit = sieve(F["z2+1"], 5, 5).hits[0]
    assert hit.to_json()["point"] == [0]
    assert PrimeHit(7, 1, 1, 0, 1, ("inf",)).to_json()["point"] == "inf"
