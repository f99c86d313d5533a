import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symred import cli
from symred import curvealg as ca
from symred import invconn as ic
from symred import redhom as rh
from symred import su2core as su

from .strategies import seeds

E1, E2, E3 = np.eye(3)
ORIGIN = np.zeros(3)
TAGS = ["Homogeneous", "SemiHomogeneous", "SphericallySymmetric", "HomogeneousIsotropic"]


@pytest.fixture(scope="module")
def families():
    return {tag: cli._family(tag) for tag in TAGS}


@pytest.mark.parametrize("tag", TAGS)
def test_family_closure(families, tag):
    _, h = families[tag]
    fam = h.family
    assert len(fam) >= 40
    assert all(fam.inverse[fam.inverse[i]] == i for i in range(len(fam)))
    for w, f, s in fam.splits:
        assert np.allclose(ca.evaluate(fam.curves[f], fam.curves[f].domain[0]), ca.evaluate(fam.curves[w], fam.curves[w].domain[0]))
        assert np.allclose(ca.endpoint(fam.curves[s]), ca.endpoint(fam.curves[w]))


@pytest.mark.parametrize("tag", TAGS)
def test_connection_holonomies_satisfy_invariants(families, tag):
    _, h = families[tag]
    rep = rh.check_invariants(h)
    assert rep.pairs > len(h.family)
    assert rep.worst < 1e-10


def test_overwriting_one_value_is_detected(families):
    _, h = families["HomogeneousIsotropic"]
    bad = rh.set_value(h, 0, su.exp2([0.1, 0.2, 0.3]) @ h.table[0])
    assert bad.touched == {0}
    assert rh.check_invariants(bad).worst > 1e-3


def test_modify_lag_line_value():
    fam = rh.CurveFamily.build([ca.Linear(ORIGIN, E1, 2.0), ca.Linear(E2, E1, 1.0)])
    h = rh.trivial(ca.ISOTROPIC, fam)
    w = 0.3 * E1
    h2 = rh.modify_lag(h, ORIGIN, (E1, ORIGIN), w)
    assert su.distance(h2(ca.Linear(ORIGIN, E1, 2.0)), su.exp2(2.0 * w)) < 1e-14
    assert su.distance(h2(ca.Linear(E2, E1, 1.0)), su.exp2(w)) < 1e-14
    assert su.distance(h2(ca.Linear(E1, -E1, 1.0)), su.exp2(-w)) < 1e-14
    # a rotated line gets the conjugated value
    sigma = su.exp2([0.0, 0.0, math.pi / 4])
    assert su.distance(h2(ca.Linear(ORIGIN, E2, 1.0)), su.conj(sigma, su.exp2(w))) < 1e-14
    assert rh.check_invariants(h2).worst < 1e-12


def test_modify_lag_rejects_bad_w():
    h = rh.trivial(ca.ISOTROPIC, rh.CurveFamily.build([ca.Linear(ORIGIN, E1, 1.0)]))
    with pytest.raises(rh.EquivarianceViolation):
        rh.modify_lag(h, ORIGIN, (E1, ORIGIN), E2)
    with pytest.raises(rh.UnverifiedStability):
        rh.modify_lag(h, ORIGIN, (ORIGIN, E3), E3)
    hs = rh.trivial(ca.semi_homogeneous(), rh.CurveFamily.build([ca.Linear(ORIGIN, E1, 1.0)]))
    with pytest.raises(rh.UnverifiedStability):
        rh.modify_lag(hs, ORIGIN, (E3, ORIGIN), E3)


def test_modify_free_collinear_lines():
    fam = rh.CurveFamily.build([ca.Linear(ORIGIN, E1, 3.0)])
    h = rh.trivial(ca.HOMOGENEOUS, fam)
    h2 = rh.modify_free(h, ca.Linear([5.0, 2.0, 0.0], E1, 1.0), 0.0, E3)
    assert su.distance(h2(ca.Linear(ORIGIN, E1, 3.0)), su.exp2(3.0 * E3)) < 1e-14
    assert su.distance(h2(ca.Linear(ORIGIN, E1, 2.5)), su.exp2(2.5 * E3)) < 1e-14


def test_modify_free_circle_arc():
    delta = ca.Circular(ORIGIN, E3, E1, 1.0)
    fam = rh.CurveFamily.build([ca.Circular([2.0, 0.0, 0.0], E3, E1, 2.0)], {0: [0.5, 1.0]})
    h = rh.trivial(ca.HOMOGENEOUS, fam)
    w = np.array([0.2, -0.1, 0.4])
    h2 = rh.modify_free(h, delta, 0.0, w)
    # the translated copy of delta takes Psi(1), the rest of the arc is untouched
    assert su.distance(h2(ca.Circular([2.0, 0.0, 0.0], E3, E1, 1.0)), su.exp2(w)) < 1e-14
    assert su.distance(h2(ca.Circular([2.0, 0.0, 0.0], E3, E1, 2.0)), su.exp2(w)) < 1e-14
    assert rh.check_invariants(h2).worst < 1e-12


def test_modify_free_stabilizer():
    fam = rh.CurveFamily.build([ca.Linear(ORIGIN, E1, 2.0)], {0: [0.5]})
    h = rh.trivial(ca.SPHERICAL, fam)
    with pytest.raises(rh.StabilizerViolation):
        rh.modify_free(h, ca.Linear(0.1 * E1, E1, 1.0), 0.0, E2)
    h2 = rh.modify_free(h, ca.Linear(0.1 * E1, E1, 1.0), 0.0, 0.7 * E1)
    assert rh.check_invariants(h2).worst < 1e-12


@given(seeds)
def test_random_modifications_keep_invariants(seed):
    rng = np.random.default_rng(seed)
    tag = TAGS[seed % 4]
    _, h = cli._family(tag)
    h2, identical = cli._apply_random(h, rng, 1, 1)
    assert identical
    assert rh.check_invariants(h2).worst < 1e-10


def test_untouched_entries_are_same_objects(families):
    _, h = families["HomogeneousIsotropic"]
    h2 = rh.modify_lag(h, ORIGIN, (E1, ORIGIN), 0.2 * E1)
    assert h2.touched
    for i in range(len(h.table)):
        if i not in h2.touched:
            assert h2.table[i] is h.table[i]


@pytest.mark.parametrize("sym,x,gen,want", cli.type_table_cases())
def test_type_tables(sym, x, gen, want):
    assert rh.classify_type(sym, x, gen) == want


def test_type_unverified():
    with pytest.raises(rh.UnverifiedStability):
        rh.classify_type(ca.SPHERICAL, E3, (ORIGIN, E3))
    with pytest.raises(rh.UnverifiedStability):
        rh.classify_type(ca.ISOTROPIC, ORIGIN, (E1, E1))
    with pytest.raises(rh.UnverifiedStability):
        rh.classify_type(ca.HOMOGENEOUS, ORIGIN, (ORIGIN, ORIGIN))


def test_type_allows():
    assert rh.TypeTag("T2", E1).allows(2 * E1) and not rh.TypeTag("T2", E1).allows(E2)
    assert rh.TypeTag("T3", E3).allows(E1 + E2) and not rh.TypeTag("T3", E3).allows(E3)
    assert rh.TypeTag("T1").allows(ORIGIN) and not rh.TypeTag("T1").allows(E1)
    assert rh.TypeTag("T4").allows(E1 + E3)


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(0, math.pi))
def test_xgp_quotient(a, b, th):
    psi = complex(math.cos(a), math.sin(a))
    v3 = complex(math.cos(b), math.sin(b))
    assert rh.canonical_xgp("T3", (psi, v3)) == rh.canonical_xgp("T3", (psi.conjugate(), -v3))
    v4 = np.array([math.sin(th) * math.cos(b), math.sin(th) * math.sin(b), math.cos(th)])
    assert rh.canonical_xgp("T4", (psi, v4)) == rh.canonical_xgp("T4", (psi.conjugate(), -v4))


def test_xgp_distinguishes_t3_phase():
    psi = complex(math.cos(0.4), math.sin(0.4))
    assert rh.canonical_xgp("T3", (psi, 1j)) != rh.canonical_xgp("T3", (psi, 1.0 + 0j))


def test_xgp_zero_class():
    p = rh.canonical_xgp("T4", (1.0 + 0j, E1))
    q = rh.canonical_xgp("T4", (1.0 + 0j, E2))
    assert p == q and p.zero


def test_dump_load(families):
    _, h = families["SemiHomogeneous"]
    back = rh.load(rh.dump(h))
    assert all(su.distance(a, b) == 0.0 for a, b in zip(h.table, back.table))
    assert rh.check_invariants(back).worst < 1e-10


def test_torus_constraint_and_bridge():
    lengths = [0.5, 1.0, 2.5]
    fam = rh.CurveFamily.build([ca.Linear(ORIGIN, E2, l) for l in lengths])
    h = rh.from_connection(ic.Isotropic(1.3), ca.ISOTROPIC, fam)
    assert all(rh.torus_constraint(h, ca.Linear(ORIGIN, E2, l)) for l in lengths)
    z = rh.lines_to_bohr(h, E2, lengths)
    assert np.allclose(z, np.exp(1j * 1.3 * np.array(lengths)), atol=1e-15)
