import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symred import curvealg as ca
from symred import su2core as su

from .strategies import seeds, vec3

E1, E2, E3 = np.eye(3)
SYMS = [ca.HOMOGENEOUS, ca.semi_homogeneous(), ca.SPHERICAL, ca.ISOTROPIC]


def random_curve(rng):
    k = rng.integers(3)
    x = rng.standard_normal(3)
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    if k == 0:
        return ca.Linear(x, v, rng.uniform(0.2, 3.0))
    if k == 1:
        r = np.cross(v, rng.standard_normal(3))
        return ca.Circular(x, v, r, rng.uniform(0.2, 6.0))
    return ca.LieAlgGen(x, v, 0.3 * rng.standard_normal(3), rng.uniform(0.2, 2.0))


def test_curve_validation():
    with pytest.raises(ValueError):
        ca.Linear(np.zeros(3), [1.0, 1.0, 0.0], 1.0)
    with pytest.raises(ValueError):
        ca.Circular(np.zeros(3), E3, E3, 1.0)
    with pytest.raises(ValueError):
        ca.Circular(np.zeros(3), E3, E1, 2 * math.pi)
    with pytest.raises(ValueError):
        ca.LieAlgGen(np.zeros(3), np.zeros(3), E3, 4.0)  # period is pi
    with pytest.raises(ca.OutOfDomain):
        ca.evaluate(ca.Linear(np.zeros(3), E1, 1.0), 1.5)


def test_circle_points():
    c = ca.Circular([1.0, 0.0, 0.0], E3, 2 * E1, math.pi)
    assert np.allclose(ca.evaluate(c, math.pi / 2), [1.0, 2.0, 0.0])
    assert np.allclose(ca.endpoint(c), [-1.0, 0.0, 0.0])


@given(vec3, vec3, st.floats(-2, 2))
def test_flow_solves_its_ode(x, s, t):
    v = np.array([0.3, -0.2, 0.5])
    h = 1e-6
    deriv = (ca.flow(x, v, s, t + h) - ca.flow(x, v, s, t - h)) / (2 * h)
    y = ca.flow(x, v, s, t)
    assert np.allclose(deriv, v + 2 * np.cross(s, y), atol=1e-6 * (1 + np.linalg.norm(y)))


@given(seeds, st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_group_exp_is_one_parameter(seed, t1, t2):
    rng = np.random.default_rng(seed)
    v, s = rng.standard_normal(3), rng.standard_normal(3)
    x = rng.standard_normal(3)
    g = ca.group_exp(v, s, t1) @ ca.group_exp(v, s, t2)
    assert np.allclose(g.act(x), ca.group_exp(v, s, t1 + t2).act(x), atol=1e-10)


@given(seeds)
def test_invert_and_split(seed):
    rng = np.random.default_rng(seed)
    c = random_curve(rng)
    a, b = c.domain
    ts = np.linspace(a, b, 9)
    inv = ca.invert(c)
    assert np.allclose(ca.evaluate(inv, ts), ca.evaluate(c, ts[::-1]), atol=1e-10)
    t = rng.uniform(a + 0.01 * (b - a), b - 0.01 * (b - a))
    c1, c2 = ca.split(c, t)
    assert np.allclose(ca.endpoint(c1), ca.evaluate(c2, c2.domain[0]), atol=1e-10)
    assert ca.equivalent(ca.invert(inv), c)


@given(seeds)
def test_transform_is_pointwise(seed):
    rng = np.random.default_rng(seed)
    c = random_curve(rng)
    g = ca.ISOTROPIC.sample(rng)
    gc = ca.transform(g, c)
    ts = np.linspace(*c.domain, 7)
    assert np.allclose(ca.evaluate(gc, ts), np.array([g.act(p) for p in ca.evaluate(c, ts)]), atol=1e-9)


@given(seeds)
def test_equivalent_agrees_with_sampling(seed):
    rng = np.random.default_rng(seed)
    c = random_curve(rng)
    a, b = c.domain
    m = 0.5 * (a + b)
    same = ca.restrict(c, a, b)
    other = ca.restrict(c, a, m)
    assert ca.equivalent(c, same) and ca.equivalent_sampled(c, same)
    assert not ca.equivalent(c, other) and not ca.equivalent_sampled(c, other)


def test_lie_generated_line_and_circle_coincide_with_curves():
    line = ca.LieAlgGen(E1, E2, np.zeros(3), 2.0)
    assert ca.equivalent(line, ca.Linear(E1, E2, 2.0))
    # s = e3 / 2 rotates at unit angular speed about the e3 axis
    circ = ca.LieAlgGen(E1, np.zeros(3), 0.5 * E3, 1.0)
    assert ca.equivalent(circ, ca.Circular(np.zeros(3), E3, E1, 1.0))


CLASS_TABLE = [
    (ca.HOMOGENEOUS, ca.Linear(E1, E2, 1.0), ca.CurveClass.LAG),
    (ca.HOMOGENEOUS, ca.Circular(np.zeros(3), E3, E1, 1.0), ca.CurveClass.FreeNonSym),
    (ca.semi_homogeneous(), ca.Linear(E3, E1, 1.0), ca.CurveClass.LAG),
    (ca.semi_homogeneous(), ca.Linear(np.zeros(3), E3, 1.0), ca.CurveClass.FreeNonSym),
    (ca.SPHERICAL, ca.Circular([0, 0, 1.0], E3, E1, 1.0), ca.CurveClass.LAG),
    (ca.SPHERICAL, ca.Circular([1.0, 0, 0], E3, E1, 1.0), ca.CurveClass.FreeNonSym),
    (ca.SPHERICAL, ca.Linear(E1, E1, 1.0), ca.CurveClass.FreeSym),
    (ca.SPHERICAL, ca.Linear(E2, E1, 1.0), ca.CurveClass.FreeNonSym),
    (ca.ISOTROPIC, ca.Circular(E1, E2, E3, 1.0), ca.CurveClass.LAG),
    (ca.SPHERICAL, ca.LieAlgGen(E2, E1, 0.2 * E1, 1.0), ca.CurveClass.Unsupported),
]


@pytest.mark.parametrize("sym,curve,want", CLASS_TABLE)
def test_classify_table(sym, curve, want):
    assert ca.classify(sym, curve) == want


@given(seeds)
def test_classification_is_invariant(seed):
    rng = np.random.default_rng(seed)
    c = random_curve(rng)
    for sym in SYMS:
        g = sym.sample(rng)
        assert ca.classify(sym, ca.transform(g, c)) == ca.classify(sym, c)


@given(seeds)
def test_congruences_map_onto_target(seed):
    rng = np.random.default_rng(seed)
    c = ca.Circular(rng.standard_normal(3), E3, E1, 1.2)
    for sym in SYMS:
        g = sym.sample(rng)
        c2 = ca.transform(g, c)
        found = ca.congruences(sym, c, c2)
        assert found
        for h in found:
            assert sym.contains(h)
            assert ca.equivalent_sampled(ca.transform(h, c), c2, tol=1e-8)


def test_free_segments():
    assert not ca.is_free_segment(ca.HOMOGENEOUS, ca.Linear(np.zeros(3), E1, 1.0))
    assert ca.is_free_segment(ca.HOMOGENEOUS, ca.Circular(np.zeros(3), E3, E1, 1.0))
    # a ray segment off the foot point is free under rotations about the origin
    assert ca.is_free_segment(ca.SPHERICAL, ca.Linear(E2 + 0.2 * E1, E1, 1.0))
    assert not ca.is_free_segment(ca.SPHERICAL, ca.Linear(E2 - 0.5 * E1, E1, 1.0))


def test_translate_overlap():
    c1 = ca.Linear(np.zeros(3), E1, 1.0)
    g = ca.translate_overlap(ca.HOMOGENEOUS, c1, ca.Linear([5.0, 1.0, 0.0], E1, 1.0))
    assert g is not None and ca.HOMOGENEOUS.contains(g)
    assert ca.translate_overlap(ca.HOMOGENEOUS, c1, ca.Linear([5.0, 1.0, 0.0], E2, 1.0)) is None


@pytest.mark.parametrize("length,breaks", [(3.0, [0.0, 1.0, 2.0, 3.0]), (2.5, [0.0, 1.0, 2.0, 2.5])])
def test_tiling_of_collinear_lines(length, breaks):
    gamma = ca.Linear(np.zeros(3), E1, length)
    delta = ca.Linear([7.0, 1.0, 0.0], E1, 1.0)
    dec = ca.free_decompose(ca.HOMOGENEOUS, gamma, delta)
    assert np.allclose(dec.breakpoints, breaks)
    for seg in dec.segments:
        piece = ca.restrict(gamma, seg.k0, seg.k1)
        image = ca.transform(seg.g, ca.sub_curve(delta, seg.a, seg.b))
        assert ca.equivalent_sampled(piece, image, tol=1e-9)


def test_decompose_free_circle():
    delta = ca.Circular(np.zeros(3), E3, E1, 1.0)
    # gamma runs over angles [-0.5, 1.5] of a translated carrier
    gamma = ca.Circular([3.0, 0.0, 0.0], E3, [math.cos(-0.5), math.sin(-0.5), 0.0], 2.0)
    dec = ca.free_decompose(ca.HOMOGENEOUS, gamma, delta)
    covered = [s for s in dec.segments if s.g is not None]
    assert len(covered) == 1
    seg = covered[0]
    assert np.allclose([seg.k0, seg.k1], [0.5, 1.5])
    piece = ca.restrict(gamma, seg.k0, seg.k1)
    assert ca.equivalent_sampled(piece, ca.transform(seg.g, ca.sub_curve(delta, seg.a, seg.b)), tol=1e-9)


@given(seeds)
def test_json_round_trip(seed):
    c = random_curve(np.random.default_rng(seed))
    back = ca.curve_from_json(ca.curve_to_json(c))
    assert ca.equivalent(c, back) and type(back) is type(c)
    for sym in SYMS:
        assert ca.Symmetry.from_json(sym.to_json()).to_json() == sym.to_json()


def test_symmetry_membership():
    sh = ca.semi_homogeneous()
    assert sh.contains(ca.EuclElement(np.array([1.0, 2.0, 0.0]), su.ONE))
    assert not sh.contains(ca.EuclElement(E3, su.ONE))
    assert not ca.HOMOGENEOUS.contains(ca.EuclElement(np.zeros(3), su.exp2([0, 0, 0.3])))
    assert ca.SPHERICAL.contains(ca.EuclElement(np.zeros(3), su.exp2([0, 0, 0.3])))
    with pytest.raises(ValueError):
        ca.semi_homogeneous(E1, [1.0, 1.0, 0.0])
