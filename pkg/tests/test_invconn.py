import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from symred import curvealg as ca
from symred import invconn as ic
from symred import su2core as su

from .strategies import seeds, vec3

coef = st.lists(st.floats(-1, 1), min_size=1, max_size=5).map(np.array)


def mu(v):
    return su.AlgElement2(v).matrix()


def comm(a, b):
    return a @ b - b @ a


def tangent(rng):
    x = rng.uniform(-1, 1, 3)
    return (x, su.haar2(rng)), (rng.standard_normal(3), rng.standard_normal(3))


@given(coef, coef, coef, vec3, vec3)
def test_spherical_matches_commutator_form(f, g, h, x, v):
    om = ic.Spherical(f, g, h)
    a, b, c = om.profile(x)
    want = a * mu(v) + b * comm(mu(x), mu(v)) + c * comm(mu(x), comm(mu(x), mu(v)))
    assert np.allclose(su.AlgElement2(om.matrix(x) @ v).matrix(), want, atol=1e-9 * (1 + np.abs(want).max()))


@given(seeds)
def test_families_are_invariant(seed):
    rng = np.random.default_rng(seed)
    cases = [
        (ic.Isotropic(rng.uniform(-2, 2)), ca.ISOTROPIC),
        (ic.Spherical(rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5)), ca.SPHERICAL),
        (ic.Homogeneous(rng.standard_normal((3, 3))), ca.HOMOGENEOUS),
        (ic.SemiHomogeneous([1, 0, 0], [0, 1, 0], rng.standard_normal((2, 3, 2)), rng.standard_normal((3, 3))), ca.semi_homogeneous()),
    ]
    for om, sym in cases:
        g = sym.sample(rng)
        assert ic.pullback_residual(om, sym, g, *tangent(rng)) < 1e-10
        assert ic.is_invariant_under(om, sym)


def test_homogeneous_is_not_rotation_invariant():
    om = ic.Homogeneous(np.diag([1.0, 2.0, 3.0]))
    assert not ic.is_invariant_under(om, ca.SPHERICAL)
    assert ic.invariance_group(om) == "Homogeneous"


@given(seeds)
def test_gauge_field_agrees_with_family(seed):
    rng = np.random.default_rng(seed)
    sph = ic.Spherical(rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 1))
    semi = ic.SemiHomogeneous([0, 1, 0], [0, 0, 1], rng.standard_normal((3, 3, 2)), rng.standard_normal((2, 3)))
    for om in (sph, semi, ic.Isotropic(0.4)):
        field = ic.to_gauge_field(om)
        x = rng.standard_normal((5, 3))
        assert np.allclose(field.matrix(x), om.matrix(x), atol=1e-10)


def test_gauge_field_degree_bound():
    with pytest.raises(ic.NonPolynomial):
        ic.to_gauge_field(ic.Spherical([0.0, 0.0, 0.0, 1.0]))  # |x|^6
    assert ic.to_gauge_field(ic.Spherical([0.0, 0.0, 1.0])).degree == 4
    with pytest.raises(ic.NonPolynomial):
        ic.GaugeField({(5, 0, 0): np.eye(3)})


def test_wang_reduction_isotropic():
    for c in (-2.0, 0.0, 1.5):
        psi = ic.wang_reduce(ic.Isotropic(c), ca.ISOTROPIC)
        assert np.array_equal(psi, np.hstack([c * np.eye(3), np.eye(3)]))
        assert ic.wang_check(psi, ca.ISOTROPIC).passed
    bad = np.hstack([np.diag([1.0, 2.0, 3.0]), np.eye(3)])
    rep = ic.wang_check(bad, ca.ISOTROPIC)
    assert rep.cond_a == 0.0 and rep.cond_b > 0.1
    with pytest.raises(ic.NotTransitive):
        ic.wang_reduce(ic.Spherical([1.0]), ca.SPHERICAL)


def test_equivariance_nullspace_exact():
    C = ic.equiv_constraints()
    assert C.shape == (27, 9)
    exact = sympy.Matrix(C.astype(int).tolist()).nullspace()
    assert len(exact) == 1
    # the exact kernel vector is the identity matrix, column-major
    v = np.array(exact[0], dtype=float).ravel()
    assert np.allclose(v / v[0], np.eye(3).ravel(order="F"))
    ns = ic.equiv_nullspace()
    assert ns.dim == 1
    M = ns.basis[0]
    assert np.allclose(M / M[0, 0], np.eye(3))
    assert ns.singular_values[1] == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_trivial_bundle_polynomial_passes():
    rep = ic.trivbundle_check(ic.Spherical([0.3, 0.2], [0.1], [0.4]))
    assert rep.passed


def test_trivial_bundle_singular_profile_fails():
    # a = |x| / (|x| + 1e-15) is 1 away from the origin and 0 at it: discontinuous
    prof = ic.SphericalProfile(lambda x: float(np.linalg.norm(x) / (np.linalg.norm(x) + 1e-15)))
    rep = ic.trivbundle_check(prof)
    assert rep.kernel < 1e-9 and rep.covariance < 1e-9
    assert rep.origin > 0.5 and not rep.passed


@given(seeds)
def test_json_round_trip(seed):
    rng = np.random.default_rng(seed)
    for om in (
        ic.Isotropic(rng.uniform()),
        ic.Spherical(rng.uniform(size=3)),
        ic.Homogeneous(rng.standard_normal((3, 3))),
        ic.SemiHomogeneous([1, 0, 0], [0, 1, 0], rng.standard_normal((1, 3, 2)), rng.standard_normal((2, 3))),
    ):
        back = ic.conn_from_json(ic.conn_to_json(om))
        x = rng.standard_normal(3)
        assert np.array_equal(back.matrix(x), om.matrix(x))


def test_fundamental_vector():
    base, body = ic.fundamental((np.zeros(3), np.array([0.0, 0.0, 1.0])), (np.array([1.0, 0.0, 0.0]), su.ONE))
    assert np.allclose(base, [0.0, 2.0, 0.0])
    assert np.allclose(body, [0.0, 0.0, 1.0])
