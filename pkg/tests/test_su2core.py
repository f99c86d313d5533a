import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from symred import su2core as su

from .strategies import seeds, unit3, vec3


def mu(v):
    return su.AlgElement2(v).matrix()


def test_tau_relations():
    eye = np.eye(2)
    for i in range(3):
        for j in range(3):
            prod = su.TAU[i] @ su.TAU[j]
            want = -eye * (i == j)
            for k in range(3):
                want = want + np.sign(np.linalg.det(np.eye(3)[[i, j, k]])) * su.TAU[k] * (len({i, j, k}) == 3)
            assert np.allclose(prod, want)


def test_exp2_frozen_value():
    # exp(pi/4 tau3) = diag(exp(-i pi/4), exp(i pi/4))
    u = su.exp2([0.0, 0.0, math.pi / 4]).matrix()
    assert np.allclose(u, np.diag([np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)]), atol=1e-15)


@given(vec3)
def test_exp2_matches_expm(v):
    assert np.allclose(su.exp2(v).matrix(), scipy.linalg.expm(mu(v)), atol=1e-12)


@given(seeds)
def test_mul_matches_matrices(seed):
    rng = np.random.default_rng(seed)
    x, y = su.haar2(rng), su.haar2(rng)
    assert np.allclose((x @ y).matrix(), x.matrix() @ y.matrix(), atol=1e-14)
    assert np.allclose(su.inv(x).matrix(), x.matrix().conj().T, atol=1e-15)
    assert su.distance(su.from_matrix(x.matrix()), x) < 1e-15


def test_prod_is_left_to_right():
    x, y, z = su.exp2([0.3, 0, 0]), su.exp2([0, 0.5, 0]), su.exp2([0, 0, 0.7])
    assert np.allclose(su.prod(x, y, z).matrix(), x.matrix() @ y.matrix() @ z.matrix())
    assert su.prod() == su.ONE or su.distance(su.prod(), su.ONE) == 0.0


@given(vec3.filter(lambda v: np.linalg.norm(v) < math.pi - 1e-6))
def test_log_inverts_exp_on_principal_ball(v):
    assert np.allclose(su.log2(su.exp2(v)).v, v, atol=1e-9)


def test_log_rejects_minus_one():
    with pytest.raises(su.AntipodalBranch):
        su.log2(-su.ONE)


@given(seeds, vec3)
def test_adjoint_is_covering(seed, v):
    x = su.haar2(np.random.default_rng(seed))
    want = x.matrix() @ mu(v) @ x.matrix().conj().T
    assert np.allclose(su.adjoint(x, v).matrix(), want, atol=1e-12)


@given(seeds)
def test_covering_kernel_and_lift(seed):
    x = su.haar2(np.random.default_rng(seed))
    R = su.rotation_matrix(x)
    assert np.allclose(R, su.rotation_matrix(-x))
    assert abs(np.linalg.det(R) - 1.0) < 1e-12
    y = su.lift(R)
    assert min(su.distance(x, y), su.distance(x, -y)) < 1e-12


def test_covering_angle_is_double():
    # exp2(t n) rotates by 2t about n
    R = su.rotation_matrix(su.exp2([0.0, 0.0, math.pi / 4]))
    assert np.allclose(R @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)


def test_bracket():
    a, b = su.AlgElement2([1, 2, 3]), su.AlgElement2([-1, 0, 2])
    comm = a.matrix() @ b.matrix() - b.matrix() @ a.matrix()
    assert np.allclose(su.bracket(a, b).matrix(), comm)


@given(unit3, st.floats(-3, 3), st.floats(-3, 3))
def test_torus_flip_inverts(n, t, phi):
    m = np.cross(n, [0.3, -0.2, 0.9])
    if np.linalg.norm(m) < 1e-3:
        m = np.cross(n, [1.0, 0.0, 0.0])
    s = su.exp2(t * n)
    h = su.torus_flip(n, m)
    assert su.distance(su.conj(h, s), su.inv(s)) < 1e-12
    s2 = su.exp2(phi * n)
    if not (su.is_central(s) and su.is_central(s2)):
        a = su.torus_axis(s, s2)
        assert min(np.linalg.norm(a - n), np.linalg.norm(a + n)) < 1e-10


def test_torus_errors():
    with pytest.raises(su.CentralPair):
        su.torus_axis(su.ONE, -su.ONE)
    with pytest.raises(su.NotCommuting):
        su.torus_axis(su.exp2([0.5, 0, 0]), su.exp2([0, 0.5, 0]))
    with pytest.raises(su.NotOrthogonal):
        su.torus_flip([0, 0, 1], [0, 1, 1])


def test_haar_moments():
    q = su.haar2_batch(np.random.default_rng(0), 200_000)
    # E[tr U] = 0, E[|tr U|^2] = 1 for the defining representation
    tr = 2.0 * q[:, 0]
    assert abs(tr.mean()) < 3 * tr.std() / math.sqrt(len(tr))
    assert abs((tr**2).mean() - 1.0) < 0.01


def test_group_element_validation():
    with pytest.raises(ValueError):
        su.GroupElement2(2.0, (0, 0, 0))
    x = su.GroupElement2(1.0 + 1e-9, (0, 0, 0))
    assert x.a == 1.0


def test_fiber_delta():
    s, s2 = su.exp2([0.1, 0.2, 0.3]), su.exp2([-0.4, 0.1, 0.0])
    assert su.distance(s @ su.fiber_delta(s, s2), s2) < 1e-15
