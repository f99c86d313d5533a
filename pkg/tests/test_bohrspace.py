import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from symred import bohrspace as bs

from .strategies import seeds

MOD = bs.FreqModule(("b1", "b2", "b3"), (1.0, math.sqrt(2.0), math.pi))
small = st.integers(-3, 3)
freq = st.tuples(small, small, small)


def brute_leq(L, L2, bound=4):
    """Search integer combinations directly."""
    N = []
    for l in L:
        hits = [c for c in itertools.product(range(-bound, bound + 1), repeat=len(L2)) if np.array_equal(np.array(c) @ L2, l)]
        if not hits:
            return None
        N.append(hits[0])
    return np.array(N)


def test_module_validation():
    with pytest.raises(ValueError):
        bs.FreqModule(("a", "a"))
    with pytest.raises(ValueError):
        bs.FreqModule(("a",), (0.0,))
    with pytest.raises(bs.UnknownLabel):
        MOD.index("zz")
    with pytest.raises(bs.OutOfSpan):
        MOD.check((1, 0.5, 0))


def test_z_independence():
    assert bs.z_independent([(1, 0, 0), (1, 1, 0)])
    assert not bs.z_independent([(2, 0, 0), (1, 0, 0)])
    assert not bs.z_independent([(1, 2, 3), (2, 4, 6)])
    with pytest.raises(ValueError):
        bs.FreqTuple(MOD, [(1, 1, 0), (2, 2, 0)])


def test_leq_example():
    L = bs.FreqTuple(MOD, [(1, 1, 0)])
    L2 = bs.FreqTuple(MOD, [(1, 0, 0), (0, 1, 0)])
    assert np.array_equal(bs.leq_z(L, L2), [[1, 1]])
    assert bs.leq_z(bs.FreqTuple(MOD, [(1, 0, 0)]), bs.FreqTuple(MOD, [(2, 0, 0)])) is None
    assert bs.leq_z(bs.FreqTuple(MOD, [(0, 0, 1)]), L2) is None


@given(st.lists(freq, min_size=1, max_size=3), st.lists(st.tuples(small, small, small), min_size=1, max_size=2))
def test_leq_matches_brute_force(rows2, coeffs):
    assume(bs.z_independent(rows2))
    L2 = np.array(rows2)
    C = np.array([c[: len(rows2)] for c in coeffs])
    L = C @ L2
    assume(bs.z_independent(list(L)))
    got = bs.leq_z(bs.FreqTuple(MOD, L), bs.FreqTuple(MOD, L2))
    want = brute_leq(L, L2)
    assert got is not None and np.array_equal(got, want)


@given(seeds, freq, freq)
def test_character_is_multiplicative(seed, l1, l2):
    psi = bs.haar_sample(MOD, np.random.default_rng(seed))
    lhs = bs.bohr_eval(psi, np.add(l1, l2))
    assert abs(lhs - bs.bohr_eval(psi, l1) * bs.bohr_eval(psi, l2)) < 1e-12


@given(st.floats(-50, 50), st.floats(-50, 50), freq)
def test_embedding(x, y, l):
    px = bs.embed(x, MOD)
    assert abs(bs.bohr_eval(px, l) - cmath.exp(1j * MOD.freq_value(l) * x)) < 1e-11
    assert bs.bohr_add(px, bs.embed(y, MOD)).close(bs.embed(x + y, MOD), 1e-12)
    assert bs.bohr_add(px, bs.bohr_inv(px)).close(bs.bohr_zero(MOD))


def test_embedding_needs_values():
    with pytest.raises(bs.NoValues):
        bs.embed(1.0, bs.FreqModule(("b",)))


@given(seeds)
def test_transition_identity(seed):
    rng = np.random.default_rng(seed)
    L2 = bs.FreqTuple(MOD, [(1, 0, 0), (1, 1, 0), (0, 0, 1)])
    N = np.array([[2, -1, 0], [0, 1, 3]])
    L = bs.FreqTuple(MOD, N @ L2.rows)
    psi = bs.haar_sample(MOD, rng)
    assert np.allclose(bs.transition(N, bs.project(psi, L2)), bs.project(psi, L), atol=1e-13)


def test_modify_and_refine():
    psi = bs.embed(0.7, MOD)
    psi2 = bs.modify(psi, {"b2": 1j})
    assert psi2["b2"] == 1j and psi2["b1"] == psi["b1"]
    root = cmath.exp(1j * 0.7 / 3)
    mod3, psi3 = bs.refine(psi, "b1", 3, root)
    assert mod3.labels[0] == "b1/3" and mod3.values[0] == pytest.approx(1 / 3)
    l = (2, -1, 1)
    l3 = bs.carry_freq(MOD, mod3, l)
    assert l3 == (6, -1, 1)
    assert abs(bs.bohr_eval(psi3, l3) - bs.bohr_eval(psi, l)) < 1e-12
    with pytest.raises(bs.BadRoot):
        bs.refine(psi, "b1", 3, 1j)


def test_haar_pushforward_moments():
    rng = np.random.default_rng(5)
    L = bs.FreqTuple(MOD, [(1, 0, 0), (1, 1, 0)])
    P = bs.project_batch(bs.haar_batch(MOD, rng, 100_000), L)
    for k in ((1, 0), (0, 1), (1, -1), (2, 1)):
        z = np.prod(P ** np.array(k), axis=1)
        assert abs(z.mean()) < 3 * z.std() / math.sqrt(len(z))


def test_project_batch_matches_scalar():
    rng = np.random.default_rng(1)
    vals = bs.haar_batch(MOD, rng, 5)
    L = bs.FreqTuple(MOD, [(1, -2, 0), (0, 3, 1)])
    P = bs.project_batch(vals, L)
    for row, p in zip(vals, P):
        assert np.allclose(bs.project(bs.BohrElement(MOD, row), L), p, atol=1e-12)


def test_json():
    psi = bs.embed(1.3, MOD)
    back = bs.BohrElement.from_json(bs.FreqModule.from_json(MOD.to_json()), psi.to_json())
    assert back == psi
