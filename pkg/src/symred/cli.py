"""Batch entry points and the acceptance suites.

Exit codes: 0 pass, 1 criterion failure, 2 input error, 3 unsupported input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from . import bohrspace as bs
from . import curvealg as ca
from . import invconn as ic
from . import rbarspace as rb
from . import redhom as rh
from . import redmeasure as rm
from . import su2core as su
from . import transport as tr

E1, E2, E3 = np.eye(3)
ZERO = np.zeros(3)


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20240531
    tol: float = 1e-8
    samples: int = 100_000

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.samples < 1000:
            raise InputError("samples must be at least 1000")

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed % 2**63, salt])

    def bound(self, spec_bound: float) -> float:
        return min(spec_bound, self.tol)


@dataclass
class Criterion:
    number: int
    name: str
    measured: float
    bound: float
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] criterion {self.number:2d} {self.name}: measured={self.measured:.3e} bound={self.bound:.3e}"


# ------------------------------------------------------------------ output


def dumps17(obj) -> str:
    """JSON with every float printed to 17 significant digits."""
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps17(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps17(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def f17(x) -> str:
    return format(float(x), ".17g")


# ------------------------------------------------------------------ suites


def c01_circle_ode(cfg: RunConfig) -> Criterion:
    t0 = time.perf_counter()
    worst = 0.0
    for c in (-2, -1, 0, 1, 2):
        omega = ic.Isotropic(float(c))
        field_ = ic.to_gauge_field(omega)
        for r in (0.5, 1.0, 2.0):
            for tau in (math.pi / 3, math.pi, 1.5 * math.pi):
                curve = ca.Circular(ZERO, E3, r * E1, tau)
                closed = tr.transport_closed(omega, ca.ISOTROPIC, curve).matrix()
                ode = tr.transport_ode(field_, curve, 4096).matrix()
                worst = max(worst, float(np.abs(closed - ode).max()))
    elapsed = time.perf_counter() - t0
    bound = cfg.bound(1e-8)
    return Criterion(1, "circular holonomy closed form vs RK4", worst, bound, worst <= bound and elapsed < 5.0, {"seconds": elapsed})


def c02_line_ode(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(2)
    worst = 0.0
    for _ in range(100):
        c = rng.uniform(-2, 2)
        l = rng.uniform(0.1, 3.0)
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        curve = ca.Linear(rng.standard_normal(3), v, l)
        omega = ic.Isotropic(c)
        closed = tr.line_closed(c, l, v)
        via_lag = tr.transport_closed(omega, ca.ISOTROPIC, curve)
        ode = tr.transport_ode(ic.to_gauge_field(omega), curve, 4096)
        worst = max(worst, float(np.abs(closed.matrix() - ode.matrix()).max()), su.distance(closed, via_lag))
    bound = cfg.bound(1e-10)
    return Criterion(2, "linear holonomy exp2(-c l v) vs RK4", worst, bound, worst <= bound)


def _random_tangent(rng):
    # base points in a ball of radius 1.5 keep polynomial profiles O(1e3)
    x = rng.standard_normal(3)
    x *= 1.5 * rng.uniform() ** (1 / 3) / np.linalg.norm(x)
    s = su.haar2(rng)
    return (x, s), (rng.standard_normal(3), rng.standard_normal(3))


def c03_invariance(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(3)
    worst = {"isotropic": 0.0, "spherical": 0.0, "homogeneous": 0.0}
    for _ in range(200):
        om = ic.Isotropic(rng.uniform(-2, 2))
        g = ca.ISOTROPIC.sample(rng)
        worst["isotropic"] = max(worst["isotropic"], ic.pullback_residual(om, ca.ISOTROPIC, g, *_random_tangent(rng)))
        om = ic.Spherical(*(rng.uniform(-1, 1, rng.integers(1, 6)) for _ in range(3)))
        g = ca.SPHERICAL.sample(rng)
        worst["spherical"] = max(worst["spherical"], ic.pullback_residual(om, ca.SPHERICAL, g, *_random_tangent(rng)))
        om = ic.Homogeneous(rng.standard_normal((3, 3)))
        g = ca.HOMOGENEOUS.sample(rng)
        worst["homogeneous"] = max(worst["homogeneous"], ic.pullback_residual(om, ca.HOMOGENEOUS, g, *_random_tangent(rng)))
    m = max(worst.values())
    bound = cfg.bound(1e-10)
    return Criterion(3, "invariance residuals of the three families", m, bound, m <= bound, worst)


def c04_wang(cfg: RunConfig) -> Criterion:
    worst = 0.0
    for c in (-2, -1, 0, 1, 2):
        psi = ic.wang_reduce(ic.Isotropic(float(c)), ca.ISOTROPIC)
        worst = max(worst, float(np.abs(psi - np.hstack([c * np.eye(3), np.eye(3)])).max()))
    ns = ic.equiv_nullspace()
    sv = ns.singular_values
    ok = ns.dim == 1 and sv[1] > 1e-3
    bound = cfg.bound(1e-10)
    return Criterion(4, "Wang recovery and equivariance null space", worst, bound, worst <= bound and ok, {"dim": ns.dim, "second_sv": float(sv[1])})


def c05_torus(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(5)
    flip_err = axis_err = 0.0
    for _ in range(1000):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        m = np.cross(n, rng.standard_normal(3))
        s = su.exp2(rng.uniform(-math.pi, math.pi) * n)
        h = su.torus_flip(n, m)
        flip_err = max(flip_err, su.distance(su.conj(h, s), su.inv(s)))
        s2 = su.exp2(rng.uniform(-math.pi, math.pi) * n)
        try:
            a = su.torus_axis(s, s2)
        except su.CentralPair:
            continue
        axis_err = max(axis_err, min(float(np.linalg.norm(a - n)), float(np.linalg.norm(a + n))))
    ok = flip_err <= cfg.bound(1e-12) and axis_err <= cfg.bound(1e-10)
    return Criterion(5, "torus flip and axis recovery", max(flip_err, axis_err), cfg.bound(1e-10), ok, {"flip": flip_err, "axis": axis_err})


def c06_gap(cfg: RunConfig) -> Criterion:
    gaps = {f"{tau:.4f},{r}": rb.min_gap(tau, r) for tau, r in ((math.pi, 1.0), (math.pi / 2, 2.0), (1.5 * math.pi, 0.5))}
    m = min(gaps.values())
    return Criterion(6, "f_gap has no zeros", m, 0.0, m > 0.0, gaps)


def c07_image(cfg: RunConfig) -> Criterion:
    tau, r = math.pi, 1.0
    worst = 0.0
    for n in list(range(-20, 0)) + list(range(1, 21)):
        target = su.ONE if n % 2 == 0 else -su.ONE
        worst = max(worst, su.distance(rb.pi_circ(rb.Real(rb.a_n(n, tau, r)), tau, r), target))
    merged_at = None
    for n in range(1, 10_001):
        if rb.merge_bound(n, tau, r, samples=200) <= 0.05:
            # confirm on the full sampling density
            if rb.merge_bound(n, tau, r) <= 0.05:
                merged_at = n
                break
    grid = np.concatenate([np.linspace(-50, 50, 10_000), [rb.a_n(n, tau, r) for n in range(1, 40)]])
    hit, central = rb.torus_hits(grid, tau, r, 1e-9)
    stray = float(central[hit].max(initial=0.0))
    bound = cfg.bound(1e-10)
    ok = worst <= bound and merged_at is not None and stray <= 1e-6 and hit.any()
    return Criterion(7, "circle image: a_n values, merging, torus contact", worst, bound, ok, {"merge_n": merged_at, "hits": int(hit.sum()), "stray": stray})


def _moment_z(z: np.ndarray) -> float:
    m, se = rm.mc_zero(np.column_stack([z.real, z.imag]))
    return float((np.abs(m) / se).max())


def c08_bohr(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(8)
    module = bs.FreqModule(("b1", "b2", "b3"), (1.0, math.sqrt(2.0), math.pi))
    worst = 0.0
    done = 0
    while done < 1000:
        L2 = rng.integers(-3, 4, size=(rng.integers(1, 4), 3))
        if not bs.z_independent(list(L2)):
            continue
        N = rng.integers(-2, 3, size=(rng.integers(1, len(L2) + 1), len(L2)))
        L = N @ L2
        if not bs.z_independent(list(L)):
            continue
        Lt, L2t = bs.FreqTuple(module, L), bs.FreqTuple(module, L2)
        found = bs.leq_z(Lt, L2t)
        if found is None or not np.array_equal(found, N):
            worst = math.inf
        psi = bs.haar_sample(module, rng)
        lhs = np.array(bs.transition(found if found is not None else N, bs.project(psi, L2t)))
        worst = max(worst, float(np.abs(lhs - np.array(bs.project(psi, Lt))).max()))
        done += 1
    L = bs.FreqTuple(module, [[1, 0, 0], [1, 1, 0], [0, 2, 1]])
    vals = bs.haar_batch(module, rng, cfg.samples)
    P = bs.project_batch(vals, L)
    zmax = 0.0
    for k in ([1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0], [2, 1, -1]):
        zmax = max(zmax, _moment_z(np.prod(P ** np.array(k), axis=1)))
    emb = 0.0
    for _ in range(100):
        x, y = rng.uniform(-50, 50, 2)
        emb = max(emb, float(np.abs(bs.bohr_add(bs.embed(x, module), bs.embed(y, module)).values - bs.embed(x + y, module).values).max()))
    ok = worst <= cfg.bound(1e-12) and zmax <= 3.0 and emb <= cfg.bound(1e-12)
    return Criterion(8, "Bohr transitions, Haar pushforward, embedding", max(worst, emb), cfg.bound(1e-12), ok, {"max_z": zmax})


def c09_translation(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(9)
    module = bs.FreqModule(("b1", "b2"), (1.0, math.sqrt(2.0)))
    L = bs.FreqTuple(module, [[1, 0], [0, 1]])
    m0 = rb.RBarMeasure(0.0, module)
    batch = rb.sample_batch(m0, rng, cfg.samples)
    zmax = 0.0
    for v in (0.1, 1.0, 10.0):
        moved = rb.translate_batch(v, batch, module)
        P = bs.project_batch(moved.bohr, L)
        for j in range(len(L)):
            zmax = max(zmax, _moment_z(P[:, j]))
        zmax = max(zmax, _moment_z(P[:, 0] * np.conj(P[:, 1])))
    m5 = rb.RBarMeasure(0.5, module)
    b5 = rb.sample_batch(m5, rng, cfg.samples)
    reals = b5.x[b5.is_real]
    p_still = stats.kstest(rb.TAN.inverse(reals), "uniform").pvalue
    p_moved = stats.kstest(rb.TAN.inverse(reals + 1.0), "uniform").pvalue
    ok = zmax <= 3.0 and p_moved < 0.01 and p_still >= 0.01
    return Criterion(9, "translation invariance selects t = 0", p_moved, 0.01, ok, {"t0_max_z": zmax, "p_unshifted": float(p_still)})


# families and random modifications for criterion 10

def _family(tag: str) -> tuple[ca.Symmetry, rh.GenHom]:
    if tag == "Homogeneous":
        sym = ca.HOMOGENEOUS
        seeds = [
            ca.Linear(ZERO, E1, 2.0), ca.Linear(E2, E1, 2.0), ca.Linear(ZERO, E2, 1.5),
            ca.Circular(ZERO, E3, E1, 2.0), ca.Circular([3, 1, 0], E3, E1, 2.0), ca.Circular([0, 0, 2], E3, E2, 1.0),
        ]
        fam = rh.CurveFamily.build(seeds, {0: [0.5, 1.2], 1: [1.0], 3: [0.7, 1.3], 4: [1.0]})
        omega = ic.Homogeneous([[0.3, 0.1, 0.0], [0.0, -0.2, 0.4], [0.1, 0.0, 0.2]])
        return sym, rh.from_connection(omega, sym, fam, ode_steps=1024)
    if tag == "SemiHomogeneous":
        sym = ca.semi_homogeneous()
        slant = np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)
        seeds = [
            ca.Linear(ZERO, E1, 2.0), ca.Linear(E3, E2, 1.5), ca.Linear(ZERO, slant, 2.0), ca.Linear([1, 1, 0], E3, 1.5),
            ca.Circular(ZERO, E3, E1, 2.0), ca.Circular([2, 0, 0], E3, E1, 2.0),
        ]
        fam = rh.CurveFamily.build(seeds, {0: [0.5, 1.2], 2: [0.6, 1.4], 4: [1.0], 5: [0.5]})
        omega = ic.Homogeneous([[0.2, 0.0, 0.1], [0.1, 0.3, 0.0], [0.0, 0.1, -0.2]])
        return sym, rh.from_connection(omega, sym, fam, ode_steps=1024)
    if tag == "SphericallySymmetric":
        sym = ca.SPHERICAL
        seeds = [
            ca.Circular([0, 0, 0.5], E3, E1, 2.0), ca.Circular(ZERO, E3, E1, 2.5), ca.Circular([0, 0, -0.5], E3, E2, 1.0),
            ca.Linear(ZERO, E1, 2.0), ca.Linear(ZERO, -E2, 1.0), ca.Linear(E2, E1, 1.5), ca.Linear(E1, E2, 1.5),
        ]
        fam = rh.CurveFamily.build(seeds, {0: [1.0], 1: [0.5, 1.0], 3: [0.5, 1.0], 5: [0.6]})
        omega = ic.Spherical([0.3, 0.1], [0.2], [0.1])
        return sym, rh.from_connection(omega, sym, fam, ode_steps=1024)
    sym = ca.ISOTROPIC
    seeds = [
        ca.Linear(ZERO, E1, 2.0), ca.Linear([1, 2, 3], E2, 2.0), ca.Circular(ZERO, E3, E1, 2.0), ca.Circular(E1, E2, E3, 2.0),
        ca.LieAlgGen(ZERO, E1, 0.5 * E1 + 0.5 * E2, 2.0), ca.LieAlgGen([1, 1, 0], E2, 0.3 * E3 + 0.2 * E2, 1.5),
    ]
    fam = rh.CurveFamily.build(seeds, {0: [0.5, 1.2], 1: [1.0], 2: [0.7], 3: [1.0], 4: [1.0], 5: [0.6]})
    return sym, rh.from_connection(ic.Isotropic(0.7), sym, fam)


def _unit(v):
    return np.asarray(v, dtype=float) / np.linalg.norm(v)


def _allowed_w(tag: rh.TypeTag, rng) -> np.ndarray:
    w = rng.standard_normal(3)
    if tag.kind == "T2":
        return (w @ tag.vec) * tag.vec
    if tag.kind == "T3":
        return w - (w @ tag.vec) * tag.vec
    return w


def _random_lag(sym: ca.Symmetry, rng):
    """A random verified (x, gen) for the symmetry."""
    if sym.tag == "Homogeneous":
        d = [E1, E2, -E1, _unit(rng.standard_normal(3))][rng.integers(4)]
        return rng.standard_normal(3), (d, ZERO)
    if sym.tag == "SemiHomogeneous":
        # in-plane directions at the heights where the family has such lines
        d, z = [(E1, 0.0), (-E1, 0.0), (E2, 1.0)][rng.integers(3)]
        return np.array([rng.standard_normal(), rng.standard_normal(), z]), (d, ZERO)
    if sym.tag == "SphericallySymmetric":
        z = [0.5, 0.0, -0.5][rng.integers(3)]
        phi = rng.uniform(0, 2 * math.pi)
        R = su.rotation_matrix(su.haar2(rng)) if rng.uniform() < 0.3 else np.eye(3)
        x = R @ np.array([math.cos(phi), math.sin(phi), z])
        return x, (ZERO, R @ (E3 * [1.0, -1.0][rng.integers(2)]))
    kind = rng.integers(3)
    x = rng.standard_normal(3)
    if kind == 0:
        return x, (_unit(rng.standard_normal(3)), ZERO)
    if kind == 1:
        v = _unit(rng.standard_normal(3))
        s = rng.standard_normal(3)
        return x, (v, 0.5 * s)
    return x, (ZERO, 0.5 * _unit(rng.standard_normal(3)))


def _random_free(sym: ca.Symmetry, h: rh.GenHom, rng):
    """A random free (or tiled) delta, t0 and admissible w."""
    w = rng.standard_normal(3)
    if sym.tag == "Homogeneous":
        phi = rng.uniform(0, 2 * math.pi)
        delta = ca.Circular(rng.standard_normal(3), E3, [math.cos(phi), math.sin(phi), 0.0], rng.uniform(0.3, 1.5))
    elif sym.tag == "SemiHomogeneous":
        if rng.uniform() < 0.5:
            slant = np.array([1.0, 0.0, 1.0]) / math.sqrt(2.0)
            delta = ca.Linear(rng.uniform(-1, 1) * slant + [0.0, rng.uniform(-1, 1), 0.0], slant, rng.uniform(0.3, 1.0))
        else:
            phi = rng.uniform(0, 2 * math.pi)
            delta = ca.Circular([rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0], E3, [math.cos(phi), math.sin(phi), 0.0], rng.uniform(0.3, 1.5))
    elif sym.tag == "SphericallySymmetric":
        R = su.rotation_matrix(su.haar2(rng))
        if rng.uniform() < 0.5:
            d = R @ E1
            delta = ca.Linear(rng.uniform(0.0, 0.5) * d, d, rng.uniform(0.2, 1.0))
            w = (w @ d) * d
        else:
            foot, d = R @ E2, R @ E1
            delta = ca.Linear(foot + rng.uniform(0.05, 0.5) * d, d, rng.uniform(0.2, 1.0))
    else:
        d = _unit(rng.standard_normal(3))
        delta = ca.Linear(rng.standard_normal(3), d, rng.uniform(0.3, 1.0))
        w = (w @ d) * d
    a, b = delta.domain
    return delta, rng.uniform(a, b), w


def _apply_random(h: rh.GenHom, rng, n_lag: int, n_free: int) -> tuple[rh.GenHom, bool]:
    """Apply modifications in random order; report whether untouched entries stayed identical."""
    ops = ["lag"] * n_lag + ["free"] * n_free
    rng.shuffle(ops)
    identical = True
    for op in ops:
        for _attempt in range(50):
            try:
                if op == "lag":
                    x, gen = _random_lag(h.sym, rng)
                    tag = rh.classify_type(h.sym, x, gen)
                    new = rh.modify_lag(h, x, gen, _allowed_w(tag, rng))
                else:
                    delta, t0, w = _random_free(h.sym, h, rng)
                    new = rh.modify_free(h, delta, t0, w)
            except (rh.UnverifiedStability, ca.UnsupportedPair, ca.StabilizerElement):
                continue
            if not new.touched:
                continue
            identical &= all(new.table[i] is h.table[i] for i in range(len(h.table)) if i not in new.touched)
            h = new
            break
        else:
            raise RuntimeError(f"could not draw an admissible {op} modification")
    return h, identical


def c10_modification(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(10)
    worst = 0.0
    detail = {}
    all_identical = True
    for tag in ("Homogeneous", "SemiHomogeneous", "SphericallySymmetric", "HomogeneousIsotropic"):
        sym, h = _family(tag)
        h2, identical = _apply_random(h, rng, 5, 3)
        rep = rh.check_invariants(h2)
        worst = max(worst, rep.worst)
        all_identical &= identical
        detail[tag] = {"curves": len(h.family), "worst": rep.worst, "changed": sum(a is not b for a, b in zip(h.table, h2.table))}
    bound = cfg.bound(1e-10)
    return Criterion(10, "modification soundness", worst, bound, worst <= bound and all_identical, detail)


def type_table_cases() -> list[tuple[ca.Symmetry, np.ndarray, tuple, rh.TypeTag]]:
    """Independent expected tags for the three LQC tables."""
    cases = []
    rng = np.random.default_rng(11)
    for _ in range(10):
        cases.append((ca.HOMOGENEOUS, rng.standard_normal(3), (rng.standard_normal(3), ZERO), rh.TypeTag("T4")))
        v = rng.standard_normal(3) * [1, 1, 0]
        cases.append((ca.semi_homogeneous(), rng.standard_normal(3), (v, ZERO), rh.TypeTag("T4")))
    for alpha in np.linspace(0.05, math.pi / 2 - 0.05, 12):
        cases.append((ca.SPHERICAL, E1, rh.spherical_generator(alpha), rh.TypeTag("T4")))
    cases.append((ca.SPHERICAL, E1, rh.spherical_generator(math.pi / 2), rh.TypeTag("T3", E1)))
    cases.append((ca.SPHERICAL, 2.0 * E1, (ZERO, E3), rh.TypeTag("T3", E1)))
    for v in (E1, E2, E3, _unit([1, 2, 3])):
        cases.append((ca.ISOTROPIC, ZERO, (v, ZERO), rh.TypeTag("T2", v)))
    for phi in np.linspace(0.1, math.pi - 0.1, 8):
        s = np.array([math.cos(phi), math.sin(phi), 0.0])
        cases.append((ca.ISOTROPIC, ZERO, (E1, s), rh.TypeTag("T3", E3)))
    return cases


def c11_types(cfg: RunConfig) -> Criterion:
    bad = 0
    for sym, x, gen, want in type_table_cases():
        if rh.classify_type(sym, x, gen) != want:
            bad += 1
    return Criterion(11, "type tables", float(bad), 0.0, bad == 0, {"cases": len(type_table_cases())})


def choice_pairs() -> list[tuple[rm.LagFactorSpec, rm.LagFactorSpec]]:
    R = su.rotation_matrix(su.exp2([0.3, -0.4, 0.5]))
    return [
        (rm.LagFactorSpec(ca.HOMOGENEOUS, ZERO, [(E1, ZERO)]), rm.LagFactorSpec(ca.HOMOGENEOUS, [1.0, 2.0, 3.0], [(E2, ZERO)])),
        (rm.LagFactorSpec(ca.semi_homogeneous(), ZERO, [(E1, ZERO)]), rm.LagFactorSpec(ca.semi_homogeneous(), E3, [(E2, ZERO)])),
        (
            rm.LagFactorSpec(ca.SPHERICAL, E1, [rh.spherical_generator(math.pi / 3), rh.spherical_generator(math.pi / 2)]),
            rm.LagFactorSpec(ca.SPHERICAL, R @ E1, [(ZERO, R @ rh.spherical_generator(math.pi / 3)[1]), (ZERO, R @ rh.spherical_generator(math.pi / 2)[1])]),
        ),
        (
            rm.LagFactorSpec(ca.ISOTROPIC, ZERO, [(E1, ZERO), (E1, np.array([0.5, 0.5, 0.0]))]),
            rm.LagFactorSpec(ca.ISOTROPIC, E3, [(E2, ZERO), (E2, np.array([0.0, 0.5, 0.5]))]),
        ),
    ]


def c12_choice(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(12)
    worst = 0.0
    for a, b in choice_pairs():
        worst = max(worst, rm.choice_independence(a, b, rng, cfg.samples).max_z)
    return Criterion(12, "LAG measure choice independence", worst, 3.0, worst <= 3.0)


def c13_bridge(cfg: RunConfig) -> Criterion:
    rng = cfg.rng(13)
    worst = 0.0
    for c in (-1.5, 0.3, 2.0):
        lengths = np.sort(rng.uniform(0.1, 5.0, 10))
        v = _unit(rng.standard_normal(3))
        seeds = [ca.Linear(rng.standard_normal(3), v, l) for l in lengths]
        fam = rh.CurveFamily.build(seeds)
        h = rh.from_connection(ic.Isotropic(c), ca.ISOTROPIC, fam)
        z = rh.lines_to_bohr(h, v, lengths)
        module = bs.FreqModule(tuple(f"l{k}" for k in range(10)), tuple(lengths))
        psi = bs.embed(c, module)
        want = np.array([bs.project(psi, bs.FreqTuple(module, [module.unit(b)]))[0] for b in module.labels])
        worst = max(worst, float(np.abs(z - want).max()))
    bound = cfg.bound(1e-12)
    return Criterion(13, "standard LQC bridge", worst, bound, worst <= bound)


SUITES: list[Callable[[RunConfig], Criterion]] = [
    c01_circle_ode, c02_line_ode, c03_invariance, c04_wang, c05_torus, c06_gap, c07_image,
    c08_bohr, c09_translation, c10_modification, c11_types, c12_choice, c13_bridge,
]


def verify_all(cfg: RunConfig) -> list[Criterion]:
    return [suite(cfg) for suite in SUITES]


# --------------------------------------------------------------- commands


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _default_sym(omega) -> ca.Symmetry:
    tag = ic.invariance_group(omega)
    if tag == "SemiHomogeneous":
        return omega.symmetry
    return ca.Symmetry(tag)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_transport(args) -> int:
    try:
        omega = ic.conn_from_json(_load_json(args.conn))
        curve = ca.curve_from_json(_load_json(args.curve))
        sym = ca.Symmetry.from_json(_load_json(args.sym)) if args.sym else _default_sym(omega)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    h = tr.transport_closed(omega, sym, curve)
    report = {"matrix": tr.matrix_json(h), "quat": h.quat.tolist()}
    if args.oracle == "ode":
        ode = tr.transport_ode(ic.to_gauge_field(omega), curve, args.steps)
        report["ode_quat"] = ode.quat.tolist()
        report["ode_residual"] = float(np.abs(h.matrix() - ode.matrix()).max())
    _emit(dumps17(report), args.out)
    return 0


def cmd_verify_all(args) -> int:
    cfg = RunConfig(args.seed, args.tol, args.samples)
    results = verify_all(cfg)
    for r in results:
        print(r.line(), file=sys.stderr if args.out is None else sys.stdout)
    report = {
        "seed": cfg.seed,
        "tol": cfg.tol,
        "samples": cfg.samples,
        "criteria": [
            {"number": r.number, "name": r.name, "measured": r.measured, "bound": r.bound, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
    }
    _emit(dumps17(report), args.out)
    return 0 if all(r.passed for r in results) else 1


def cmd_invariance(args) -> int:
    try:
        omega = ic.conn_from_json(_load_json(args.conn))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    sym = _default_sym(omega)
    rng = np.random.default_rng(args.seed)
    worst = max(ic.pullback_residual(omega, sym, sym.sample(rng), *_random_tangent(rng)) for _ in range(args.samples))
    _emit(dumps17({"symmetry": sym.tag, "samples": args.samples, "max_residual": worst, "passed": worst <= args.tol}), args.out)
    return 0 if worst <= args.tol else 1


def cmd_wang(args) -> int:
    omega = ic.Isotropic(args.c)
    psi = ic.wang_reduce(omega, ca.ISOTROPIC)
    rep = ic.wang_check(psi, ca.ISOTROPIC, np.random.default_rng(args.seed))
    ns = ic.equiv_nullspace()
    _emit(
        dumps17({"psi": psi.tolist(), "cond_a": rep.cond_a, "cond_b": rep.cond_b, "passed": rep.passed, "nullspace_dim": ns.dim}),
        args.out,
    )
    return 0 if rep.passed and ns.dim == 1 else 1


def cmd_classify(args) -> int:
    try:
        sym = ca.Symmetry.from_json(_load_json(args.sym))
        curve = ca.curve_from_json(_load_json(args.curve))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    _emit(dumps17({"symmetry": sym.tag, "class": ca.classify(sym, curve).value, "free": ca.is_free_segment(sym, curve)}), args.out)
    return 0


def cmd_bohr(args) -> int:
    try:
        module = bs.FreqModule.from_json(_load_json(args.module))
        freqs = json.loads(args.freqs)
        L = bs.FreqTuple(module, freqs)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    psi = bs.embed(args.x, module)
    vals = bs.project(psi, L)
    _emit(dumps17({"element": psi.to_json(), "project": [[z.real, z.imag] for z in vals]}), args.out)
    return 0


def cmd_rbar_image(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "a_n", "dist_to_center", "merge_bound"])
    for n in range(1, args.nmax + 1):
        a = rb.a_n(n, args.tau, args.r)
        q = rb.pi_circ(rb.Real(a), args.tau, args.r)
        d = min(su.distance(q, su.ONE), su.distance(q, -su.ONE))
        w.writerow([n, f17(a), f17(d), f17(rb.merge_bound(n, args.tau, args.r))])
    _emit(buf.getvalue().rstrip("\n"), args.out)
    return 0


def cmd_measure_sample(args) -> int:
    try:
        d = _load_json(args.spec)
        spec = rm.LagFactorSpec(ca.Symmetry.from_json(d["sym"]), d["base"], [tuple(g) for g in d["gens"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    rng = np.random.default_rng(args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample", "factor", "kind", "psi_re", "psi_im", "v1", "v2", "v3"])
    draws = [rm.lag_factor_batch(tag, rng, args.n) for tag in spec.tags]
    for i in range(args.n):
        for k, (tag, dr) in enumerate(zip(spec.tags, draws)):
            psi = dr["psi"][i]
            v = dr["v"]
            if v is None:
                vv = ["", "", ""]
            elif v.ndim == 1:
                vv = [f17(v[i].real), f17(v[i].imag), ""]
            else:
                vv = [f17(a) for a in v[i]]
            w.writerow([i, k, tag.kind, f17(psi.real), f17(psi.imag), *vv])
    _emit(buf.getvalue().rstrip("\n"), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symred", description="Symmetry-reduced holonomy and measure verification")
    p.add_argument("--seed", type=int, default=RunConfig.seed)
    p.add_argument("--tol", type=float, default=RunConfig.tol)
    p.add_argument("--samples", type=int, default=RunConfig.samples)
    p.add_argument("--out", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transport", help="holonomy of an invariant connection along a curve")
    t.add_argument("--conn", required=True)
    t.add_argument("--curve", required=True)
    t.add_argument("--sym", default=None)
    t.add_argument("--oracle", choices=["closed", "ode"], default="closed")
    t.add_argument("--steps", type=int, default=4096)
    t.set_defaults(func=cmd_transport)

    sub.add_parser("verify-all", help="run every acceptance suite").set_defaults(func=cmd_verify_all)

    i = sub.add_parser("invariance", help="pullback residuals of a connection under its group")
    i.add_argument("--conn", required=True)
    i.set_defaults(func=cmd_invariance)

    w = sub.add_parser("wang", help="Wang reduction of the isotropic family")
    w.add_argument("--c", type=float, default=1.0)
    w.set_defaults(func=cmd_wang)

    c = sub.add_parser("classify", help="curve class under a symmetry")
    c.add_argument("--sym", required=True)
    c.add_argument("--curve", required=True)
    c.set_defaults(func=cmd_classify)

    b = sub.add_parser("bohr", help="project the embedding of x onto a frequency tuple")
    b.add_argument("--module", required=True)
    b.add_argument("--x", type=float, default=0.0)
    b.add_argument("--freqs", required=True, help="integer matrix as JSON, one frequency per row")
    b.set_defaults(func=cmd_bohr)

    r = sub.add_parser("rbar-image", help="CSV of a_n, distance to the centre and merge bounds")
    r.add_argument("--tau", type=float, default=math.pi)
    r.add_argument("--r", type=float, default=1.0)
    r.add_argument("--nmax", type=int, default=20)
    r.set_defaults(func=cmd_rbar_image)

    m = sub.add_parser("measure-sample", help="CSV of LAG-measure factor draws")
    m.add_argument("--spec", required=True)
    m.add_argument("--n", type=int, default=10)
    m.set_defaults(func=cmd_measure_sample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.tol <= 0 or args.samples < 1000:
            raise InputError("--tol must be positive and --samples at least 1000")
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (tr.NotLAG, tr.SymmetryMismatch, ca.UnsupportedPair, rh.UnverifiedStability, ic.NotTransitive) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
