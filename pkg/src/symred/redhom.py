"""Invariant generalized homomorphisms on finite curve families.

A GenHom is a rule curve -> SU(2) (the holonomy in the trivialization nu_x = (x, 1))
together with its table on a finite family closed under inversion and declared splits.
Modifications wrap the previous rule, so sub-segments outside the family can still be
evaluated, and untouched table entries are carried over as the same objects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import curvealg as ca
from . import su2core as su
from .bohrspace import BohrElement
from .curvealg import Curve, Symmetry, UnsupportedPair
from .su2core import GroupElement2
from .transport import NotLAG, transport_closed, transport_ode

LAG_TOL = 1e-9


class UnverifiedStability(ValueError):
    pass


class EquivarianceViolation(ValueError):
    pass


class StabilizerViolation(ValueError):
    pass


# ------------------------------------------------------------------- family


@dataclass(frozen=True, eq=False)
class CurveFamily:
    """Closure of seed curves under inversion and their declared splits.

    curves[i] for all ids; inverse[i] is the id of the inverted curve; splits holds
    (whole, first, second) id triples with whole = second o first.
    """

    curves: tuple
    inverse: tuple
    splits: tuple

    @classmethod
    def build(cls, seeds, split_params=None) -> "CurveFamily":
        split_params = split_params or {}
        curves: list = []

        def ident(c) -> int:
            for i, d in enumerate(curves):
                if ca.kind_of(d) == ca.kind_of(c) and ca.equivalent(c, d, tol=1e-9):
                    return i
            curves.append(c)
            return len(curves) - 1

        triples = set()
        for k, seed in enumerate(seeds):
            a, b = seed.domain
            pts = [a] + sorted(split_params.get(k, [])) + [b]
            ids = {}
            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    ids[i, j] = ident(ca.restrict(seed, pts[i], pts[j]))
            for i in range(len(pts)):
                for j in range(i + 2, len(pts)):
                    for m in range(i + 1, j):
                        triples.add((ids[i, j], ids[i, m], ids[m, j]))
        n = len(curves)
        inverse = [0] * n
        for i in range(n):
            inverse[i] = ident(ca.invert(curves[i]))
        for i in range(n, len(curves)):
            # inverses of inverses are already present
            inverse.append(ident(ca.invert(curves[i])))
        # inverted split triples: inv(whole) = inv(first) o inv(second)
        for w, f, s in list(triples):
            triples.add((inverse[w], inverse[s], inverse[f]))
        return cls(tuple(curves), tuple(inverse), tuple(sorted(triples)))

    def __len__(self) -> int:
        return len(self.curves)

    def index(self, c: Curve) -> int | None:
        for i, d in enumerate(self.curves):
            if ca.kind_of(d) == ca.kind_of(c) and ca.equivalent(c, d, tol=1e-9):
                return i
        return None


# ------------------------------------------------------------------- genhom


@dataclass(frozen=True, eq=False)
class GenHom:
    sym: Symmetry
    family: CurveFamily
    rule: Callable[[Curve], GroupElement2]
    table: tuple
    touched: frozenset = frozenset()

    def value(self, i: int) -> GroupElement2:
        return self.table[i]

    def __call__(self, c: Curve) -> GroupElement2:
        return self.rule(c)


def _curve_key(c: Curve) -> tuple:
    d = ca.curve_to_json(c)
    return (d["type"],) + tuple(
        float(np.round(a, 12)) for k, vals in sorted(d.items()) if k != "type" for a in np.ravel(vals)
    )


def _cached(fn: Callable[[Curve], GroupElement2]) -> Callable[[Curve], GroupElement2]:
    memo: dict = {}

    def rule(c):
        k = _curve_key(c)
        if k not in memo:
            memo[k] = fn(c)
        return memo[k]

    return rule


def _materialize(sym, fam, rule) -> GenHom:
    rule = _cached(rule)
    return GenHom(sym, fam, rule, tuple(rule(c) for c in fam.curves))


def _layered(h: GenHom, layer) -> GenHom:
    """New GenHom: layer(c) where it applies, the previous rule elsewhere.

    Table entries the layer does not touch are the previous objects, bit for bit.
    """
    layer = _cached(layer)
    old = h.rule

    def rule(c):
        val = layer(c)
        return old(c) if val is None else val

    table, touched = [], set()
    for i, c in enumerate(h.family.curves):
        val = layer(c)
        if val is None:
            table.append(h.table[i])
        else:
            table.append(val)
            touched.add(i)
    return GenHom(h.sym, h.family, rule, tuple(table), frozenset(touched))


def trivial(sym: Symmetry, fam: CurveFamily) -> GenHom:
    return _materialize(sym, fam, lambda c: su.ONE)


def from_connection(omega, sym: Symmetry, fam: CurveFamily, ode_steps: int | None = None) -> GenHom:
    """Holonomies of an invariant connection; non-orbit curves use the ODE if ode_steps is set."""
    from .invconn import to_gauge_field

    field = to_gauge_field(omega) if ode_steps else None

    def rule(c):
        try:
            return transport_closed(omega, sym, c)
        except NotLAG:
            if field is None:
                raise
            return transport_ode(field, c, ode_steps)

    return _materialize(sym, fam, rule)


@dataclass(frozen=True)
class InvariantReport:
    multiplicativity: float
    inversion: float
    invariance: float
    pairs: int

    @property
    def worst(self) -> float:
        return max(self.multiplicativity, self.inversion, self.invariance)


def check_invariants(h: GenHom) -> InvariantReport:
    fam, t = h.family, h.table
    mult = max((su.distance(t[w], su.mul(t[s], t[f])) for w, f, s in fam.splits), default=0.0)
    inv = max(su.distance(t[fam.inverse[i]], su.inv(t[i])) for i in range(len(fam)))
    worst, pairs = 0.0, 0
    for i, c1 in enumerate(fam.curves):
        for j, c2 in enumerate(fam.curves):
            for g in ca.congruences(h.sym, c1, c2):
                pairs += 1
                worst = max(worst, su.distance(t[j], su.conj(g.sigma, t[i])))
    return InvariantReport(mult, inv, worst, pairs)


def torus_constraint(h: GenHom, c: ca.Linear, tol: float = 1e-10) -> bool:
    """For the Euclidean group the value on a line lies in the torus H_v."""
    if h.sym.tag != "HomogeneousIsotropic":
        raise ValueError("the torus constraint is stated for the Euclidean group")
    i = h.family.index(c)
    val = h.table[i] if i is not None else h(c)
    b = val.b
    return float(np.linalg.norm(np.cross(b, c.v))) <= tol


def set_value(h: GenHom, i: int, val: GroupElement2) -> GenHom:
    """A copy with one table entry overwritten (no consistency is enforced)."""
    t = list(h.table)
    t[i] = val
    return GenHom(h.sym, h.family, h.rule, tuple(t), frozenset({i}))


# ------------------------------------------------------------------- types


@dataclass(frozen=True, eq=False)
class TypeTag:
    kind: str  # T1 | T2 | T3 | T4
    vec: np.ndarray | None = None  # axis for T2, plane normal for T3

    def __repr__(self) -> str:
        return self.kind if self.vec is None else f"{self.kind}{{{np.round(self.vec, 12).tolist()}}}"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TypeTag) or self.kind != other.kind:
            return False
        if self.vec is None or other.vec is None:
            return self.vec is None and other.vec is None
        return float(np.linalg.norm(np.cross(self.vec, other.vec))) <= 1e-10

    __hash__ = None

    def allows(self, w, tol: float = 1e-10) -> bool:
        w = np.asarray(w, dtype=float)
        if self.kind == "T1":
            return float(np.linalg.norm(w)) <= tol
        if self.kind == "T2":
            return float(np.linalg.norm(np.cross(w, self.vec))) <= tol
        if self.kind == "T3":
            return abs(float(w @ self.vec)) <= tol
        return True


def _unit(x):
    return np.asarray(x, dtype=float) / np.linalg.norm(x)


def classify_type(sym: Symmetry, x, gen) -> TypeTag:
    """Type of the space of equivariant maps along gen at base point x (verified tables only)."""
    x = np.asarray(x, dtype=float)
    v, s = (np.asarray(a, dtype=float) for a in gen)
    nv, ns = float(np.linalg.norm(v)), float(np.linalg.norm(s))
    if sym.tag in ("Homogeneous", "SemiHomogeneous"):
        if ns > LAG_TOL or nv <= LAG_TOL or not sym.in_algebra(v, s):
            raise UnverifiedStability("expected a nonzero translation generator of the group")
        return TypeTag("T4")
    if sym.tag == "SphericallySymmetric":
        nx = float(np.linalg.norm(x))
        if nv > LAG_TOL or ns <= LAG_TOL or nx <= LAG_TOL:
            raise UnverifiedStability("expected a rotation generator at a base point off the origin")
        cos_a = abs(float(s @ x)) / (ns * nx)
        if cos_a >= 1.0 - 1e-12:
            raise UnverifiedStability("rotation axis through the base point fixes it")
        if cos_a <= 1e-12:
            return TypeTag("T3", x / nx)
        return TypeTag("T4")
    # Euclidean group: move the base point to 0
    v0 = v + 2.0 * np.cross(s, x)
    n0 = float(np.linalg.norm(v0))
    if n0 <= LAG_TOL:
        raise UnverifiedStability("generator without translation part at the base point")
    d = v0 / n0
    if ns <= LAG_TOL:
        return TypeTag("T2", d)
    s_perp = s - (s @ d) * d
    if float(np.linalg.norm(s_perp)) <= LAG_TOL:
        raise UnverifiedStability("screw generator with axis along its drift is outside the verified tables")
    return TypeTag("T3", _unit(np.cross(d, s_perp)))


def spherical_generator(alpha: float, x=(1.0, 0.0, 0.0)) -> tuple[np.ndarray, np.ndarray]:
    """The gamma_alpha family: rotation axis at angle alpha to the base point direction."""
    xh = _unit(x)
    p = ca._perp_unit(xh)
    return np.zeros(3), math.cos(alpha) * xh + math.sin(alpha) * p


# ------------------------------------------------------------ modifications


def _orbit_placement(x, v, s) -> ca.Placement:
    """Placement of the orbit curve of (v, s) through x with unit flow time."""
    v, s = np.asarray(v, dtype=float), np.asarray(s, dtype=float)
    per = ca.period((v, s), x)
    l = 1.0 if math.isinf(per) else 0.5 * per
    return ca.placement(ca.LieAlgGen(x, v, s, l))


def modify_lag(h: GenHom, x, gen, w) -> GenHom:
    """Give orbit segments of gen through x the values exp2(l s) exp2(l w), transported.

    A curve c equivalent to phi_{g'} o gamma^x_g|[0, l] gets Ad_{sigma(g')}(exp2(l s) exp2(l w)),
    a reversed one the same formula with (s, w) replaced by (-s, -w). Other values are kept.
    """
    sym = h.sym
    x = np.asarray(x, dtype=float)
    v, s = (np.asarray(a, dtype=float) for a in gen)
    w = np.asarray(w, dtype=float)
    if not sym.in_algebra(v, s):
        raise UnverifiedStability("generator is not in the symmetry algebra")
    tag = classify_type(sym, x, (v, s))
    if not tag.allows(w):
        raise EquivarianceViolation(f"w = {w.tolist()} is not allowed for type {tag!r}")
    Po = _orbit_placement(x, v, s)
    Co, kappa = Po.carrier, Po.kappa

    def layer(c: Curve):
        P = ca.placement(c)
        for m in ca.carrier_maps(sym, Co, P.carrier):
            lo, hi = P.interval
            # preimage of c's carrier interval in orbit-carrier parameters
            ta = (m.eps * (lo - m.b)) / kappa
            tb = (m.eps * (hi - m.b)) / kappa
            if m.eps == 1:
                l = tb - ta
                gp = m.g @ ca.group_exp(v, s, ta)
                val = su.mul(su.exp2(l * s), su.exp2(l * w))
            else:
                l = ta - tb
                gp = m.g @ ca.group_exp(v, s, ta)
                val = su.mul(su.exp2(-l * s), su.exp2(-l * w))
            return su.conj(gp.sigma, val)
        return None

    return _layered(h, layer)


def _stabilizer_check(sym: Symmetry, delta: Curve, w: np.ndarray) -> None:
    for m in ca.self_maps(sym, delta):
        if m.stab_free:
            axis = ca.placement(delta).carrier.a
            if float(np.linalg.norm(np.cross(w, axis))) > 1e-10:
                raise StabilizerViolation("w must be fixed by the rotations fixing delta")


def modify_free(h: GenHom, delta: Curve, t0: float, w) -> GenHom:
    """Free-segment modification with Psi(lambda) = exp2(lambda w).

    Sub-segments of delta get H(delta|[t0, b]) Psi(b - a) H(delta|[t0, a])^-1 with H the
    previous rule; translates are conjugated by the fiber part of the translating element.
    """
    sym = h.sym
    w = np.asarray(w, dtype=float)
    cls = ca.classify(sym, delta)
    if cls == ca.CurveClass.Unsupported:
        raise UnsupportedPair("delta is not a supported curve for this symmetry")
    _stabilizer_check(sym, delta, w)
    old = h.rule
    a0, b0 = delta.domain
    if not a0 <= t0 <= b0:
        raise ca.OutOfDomain("t0 must lie in the domain of delta")

    def H(u: float) -> GroupElement2:
        if abs(u - t0) <= 1e-15:
            return su.ONE
        return old(ca.sub_curve(delta, t0, u))

    def psi_tilde(a: float, b: float) -> GroupElement2:
        return su.prod(H(b), su.exp2((b - a) * w), su.inv(H(a)))

    if not ca.is_free_segment(sym, delta):
        # tiled lines: the recombination is only consistent if everything commutes with Psi
        probe = [H(u) for u in np.linspace(a0, b0, 5)]
        z = su.exp2(w)
        if any(su.distance(su.mul(p, z), su.mul(z, p)) > 1e-12 for p in probe):
            raise UnsupportedPair("delta is not free and the old values do not commute with Psi")

    def layer(c: Curve):
        try:
            dec = ca.free_decompose(sym, c, delta)
        except UnsupportedPair:
            return None
        if not dec.covered:
            return None
        val = su.ONE
        for seg in dec.segments:
            if seg.g is None:
                piece = old(ca.restrict(c, seg.k0, seg.k1))
            else:
                X = psi_tilde(seg.a, seg.b) if seg.a < seg.b else su.inv(psi_tilde(seg.b, seg.a))
                piece = su.conj(seg.g.sigma, X)
            val = su.mul(piece, val)
        return val

    return _layered(h, layer)


# -------------------------------------------------------------- Xgp points


@dataclass(frozen=True, eq=False)
class XgpPoint:
    """A point of the Type space: T1 empty, T2 psi, T3 (psi, z in S^1), T4 (psi, v in S^2).

    zero marks the distinguished class of the zero Bohr element, where v is forgotten.
    """

    kind: str
    psi: complex | None = None
    v: np.ndarray | None = None
    zero: bool = False

    def key(self) -> tuple:
        vv = None if self.v is None else _vec_key(self.v)
        return (self.kind, self.psi, vv, self.zero)

    def __eq__(self, other) -> bool:
        return isinstance(other, XgpPoint) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def _vec_key(v) -> tuple:
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return tuple(x for z in v.ravel() for x in (float(z.real), float(z.imag)))
    return tuple(float(a) for a in v)


def canonical_xgp(tag: TypeTag | str, raw) -> XgpPoint:
    """Representative of (psi, v) modulo (psi, v) ~ (psi^-1, -v)."""
    kind = tag.kind if isinstance(tag, TypeTag) else tag
    if kind == "T1":
        return XgpPoint("T1", zero=True)
    if kind == "T2":
        psi = raw[0] if isinstance(raw, tuple) else raw
        psi = complex(psi.values[0]) if isinstance(psi, BohrElement) else complex(psi)
        return XgpPoint("T2", psi=psi, zero=psi == 1.0)
    psi, v = raw
    psi = complex(psi.values[0]) if isinstance(psi, BohrElement) else complex(psi)
    if psi == 1.0:
        return XgpPoint(kind, psi=1.0 + 0.0j, zero=True)
    if kind == "T3":
        v = complex(v)
        if _vec_key(-v) > _vec_key(v):
            psi, v = psi.conjugate(), -v
        return XgpPoint(kind, psi=psi, v=np.array(v))
    v = np.asarray(v, dtype=float).reshape(3)
    if _vec_key(-v) > _vec_key(v):
        psi, v = psi.conjugate(), -v
    return XgpPoint(kind, psi=psi, v=v.copy())


# --------------------------------------------------------------------- json


def dump(h: GenHom) -> str:
    return json.dumps(
        {
            "sym": h.sym.to_json(),
            "curves": [ca.curve_to_json(c) for c in h.family.curves],
            "inverse": list(h.family.inverse),
            "splits": [list(t) for t in h.family.splits],
            "table": [v.quat.tolist() for v in h.table],
        }
    )


def load(text: str) -> GenHom:
    d = json.loads(text)
    fam = CurveFamily(
        tuple(ca.curve_from_json(c) for c in d["curves"]),
        tuple(d["inverse"]),
        tuple(tuple(t) for t in d["splits"]),
    )
    table = tuple(GroupElement2.from_quat(q) for q in d["table"])

    def rule(c):
        i = fam.index(c)
        if i is None:
            raise UnsupportedPair("curve outside the stored family")
        return table[i]

    return GenHom(Symmetry.from_json(d["sym"]), fam, rule, table)


def lines_to_bohr(h: GenHom, direction, lengths) -> np.ndarray:
    """Circle coordinates a - i (b . v) of line values: the standard LQC correspondence."""
    v = np.asarray(direction, dtype=float)
    out = []
    for l in lengths:
        val = h(ca.Linear(np.zeros(3), v, l))
        out.append(complex(val.a, -float(val.b @ v)))
    return np.array(out)
