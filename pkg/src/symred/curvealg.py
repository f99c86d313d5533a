"""Curves in R^3, the Euclidean-type symmetry groups, and curve classification.

Every group used here is a subgroup of R^3 x| SU(2), whose element (u, sigma) acts by
(x, s) -> (u + R(sigma) x, sigma s). Curves are reduced to a carrier (an infinite line, a
full circle or an infinite helix) plus a parameter interval on it; congruence questions
are then solved on carriers with explicit frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np

from . import su2core as su
from .su2core import GroupElement2

GEOM_TOL = 1e-9
SAMPLE_TOL = 1e-10


class OutOfDomain(ValueError):
    pass


class UnsupportedPair(ValueError):
    pass


class StabilizerElement(ValueError):
    """The generator fixes the base point, so its flow is constant."""


def _arr(x) -> np.ndarray:
    a = np.asarray(x, dtype=float).reshape(3).copy()
    a.setflags(write=False)
    return a


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x)


def _perp_unit(d: np.ndarray) -> np.ndarray:
    """Some unit vector orthogonal to d."""
    trial = np.eye(3)[int(np.argmin(np.abs(d)))]
    p = trial - (trial @ d) * d
    return p / np.linalg.norm(p)


def rot_about(axis, angle: float) -> np.ndarray:
    """Rotation matrix by angle about a unit axis (Rodrigues)."""
    k = _unit(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * (K @ K)


def frame_rotation(a1, b1, a2, b2) -> np.ndarray:
    """Rotation taking the orthonormal pair (a1, b1) to (a2, b2)."""
    f1 = np.column_stack([a1, b1, np.cross(a1, b1)])
    f2 = np.column_stack([a2, b2, np.cross(a2, b2)])
    return f2 @ f1.T


# ---------------------------------------------------------------- symmetries


@dataclass(frozen=True, eq=False)
class Symmetry:
    """One of the four LQC symmetry groups.

    tag: Homogeneous (translations), SemiHomogeneous (translations in span(w1, w2)),
    SphericallySymmetric (SU(2) acting by rotations) or HomogeneousIsotropic (the full
    Euclidean-type group).
    """

    tag: Literal["Homogeneous", "SemiHomogeneous", "SphericallySymmetric", "HomogeneousIsotropic"]
    w1: np.ndarray | None = None
    w2: np.ndarray | None = None

    def __post_init__(self):
        if self.tag not in ("Homogeneous", "SemiHomogeneous", "SphericallySymmetric", "HomogeneousIsotropic"):
            raise ValueError(f"unknown symmetry {self.tag!r}")
        if self.tag == "SemiHomogeneous":
            if self.w1 is None or self.w2 is None:
                raise ValueError("SemiHomogeneous needs a plane basis")
            w1, w2 = _arr(self.w1), _arr(self.w2)
            gram = np.array([[w1 @ w1, w1 @ w2], [w2 @ w1, w2 @ w2]])
            if np.abs(gram - np.eye(2)).max() > 1e-12:
                raise ValueError("plane basis must be orthonormal")
            object.__setattr__(self, "w1", w1)
            object.__setattr__(self, "w2", w2)

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.w1, self.w2)

    @property
    def has_rotations(self) -> bool:
        return self.tag in ("SphericallySymmetric", "HomogeneousIsotropic")

    @property
    def has_translations(self) -> bool:
        return self.tag != "SphericallySymmetric"

    def contains(self, g: "EuclElement", tol: float = GEOM_TOL) -> bool:
        if self.tag == "HomogeneousIsotropic":
            return True
        if self.tag == "SphericallySymmetric":
            return float(np.linalg.norm(g.u)) <= tol
        if not su.is_central(g.sigma, tol):
            return False
        if self.tag == "SemiHomogeneous":
            return abs(float(g.u @ self.normal)) <= tol
        return True

    def in_algebra(self, v, s, tol: float = GEOM_TOL) -> bool:
        v, s = np.asarray(v, float), np.asarray(s, float)
        if self.tag == "HomogeneousIsotropic":
            return True
        if self.tag == "SphericallySymmetric":
            return float(np.linalg.norm(v)) <= tol
        if float(np.linalg.norm(s)) > tol:
            return False
        if self.tag == "SemiHomogeneous":
            return abs(float(v @ self.normal)) <= tol
        return True

    def sample(self, rng: np.random.Generator, scale: float = 2.0) -> "EuclElement":
        """A random group element (Haar on the SU(2) part, Gaussian translations)."""
        u = scale * rng.standard_normal(3)
        if self.tag == "SphericallySymmetric":
            return EuclElement(np.zeros(3), su.haar2(rng))
        if self.tag == "HomogeneousIsotropic":
            return EuclElement(u, su.haar2(rng))
        if self.tag == "SemiHomogeneous":
            u = u - (u @ self.normal) * self.normal
        return EuclElement(u, su.ONE)

    def to_json(self) -> dict:
        d = {"tag": self.tag}
        if self.tag == "SemiHomogeneous":
            d["w1"] = self.w1.tolist()
            d["w2"] = self.w2.tolist()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Symmetry":
        return cls(d["tag"], d.get("w1"), d.get("w2"))


HOMOGENEOUS = Symmetry("Homogeneous")
SPHERICAL = Symmetry("SphericallySymmetric")
ISOTROPIC = Symmetry("HomogeneousIsotropic")


def semi_homogeneous(w1=(1.0, 0.0, 0.0), w2=(0.0, 1.0, 0.0)) -> Symmetry:
    return Symmetry("SemiHomogeneous", w1, w2)


@dataclass(frozen=True, eq=False)
class EuclElement:
    """(u, sigma) in R^3 x| SU(2)."""

    u: np.ndarray
    sigma: GroupElement2 = su.ONE

    def __post_init__(self):
        object.__setattr__(self, "u", _arr(self.u))

    @property
    def R(self) -> np.ndarray:
        return su.rotation_matrix(self.sigma)

    def act(self, x) -> np.ndarray:
        return self.u + self.R @ np.asarray(x, dtype=float)

    def __matmul__(self, other: "EuclElement") -> "EuclElement":
        return EuclElement(self.u + self.R @ other.u, su.mul(self.sigma, other.sigma))

    def inverse(self) -> "EuclElement":
        si = su.inv(self.sigma)
        return EuclElement(-(su.rotation_matrix(si) @ self.u), si)

    @classmethod
    def from_rotation(cls, u, R) -> "EuclElement":
        return cls(u, su.lift(R))

    def __repr__(self) -> str:
        return f"EuclElement(u={self.u.tolist()}, sigma={self.sigma!r})"


IDENTITY = EuclElement(np.zeros(3))


def flow(x, v, s, t):
    """Solution of y' = 2 s x y + v, y(0) = x, in closed Rodrigues form."""
    x, v, s = (np.asarray(a, dtype=float) for a in (x, v, s))
    t = np.asarray(t, dtype=float)
    ns = float(np.linalg.norm(s))
    tt = t[..., None]
    if ns == 0.0:
        return x + tt * v
    k = s / ns
    w = 2.0 * ns
    th = w * tt
    c, sn = np.cos(th), np.sin(th)
    # rotate x about k by angle w t
    rx = x * c + np.cross(k, x) * sn + k * (k @ x) * (1 - c)
    vpar = (k @ v) * k
    vperp = v - vpar
    drift = vpar * tt + (vperp * sn + np.cross(k, vperp) * (1 - c)) / w
    return rx + drift


def group_exp(v, s, t: float) -> EuclElement:
    """exp(t (v, s)) in the Euclidean-type group."""
    u = flow(np.zeros(3), v, s, t)
    return EuclElement(u, su.exp2(t * np.asarray(s, dtype=float)))


# -------------------------------------------------------------------- curves


@dataclass(frozen=True, eq=False)
class Linear:
    """t -> x + t v on [0, l]."""

    x: np.ndarray
    v: np.ndarray
    l: float

    def __post_init__(self):
        object.__setattr__(self, "x", _arr(self.x))
        object.__setattr__(self, "v", _arr(self.v))
        if abs(np.linalg.norm(self.v) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if not self.l > 0:
            raise ValueError("length must be positive")
        object.__setattr__(self, "l", float(self.l))

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, self.l)


@dataclass(frozen=True, eq=False)
class Circular:
    """t -> x + cos t r + sin t (n x r) on [0, tau]."""

    x: np.ndarray
    n: np.ndarray
    r: np.ndarray
    tau: float

    def __post_init__(self):
        for name in ("x", "n", "r"):
            object.__setattr__(self, name, _arr(getattr(self, name)))
        if abs(np.linalg.norm(self.n) - 1.0) > 1e-12:
            raise ValueError("normal must be a unit vector")
        if abs(float(self.n @ self.r)) > 1e-12:
            raise ValueError("radius vector must be orthogonal to the normal")
        if np.linalg.norm(self.r) == 0.0:
            raise ValueError("radius must be nonzero")
        if not 0.0 < self.tau < 2 * math.pi:
            raise ValueError("angle must lie in (0, 2 pi)")
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, self.tau)


@dataclass(frozen=True, eq=False)
class LieAlgGen:
    """The orbit curve t -> exp(t (v, s)) x on [0, l]."""

    x: np.ndarray
    v: np.ndarray
    s: np.ndarray
    l: float

    def __post_init__(self):
        for name in ("x", "v", "s"):
            object.__setattr__(self, name, _arr(getattr(self, name)))
        per = period((self.v, self.s), self.x)
        if not self.l > 0:
            raise ValueError("length must be positive")
        if self.l >= per - 1e-12:
            raise ValueError("length must stay below the period")
        object.__setattr__(self, "l", float(self.l))

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, self.l)


Curve = Linear | Circular | LieAlgGen


class CurveClass(str, Enum):
    LAG = "LAG"
    FreeNonSym = "FreeNonSym"
    FreeSym = "FreeSym"
    Unsupported = "Unsupported"


def _check_domain(c: Curve, t) -> None:
    a, b = c.domain
    t = np.asarray(t, dtype=float)
    if np.any(t < a - 1e-12) or np.any(t > b + 1e-12):
        raise OutOfDomain(f"parameter outside [{a}, {b}]")


def evaluate(c: Curve, t):
    """Point(s) of the curve at parameter t (scalar or array)."""
    _check_domain(c, t)
    t = np.asarray(t, dtype=float)
    tt = t[..., None]
    if isinstance(c, Linear):
        return c.x + tt * c.v
    if isinstance(c, Circular):
        return c.x + np.cos(tt) * c.r + np.sin(tt) * np.cross(c.n, c.r)
    return flow(c.x, c.v, c.s, t)


def tangent(c: Curve, t):
    _check_domain(c, t)
    t = np.asarray(t, dtype=float)
    tt = t[..., None]
    if isinstance(c, Linear):
        return np.broadcast_to(c.v, t.shape + (3,)).copy()
    if isinstance(c, Circular):
        return -np.sin(tt) * c.r + np.cos(tt) * np.cross(c.n, c.r)
    y = flow(c.x, c.v, c.s, t)
    return 2.0 * np.cross(c.s, y) + c.v


def endpoint(c: Curve) -> np.ndarray:
    return evaluate(c, c.domain[1])


def invert(c: Curve) -> Curve:
    """The reversed curve, reparametrized on a domain starting at 0."""
    if isinstance(c, Linear):
        return Linear(c.x + c.l * c.v, -c.v, c.l)
    if isinstance(c, Circular):
        r2 = math.cos(c.tau) * c.r + math.sin(c.tau) * np.cross(c.n, c.r)
        r2 = r2 - (r2 @ c.n) * c.n
        return Circular(c.x, -c.n, r2, c.tau)
    return LieAlgGen(endpoint(c), -c.v, -c.s, c.l)


def restrict(c: Curve, a: float, b: float) -> Curve:
    """c on [a, b] (a < b), reparametrized to start at 0."""
    lo, hi = c.domain
    if not (lo - 1e-12 <= a < b <= hi + 1e-12):
        raise OutOfDomain(f"[{a}, {b}] is not a subinterval of [{lo}, {hi}]")
    a, b = max(a, lo), min(b, hi)
    if isinstance(c, Linear):
        return Linear(c.x + a * c.v, c.v, b - a)
    if isinstance(c, Circular):
        r2 = math.cos(a) * c.r + math.sin(a) * np.cross(c.n, c.r)
        r2 = r2 - (r2 @ c.n) * c.n
        return Circular(c.x, c.n, r2, b - a)
    return LieAlgGen(evaluate(c, a), c.v, c.s, b - a)


def split(c: Curve, t: float) -> tuple[Curve, Curve]:
    lo, hi = c.domain
    if not lo < t < hi:
        raise OutOfDomain("split parameter must be interior")
    return restrict(c, lo, t), restrict(c, t, hi)


def transform(g: EuclElement, c: Curve) -> Curve:
    """phi_g o c."""
    R = g.R
    if isinstance(c, Linear):
        return Linear(g.act(c.x), R @ c.v, c.l)
    if isinstance(c, Circular):
        n = R @ c.n
        r = R @ c.r
        return Circular(g.act(c.x), n, r - (r @ n) * n, c.tau)
    s = R @ c.s
    v = R @ c.v - 2.0 * np.cross(s, g.u)
    return LieAlgGen(g.act(c.x), v, s, c.l)


def period(gen, base) -> float:
    """Smallest T > 0 with exp(T g) x = x, or inf when the flow is injective."""
    v, s = (np.asarray(a, dtype=float) for a in gen)
    x = np.asarray(base, dtype=float)
    ns = float(np.linalg.norm(s))
    nv = float(np.linalg.norm(v))
    if ns <= 1e-14:
        if nv <= 1e-14:
            raise StabilizerElement("zero generator")
        return math.inf
    k = s / ns
    vpar = (k @ v) * k
    q = _axis_point(v, s)
    rad = (x - q) - ((x - q) @ k) * k
    on_axis = float(np.linalg.norm(rad)) <= 1e-12
    if float(np.linalg.norm(vpar)) > 1e-14:
        return math.inf
    if on_axis:
        raise StabilizerElement("generator fixes the base point")
    return math.pi / ns


def _axis_point(v, s) -> np.ndarray:
    """Point q with 2 s x q + v_perp = 0, orthogonal to s."""
    ns2 = float(s @ s)
    vperp = v - (v @ s) / ns2 * s
    return np.cross(s, vperp) / (2.0 * ns2)


# ------------------------------------------------------------------ carriers


@dataclass(frozen=True, eq=False)
class Carrier:
    """A complete orbit-like curve with a unit-speed (line) or angle (circle, helix) parameter.

    line:   P(t) = p + t d
    circle: P(t) = c + rho (cos t e0 + sin t (a x e0))
    helix:  P(t) = c + rho (cos t e0 + sin t (a x e0)) + k t a
    """

    kind: Literal["line", "circle", "helix"]
    p: np.ndarray
    a: np.ndarray
    e0: np.ndarray | None = None
    rho: float = 0.0
    k: float = 0.0

    def point(self, t):
        t = np.asarray(t, dtype=float)[..., None]
        if self.kind == "line":
            return self.p + t * self.a
        pt = self.p + self.rho * (np.cos(t) * self.e0 + np.sin(t) * np.cross(self.a, self.e0))
        return pt + self.k * t * self.a if self.kind == "helix" else pt

    @property
    def periodic(self) -> bool:
        return self.kind == "circle"


@dataclass(frozen=True, eq=False)
class Placement:
    """A curve as carrier(theta0 + kappa t) for t in its domain, with kappa > 0."""

    carrier: Carrier
    theta0: float
    kappa: float
    span: float  # kappa * domain length

    @property
    def interval(self) -> tuple[float, float]:
        return (self.theta0, self.theta0 + self.span)


def placement(c: Curve) -> Placement:
    if isinstance(c, Linear):
        return Placement(Carrier("line", c.x, c.v), 0.0, 1.0, c.l)
    if isinstance(c, Circular):
        rho = float(np.linalg.norm(c.r))
        return Placement(Carrier("circle", c.x, c.n, c.r / rho, rho), 0.0, 1.0, c.tau)
    v, s, x = c.v, c.s, c.x
    ns = float(np.linalg.norm(s))
    if ns == 0.0:
        nv = float(np.linalg.norm(v))
        return Placement(Carrier("line", x, v / nv), 0.0, nv, nv * c.l)
    k = s / ns
    q = _axis_point(v, s)
    foot = q + ((x - q) @ k) * k
    radial = x - foot
    rho = float(np.linalg.norm(radial))
    vpar = float(v @ k)
    if rho <= 1e-12:
        # on the rotation axis: pure drift along k
        return Placement(Carrier("line", x, k * math.copysign(1.0, vpar)), 0.0, abs(vpar), abs(vpar) * c.l)
    e0 = radial / rho
    w = 2.0 * ns
    if abs(vpar) <= 1e-14:
        return Placement(Carrier("circle", foot, k, e0, rho), 0.0, w, w * c.l)
    return Placement(Carrier("helix", foot, k, e0, rho, vpar / w), 0.0, w, w * c.l)


def kind_of(c: Curve) -> str:
    return placement(c).carrier.kind


def _same_point(x, y, tol=GEOM_TOL) -> bool:
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y))) <= tol


@dataclass(frozen=True)
class CarrierMap:
    """phi_g maps carrier 1 to carrier 2 with P2(eps t + b) = phi_g(P1(t)).

    shift_free: the parameter shift b can be varied continuously inside the group.
    stab_free: a continuum of group elements fixes carrier 2 pointwise.
    """

    eps: int
    b: float
    g: EuclElement
    shift_free: bool = False
    stab_free: bool = False


def _line_maps(sym: Symmetry, C1: Carrier, C2: Carrier) -> list[CarrierMap]:
    out = []
    d1, d2 = C1.a, C2.a
    for eps in (1, -1):
        if sym.tag in ("Homogeneous", "SemiHomogeneous"):
            if not _same_point(d1, eps * d2):
                continue
            u0 = C2.p - C1.p
            if sym.tag == "Homogeneous":
                out.append(CarrierMap(eps, 0.0, EuclElement(u0), shift_free=True))
                continue
            m = sym.normal
            dm = float(d2 @ m)
            if abs(dm) > GEOM_TOL:
                lam = -float(u0 @ m) / dm
                out.append(CarrierMap(eps, lam, EuclElement(u0 + lam * d2)))
            elif abs(float(u0 @ m)) <= GEOM_TOL:
                out.append(CarrierMap(eps, 0.0, EuclElement(u0), shift_free=True))
            continue
        if sym.tag == "SphericallySymmetric":
            t1 = -float(C1.p @ d1)
            t2 = -float(C2.p @ d2)
            f1 = C1.p + t1 * d1
            f2 = C2.p + t2 * d2
            n1, n2 = float(np.linalg.norm(f1)), float(np.linalg.norm(f2))
            if abs(n1 - n2) > GEOM_TOL:
                continue
            # foot point maps to foot point: P2(t2) = R P1(t1)
            b = t2 - eps * t1
            if n1 <= GEOM_TOL:
                R = frame_rotation(d1, _perp_unit(d1), eps * d2, _perp_unit(d2))
                out.append(CarrierMap(eps, b, EuclElement.from_rotation(np.zeros(3), R), stab_free=True))
            else:
                R = frame_rotation(d1, f1 / n1, eps * d2, f2 / n2)
                out.append(CarrierMap(eps, b, EuclElement.from_rotation(np.zeros(3), R)))
            continue
        R = frame_rotation(d1, _perp_unit(d1), eps * d2, _perp_unit(d2))
        u = C2.p - R @ C1.p
        out.append(CarrierMap(eps, 0.0, EuclElement.from_rotation(u, R), shift_free=True, stab_free=True))
    return out


def _angle_in(C: Carrier, e: np.ndarray) -> float:
    """Angle of the radial unit vector e in the frame (e0, a x e0) of C."""
    return math.atan2(float(e @ np.cross(C.a, C.e0)), float(e @ C.e0))


def _round_maps(sym: Symmetry, C1: Carrier, C2: Carrier) -> list[CarrierMap]:
    """Circle-to-circle and helix-to-helix maps."""
    out = []
    if abs(C1.rho - C2.rho) > GEOM_TOL or abs(C1.k - C2.k) > GEOM_TOL:
        return out
    helix = C1.kind == "helix"
    for eps in (1, -1):
        if sym.tag in ("Homogeneous", "SemiHomogeneous"):
            if not _same_point(C1.a, eps * C2.a):
                continue
            if helix:
                # translations along the axis slide the helix
                b = _angle_in(C2, C1.e0)
                u = C2.p + C2.k * b * C2.a - C1.p
                # any further screw needs a rotation, so only axial offsets matching the pitch
                out.append(CarrierMap(eps, b, EuclElement(u)))
                continue
            u = C2.p - C1.p
            if sym.tag == "SemiHomogeneous" and abs(float(u @ sym.normal)) > GEOM_TOL:
                continue
            b = _angle_in(C2, C1.e0)
            out.append(CarrierMap(eps, b, EuclElement(u)))
            continue
        if sym.tag == "SphericallySymmetric":
            if helix:
                continue
            c1, c2 = C1.p, C2.p
            h1, h2 = float(c1 @ C1.a), float(c2 @ C2.a)
            if abs(h1 - eps * h2) > GEOM_TOL:
                continue
            p1, p2 = c1 - h1 * C1.a, c2 - h2 * C2.a
            n1, n2 = float(np.linalg.norm(p1)), float(np.linalg.norm(p2))
            if abs(n1 - n2) > GEOM_TOL:
                continue
            if n1 <= GEOM_TOL:
                R = frame_rotation(C1.a, C1.e0, eps * C2.a, C2.e0)
                out.append(CarrierMap(eps, 0.0, EuclElement.from_rotation(np.zeros(3), R), shift_free=True))
            else:
                R = frame_rotation(C1.a, p1 / n1, eps * C2.a, p2 / n2)
                b = _angle_in(C2, R @ C1.e0)
                out.append(CarrierMap(eps, b, EuclElement.from_rotation(np.zeros(3), R)))
            continue
        R = frame_rotation(C1.a, C1.e0, eps * C2.a, C2.e0)
        u = C2.p - R @ C1.p
        out.append(CarrierMap(eps, 0.0, EuclElement.from_rotation(u, R), shift_free=True))
    return out


def carrier_maps(sym: Symmetry, C1: Carrier, C2: Carrier) -> list[CarrierMap]:
    """Group elements mapping carrier C1 onto carrier C2, one representative per (eps, b).

    For a continuous family of shifts a single representative is returned and flagged.
    """
    if C1.kind != C2.kind:
        return []
    if C1.kind == "line":
        maps = _line_maps(sym, C1, C2)
    else:
        maps = _round_maps(sym, C1, C2)
    good = []
    for m in maps:
        if not sym.contains(m.g):
            continue
        # verify the parameter relation on a few points
        ts = np.array([-1.0, 0.0, 0.7, 2.0])
        lhs = np.array([m.g.act(p) for p in C1.point(ts)])
        rhs = C2.point(m.eps * ts + m.b)
        if np.abs(lhs - rhs).max() > 1e-7:
            raise AssertionError("carrier map failed its own verification")
        good.append(m)
    return good


def slide(C: Carrier, delta: float) -> EuclElement:
    """Group motion moving C(t) to C(t + delta) (translation, rotation or screw)."""
    if C.kind == "line":
        return EuclElement(delta * C.a)
    R = rot_about(C.a, delta)
    u = C.p - R @ C.p
    if C.kind == "helix":
        u = u + C.k * delta * C.a
    return EuclElement.from_rotation(u, R)


def spin(C: Carrier, angle: float) -> EuclElement:
    """Rotation about a line carrier, fixing it pointwise."""
    R = rot_about(C.a, angle)
    return EuclElement.from_rotation(C.p - R @ C.p, R)


def adjust(m: CarrierMap, C2: Carrier, b_new: float) -> CarrierMap:
    """Change the shift of a shift-free map to b_new."""
    if not m.shift_free:
        raise ValueError("shift is rigid for this map")
    return CarrierMap(m.eps, b_new, slide(C2, b_new - m.b) @ m.g, True, m.stab_free)


# ---------------------------------------------------------------- equivalence


def _canonical(c: Curve) -> tuple:
    """Kind, start, end and a geometric fingerprint for oriented equivalence."""
    P = placement(c)
    C = P.carrier
    start = C.point(P.theta0)
    end = C.point(P.theta0 + P.span)
    if C.kind == "line":
        return ("line", start, end, C.a, np.array([P.span]))
    return (C.kind, start, end, C.a, np.array([C.rho, C.k, P.span]), C.p)


def equivalent(c1: Curve, c2: Curve, tol: float = 1e-10) -> bool:
    """Oriented reparametrization equivalence, decided on canonical geometry."""
    k1, k2 = _canonical(c1), _canonical(c2)
    if k1[0] != k2[0]:
        return False
    if k1[0] == "line":
        return all(np.abs(np.asarray(x) - np.asarray(y)).max() <= tol for x, y in zip(k1[1:], k2[1:]))
    # round carriers: same axis direction, centre, radius, pitch, angle and start
    return all(np.abs(np.asarray(x) - np.asarray(y)).max() <= tol for x, y in zip(k1[1:], k2[1:]))


def equivalent_sampled(c1: Curve, c2: Curve, n: int = 64, tol: float = SAMPLE_TOL) -> bool:
    """Sampling oracle: compare the curves at n points of their arclength fractions."""
    f = np.linspace(0.0, 1.0, n)
    a1, b1 = c1.domain
    a2, b2 = c2.domain
    y1 = evaluate(c1, a1 + f * (b1 - a1))
    y2 = evaluate(c2, a2 + f * (b2 - a2))
    return bool(np.abs(y1 - y2).max() <= tol)


# -------------------------------------------------------------- classification


def _through_origin(C: Carrier) -> bool:
    foot = C.p - (C.p @ C.a) * C.a
    return float(np.linalg.norm(foot)) <= GEOM_TOL


def classify(sym: Symmetry, c: Curve) -> CurveClass:
    C = placement(c).carrier
    if sym.tag == "HomogeneousIsotropic":
        return CurveClass.LAG
    if C.kind == "helix":
        return CurveClass.Unsupported
    if sym.tag == "Homogeneous":
        return CurveClass.LAG if C.kind == "line" else CurveClass.FreeNonSym
    if sym.tag == "SemiHomogeneous":
        if C.kind == "line" and abs(float(C.a @ sym.normal)) <= GEOM_TOL:
            return CurveClass.LAG
        return CurveClass.FreeNonSym
    if C.kind == "line":
        return CurveClass.FreeSym if _through_origin(C) else CurveClass.FreeNonSym
    off_axis = C.p - (C.p @ C.a) * C.a
    return CurveClass.LAG if float(np.linalg.norm(off_axis)) <= GEOM_TOL else CurveClass.FreeNonSym


# ------------------------------------------------------------ segment overlap


def _overlaps(lo1, hi1, lo2, hi2, periodic: bool) -> list[tuple[float, float, int]]:
    """Intersections of [lo1, hi1] with [lo2, hi2] (mod 2 pi if periodic), positive length."""
    out = []
    shifts = range(-2, 3) if periodic else (0,)
    for k in shifts:
        off = 2 * math.pi * k
        lo, hi = max(lo1 + off, lo2), min(hi1 + off, hi2)
        if hi - lo > 1e-9:
            out.append((lo, hi, k))
    return out


def _image_interval(m: CarrierMap, lo: float, hi: float) -> tuple[float, float]:
    a, b = m.eps * lo + m.b, m.eps * hi + m.b
    return (min(a, b), max(a, b))


def translate_overlap(sym: Symmetry, c1: Curve, c2: Curve) -> EuclElement | None:
    """Some g with phi_g o c1 sharing an open segment with c2, or None."""
    P1, P2 = placement(c1), placement(c2)
    if P1.carrier.kind == "helix" and sym.tag != "HomogeneousIsotropic":
        raise UnsupportedPair("helices are only handled for the Euclidean group")
    for m in carrier_maps(sym, P1.carrier, P2.carrier):
        lo, hi = P1.interval
        if m.shift_free:
            m = adjust(m, P2.carrier, P2.theta0 - m.eps * (lo if m.eps > 0 else hi))
        a, b = _image_interval(m, lo, hi)
        if _overlaps(a, b, *P2.interval, P1.carrier.periodic):
            return m.g
    return None


def congruences(sym: Symmetry, c1: Curve, c2: Curve, spins: int = 3) -> list[EuclElement]:
    """Group elements g with phi_g o c1 equivalent to c2 (orientation kept).

    When a continuum of elements fixes c2 pointwise, a few samples of it are included.
    """
    P1, P2 = placement(c1), placement(c2)
    if abs(P1.span - P2.span) > 1e-9:
        return []
    out = []
    for m in carrier_maps(sym, P1.carrier, P2.carrier):
        if m.eps != 1:
            continue
        if m.shift_free:
            m = adjust(m, P2.carrier, P2.theta0 - P1.theta0)
        gap = P1.theta0 + m.b - P2.theta0
        if P1.carrier.periodic:
            gap = (gap + math.pi) % (2 * math.pi) - math.pi
        if abs(gap) > 1e-9:
            continue
        out.append(m.g)
        if m.stab_free:
            out.extend(spin(P2.carrier, 2 * math.pi * (k + 1) / (spins + 1)) @ m.g for k in range(spins))
    return out


def self_maps(sym: Symmetry, c: Curve) -> list[CarrierMap]:
    P = placement(c)
    return carrier_maps(sym, P.carrier, P.carrier)


def is_free_segment(sym: Symmetry, c: Curve) -> bool:
    """No group translate shares an open segment with c unless it reproduces c."""
    P = placement(c)
    lo, hi = P.interval
    for m in carrier_maps(sym, P.carrier, P.carrier):
        if m.shift_free:
            return False
        a, b = _image_interval(m, lo, hi)
        for (_, _, k) in _overlaps(a, b, lo, hi, P.carrier.periodic):
            if not (m.eps == 1 and abs(m.b + 2 * math.pi * k) <= 1e-9):
                return False
    return True


@dataclass(frozen=True)
class Segment:
    """gamma on [k0, k1]; when g is set, gamma|K ~ phi_g o delta|[a, b] (a > b means inverse)."""

    k0: float
    k1: float
    g: EuclElement | None = None
    a: float = 0.0
    b: float = 0.0


@dataclass(frozen=True)
class Decomposition:
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    @property
    def breakpoints(self) -> list[float]:
        if not self.segments:
            return []
        return [s.k0 for s in self.segments] + [self.segments[-1].k1]

    @property
    def covered(self) -> bool:
        return any(s.g is not None for s in self.segments)


def free_decompose(sym: Symmetry, gamma: Curve, delta: Curve) -> Decomposition:
    """Split gamma into pieces that are translates of sub-segments of delta (or no match)."""
    Pg, Pd = placement(gamma), placement(delta)
    if "helix" in (Pg.carrier.kind, Pd.carrier.kind):
        raise UnsupportedPair("helices have no free segments here")
    lo_d, hi_d = Pd.interval
    lo_g, hi_g = Pg.interval
    if not is_free_segment(sym, delta):
        if Pd.carrier.kind == "line" and sym.tag in TILING_GROUPS:
            return _tile(sym, gamma, delta)
        raise UnsupportedPair("delta is not a free segment for this symmetry")
    pieces = []
    for m in carrier_maps(sym, Pd.carrier, Pg.carrier):
        if m.shift_free:
            raise UnsupportedPair("carrier congruences form a continuum")
        a, b = _image_interval(m, lo_d, hi_d)
        for (x, y, k) in _overlaps(a, b, lo_g, hi_g, Pg.carrier.periodic):
            # gamma carrier param x..y corresponds to delta carrier param eps (theta - b - 2 pi k)
            th0 = m.eps * (x - 2 * math.pi * k - m.b)
            th1 = m.eps * (y - 2 * math.pi * k - m.b)
            # convert carrier params to curve params
            t0 = (x - Pg.theta0) / Pg.kappa
            t1 = (y - Pg.theta0) / Pg.kappa
            da = (th0 - Pd.theta0) / Pd.kappa
            db = (th1 - Pd.theta0) / Pd.kappa
            pieces.append(Segment(t0, t1, m.g, da, db))
    pieces.sort(key=lambda s: s.k0)
    for s1, s2 in zip(pieces, pieces[1:]):
        if s2.k0 < s1.k1 - 1e-9:
            raise UnsupportedPair("translates of delta overlap on gamma")
    a0, a1 = gamma.domain
    segs = []
    cur = a0
    for s in pieces:
        k0 = max(s.k0, a0)
        if k0 - cur > 1e-9:
            segs.append(Segment(cur, k0))
        segs.append(Segment(k0, min(s.k1, a1), s.g, s.a, s.b))
        cur = min(s.k1, a1)
    if a1 - cur > 1e-9:
        segs.append(Segment(cur, a1))
    if segs:
        first, last = segs[0], segs[-1]
        segs[0] = Segment(a0, first.k1, first.g, first.a, first.b)
        segs[-1] = Segment(segs[-1].k0, a1, last.g, last.a, last.b)
    return Decomposition(tuple(segs))


TILING_GROUPS = ("Homogeneous", "SemiHomogeneous", "HomogeneousIsotropic")


def _tile(sym: Symmetry, gamma: Curve, delta: Curve) -> Decomposition:
    """Cover a line by consecutive translates of delta, starting at gamma's start.

    Used when delta slides continuously along its own line, so the free decomposition
    is not unique; the tiling anchored at the start of gamma is the canonical choice.
    """
    Pg, Pd = placement(gamma), placement(delta)
    maps = [m for m in carrier_maps(sym, Pd.carrier, Pg.carrier) if m.shift_free]
    if not maps:
        return Decomposition((Segment(*gamma.domain),))
    m = maps[0]
    lo_d, hi_d = Pd.interval
    lo_g, hi_g = Pg.interval
    L = hi_d - lo_d
    segs = []
    start = lo_g
    while hi_g - start > 1e-9:
        stop = min(start + L, hi_g)
        if hi_g - stop <= 1e-9:
            stop = hi_g
        # delta parameter matching the piece start
        d0 = lo_d if m.eps == 1 else hi_d
        d1 = d0 + m.eps * (stop - start)
        mm = adjust(m, Pg.carrier, start - m.eps * d0)
        t0 = (start - Pg.theta0) / Pg.kappa
        t1 = (stop - Pg.theta0) / Pg.kappa
        segs.append(Segment(t0, t1, mm.g, (d0 - Pd.theta0) / Pd.kappa, (d1 - Pd.theta0) / Pd.kappa))
        start = stop
    return Decomposition(tuple(segs))


def sub_curve(c: Curve, a: float, b: float) -> Curve:
    """c|[a, b], where a > b denotes the inverse of c|[b, a]."""
    if a < b:
        return restrict(c, a, b)
    return invert(restrict(c, b, a))


# --------------------------------------------------------------------- json


def curve_to_json(c: Curve) -> dict:
    if isinstance(c, Linear):
        return {"type": "Linear", "x": c.x.tolist(), "v": c.v.tolist(), "l": c.l}
    if isinstance(c, Circular):
        return {"type": "Circular", "x": c.x.tolist(), "n": c.n.tolist(), "r": c.r.tolist(), "tau": c.tau}
    return {"type": "LieAlgGen", "x": c.x.tolist(), "v": c.v.tolist(), "s": c.s.tolist(), "l": c.l}


def curve_from_json(d: dict) -> Curve:
    t = d["type"]
    if t == "Linear":
        return Linear(d["x"], d["v"], d["l"])
    if t == "Circular":
        return Circular(d["x"], d["n"], d["r"], d["tau"])
    if t == "LieAlgGen":
        return LieAlgGen(d["x"], d["v"], d["s"], d["l"])
    raise ValueError(f"unknown curve type {t!r}")
