"""Invariant connections on the trivial bundle R^3 x SU(2) and their reduced data.

Every connection handled here has the form

    omega_(x, s)(v, xi) = Ad_{s^-1}(A(x) v) + xi,

where xi = s^-1 sigma is the body coordinate of the fiber tangent and A(x) is a 3x3
matrix acting in su(2) coordinates. Each family differs only in A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import su2core as su
from .curvealg import EuclElement, Symmetry
from .su2core import AlgElement2, GroupElement2

MAX_CONN_DEGREE = 8
MAX_FIELD_DEGREE = 4


class NotTransitive(ValueError):
    pass


class NonPolynomial(ValueError):
    pass


def cross_matrix(x) -> np.ndarray:
    """[x]_x with [x]_x v = x cross v; broadcasts over leading axes."""
    x = np.asarray(x, dtype=float)
    z = np.zeros_like(x[..., 0])
    return np.stack(
        [
            np.stack([z, -x[..., 2], x[..., 1]], -1),
            np.stack([x[..., 2], z, -x[..., 0]], -1),
            np.stack([-x[..., 1], x[..., 0], z], -1),
        ],
        -2,
    )


def _coeffs(c) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=float)).copy()
    if not np.all(np.isfinite(a)):
        raise ValueError("coefficients must be finite")
    a.setflags(write=False)
    return a


# ------------------------------------------------------------------ families


@dataclass(frozen=True, eq=False)
class Isotropic:
    """omega^c: A(x) v = c mu(v)."""

    c: float

    def matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.c * np.eye(3), x.shape[:-1] + (3, 3)).copy()


@dataclass(frozen=True, eq=False)
class Spherical:
    """omega^{abc} with a = f(|x|^2), b = g(|x|^2), c = h(|x|^2).

    A(x) v = a mu(v) + b [mu(x), mu(v)] + c [mu(x), [mu(x), mu(v)]],
    i.e. a v + 2 b (x cross v) + 4 c x cross (x cross v) in coordinates.
    Coefficient lists are in increasing powers of |x|^2.
    """

    f: np.ndarray = field(default_factory=lambda: np.zeros(1))
    g: np.ndarray = field(default_factory=lambda: np.zeros(1))
    h: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        for name in ("f", "g", "h"):
            a = _coeffs(getattr(self, name))
            if len(a) - 1 > MAX_CONN_DEGREE:
                raise ValueError("polynomial degree above the bound")
            object.__setattr__(self, name, a)

    def profile(self, x):
        r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
        return tuple(np.polynomial.polynomial.polyval(r2, p) for p in (self.f, self.g, self.h))

    def matrix(self, x) -> np.ndarray:
        return _spherical_matrix(x, *self.profile(x))


@dataclass(frozen=True, eq=False)
class SphericalProfile:
    """A rotation-covariant field built from arbitrary scalar profiles a, b, c of x.

    Not necessarily smooth; used to probe the trivial-bundle conditions.
    """

    a: Callable
    b: Callable = lambda x: 0.0
    c: Callable = lambda x: 0.0

    def profile(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, 3)
        vals = [np.array([fn(p) for p in flat], dtype=float).reshape(x.shape[:-1]) for fn in (self.a, self.b, self.c)]
        return tuple(vals)

    def matrix(self, x) -> np.ndarray:
        return _spherical_matrix(x, *self.profile(x))


def _spherical_matrix(x, a, b, c) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    X = cross_matrix(x)
    a, b, c = (np.asarray(t, dtype=float)[..., None, None] for t in (a, b, c))
    return a * np.eye(3) + 2.0 * b * X + 4.0 * c * (X @ X)


@dataclass(frozen=True, eq=False)
class Homogeneous:
    """omega^psi: A(x) = psi, constant; columns are psi(e_j)."""

    psi: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.psi, dtype=float).reshape(3, 3).copy()
        p.setflags(write=False)
        object.__setattr__(self, "psi", p)

    def matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.psi, x.shape[:-1] + (3, 3)).copy()


@dataclass(frozen=True, eq=False)
class SemiHomogeneous:
    """psi_w(g, wdot) = A(w) g + b(w) wdot for the plane span(w1, w2) and w = <x, w3>.

    A_coeffs[k] is the 3x2 coefficient of w^k, b_coeffs[k] the 3-vector coefficient of w^k.
    """

    w1: np.ndarray
    w2: np.ndarray
    A_coeffs: np.ndarray
    b_coeffs: np.ndarray

    def __post_init__(self):
        sym = Symmetry("SemiHomogeneous", self.w1, self.w2)
        object.__setattr__(self, "w1", sym.w1)
        object.__setattr__(self, "w2", sym.w2)
        A = np.asarray(self.A_coeffs, dtype=float).reshape(-1, 3, 2).copy()
        b = np.asarray(self.b_coeffs, dtype=float).reshape(-1, 3).copy()
        if max(len(A), len(b)) - 1 > MAX_CONN_DEGREE:
            raise ValueError("polynomial degree above the bound")
        for arr in (A, b):
            arr.setflags(write=False)
        object.__setattr__(self, "A_coeffs", A)
        object.__setattr__(self, "b_coeffs", b)

    @property
    def w3(self) -> np.ndarray:
        return np.cross(self.w1, self.w2)

    @property
    def symmetry(self) -> Symmetry:
        return Symmetry("SemiHomogeneous", self.w1, self.w2)

    def matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = x @ self.w3
        powA = y[..., None] ** np.arange(len(self.A_coeffs))
        powb = y[..., None] ** np.arange(len(self.b_coeffs))
        A = np.einsum("...k,kij->...ij", powA, self.A_coeffs)
        b = np.einsum("...k,ki->...i", powb, self.b_coeffs)
        W = np.stack([self.w1, self.w2])  # 2x3
        return A @ W + b[..., :, None] * self.w3


InvariantConnection = Isotropic | Spherical | Homogeneous | SemiHomogeneous


def invariance_group(omega) -> str:
    """Tag of the largest symmetry group omega is built for."""
    return {
        Isotropic: "HomogeneousIsotropic",
        Spherical: "SphericallySymmetric",
        SphericalProfile: "SphericallySymmetric",
        Homogeneous: "Homogeneous",
        SemiHomogeneous: "SemiHomogeneous",
    }[type(omega)]


def is_invariant_under(omega, sym: Symmetry) -> bool:
    """Whether the family is invariant for every element of sym by construction."""
    kind = invariance_group(omega)
    if kind == "HomogeneousIsotropic":
        return True
    if kind == "SphericallySymmetric":
        return sym.tag == "SphericallySymmetric"
    if kind == "Homogeneous":
        return sym.tag in ("Homogeneous", "SemiHomogeneous")
    if sym.tag != "SemiHomogeneous":
        return False
    return abs(abs(float(sym.normal @ omega.w3)) - 1.0) <= 1e-12


# ---------------------------------------------------------------- evaluation


def eval_conn(omega, point, tangent) -> AlgElement2:
    """omega at point (x, s) on the tangent (v, xi), xi in body coordinates s^-1 sigma."""
    x, s = point
    v, xi = tangent
    xi = xi.v if isinstance(xi, AlgElement2) else np.asarray(xi, dtype=float)
    base = omega.matrix(np.asarray(x, dtype=float)) @ np.asarray(v, dtype=float)
    return AlgElement2(su.rotation_matrix(su.inv(s)) @ base + xi)


def pullback_residual(omega, sym: Symmetry, g: EuclElement, point, tangent) -> float:
    """|(Phi_g^* omega - omega)(tangent)| at point.

    Phi_g maps (x, s) to (u + R x, sigma s); its differential maps (v, xi) to (R v, xi)
    because right-translated coordinates are unchanged by left multiplication.
    """
    del sym  # the action formula is the same for every subgroup
    x, s = point
    v, xi = tangent
    moved = (g.act(x), su.mul(g.sigma, s))
    lhs = eval_conn(omega, moved, (g.R @ np.asarray(v, dtype=float), xi))
    rhs = eval_conn(omega, point, tangent)
    return float(np.linalg.norm(lhs.v - rhs.v))


def fundamental(gen, point) -> tuple[np.ndarray, np.ndarray]:
    """Fundamental vector of gen = (v, s) at (x, sigma): base part and body part."""
    v, s = (np.asarray(a, dtype=float) for a in gen)
    x, sigma = point
    return v + 2.0 * np.cross(s, x), su.rotation_matrix(su.inv(sigma)) @ s


def wang_reduce(omega, sym: Symmetry) -> np.ndarray:
    """psi = Phi_p^* omega at p = (0, 1) on a basis of the symmetry algebra.

    Homogeneous: 3x3 (translations). HomogeneousIsotropic: 3x6, columns (e_1..e_3, 0)
    followed by (0, e_1..e_3).
    """
    M0 = omega.matrix(np.zeros(3))
    if sym.tag == "Homogeneous":
        return M0.copy()
    if sym.tag == "HomogeneousIsotropic":
        return np.hstack([M0, np.eye(3)])
    raise NotTransitive(f"{sym.tag} does not act transitively on R^3")


@dataclass(frozen=True)
class WangReport:
    cond_a: float
    cond_b: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.cond_a <= self.tol and self.cond_b <= self.tol


def wang_check(psi, sym: Symmetry, rng: np.random.Generator | None = None, samples: int = 32, tol: float = 1e-10) -> WangReport:
    """Generalized Wang conditions a) and b) at p = (0, 1), sampling the stabilizer."""
    psi = np.asarray(psi, dtype=float)
    if sym.tag == "Homogeneous":
        # trivial stabilizer: both conditions are vacuous
        return WangReport(0.0, 0.0, tol)
    if sym.tag != "HomogeneousIsotropic":
        raise NotTransitive(f"{sym.tag} does not act transitively on R^3")
    rng = np.random.default_rng(0) if rng is None else rng
    psi = psi.reshape(3, 6)
    cond_a = float(np.abs(psi[:, 3:] - np.eye(3)).max())
    # stabilizer of 0 is {(0, sigma)}, Ad acts as R on both summands, fiber map is sigma
    worst = 0.0
    for q in su.haar2_batch(rng, samples):
        R = su.rotation_matrix(GroupElement2.from_quat(q))
        RR = np.block([[R, np.zeros((3, 3))], [np.zeros((3, 3)), R]])
        worst = max(worst, float(np.abs(psi @ RR - R @ psi).max()))
    return WangReport(cond_a, worst, tol)


def levi_civita() -> np.ndarray:
    e = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        e[i, j, k], e[i, k, j] = 1.0, -1.0
    return e


def equiv_constraints(pairs=None) -> np.ndarray:
    """Rows of [tau_i, psi(e_j)] = 2 eps_ijk psi(e_k) on the unknown psi (column-major).

    With M_j = psi(e_j) this reads e_i x M_j - eps_ijk M_k = 0, giving 27 rows for 9 unknowns.
    """
    eps = levi_civita()
    pairs = [(i, j) for i in range(3) for j in range(3)] if pairs is None else pairs
    rows = []
    for i, j in pairs:
        block = np.zeros((3, 9))
        block[:, 3 * j : 3 * j + 3] += cross_matrix(np.eye(3)[i])
        for k in range(3):
            block[:, 3 * k : 3 * k + 3] -= eps[i, j, k] * np.eye(3)
        rows.append(block)
    return np.vstack(rows)


@dataclass(frozen=True)
class Nullspace:
    dim: int
    basis: list
    singular_values: np.ndarray


def equiv_nullspace(constraints: np.ndarray | None = None, tol: float = 1e-10) -> Nullspace:
    """Null space of the equivariance system via SVD; basis as 3x3 matrices."""
    C = equiv_constraints() if constraints is None else np.asarray(constraints, dtype=float)
    _, sv, vt = np.linalg.svd(C)
    full = np.zeros(C.shape[1])
    full[: len(sv)] = sv
    null = np.nonzero(full <= tol)[0]
    basis = [vt[i].reshape(3, 3).T for i in null]
    return Nullspace(len(null), basis, np.sort(full))


# ------------------------------------------------------ trivial-bundle checks


@dataclass(frozen=True)
class TrivBundleReport:
    kernel: float
    covariance: float
    equivariance: float
    origin: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.kernel, self.covariance, self.equivariance, self.origin) <= self.tol


def _reduced_psi(omega, x, g, v):
    """psi_x(g, v) = omega_(x, 1)(g~ + v) for g in su(2), v in T_x R^3."""
    return omega.matrix(x) @ (2.0 * np.cross(g, x) + v) + g


def trivbundle_check(omega, rng: np.random.Generator | None = None, samples: int = 32, tol: float = 1e-9) -> TrivBundleReport:
    """Conditions i) to iii) for the reduced map of a rotation-invariant field.

    i)   g~(x, 1) + v = 0 in the base forces psi_x(g, v) = g.
    ii)  A(sigma x)(R v) = Ad_sigma A(x) v for stabilizer-compatible sigma.
    iii) psi_{sigma x}(Ad_sigma g, R v) = Ad_sigma psi_x(g, v).
    A further check compares A near the origin with A(0) on a shrinking radius, so a
    profile that is singular or discontinuous at 0 is rejected.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    kern = cov = eqv = 0.0
    for k in range(samples):
        x = rng.standard_normal(3) * (0.0 if k == 0 else 1.0)
        g = rng.standard_normal(3)
        v = rng.standard_normal(3)
        kern = max(kern, float(np.linalg.norm(_reduced_psi(omega, x, g, -2.0 * np.cross(g, x)) - g)))
        sigma = su.haar2(rng)
        if k > 0 and k % 2 == 0:
            # stabilizer torus of x: rotations about x
            sigma = su.exp2(rng.uniform(-math.pi, math.pi) * x / np.linalg.norm(x))
        R = su.rotation_matrix(sigma)
        cov = max(cov, float(np.linalg.norm(omega.matrix(R @ x) @ (R @ v) - R @ (omega.matrix(x) @ v))))
        lhs = _reduced_psi(omega, R @ x, R @ g, R @ v)
        eqv = max(eqv, float(np.linalg.norm(lhs - R @ _reduced_psi(omega, x, g, v))))
    A0 = omega.matrix(np.zeros(3))
    origin = 0.0
    for rho in (1e-11, 1e-12):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        with np.errstate(all="ignore"):
            d = float(np.abs(omega.matrix(rho * n) - A0).max())
        origin = max(origin, d if np.isfinite(d) else math.inf)
    return TrivBundleReport(kern, cov, eqv, origin, tol)


# --------------------------------------------------------------- gauge fields

Poly = dict  # exponent tuple -> float


def _pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0.0) + c1 * c2
    return out


def _padd(p: Poly, q: Poly, scale: float = 1.0) -> Poly:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0.0) + scale * c
    return out


def _ppow(p: Poly, n: int) -> Poly:
    out: Poly = {(0, 0, 0): 1.0}
    for _ in range(n):
        out = _pmul(out, p)
    return out


def _linear(w) -> Poly:
    return {tuple(int(i == k) for i in range(3)): float(w[k]) for k in range(3) if w[k] != 0.0}


@dataclass(frozen=True, eq=False)
class GaugeField:
    """A(x) = sum_e x^e C_e with 3x3 coefficient matrices C_e (su(2) coordinates)."""

    terms: dict

    def __post_init__(self):
        clean = {}
        for e, C in self.terms.items():
            e = tuple(int(a) for a in e)
            if len(e) != 3 or min(e) < 0:
                raise ValueError("exponents must be 3 nonnegative integers")
            C = np.asarray(C, dtype=float).reshape(3, 3)
            if np.any(C != 0.0):
                clean[e] = clean.get(e, np.zeros((3, 3))) + C
        object.__setattr__(self, "terms", clean)
        if self.degree > MAX_FIELD_DEGREE:
            raise NonPolynomial(f"degree {self.degree} exceeds {MAX_FIELD_DEGREE}")

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @classmethod
    def zero(cls) -> "GaugeField":
        return cls({})

    @classmethod
    def constant(cls, M) -> "GaugeField":
        return cls({(0, 0, 0): M})

    def matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (3, 3))
        for e, C in self.terms.items():
            mono = np.prod(x ** np.asarray(e), axis=-1)
            out = out + mono[..., None, None] * C
        return out

    def __call__(self, x, v) -> AlgElement2:
        return AlgElement2(self.matrix(x) @ np.asarray(v, dtype=float))


def _matrix_poly(entries) -> dict:
    """3x3 grid of Poly -> monomial dict of 3x3 matrices."""
    out: dict = {}
    for i in range(3):
        for j in range(3):
            for e, c in entries[i][j].items():
                if c != 0.0:
                    out.setdefault(e, np.zeros((3, 3)))[i, j] += c
    return out


def to_gauge_field(omega) -> GaugeField:
    """Pullback of omega along the section x -> (x, 1) as a polynomial field."""
    if isinstance(omega, (Isotropic, Homogeneous)):
        return GaugeField.constant(omega.matrix(np.zeros(3)))
    if isinstance(omega, Spherical):
        r2 = _padd(_padd(_ppow(_linear([1, 0, 0]), 2), _ppow(_linear([0, 1, 0]), 2)), _ppow(_linear([0, 0, 1]), 2))

        def scalar(coeffs) -> Poly:
            p: Poly = {}
            for k, a in enumerate(coeffs):
                if a != 0.0:
                    p = _padd(p, _ppow(r2, k), a)
            return p

        pf, pg, ph = scalar(omega.f), scalar(omega.g), scalar(omega.h)
        xs = [_linear(np.eye(3)[k]) for k in range(3)]
        # [x]_x entries as polynomials
        X = [[{}, _padd({}, xs[2], -1.0), xs[1]], [xs[2], {}, _padd({}, xs[0], -1.0)], [_padd({}, xs[1], -1.0), xs[0], {}]]
        X2 = [[{} for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    X2[i][j] = _padd(X2[i][j], _pmul(X[i][k], X[k][j]))
        entries = [[{} for _ in range(3)] for _ in range(3)]
        for i in range(3):
            for j in range(3):
                if i == j:
                    entries[i][j] = _padd(entries[i][j], pf)
                entries[i][j] = _padd(entries[i][j], _pmul(pg, X[i][j]), 2.0)
                entries[i][j] = _padd(entries[i][j], _pmul(ph, X2[i][j]), 4.0)
        return GaugeField(_matrix_poly(entries))
    if isinstance(omega, SemiHomogeneous):
        y = _linear(omega.w3)
        W = np.stack([omega.w1, omega.w2])
        terms: dict = {}
        for k, Ak in enumerate(omega.A_coeffs):
            for e, c in _ppow(y, k).items():
                terms[e] = terms.get(e, np.zeros((3, 3))) + c * (Ak @ W)
        for k, bk in enumerate(omega.b_coeffs):
            for e, c in _ppow(y, k).items():
                terms[e] = terms.get(e, np.zeros((3, 3))) + c * np.outer(bk, omega.w3)
        return GaugeField(terms)
    raise NonPolynomial(f"{type(omega).__name__} has no polynomial gauge field")


# ---------------------------------------------------------------------- json


def conn_to_json(omega) -> dict:
    if isinstance(omega, Isotropic):
        return {"family": "Isotropic", "c": omega.c}
    if isinstance(omega, Spherical):
        return {"family": "Spherical", "f": omega.f.tolist(), "g": omega.g.tolist(), "h": omega.h.tolist()}
    if isinstance(omega, Homogeneous):
        return {"family": "Homogeneous", "psi": omega.psi.tolist()}
    if isinstance(omega, SemiHomogeneous):
        return {
            "family": "SemiHomogeneous",
            "w1": omega.w1.tolist(),
            "w2": omega.w2.tolist(),
            "A": omega.A_coeffs.tolist(),
            "b": omega.b_coeffs.tolist(),
        }
    raise TypeError(f"cannot serialize {type(omega).__name__}")


def conn_from_json(d: dict):
    fam = d["family"]
    if fam == "Isotropic":
        return Isotropic(float(d["c"]))
    if fam == "Spherical":
        return Spherical(d.get("f", [0.0]), d.get("g", [0.0]), d.get("h", [0.0]))
    if fam == "Homogeneous":
        return Homogeneous(d["psi"])
    if fam == "SemiHomogeneous":
        return SemiHomogeneous(d["w1"], d["w2"], d["A"], d["b"])
    raise ValueError(f"unknown connection family {fam!r}")
