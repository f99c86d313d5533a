"""SU(2) and su(2) arithmetic in the basis (1, tau1, tau2, tau3).

The constant matrices are

    tau1 = [[0, -i], [-i, 0]],  tau2 = [[0, -1], [1, 0]],  tau3 = [[-i, 0], [0, i]],

so that tau_i tau_j = -delta_ij + eps_ijk tau_k. A group element a*1 + sum b_i tau_i
therefore multiplies like the unit quaternion (a, b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

UNIT_TOL = 1e-12
PRED_TOL = 1e-10
BRANCH_TOL = 1e-9

TAU = np.array(
    [
        [[0, -1j], [-1j, 0]],
        [[0, -1], [1, 0]],
        [[-1j, 0], [0, 1j]],
    ],
    dtype=complex,
)


class AntipodalBranch(ValueError):
    """log2 was asked for the axis of -1."""


class NotCommuting(ValueError):
    """Two group elements that do not commute have no common torus."""


class CentralPair(ValueError):
    """Both elements are central, so every torus contains them."""


class NotOrthogonal(ValueError):
    """Flip axis is not orthogonal to the torus axis."""


def _vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(3)
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class AlgElement2:
    """mu(v) = sum v_i tau_i in su(2)."""

    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _vec(self.v))

    def matrix(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.v, TAU)

    def __add__(self, other: "AlgElement2") -> "AlgElement2":
        return AlgElement2(self.v + other.v)

    def __neg__(self) -> "AlgElement2":
        return AlgElement2(-self.v)

    def __mul__(self, t: float) -> "AlgElement2":
        return AlgElement2(t * self.v)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"AlgElement2({self.v.tolist()})"


def bracket(x: AlgElement2, y: AlgElement2) -> AlgElement2:
    """[mu(a), mu(b)] = 2 mu(a x b)."""
    return AlgElement2(2.0 * np.cross(x.v, y.v))


@dataclass(frozen=True, eq=False)
class GroupElement2:
    """Unit element a*1 + mu(b) of SU(2); renormalized on construction."""

    a: float
    b: np.ndarray

    def __post_init__(self):
        q = np.concatenate([[float(self.a)], np.asarray(self.b, dtype=float).reshape(3)])
        n = np.linalg.norm(q)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("cannot normalize a zero or non-finite quaternion")
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"not a unit element (norm {n})")
        q = q / n
        object.__setattr__(self, "a", float(q[0]))
        object.__setattr__(self, "b", _vec(q[1:]))

    @classmethod
    def from_quat(cls, q) -> "GroupElement2":
        q = np.asarray(q, dtype=float)
        return cls(q[0], q[1:])

    @classmethod
    def identity(cls) -> "GroupElement2":
        return cls(1.0, (0.0, 0.0, 0.0))

    @property
    def quat(self) -> np.ndarray:
        return np.concatenate([[self.a], self.b])

    def matrix(self) -> np.ndarray:
        return self.a * np.eye(2, dtype=complex) + np.einsum("i,ijk->jk", self.b, TAU)

    def __matmul__(self, other: "GroupElement2") -> "GroupElement2":
        return mul(self, other)

    def __neg__(self) -> "GroupElement2":
        return GroupElement2(-self.a, -self.b)

    def __repr__(self) -> str:
        return f"GroupElement2(a={self.a!r}, b={self.b.tolist()!r})"


ONE = GroupElement2.identity()


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Raw quaternion product on arrays of shape (..., 4)."""
    a1, b1 = p[..., 0], p[..., 1:]
    a2, b2 = q[..., 0], q[..., 1:]
    a = a1 * a2 - np.sum(b1 * b2, axis=-1)
    b = a1[..., None] * b2 + a2[..., None] * b1 + np.cross(b1, b2)
    return np.concatenate([a[..., None], b], axis=-1)


def qconj(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def mul(x: GroupElement2, y: GroupElement2) -> GroupElement2:
    """Group product, renormalized."""
    return GroupElement2.from_quat(qmul(x.quat, y.quat))


def inv(x: GroupElement2) -> GroupElement2:
    return GroupElement2(x.a, -x.b)


def prod(*xs: GroupElement2) -> GroupElement2:
    """Left-to-right product x0 x1 ... xn."""
    out = ONE
    for x in xs:
        out = mul(out, x)
    return out


def exp2(v) -> GroupElement2:
    """exp(mu(v)) = cos|v| + sin|v| mu(v/|v|)."""
    v = np.asarray(v.v if isinstance(v, AlgElement2) else v, dtype=float)
    t = float(np.linalg.norm(v))
    if t == 0.0:
        return ONE
    return GroupElement2(math.cos(t), math.sin(t) / t * v)


def exp2_batch(v: np.ndarray) -> np.ndarray:
    """Vectorized exp2 returning raw quaternions of shape (n, 4)."""
    v = np.asarray(v, dtype=float)
    t = np.linalg.norm(v, axis=-1)
    safe = np.where(t > 0, t, 1.0)
    scale = np.where(t > 0, np.sin(t) / safe, 1.0)
    return np.concatenate([np.cos(t)[..., None], scale[..., None] * v], axis=-1)


def log2(x: GroupElement2) -> AlgElement2:
    """Principal logarithm with |v| in [0, pi)."""
    nb = float(np.linalg.norm(x.b))
    if x.a < 0 and math.hypot(x.a + 1.0, nb) < BRANCH_TOL:
        raise AntipodalBranch("log2 is undefined at -1")
    if nb == 0.0:
        return AlgElement2(np.zeros(3))
    t = math.atan2(nb, x.a)
    return AlgElement2(t / nb * x.b)


def distance(x: GroupElement2, y: GroupElement2) -> float:
    """Operator-norm distance of the 2x2 matrices (equals the R^4 distance)."""
    return float(np.linalg.norm(x.quat - y.quat))


def is_central(x: GroupElement2, tol: float = BRANCH_TOL) -> bool:
    return float(np.linalg.norm(x.b)) <= tol


@dataclass(frozen=True, eq=False)
class Rotation3:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(3, 3)
        if np.abs(m.T @ m - np.eye(3)).max() > 1e-9 or abs(np.linalg.det(m) - 1.0) > 1e-9:
            raise ValueError("not a proper rotation")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __call__(self, x) -> np.ndarray:
        return self.m @ np.asarray(x, dtype=float)


def rotation_matrix(x: GroupElement2) -> np.ndarray:
    """3x3 matrix of the covering map, by the quaternion rotation formula."""
    a, (b1, b2, b3) = x.a, x.b
    return np.array(
        [
            [a * a + b1 * b1 - b2 * b2 - b3 * b3, 2 * (b1 * b2 - a * b3), 2 * (b1 * b3 + a * b2)],
            [2 * (b1 * b2 + a * b3), a * a - b1 * b1 + b2 * b2 - b3 * b3, 2 * (b2 * b3 - a * b1)],
            [2 * (b1 * b3 - a * b2), 2 * (b2 * b3 + a * b1), a * a - b1 * b1 - b2 * b2 + b3 * b3],
        ]
    )


def covering(x: GroupElement2) -> Rotation3:
    """The double cover SU(2) -> SO(3); rotates by 2*atan2(|b|, a) about b."""
    return Rotation3(rotation_matrix(x))


def lift(m) -> GroupElement2:
    """One of the two preimages of a rotation matrix under the covering map."""
    m = m.m if isinstance(m, Rotation3) else np.asarray(m, dtype=float)
    x, y, z, w = Rotation.from_matrix(m).as_quat()
    return GroupElement2(w, (x, y, z))


def adjoint(x: GroupElement2, v) -> AlgElement2:
    """Ad_x(mu(v)) = mu(covering(x) v)."""
    v = v.v if isinstance(v, AlgElement2) else np.asarray(v, dtype=float)
    return AlgElement2(rotation_matrix(x) @ v)


def conj(h: GroupElement2, s: GroupElement2) -> GroupElement2:
    """alpha_h(s) = h s h^-1."""
    return mul(mul(h, s), inv(h))


def torus_axis(s: GroupElement2, s2: GroupElement2) -> np.ndarray:
    """Unit axis n of the maximal torus H_n containing both commuting elements.

    The sign of n is not canonical; either unit axis is a valid answer.
    """
    comm = distance(mul(s, s2), mul(s2, s))
    if comm > PRED_TOL:
        raise NotCommuting(f"commutator defect {comm:.3e}")
    n1, n2 = np.linalg.norm(s.b), np.linalg.norm(s2.b)
    if n1 <= BRANCH_TOL and n2 <= BRANCH_TOL:
        raise CentralPair("both elements are +-1")
    b = s.b if n1 >= n2 else s2.b
    return b / np.linalg.norm(b)


def torus_flip(n, m) -> GroupElement2:
    """h = exp2(pi/2 m) with h s h^-1 = s^-1 for every s in H_n."""
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    if abs(float(n @ m)) > PRED_TOL:
        raise NotOrthogonal("flip axis must be orthogonal to the torus axis")
    return exp2(0.5 * math.pi * m / np.linalg.norm(m))


def haar2_batch(rng: np.random.Generator, n: int) -> np.ndarray:
    """n Haar-distributed unit quaternions as an (n, 4) array."""
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def haar2(rng: np.random.Generator) -> GroupElement2:
    """One Haar-distributed element (normalized 4-dim Gaussian)."""
    return GroupElement2.from_quat(haar2_batch(rng, 1)[0])


def fiber_delta(s: GroupElement2, s2: GroupElement2) -> GroupElement2:
    """The unique d with s d = s2."""
    return mul(inv(s), s2)


def from_matrix(u: np.ndarray) -> GroupElement2:
    """Inverse of GroupElement2.matrix for a 2x2 SU(2) matrix."""
    u = np.asarray(u, dtype=complex)
    a = 0.5 * np.trace(u).real
    # tr(tau_i^dagger tau_j) = 2 delta_ij
    b = [0.5 * np.trace(TAU[i].conj().T @ u).real for i in range(3)]
    return GroupElement2(a, b)
