"""Parallel transport in the trivialization nu_x = (x, 1).

The holonomy h of a curve solves s' = -A(gamma) gamma' s with s(0) = 1 and
composes as h(second o first) = h(second) h(first).
"""

from __future__ import annotations

import numpy as np

from . import su2core as su
from .curvealg import Curve, EuclElement, Symmetry, UnsupportedPair, evaluate, placement, tangent, transform
from .invconn import is_invariant_under
from .su2core import GroupElement2


class NotLAG(ValueError):
    pass


class SymmetryMismatch(ValueError):
    pass


def orbit_generator(c: Curve) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """(x0, v, s, l) with c equivalent to t -> exp(t (v, s)) x0 on [0, l]."""
    P = placement(c)
    C = P.carrier
    x0 = C.point(P.theta0)
    if C.kind == "line":
        return x0, C.a.copy(), np.zeros(3), P.span
    v = -2.0 * np.cross(C.a, C.p)
    if C.kind == "helix":
        v = v + 2.0 * C.k * C.a
    # the flow turns by angle 2 per unit time
    return x0, v, C.a.copy(), 0.5 * P.span


def transport_closed(omega, sym: Symmetry, c: Curve) -> GroupElement2:
    """Holonomy of an orbit curve of sym: exp2(l s) exp2(-l omega_p(g~(p)))."""
    if not is_invariant_under(omega, sym):
        raise SymmetryMismatch(f"{type(omega).__name__} is not invariant under {sym.tag}")
    x0, v, s, l = orbit_generator(c)
    if not sym.in_algebra(v, s):
        raise NotLAG(f"curve is not an orbit of a one-parameter subgroup of {sym.tag}")
    w = omega.matrix(x0) @ (v + 2.0 * np.cross(s, x0)) + s
    return su.mul(su.exp2(l * s), su.exp2(-l * w))


def _left_matrix(w: np.ndarray) -> np.ndarray:
    """4x4 matrices of q -> (0, w) q for w of shape (n, 3)."""
    z = np.zeros(len(w))
    w1, w2, w3 = w[:, 0], w[:, 1], w[:, 2]
    return np.stack(
        [
            np.stack([z, -w1, -w2, -w3], -1),
            np.stack([w1, z, -w3, w2], -1),
            np.stack([w2, w3, z, -w1], -1),
            np.stack([w3, -w2, w1, z], -1),
        ],
        -2,
    )


def rk4_propagators(field, c: Curve, steps: int) -> np.ndarray:
    """One RK4 step matrix per interval for the linear system s' = L(t) s."""
    a, b = c.domain
    h = (b - a) / steps
    t = a + h * np.arange(2 * steps + 1) / 2.0
    t[-1] = b
    x = evaluate(c, t)
    dx = tangent(c, t)
    w = -np.einsum("nij,nj->ni", field.matrix(x), dx)
    L = _left_matrix(w)
    L1, L2, L4 = L[0:-1:2], L[1::2], L[2::2]
    eye = np.eye(4)
    K1 = L1
    K2 = L2 @ (eye + 0.5 * h * K1)
    K3 = L2 @ (eye + 0.5 * h * K2)
    K4 = L4 @ (eye + h * K3)
    return eye + h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4)


def transport_ode(field, c: Curve, steps: int = 4096) -> GroupElement2:
    """RK4 horizontal lift with renormalization after every step."""
    if steps < 16:
        raise ValueError("at least 16 steps are required")
    P = rk4_propagators(field, c, steps)
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for M in P:
        q = M @ q
        q /= np.linalg.norm(q)
    return GroupElement2.from_quat(q)


def richardson(field, c: Curve, steps: int = 4096) -> float:
    """Change of the ODE result under step doubling."""
    return su.distance(transport_ode(field, c, steps), transport_ode(field, c, 2 * steps))


def equivariance_residual(omega, sym: Symmetry, g: EuclElement, c: Curve, drop_right: bool = False) -> float:
    """|h(phi_g o c) - delta1 h(c) delta2| with delta1 = sigma, delta2 = sigma^-1.

    Both factors come from comparing Phi_g(x, 1) = (g x, sigma) with the trivialization
    at g x. With drop_right the right factor is omitted (a deliberately wrong formula).
    """
    try:
        h = transport_closed(omega, sym, c)
        h2 = transport_closed(omega, sym, transform(g, c))
    except NotLAG as exc:
        raise UnsupportedPair(str(exc)) from exc
    right = su.ONE if drop_right else su.inv(g.sigma)
    return su.distance(h2, su.prod(g.sigma, h, right))


def matrix_json(h: GroupElement2) -> list:
    """2x2 complex matrix as [[[re, im], ...], ...]."""
    m = h.matrix()
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def circle_closed(c_coupling: float, r: float, tau: float) -> GroupElement2:
    """Holonomy of Isotropic{c} around the arc of radius r, angle tau, centre 0, normal e3."""
    e2, e3 = np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])
    return su.mul(su.exp2(0.5 * tau * e3), su.exp2(-0.5 * tau * (2.0 * r * c_coupling * e2 + e3)))


def line_closed(c_coupling: float, l: float, v) -> GroupElement2:
    """Holonomy exp2(-c l v) of Isotropic{c} along a line segment."""
    return su.exp2(-c_coupling * l * np.asarray(v, dtype=float))


__all__ = [
    "NotLAG",
    "SymmetryMismatch",
    "orbit_generator",
    "transport_closed",
    "transport_ode",
    "richardson",
    "equivariance_residual",
    "matrix_json",
    "circle_closed",
    "line_closed",
]
