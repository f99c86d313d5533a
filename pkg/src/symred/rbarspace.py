"""The space R disjoint-union R_Bohr: points, translations, projections and measures.

Also hosts the circular-projection analysis: the holonomy of omega^c around an arc,
stripped of its rotation factor, as a function of c, and where it meets the torus
H_{tau2} swept out by the Bohr part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bohrspace as bs
from . import su2core as su
from .bohrspace import BohrElement, FreqModule, FreqTuple, NoValues, OutOfSpan
from .su2core import GroupElement2

E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class RhoHomeo:
    """A homeomorphism (0, 1) -> R. 'tan': t -> tan(pi (t - 1/2)); 'logit': log(t / (1 - t))."""

    tag: str = "tan"

    def __post_init__(self):
        if self.tag not in ("tan", "logit"):
            raise ValueError(f"unknown reparametrization {self.tag!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.tag == "tan":
            return np.tan(math.pi * (t - 0.5))
        return np.log(t) - np.log1p(-t)

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        if self.tag == "tan":
            return 0.5 + np.arctan(x) / math.pi
        return 0.5 * (1.0 + np.tanh(0.5 * x))


TAN = RhoHomeo("tan")


@dataclass(frozen=True)
class Real:
    x: float


@dataclass(frozen=True, eq=False)
class Bohr:
    psi: BohrElement


RBarPoint = Real | Bohr


def f_shifted(rho: RhoHomeo, x):
    """1 + exp(2 pi i (rho^-1(x) - 1/2)), a point of the shifted circle 1 + S^1 minus {0}."""
    return 1.0 + np.exp(2j * math.pi * (rho.inverse(x) - 0.5))


@dataclass(frozen=True)
class Projected:
    """Value of pi_L: a shifted-circle number on the real part, a character tuple otherwise."""

    branch: str
    value: complex | tuple


def pi_L(point: RBarPoint, L: FreqTuple, rho: RhoHomeo = TAN) -> Projected:
    if isinstance(point, Real):
        return Projected("Real", complex(f_shifted(rho, point.x)))
    return Projected("Bohr", bs.project(point.psi, L))


def translate(v: float, point: RBarPoint) -> RBarPoint:
    if isinstance(point, Real):
        return Real(v + point.x)
    if point.psi.module.values is None:
        raise NoValues("translating a Bohr point needs generator values")
    return Bohr(bs.bohr_add(bs.embed(v, point.psi.module), point.psi))


@dataclass(frozen=True)
class RBarMeasure:
    """mu_{rho,t} = t rho_*(lambda) + (1 - t) mu_Bohr."""

    t: float
    module: FreqModule
    rho: RhoHomeo = field(default=TAN)

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError("t must lie in [0, 1]")


def sample(m: RBarMeasure, rng: np.random.Generator) -> RBarPoint:
    if rng.uniform() < m.t:
        return Real(float(m.rho(rng.uniform())))
    return Bohr(bs.haar_sample(m.module, rng))


@dataclass(frozen=True)
class SampleBatch:
    """n draws: is_real mask, real coordinates (nan on Bohr rows), generator values."""

    is_real: np.ndarray
    x: np.ndarray
    bohr: np.ndarray


def sample_batch(m: RBarMeasure, rng: np.random.Generator, n: int) -> SampleBatch:
    is_real = rng.uniform(size=n) < m.t
    x = np.where(is_real, m.rho(rng.uniform(size=n)), np.nan)
    bohr = bs.haar_batch(m.module, rng, n)
    bohr[is_real] = np.nan
    return SampleBatch(is_real, x, bohr)


def translate_batch(v: float, batch: SampleBatch, module: FreqModule) -> SampleBatch:
    if module.values is None:
        raise NoValues("translation needs generator values")
    shift = np.exp(1j * v * np.asarray(module.values))
    return SampleBatch(batch.is_real, batch.x + v, batch.bohr * shift)


# -------------------------------------------------------------- circle image


def _freq_for(module: FreqModule, target: float, freq=None) -> tuple[int, ...]:
    if freq is not None:
        return module.check(freq)
    if module.values is not None:
        for k, v in enumerate(module.values):
            if abs(v - target) <= 1e-12 * max(1.0, abs(target)):
                return module.unit(module.labels[k])
    raise OutOfSpan(f"frequency {target} is not a declared generator")


def pi_circ(point: RBarPoint, tau: float, r: float, freq=None) -> GroupElement2:
    """Rotation-stripped arc holonomy: exp2(-(tau/2)(2 r c e2 + e3)) on Real{c}.

    On Bohr{psi} the result is the H_{tau2} element with circle coordinate
    z = psi(chi_{r tau}), i.e. a = Re z, b = (0, -Im z, 0).
    """
    if isinstance(point, Real):
        return su.exp2(-0.5 * tau * (2.0 * r * point.x * E2 + E3))
    z = bs.bohr_eval(point.psi, _freq_for(point.psi.module, r * tau, freq))
    return GroupElement2(z.real, (0.0, -z.imag, 0.0))


def a_n(n: int, tau: float, r: float) -> float:
    """Parameters where the Real branch hits +1 (n even) or -1 (n odd)."""
    if n == 0:
        raise ValueError("n must be nonzero")
    return math.copysign(1.0, n) / r * math.sqrt(n * n * math.pi**2 / tau**2 - 0.25)


def beta(c, r: float):
    return np.sqrt(np.asarray(c, dtype=float) ** 2 * r * r + 0.25)


def f_gap(c, tau: float, r: float):
    """[pi_{tau,r}(c)]_11 minus the (1,1) entry of the Bohr branch at the same c."""
    b = beta(c, r)
    return np.cos(b * tau) + 0.5j / b * np.sin(b * tau) - np.cos(np.asarray(c, dtype=float) * r * tau)


def pi_circ_quat(c, tau: float, r: float) -> np.ndarray:
    """Vectorized Real-branch pi_circ as (n, 4) quaternions."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    w = -0.5 * tau * np.stack([np.zeros_like(c), 2.0 * r * c, np.ones_like(c)], -1)
    return su.exp2_batch(w)


def dist_to_torus(q) -> np.ndarray:
    """R^4 (operator-norm) distance of unit quaternions to H_{tau2} = {a + b2 tau2}."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    proj = q[:, [0, 2]]
    nrm = np.linalg.norm(proj, axis=1)
    nearest = np.zeros_like(q)
    ok = nrm > 0
    nearest[ok, 0] = proj[ok, 0] / nrm[ok]
    nearest[ok, 2] = proj[ok, 1] / nrm[ok]
    nearest[~ok, 0] = 1.0
    return np.linalg.norm(q - nearest, axis=1)


def B_interval(n: int, tau: float, r: float) -> tuple[float, float]:
    a, b = a_n(2 * n, tau, r), a_n(2 * n + 2 if n > 0 else 2 * n - 2, tau, r)
    return (min(a, b), max(a, b))


def merge_bound(n: int, tau: float, r: float, samples: int = 2000) -> float:
    """max over B_n = [a_{2n}, a_{2n+2}] of the distance of pi_circ(Real{c}) to H_{tau2}."""
    lo, hi = B_interval(n, tau, r)
    c = np.linspace(lo, hi, samples)
    return float(dist_to_torus(pi_circ_quat(c, tau, r)).max())


def torus_hits(c, tau: float, r: float, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Grid points where the Real branch lies within tol of H_{tau2}, and their distance to +-1."""
    q = pi_circ_quat(c, tau, r)
    hit = dist_to_torus(q) <= tol
    central = np.minimum(np.linalg.norm(q - [1, 0, 0, 0], axis=1), np.linalg.norm(q + [1, 0, 0, 0], axis=1))
    return hit, central


def min_gap(tau: float, r: float, cmax: float = 100.0, step: float = 1e-3, nmax: int = 50) -> float:
    """min |f_gap| over a grid on [-cmax, cmax] plus the candidates c = pi n / (r tau)."""
    grid = np.arange(-cmax, cmax + 0.5 * step, step)
    cand = math.pi * np.arange(-nmax, nmax + 1) / (r * tau)
    return float(min(np.abs(f_gap(grid, tau, r)).min(), np.abs(f_gap(cand, tau, r)).min()))
