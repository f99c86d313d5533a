"""Samplers and consistency checks for the reduced measures.

Free sector: Haar coordinates on SU(2)^|alpha| with transitions given by products of
conjugated segment values. LAG sector: products of Type-space factors, each a Bohr
circle possibly fibered over S^1 or S^2 modulo (psi, v) ~ (psi^-1, -v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import curvealg as ca
from . import su2core as su
from .curvealg import Symmetry, UnsupportedPair
from .redhom import TypeTag, XgpPoint, canonical_xgp, classify_type
from .su2core import GroupElement2


class InvalidIndex(ValueError):
    pass


class IncompatibleSpecs(ValueError):
    pass


# -------------------------------------------------------------- free sector


@dataclass(frozen=True, eq=False)
class FreeIndex:
    """Free segments no symmetry translate of which overlaps another (or itself)."""

    sym: Symmetry
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for c in segs:
            if ca.classify(self.sym, c) not in (ca.CurveClass.FreeNonSym, ca.CurveClass.FreeSym):
                raise InvalidIndex("every segment must be a free curve")
            if not ca.is_free_segment(self.sym, c):
                raise InvalidIndex("segment overlaps a nontrivial translate of itself")
        for i, c1 in enumerate(segs):
            for c2 in segs[i + 1 :]:
                for a, b in ((c1, c2), (c2, c1)):
                    if ca.translate_overlap(self.sym, a, b) is not None:
                        raise InvalidIndex("two segments share a segment up to symmetry")

    def __len__(self) -> int:
        return len(self.segments)


def free_sample(idx: FreeIndex, rng: np.random.Generator) -> tuple:
    return tuple(su.haar2(rng) for _ in idx.segments)


@dataclass(frozen=True)
class Letter:
    """sigma s_j^{exp} sigma^-1 for fine variable j."""

    j: int
    exp: int
    sigma: GroupElement2


def transition_words(coarse: FreeIndex, fine: FreeIndex) -> list[list[Letter]]:
    """For each coarse segment, its letters in curve order (first piece first)."""
    if coarse.sym is not fine.sym and coarse.sym.to_json() != fine.sym.to_json():
        raise UnsupportedPair("indices belong to different symmetries")
    words = []
    for gamma in coarse.segments:
        pieces = []
        for j, delta in enumerate(fine.segments):
            dec = ca.free_decompose(coarse.sym, gamma, delta)
            for seg in dec.segments:
                if seg.g is None:
                    continue
                lo, hi = sorted((seg.a, seg.b))
                da, db = delta.domain
                if abs(lo - da) > 1e-9 or abs(hi - db) > 1e-9:
                    raise UnsupportedPair("coarse segment is not a union of full fine translates")
                pieces.append((seg.k0, seg.k1, Letter(j, 1 if seg.a < seg.b else -1, seg.g.sigma)))
        pieces.sort(key=lambda p: p[0])
        a, b = gamma.domain
        cur = a
        for k0, k1, _ in pieces:
            if abs(k0 - cur) > 1e-9:
                raise UnsupportedPair("coarse segment is not covered by fine translates")
            cur = k1
        if abs(cur - b) > 1e-9:
            raise UnsupportedPair("coarse segment is not covered by fine translates")
        words.append([p[2] for p in pieces])
    return words


def apply_words(words, s) -> tuple:
    out = []
    for word in words:
        val = su.ONE
        for L in word:
            x = s[L.j] if L.exp == 1 else su.inv(s[L.j])
            val = su.mul(su.conj(L.sigma, x), val)
        out.append(val)
    return tuple(out)


def apply_words_batch(words, q: np.ndarray) -> np.ndarray:
    """Vectorized transition on (n, k, 4) quaternion arrays; returns (n, len(words), 4)."""
    out = np.zeros((q.shape[0], len(words), 4))
    for i, word in enumerate(words):
        val = np.tile([1.0, 0.0, 0.0, 0.0], (q.shape[0], 1))
        for L in word:
            x = q[:, L.j] if L.exp == 1 else su.qconj(q[:, L.j])
            sg = L.sigma.quat
            x = su.qmul(su.qmul(sg, x), su.qconj(sg))
            val = su.qmul(x, val)
        out[:, i] = val
    return out


def free_transition(coarse: FreeIndex, fine: FreeIndex, s) -> tuple:
    """Coarse coordinates from fine ones: ordered products of (c s_j d)^{+-1}."""
    if len(s) != len(fine):
        raise InvalidIndex("one value per fine segment")
    return apply_words(transition_words(coarse, fine), s)


def words_preserve_haar(words) -> bool:
    """Every word has a variable used exactly once and in no other word.

    Then the pushforward of Haar is Haar: integrate that private variable first.
    """
    counts: dict = {}
    for w in words:
        for L in w:
            counts[L.j] = counts.get(L.j, 0) + 1
    for w in words:
        mine = [L.j for L in w]
        if not any(mine.count(j) == 1 and counts[j] == 1 for j in mine):
            return False
    return True


# --------------------------------------------------------------- moments


def su2_moments(q: np.ndarray) -> np.ndarray:
    """Characters of the first nontrivial representations: Re tr U, tr in spin 1, products."""
    a = q[..., 0]
    b = q[..., 1:]
    chi1 = 2.0 * a
    chi2 = 4.0 * a * a - 1.0
    return np.stack([chi1, chi2, a * b[..., 0], b[..., 0] * b[..., 1]], -1)


def mc_zero(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of each column."""
    samples = np.asarray(samples)
    n = samples.shape[0]
    return samples.mean(axis=0), samples.std(axis=0, ddof=1) / math.sqrt(n)


# --------------------------------------------------------------- LAG sector


@dataclass(frozen=True, eq=False)
class LagFactorSpec:
    """Type-space factors for a base point and generators verified for the symmetry."""

    sym: Symmetry
    base: np.ndarray
    gens: tuple
    tags: tuple = field(default=())

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        object.__setattr__(self, "base", base)
        gens = tuple((np.asarray(v, dtype=float), np.asarray(s, dtype=float)) for v, s in self.gens)
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "tags", tuple(classify_type(self.sym, base, g) for g in gens))

    @classmethod
    def trivial(cls, sym: Symmetry, n: int = 1) -> "LagFactorSpec":
        """n factors of Type 1 (the zero map space)."""
        spec = cls(sym, np.zeros(3), ())
        object.__setattr__(spec, "tags", tuple(TypeTag("T1") for _ in range(n)))
        return spec


def _plane_basis(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p1 = ca._perp_unit(m)
    return p1, np.cross(m, p1)


def lag_factor_batch(tag: TypeTag, rng: np.random.Generator, n: int) -> dict:
    """n canonical draws of one factor as arrays: psi (n,) and v ((n,) complex or (n, 3))."""
    if tag.kind == "T1":
        return {"psi": np.ones(n, dtype=complex), "v": None}
    psi = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, n))
    if tag.kind == "T2":
        return {"psi": psi, "v": None}
    if tag.kind == "T3":
        v = np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, n))
        flip = (-v.real > v.real) | ((-v.real == v.real) & (-v.imag > v.imag))
    else:
        v = rng.standard_normal((n, 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        flip = _lex_greater(-v, v)
    psi = np.where(flip, np.conj(psi), psi)
    v = np.where(flip if v.ndim == 1 else flip[:, None], -v, v)
    return {"psi": psi, "v": v}


def _lex_greater(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(len(a), dtype=bool)
    decided = np.zeros(len(a), dtype=bool)
    for k in range(a.shape[1]):
        gt = (a[:, k] > b[:, k]) & ~decided
        lt = (a[:, k] < b[:, k]) & ~decided
        out |= gt
        decided |= gt | lt
    return out


def lag_sample(spec: LagFactorSpec, rng: np.random.Generator) -> tuple:
    pts = []
    for tag in spec.tags:
        d = lag_factor_batch(tag, rng, 1)
        if tag.kind in ("T1", "T2"):
            pts.append(canonical_xgp(tag, (complex(d["psi"][0]),)) if tag.kind == "T2" else XgpPoint("T1", zero=True))
        else:
            v = d["v"][0]
            pts.append(canonical_xgp(tag, (complex(d["psi"][0]), v)))
    return tuple(pts)


def factor_moments(kind: str, psi: np.ndarray, v) -> np.ndarray:
    """Quotient-invariant test functions of a factor, one column each."""
    cols = [psi.real]
    if kind in ("T1", "T2"):
        cols.append(psi.imag)
        cols.append((psi * psi).real)
    elif kind == "T3":
        cols += [psi.imag * v.real, psi.imag * v.imag, v.real**2, v.imag**2, v.real * v.imag]
    else:
        cols += [psi.imag * v[:, k] for k in range(3)]
        cols += [v[:, j] * v[:, k] for j in range(3) for k in range(j, 3)]
    return np.stack(cols, -1)


@dataclass(frozen=True)
class IndependenceReport:
    tags_a: tuple
    tags_b: tuple
    max_z: float

    @property
    def passed(self) -> bool:
        return self.max_z <= 3.0


def choice_independence(spec_a: LagFactorSpec, spec_b: LagFactorSpec, rng: np.random.Generator, n: int = 100_000) -> IndependenceReport:
    """Type tags agree factorwise and sampled moments agree within 3 standard errors."""
    if len(spec_a.tags) != len(spec_b.tags):
        raise IncompatibleSpecs("different numbers of factors")
    for ta, tb in zip(spec_a.tags, spec_b.tags):
        if ta.kind != tb.kind:
            raise IncompatibleSpecs(f"factor types differ: {ta!r} vs {tb!r}")
    worst = 0.0
    for ta, tb in zip(spec_a.tags, spec_b.tags):
        da, db = lag_factor_batch(ta, rng, n), lag_factor_batch(tb, rng, n)
        ma, sa = mc_zero(factor_moments(ta.kind, da["psi"], da["v"]))
        mb, sb = mc_zero(factor_moments(tb.kind, db["psi"], db["v"]))
        se = np.sqrt(sa**2 + sb**2)
        z = np.where(se > 0, np.abs(ma - mb) / np.where(se > 0, se, 1.0), np.where(ma == mb, 0.0, np.inf))
        worst = max(worst, float(z.max()))
    return IndependenceReport(spec_a.tags, spec_b.tags, worst)


# ------------------------------------------------------------------- Fubini


@dataclass(frozen=True)
class FubiniReport:
    residual: float
    stderr: float

    @property
    def z(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.residual == 0.0 else math.inf
        return abs(self.residual) / self.stderr


def fubini_check(
    f: Callable,
    g: Callable,
    mu: Callable,
    nu: Callable,
    rng: np.random.Generator,
    n: int = 100_000,
    joint: Callable | None = None,
) -> FubiniReport:
    """MC[f (x) g over the joint law] - MC[f] MC[g], with a delta-method standard error.

    mu(rng, n) and nu(rng, n) draw marginal samples; joint(rng, n) draws pairs and
    defaults to independent draws (the product measure).
    """
    if joint is None:
        x, y = mu(rng, n), nu(rng, n)
    else:
        x, y = joint(rng, n)
    fx = np.asarray(f(x), dtype=complex)
    gy = np.asarray(g(y), dtype=complex)
    Ef, Eg = fx.mean(), gy.mean()
    prod = fx * gy
    resid = prod.mean() - Ef * Eg
    infl = prod - Ef * gy - Eg * fx
    se = float(np.sqrt(np.var(infl.real, ddof=1) + np.var(infl.imag, ddof=1)) / math.sqrt(n))
    return FubiniReport(float(abs(resid)), se)
