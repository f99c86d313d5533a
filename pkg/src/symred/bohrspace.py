"""Finitely generated truncations of the Bohr compactification of R.

A frequency is an integer vector over named generators; a Bohr element assigns a unit
complex number to each generator and extends multiplicatively. Integer rank and span
questions are decided exactly with sympy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import sympy

UNIT_TOL = 1e-12


class OutOfSpan(ValueError):
    pass


class NoValues(ValueError):
    pass


class UnknownLabel(KeyError):
    pass


class BadRoot(ValueError):
    pass


@dataclass(frozen=True)
class FreqModule:
    """Generators (labels) of a frequency lattice, with optional real values."""

    labels: tuple[str, ...]
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        labels = tuple(str(b) for b in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        object.__setattr__(self, "labels", labels)
        if self.values is not None:
            vals = tuple(float(v) for v in self.values)
            if len(vals) != len(labels):
                raise ValueError("one value per label")
            if any(v == 0.0 or not math.isfinite(v) for v in vals):
                raise ValueError("declared values must be finite and nonzero")
            object.__setattr__(self, "values", vals)

    @property
    def rank(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(label) from None

    def unit(self, label: str) -> tuple[int, ...]:
        i = self.index(label)
        return tuple(int(k == i) for k in range(self.rank))

    def freq_value(self, l) -> float:
        """The real number sum_i l_i value(b_i)."""
        if self.values is None:
            raise NoValues("module carries no real values")
        return float(np.dot(self.check(l), self.values))

    def check(self, l) -> tuple[int, ...]:
        """Validate an integer frequency vector."""
        l = tuple(l)
        if len(l) != self.rank:
            raise OutOfSpan(f"frequency has {len(l)} components, module has {self.rank}")
        out = []
        for a in l:
            if isinstance(a, (int, np.integer)):
                out.append(int(a))
            elif float(a).is_integer():
                out.append(int(a))
            else:
                raise OutOfSpan("frequencies are integer combinations of the generators")
        return tuple(out)

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "values": None if self.values is None else list(self.values)}

    @classmethod
    def from_json(cls, d: dict) -> "FreqModule":
        vals = d.get("values")
        return cls(tuple(d["labels"]), None if vals is None else tuple(vals))


def _upow(z: complex, n: int) -> complex:
    """z**n on the unit circle, using conj for negative n."""
    return z ** n if n >= 0 else z.conjugate() ** (-n)


@dataclass(frozen=True, eq=False)
class BohrElement:
    """A character of the frequency lattice, stored on its generators."""

    module: FreqModule
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(self.module.rank).copy()
        if np.any(np.abs(np.abs(v) - 1.0) > UNIT_TOL):
            raise ValueError("values must lie on the unit circle")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, label: str) -> complex:
        return complex(self.values[self.module.index(label)])

    def __eq__(self, other) -> bool:
        return isinstance(other, BohrElement) and self.module == other.module and np.array_equal(self.values, other.values)

    def close(self, other: "BohrElement", tol: float = 1e-12) -> bool:
        return self.module == other.module and float(np.abs(self.values - other.values).max(initial=0.0)) <= tol

    def to_json(self) -> dict:
        return {b: [float(z.real), float(z.imag)] for b, z in zip(self.module.labels, self.values)}

    @classmethod
    def from_json(cls, module: FreqModule, d: dict) -> "BohrElement":
        return cls(module, [complex(*d[b]) for b in module.labels])


@dataclass(frozen=True, eq=False)
class FreqTuple:
    """A Z-independent ordered tuple L = (l_1, ..., l_k) of frequencies (rows)."""

    module: FreqModule
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array([self.module.check(r) for r in np.atleast_2d(np.asarray(self.rows))], dtype=np.int64)
        if rows.size and not z_independent(list(rows)):
            raise ValueError("frequencies must be Z-independent")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)


def z_independent(freqs) -> bool:
    """Exact integer-rank test: true iff the vectors are linearly independent."""
    freqs = [list(map(int, f)) for f in freqs]
    if not freqs:
        return True
    return sympy.Matrix(freqs).rank() == len(freqs)


def leq_z(L: FreqTuple, L2: FreqTuple) -> np.ndarray | None:
    """Integer N with l_i = sum_j N_ij l'_j, or None if some l_i leaves the Z-span of L2."""
    if L.module != L2.module:
        raise OutOfSpan("tuples live in different modules")
    B = sympy.Matrix(L2.rows.tolist())  # m x n
    G = B * B.T
    N = []
    for l in L.rows.tolist():
        x = G.LUsolve(B * sympy.Matrix(l))
        if list(B.T * x) != l:
            return None
        if any(not xi.is_integer for xi in x):
            return None
        N.append([int(xi) for xi in x])
    return np.array(N, dtype=np.int64).reshape(len(L), len(L2))


def bohr_eval(psi: BohrElement, l) -> complex:
    l = psi.module.check(l)
    out = 1.0 + 0.0j
    for z, n in zip(psi.values, l):
        out *= _upow(complex(z), n)
    return out


def embed(x: float, module: FreqModule) -> BohrElement:
    """The canonical image of a real number: psi(b) = exp(i value(b) x)."""
    if module.values is None:
        raise NoValues("embedding needs real values on every generator")
    return BohrElement(module, [cmath.exp(1j * v * x) for v in module.values])


def bohr_zero(module: FreqModule) -> BohrElement:
    return BohrElement(module, np.ones(module.rank, dtype=complex))


def bohr_add(p1: BohrElement, p2: BohrElement) -> BohrElement:
    if p1.module != p2.module:
        raise OutOfSpan("elements live on different modules")
    return BohrElement(p1.module, p1.values * p2.values)


def bohr_inv(p: BohrElement) -> BohrElement:
    return BohrElement(p.module, np.conj(p.values))


def project(psi: BohrElement, L: FreqTuple) -> tuple[complex, ...]:
    if L.module != psi.module:
        raise OutOfSpan("tuple and element live on different modules")
    return tuple(bohr_eval(psi, l) for l in L.rows)


def transition(N, s) -> tuple[complex, ...]:
    """Monomials prod_i s_i^{N_ji}, one per row of N."""
    N = np.atleast_2d(np.asarray(N, dtype=np.int64))
    out = []
    for row in N:
        z = 1.0 + 0.0j
        for si, n in zip(s, row):
            z *= _upow(complex(si), int(n))
        out.append(z)
    return tuple(out)


def modify(psi: BohrElement, assignments: dict) -> BohrElement:
    vals = np.array(psi.values, dtype=complex)
    for label, z in assignments.items():
        vals[psi.module.index(label)] = complex(z)
    return BohrElement(psi.module, vals)


def refine(psi: BohrElement, label: str, q: int, root: complex) -> tuple[FreqModule, BohrElement]:
    """Replace generator b by b/q with psi'(b/q) = root; old evaluations are preserved."""
    q = int(q)
    if q < 1:
        raise ValueError("q must be a positive integer")
    i = psi.module.index(label)
    root = complex(root)
    if abs(abs(root) - 1.0) > UNIT_TOL or abs(root ** q - psi.values[i]) > UNIT_TOL:
        raise BadRoot(f"root^{q} does not reproduce psi({label})")
    if q == 1:
        return psi.module, psi
    labels = list(psi.module.labels)
    labels[i] = f"{label}/{q}"
    values = None
    if psi.module.values is not None:
        values = list(psi.module.values)
        values[i] = values[i] / q
    module = FreqModule(tuple(labels), None if values is None else tuple(values))
    vals = np.array(psi.values, dtype=complex)
    vals[i] = root
    return module, BohrElement(module, vals)


def carry_freq(old: FreqModule, new: FreqModule, l) -> tuple[int, ...]:
    """Rewrite a frequency of old in the generators of a refinement new."""
    l = old.check(l)
    out = [0] * new.rank
    for b, n in zip(old.labels, l):
        if b in new.labels:
            out[new.index(b)] += n
            continue
        match = [k for k, nb in enumerate(new.labels) if nb.rsplit("/", 1)[0] == b and "/" in nb]
        if len(match) != 1:
            raise UnknownLabel(b)
        q = int(new.labels[match[0]].rsplit("/", 1)[1])
        out[match[0]] += q * n
    return tuple(out)


def haar_batch(module: FreqModule, rng: np.random.Generator, n: int) -> np.ndarray:
    """n Haar draws as an (n, rank) array of generator values."""
    return np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, size=(n, module.rank)))


def haar_sample(module: FreqModule, rng: np.random.Generator) -> BohrElement:
    return BohrElement(module, haar_batch(module, rng, 1)[0])


def project_batch(values: np.ndarray, L: FreqTuple) -> np.ndarray:
    """Vectorized project over rows of generator values, shape (n, len(L))."""
    angles = np.angle(values) @ L.rows.T.astype(float)
    return np.exp(1j * angles)
