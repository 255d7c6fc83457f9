"""Word metrics, ball growth and lattice quasi-isometry checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Union

import numpy as np

from .errors import BadLattice, NotBordered, ValidationError


@dataclass(frozen=True)
class Free:
    k: int

    def __post_init__(self):
        if int(self.k) < 1:
            raise ValidationError("free rank must be >= 1")

    @property
    def generators(self) -> int:
        return self.k


@dataclass(frozen=True)
class FreeAbelian:
    """Z^r x (finite torsion of order t); torsion elements have word length 0."""

    r: int
    t: int = 1

    def __post_init__(self):
        if int(self.r) < 0 or int(self.t) < 1:
            raise ValidationError("need r >= 0 and t >= 1")

    @property
    def generators(self) -> int:
        return self.r


@dataclass(frozen=True)
class Lattice:
    """Z^2 acting on the plane by translations along two basis vectors."""

    basis: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        (a, b), (c, d) = self.basis
        if abs(a * d - b * c) < 1e-12:
            raise BadLattice("lattice basis is degenerate")

    @property
    def generators(self) -> int:
        return 2

    @classmethod
    def square(cls) -> "Lattice":
        return cls(((1.0, 0.0), (0.0, 1.0)))

    @classmethod
    def hexagonal(cls) -> "Lattice":
        return cls(((1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0)))

    def gram(self) -> tuple[Fraction, Fraction, Fraction]:
        """Exact Gram entries (e1.e1, e1.e2, e2.e2) of the binary basis."""
        (a, b), (c, d) = (tuple(Fraction(x) for x in v) for v in self.basis)
        return a * a + b * b, a * c + b * d, c * c + d * d


GroupModel = Union[Free, FreeAbelian, Lattice]


def parse_model(text: str) -> GroupModel:
    """free:k | abelian:r:t | lattice:a,b,c,d | lattice:square | lattice:hex"""
    kind, _, rest = text.partition(":")
    try:
        if kind == "free":
            return Free(int(rest))
        if kind == "abelian":
            parts = rest.split(":")
            return FreeAbelian(int(parts[0]), int(parts[1]) if len(parts) > 1 else 1)
        if kind == "lattice":
            if rest in ("", "square"):
                return Lattice.square()
            if rest in ("hex", "hexagonal"):
                return Lattice.hexagonal()
            a, b, c, d = (float(x) for x in rest.split(","))
            return Lattice(((a, b), (c, d)))
    except (ValueError, IndexError):
        pass
    raise ValidationError(f"cannot parse group model {text!r}")


def l1_ball(r: int, R: int) -> int:
    """#{x in Z^r : |x|_1 <= R}."""
    return sum(2 ** k * comb(r, k) * comb(R, k) for k in range(min(r, R) + 1))


def ball_size(model: GroupModel, R: int) -> int:
    R = int(R)
    if R < 0:
        raise ValidationError("radius must be >= 0")
    if isinstance(model, Free):
        k = model.k
        return 1 + sum(2 * k * (2 * k - 1) ** (i - 1) for i in range(1, R + 1))
    if isinstance(model, FreeAbelian):
        return model.t * l1_ball(model.r, R)
    return l1_ball(2, R)


def exponential_bound(model: GroupModel, R: int) -> int:
    """t (2N + 1)^R with N generators; t is the torsion order (1 when absent)."""
    t = model.t if isinstance(model, FreeAbelian) else 1
    return t * (2 * model.generators + 1) ** int(R)


def ball_size_bfs(model: GroupModel, R: int) -> int:
    """Breadth-first enumeration of the word-metric ball."""
    if isinstance(model, Free):
        gens = [(g, e) for g in range(model.k) for e in (1, -1)]
        seen = {()}
        frontier = [()]
        for _ in range(R):
            nxt = []
            for w in frontier:
                for g, e in gens:
                    if w and w[-1] == (g, -e):
                        continue
                    v = w + ((g, e),)
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return len(seen)
    r = model.r if isinstance(model, FreeAbelian) else 2
    t = model.t if isinstance(model, FreeAbelian) else 1
    steps = [tuple((s if j == i else 0) for j in range(r)) for i in range(r) for s in (1, -1)]
    seen = {(0,) * r}
    frontier = list(seen)
    for _ in range(R):
        nxt = []
        for x in frontier:
            for d in steps:
                y = tuple(a + b for a, b in zip(x, d))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return t * len(seen)


@dataclass(frozen=True)
class QIConstants:
    L: float
    A: float
    L_squared: Fraction
    max_deviation: float
    pairs: int


def _coords(radius: int) -> np.ndarray:
    m, n = np.meshgrid(np.arange(-radius, radius + 1), np.arange(-radius, radius + 1))
    m, n = m.ravel(), n.ravel()
    keep = np.abs(m) + np.abs(n) <= radius
    return np.column_stack([m[keep], n[keep]])


def quasi_isometry_constants(model: Lattice, radius: int) -> QIConstants:
    """Smallest L with A = 0 for the orbit map of a lattice, over pairs in the word ball.

    d_word(g, h) = |m| + |n| for g - h = m e1 + n e2; translation invariance reduces
    the pair check to differences in the ball of radius 2 * radius.  L^2 is exact
    for the (binary) basis as stored.
    """
    if not isinstance(model, Lattice):
        raise ValidationError("quasi-isometry constants are computed for lattice actions")
    if int(radius) < 1:
        raise ValidationError("sample radius must be >= 1")
    g11, g12, g22 = model.gram()
    best = Fraction(1)
    count = 0
    for m, n in _coords(2 * int(radius)).tolist():
        if m == 0 and n == 0:
            continue
        dw2 = Fraction((abs(m) + abs(n)) ** 2)
        de2 = g11 * m * m + 2 * g12 * m * n + g22 * n * n
        best = max(best, dw2 / de2, de2 / dw2)
        count += 1
    L = math.sqrt(best)
    dev = max_deviation(model, L, 0.0, _coords(2 * int(radius)))
    return QIConstants(L, 0.0, best, dev, count)


def word_distance(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    return np.abs(np.asarray(g) - np.asarray(h)).sum(axis=-1)


def euclid_distance(model: Lattice, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    B = np.asarray(model.basis, dtype=float)
    return np.linalg.norm((np.asarray(g) - np.asarray(h)) @ B, axis=-1)


def max_deviation(model: Lattice, L: float, A: float, diffs: np.ndarray) -> float:
    """Largest violation of d_w/L - A <= d_e <= L d_w + A over the given differences (<= 0 when valid)."""
    z = np.zeros_like(diffs)
    dw = word_distance(diffs, z).astype(float)
    de = euclid_distance(model, diffs, z)
    return float(max(np.max(de - L * dw - A), np.max(dw / L - A - de)))


def homotopy_count_torus(model: Lattice, L: float) -> int:
    """Number of free homotopy classes on the flat torus with a representative of length <= L.

    Class v has shortest length |v|, so this counts lattice vectors of norm <= L.
    """
    if L < 0:
        raise ValidationError("length must be >= 0")
    B = np.asarray(model.basis, dtype=float)
    g11, g12, g22 = (float(x) for x in model.gram())
    det = abs(np.linalg.det(B))
    # |n| <= L |e1| / |det| bounds the e2 coordinate
    nmax = int(math.floor(L * math.sqrt(g11) / det + 1e-9)) + 1
    tol = 1e-12 * max(1.0, L * L)
    total = 0
    for n in range(-nmax, nmax + 1):
        # g11 m^2 + 2 g12 m n + g22 n^2 <= L^2
        disc = (g12 * n) ** 2 - g11 * (g22 * n * n - L * L)
        if disc < -tol:
            continue
        root = math.sqrt(max(disc, 0.0))
        lo = math.floor((-g12 * n - root) / g11) - 1
        hi = math.ceil((-g12 * n + root) / g11) + 1
        m = np.arange(lo, hi + 1)
        q = g11 * m * m + 2 * g12 * m * n + g22 * n * n
        total += int(np.count_nonzero(q <= L * L + tol))
    return total


def polynomial_constant(counts: Iterable[tuple[float, int]]) -> float:
    """Smallest a with n(L) <= a (L + 1)^2 over the given samples."""
    return max(n / (L + 1.0) ** 2 for L, n in counts)


def surface_rank(g: int, b: int) -> int:
    """Rank of the free fundamental group of a genus-g surface with b >= 1 boundary components."""
    if int(g) < 0:
        raise ValidationError("genus must be >= 0")
    if int(b) < 1:
        raise NotBordered("closed surfaces have non-free fundamental groups")
    return 2 * int(g) + int(b) - 1
