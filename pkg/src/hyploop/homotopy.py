"""Loop homotopy classes in planar chart domains.

The fundamental group of a chart domain with k holes (punctures filled) is free
on k generators.  Generator x_i is dual to a cut: a straight segment from the
boundary of hole i to the outer circle.  Reading the signed crossings of a
loop with the cuts gives a word whose free reduction is an exact invariant of
the based homotopy class; its cyclic reduction is an invariant of the free
class.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import KindMismatch, NoGenerators, NullClass, TangentialCrossing, ValidationError
from .geometry import CHART, TOL, Domain, PolyLoop, point_segment_distance

__all__ = [
    "Word", "Cut", "CutSystem", "make_cut_system", "loop_word", "freely_homotopic",
    "is_simple", "systole_lower_bound", "winding_number",
]


# --------------------------------------------------------------------------
# words
# --------------------------------------------------------------------------

def _reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


_TOKEN = re.compile(r"^x(\d+)(?:\^\(?([+-]?\d+)\)?)?$")


@dataclass(frozen=True)
class Word:
    """Freely reduced word; letters are (generator index >= 1, sign +-1)."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        letters = tuple((int(g), int(e)) for g, e in self.letters)
        for g, e in letters:
            if g < 1 or e not in (1, -1):
                raise ValidationError(f"bad letter ({g}, {e})")
        object.__setattr__(self, "letters", _reduce(letters))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse strings such as ``"x1 x2^-1"``, ``"x1·x2"`` or ``"x3^2*x1"``; ``""`` or ``"1"`` is empty."""
        text = text.strip()
        if text in ("", "1", "e"):
            return cls(())
        letters = []
        for tok in re.split(r"[\s·*]+", text):
            if not tok:
                continue
            m = _TOKEN.match(tok)
            if not m:
                raise ValidationError(f"cannot parse word token {tok!r}")
            g = int(m.group(1))
            p = int(m.group(2)) if m.group(2) is not None else 1
            letters += [(g, 1 if p > 0 else -1)] * abs(p)
        return cls(tuple(letters))

    def __str__(self) -> str:
        if not self.letters:
            return ""
        parts = []
        i = 0
        L = self.letters
        while i < len(L):
            j = i
            while j < len(L) and L[j] == L[i]:
                j += 1
            p = (j - i) * L[i][1]
            parts.append(f"x{L[i][0]}" if p == 1 else f"x{L[i][0]}^{p}")
            i = j
        return " ".join(parts)

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def cyclic_reduction(self) -> tuple[tuple[int, int], ...]:
        L = list(self.letters)
        i, j = 0, len(L) - 1
        while i < j and L[i][0] == L[j][0] and L[i][1] == -L[j][1]:
            i += 1
            j -= 1
        return tuple(L[i:j + 1])

    def exponent_sums(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for g, e in self.letters:
            out[g] = out.get(g, 0) + e
        return out

    def generators(self) -> set[int]:
        return {g for g, _ in self.cyclic_reduction()}

    def is_proper_power(self) -> bool:
        u = self.cyclic_reduction()
        if not u:
            return False
        doubled = u + u
        n = len(u)
        return any(doubled[k:k + n] == u for k in range(1, n))


def freely_homotopic(w1: Word, w2: Word) -> bool:
    """Conjugacy in the free group: cyclic reductions agree up to rotation."""
    a, b = w1.cyclic_reduction(), w2.cyclic_reduction()
    if len(a) != len(b):
        return False
    if not a:
        return True
    doubled = a + a
    n = len(a)
    return any(doubled[k:k + n] == b for k in range(n))


# --------------------------------------------------------------------------
# cuts
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Cut:
    generator: int
    start: complex  # on the hole boundary (or the puncture itself)
    end: complex  # on the outer circle
    source: str  # "hole" or "puncture"
    index: int  # index of the hole or puncture

    @property
    def direction(self) -> complex:
        d = self.end - self.start
        return d / abs(d)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class CutSystem:
    domain: Domain
    cuts: tuple[Cut, ...]

    @property
    def rank(self) -> int:
        return len(self.cuts)

    def hole_of(self, generator: int) -> int | None:
        c = self.cuts[generator - 1]
        return c.index if c.source == "hole" else None


def _segments_cross(p1, p2, q1, q2, tol=TOL) -> bool:
    return _seg_seg_distance(p1, p2, q1, q2) <= tol


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def _seg_seg_distance(p1, p2, q1, q2) -> float:
    d1, d2 = p2 - p1, q2 - q1
    o1 = _cross(d1, q1 - p1)
    o2 = _cross(d1, q2 - p1)
    o3 = _cross(d2, p1 - q1)
    o4 = _cross(d2, p2 - q1)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return 0.0
    return float(min(point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2),
                     point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2)))


def _ray_to_outer(start: complex, u: complex, outer) -> complex:
    # solve |start + t u - c| = R for the positive root
    f = start - outer.center
    b = (f * u.conjugate()).real
    c = abs(f) ** 2 - outer.radius ** 2
    t = -b + math.sqrt(b * b - c)
    return start + t * u


def _candidate_angles(first: float, n: int = 96):
    yield first
    step = math.pi / (n / 2)
    for k in range(1, n // 2 + 1):
        yield first + k * step
        if k < n // 2:
            yield first - k * step


# generic fallback direction: no common regular polygon has a vertex on it
_GENERIC_ANGLE = 1.0


def make_cut_system(domain: Domain, include_punctures: bool = False) -> CutSystem:
    """One straight cut per hole (and optionally per puncture) to the outer circle.

    Each cut leaves along the direction pointing away from the outer centre;
    when that ray meets another hole or an earlier cut it is rotated by
    multiples of 3.75 degrees, alternately to each side.
    """
    if domain.surface != CHART:
        raise KindMismatch("cut systems are built in a planar chart; project the sphere first")
    if domain.outer is None:
        raise ValidationError("cut systems need an outer disc")
    sources = [("hole", i, h.center, h.radius) for i, h in enumerate(domain.holes)]
    if include_punctures:
        sources += [("puncture", i, p, 0.0) for i, p in enumerate(domain.punctures)]
    if not domain.holes and not (include_punctures and domain.punctures):
        raise NoGenerators("domain has no holes, so its fundamental group is trivial")
    margin = 1e-6 * domain.outer.radius
    cuts: list[Cut] = []
    for gen, (src, idx, c, r) in enumerate(sources, start=1):
        off = c - domain.outer.center
        first = math.atan2(off.imag, off.real) if abs(off) > 1e-9 else _GENERIC_ANGLE
        chosen = None
        for ang in _candidate_angles(first):
            u = complex(math.cos(ang), math.sin(ang))
            a = c + r * u
            b = _ray_to_outer(a, u, domain.outer)
            ok = True
            for j, h in enumerate(domain.holes):
                if src == "hole" and j == idx:
                    continue
                if point_segment_distance(h.center, a, b) <= h.radius + margin:
                    ok = False
                    break
            if ok and include_punctures:
                for j, p in enumerate(domain.punctures):
                    if src == "puncture" and j == idx:
                        continue
                    if point_segment_distance(p, a, b) <= margin:
                        ok = False
                        break
            if ok:
                for cut in cuts:
                    if _seg_seg_distance(a, b, cut.start, cut.end) <= margin:
                        ok = False
                        break
            if ok:
                chosen = Cut(gen, a, b, src, idx)
                break
        if chosen is None:
            raise ValidationError(f"no straight cut found for {src} {idx}")
        cuts.append(chosen)
    return CutSystem(domain, tuple(cuts))


# --------------------------------------------------------------------------
# crossing words
# --------------------------------------------------------------------------

def _crossings(points: np.ndarray, cut: Cut):
    """Signed crossings of the closed polyline with one cut: (segment, t, sign) triples.

    A vertex lying exactly on the cut line is assigned to the positive side, which
    is the same as pushing the cut an infinitesimal distance to its negative side;
    the count is therefore a consistent homotopy invariant.
    """
    d = cut.direction
    rel = points - cut.start
    side = (d.real * rel.imag - d.imag * rel.real) >= 0.0
    nxt = np.roll(side, -1)
    idx = np.nonzero(side != nxt)[0]
    out = []
    if idx.size == 0:
        return out
    cr = d.real * rel.imag - d.imag * rel.real
    along = (rel * d.conjugate()).real
    n = len(points)
    for i in idx:
        j = (i + 1) % n
        c0, c1 = cr[i], cr[j]
        t = c0 / (c0 - c1) if c0 != c1 else 0.0
        u = along[i] + t * (along[j] - along[i])
        L = cut.length
        if u < -TOL or u > L + TOL:
            continue
        if u < TOL or u > L - TOL:
            raise TangentialCrossing("loop passes through a cut endpoint")
        out.append((int(i), float(t), 1 if not side[i] else -1))
    return out


def _raw_crossings(loop: PolyLoop, cuts: CutSystem):
    pts = loop.points()
    marks = []
    for cut in cuts.cuts:
        for i, t, sgn in _crossings(pts, cut):
            marks.append((i, t, cut.generator, sgn))
    marks.sort()
    return marks


def loop_word(loop: PolyLoop, cuts: CutSystem) -> Word:
    """Reduced word of the based loop, read from its signed cut crossings."""
    return Word(tuple((g, s) for _, _, g, s in _raw_crossings(loop, cuts)))


def winding_number(loop: PolyLoop, z: complex) -> int:
    """Winding number of the polyline around z, from the summed turning of arguments."""
    p = loop.points() - z
    q = np.roll(p, -1)
    ang = np.angle(q / p)
    return int(round(float(ang.sum()) / (2.0 * math.pi)))


# --------------------------------------------------------------------------
# simplicity
# --------------------------------------------------------------------------

def is_simple(loop: PolyLoop, tol: float = TOL) -> bool:
    """True when non-adjacent segments stay apart and adjacent ones only share their vertex."""
    a, b = loop.segments()
    n = len(a)
    d = b - a
    # adjacent pairs: reject folding back along the previous segment
    dn = np.roll(d, -1)
    cr = d.real * dn.imag - d.imag * dn.real
    dot = (d * dn.conjugate()).real
    if np.any((np.abs(cr) <= tol * np.abs(d) * np.abs(dn)) & (dot < 0)):
        return False
    mids = (a + b) / 2.0
    half = np.abs(d) / 2.0
    tree = cKDTree(np.column_stack([mids.real, mids.imag]))
    reach = 2.0 * float(half.max()) + tol
    for i, j in tree.query_pairs(reach):
        if j == i + 1 or (i == 0 and j == n - 1):
            continue
        if abs(mids[i] - mids[j]) > half[i] + half[j] + tol:
            continue
        if _seg_seg_distance(a[i], b[i], a[j], b[j]) <= tol:
            return False
    return True


# --------------------------------------------------------------------------
# systole
# --------------------------------------------------------------------------

def systole_lower_bound(domain: Domain, alpha: Word, cuts: CutSystem | None = None) -> float:
    """Certified lower bound on the flat length of any loop in the free class of alpha.

    Two facts are combined.  A loop winding w times around a hole of radius r
    stays outside that hole, so its angular sweep about the centre is at least
    2*pi*|w| and its length is at least 2*pi*r*|w|; the winding number equals the
    exponent sum of the hole's generator.  Second, a closed curve of length l
    fits in a disc of radius l/4, and a loop inside such a disc is trivial in the
    domain unless the disc contains a whole hole whose generator occurs in the
    cyclically reduced word; hence l >= 4 * (smallest such radius).
    """
    if domain.surface != CHART:
        raise KindMismatch("systole bounds are computed in a planar chart")
    if not alpha.cyclic_reduction():
        raise NullClass("the trivial class has no positive systole")
    cuts = cuts if cuts is not None else make_cut_system(domain)
    best = 0.0
    radii = {}
    for g in alpha.generators():
        if g > cuts.rank:
            raise ValidationError(f"generator x{g} does not exist (rank {cuts.rank})")
        h = cuts.hole_of(g)
        if h is None:
            # puncture generators: a loop can shrink onto the puncture
            radii[g] = 0.0
        else:
            radii[g] = domain.holes[h].radius
    for g, w in alpha.exponent_sums().items():
        if w:
            best = max(best, 2.0 * math.pi * radii[g] * abs(w))
    best = max(best, 4.0 * min(radii.values()))
    return best
