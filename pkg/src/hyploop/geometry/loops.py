"""Closed polylines in a planar chart."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .core import TOL


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex).ravel()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PolyLoop:
    """Oriented cyclic polyline with a designated base vertex.

    ``vertices`` are stored as given; ``orientation = -1`` means they are
    traversed in reverse.  ``points()`` always returns the traversal order
    starting at the base vertex, and every algorithm works on that view.
    """

    vertices: np.ndarray
    base: int = 0
    orientation: int = 1

    def __post_init__(self):
        v = _frozen(self.vertices)
        object.__setattr__(self, "vertices", v)
        if len(v) < 3:
            raise ValidationError("a loop needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValidationError("loop vertices must be finite")
        if self.orientation not in (1, -1):
            raise ValidationError("orientation must be +1 or -1")
        if not 0 <= self.base < len(v):
            raise ValidationError(f"base index {self.base} out of range")
        gaps = np.abs(np.roll(v, -1) - v)
        if gaps.min() <= TOL:
            raise ValidationError("consecutive loop vertices must be distinct")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def base_point(self) -> complex:
        return complex(self.vertices[self.base])

    def points(self) -> np.ndarray:
        v = np.roll(self.vertices, -self.base)
        if self.orientation == -1:
            v = np.concatenate([v[:1], v[:0:-1]])
        return v

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.points()
        return p, np.roll(p, -1)

    def length(self) -> float:
        p = self.points()
        return float(np.abs(np.roll(p, -1) - p).sum())

    def signed_area(self) -> float:
        p = self.points()
        q = np.roll(p, -1)
        return 0.5 * float(np.sum(p.real * q.imag - q.real * p.imag))

    def normalized(self) -> "PolyLoop":
        """Same loop with vertices stored in traversal order and base 0."""
        return PolyLoop(self.points())

    def refined(self, k: int) -> "PolyLoop":
        """Insert k-1 equally spaced vertices on every segment."""
        if k < 1:
            raise ValidationError("refinement factor must be >= 1")
        a, b = self.segments()
        t = np.arange(k) / k
        pts = (a[:, None] + (b - a)[:, None] * t[None, :]).ravel()
        return PolyLoop(pts)

    def rebased(self, index: int) -> "PolyLoop":
        """Same cyclic loop, base moved ``index`` steps along the traversal."""
        p = self.points()
        return PolyLoop(np.roll(p, -(index % len(p))))

    def reversed(self) -> "PolyLoop":
        return PolyLoop(self.vertices, self.base, -self.orientation)

    # -- constructors -----------------------------------------------------
    @classmethod
    def circle(cls, center: complex, radius: float, n: int = 64, phase: float = 0.0,
               ccw: bool = True) -> "PolyLoop":
        t = phase + 2.0 * math.pi * np.arange(n) / n
        pts = center + radius * np.exp(1j * t)
        return cls(pts, 0, 1 if ccw else -1)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vertices": [[float(z.real), float(z.imag)] for z in self.vertices],
            "base": int(self.base),
            "orientation": int(self.orientation),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj) -> "PolyLoop":
        if isinstance(obj, list):
            obj = {"vertices": obj}
        try:
            verts = [complex(float(a), float(b)) for a, b in obj["vertices"]]
        except (KeyError, TypeError, ValueError):
            raise ValidationError("loop JSON needs 'vertices' as [[re, im], ...]") from None
        return cls(verts, int(obj.get("base", 0)), int(obj.get("orientation", 1)))


# --------------------------------------------------------------------------
# segment primitives (vectorized)
# --------------------------------------------------------------------------

def point_segment_distance(z, a, b):
    """Distance from points z to segments [a, b] (broadcasting)."""
    z, a, b = np.asarray(z), np.asarray(a), np.asarray(b)
    d = b - a
    dd = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, ((z - a) * np.conj(d)).real / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def segment_disc_interval(a, b, c, r):
    """Parameter interval {t in [0,1] : |a + t(b-a) - c| <= r}; (nan, nan) when empty."""
    a, b, c = np.asarray(a), np.asarray(b), np.asarray(c)
    d = b - a
    f = a - c
    A = np.abs(d) ** 2
    B = 2.0 * (f * np.conj(d)).real
    C = np.abs(f) ** 2 - r * r
    disc = B * B - 4 * A * C
    with np.errstate(invalid="ignore"):
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        t0 = (-B - sq) / (2 * A)
        t1 = (-B + sq) / (2 * A)
    lo = np.maximum(t0, 0.0)
    hi = np.minimum(t1, 1.0)
    empty = ~(lo <= hi)
    lo = np.where(empty, np.nan, lo)
    hi = np.where(empty, np.nan, hi)
    return lo, hi


def loop_boundary_gaps(loop: PolyLoop, domain):
    """Exact distance from the loop to every hole and to the outer boundary.

    Returns (hole_gaps, outer_gap); positive values mean the loop stays inside.
    """
    a, b = loop.segments()
    holes = []
    for h in domain.holes:
        holes.append(float(point_segment_distance(h.center, a, b).min()) - h.radius)
    outer = math.inf
    if domain.outer is not None:
        far = float(np.abs(a - domain.outer.center).max())
        outer = domain.outer.radius - far
    return holes, outer


def loop_clearance(loop: PolyLoop, domain) -> float:
    """Exact distance from the polyline to the complement of the punctured domain."""
    holes, outer = loop_boundary_gaps(loop, domain)
    m = min([outer] + holes)
    if domain.punctures:
        a, b = loop.segments()
        for p in domain.punctures:
            m = min(m, float(point_segment_distance(p, a, b).min()))
    return m
