"""Unions of closed discs: connected components and outer boundary arc chains."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateTangency, KindMismatch, ValidationError
from .core import CHART, SPHERE, TOL, Disc

TWO_PI = 2.0 * math.pi
TANGENCY_ANGLE = 1e-7


@dataclass(frozen=True)
class Component:
    indices: tuple[int, ...]
    discs: tuple[Disc, ...]

    @property
    def count(self) -> int:
        return len(self.indices)

    @property
    def diameter_bound(self) -> float:
        return 2.0 * sum(d.radius for d in self.discs)


def _positions(discs: Sequence[Disc]) -> tuple[np.ndarray, str]:
    kinds = {d.kind for d in discs}
    if len(kinds) > 1:
        raise KindMismatch("discs live on different surfaces")
    kind = kinds.pop()
    if kind == CHART:
        c = np.array([d.center for d in discs], dtype=complex)
        return np.column_stack([c.real, c.imag]), kind
    return np.array([d.center for d in discs], dtype=float), kind


def intersecting_pairs(discs: Sequence[Disc]) -> list[tuple[int, int]]:
    """All index pairs (i < j) of closed discs that meet."""
    if len(discs) < 2:
        return []
    pos, kind = _positions(discs)
    radii = np.array([d.radius for d in discs])
    reach = 2.0 * radii.max()
    if kind == SPHERE:
        reach = 2.0 * math.sin(min(reach, math.pi) / 2.0) + 1e-12
    tree = cKDTree(pos)
    out = []
    for i, j in sorted(tree.query_pairs(reach)):
        if kind == CHART:
            d = math.hypot(*(pos[i] - pos[j]))
        else:
            d = math.atan2(np.linalg.norm(np.cross(pos[i], pos[j])), float(pos[i] @ pos[j]))
        if d <= radii[i] + radii[j]:
            out.append((i, j))
    return out


def union_components(discs: Sequence[Disc]) -> list[Component]:
    """Connected components of a union of closed discs, ordered by smallest member index."""
    discs = list(discs)
    n = len(discs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in intersecting_pairs(discs):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    comps = [tuple(g) for g in groups.values()]
    comps.sort(key=lambda g: g[0])
    return [Component(g, tuple(discs[i] for i in g)) for g in comps]


# --------------------------------------------------------------------------
# arc chains
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    start: float  # angle of the first endpoint
    sweep: float  # signed; positive is counter-clockwise

    @property
    def end(self) -> float:
        return self.start + self.sweep

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def point(self, angle: float) -> complex:
        return self.center + self.radius * complex(math.cos(angle), math.sin(angle))

    @property
    def p0(self) -> complex:
        return self.point(self.start)

    @property
    def p1(self) -> complex:
        return self.point(self.end)

    def signed_area_term(self) -> float:
        # contribution of the arc to the shoelace integral 1/2 * (x dy - y dx)
        r, cx, cy = self.radius, self.center.real, self.center.imag
        t0, t1 = self.start, self.end
        return 0.5 * (r * r * (t1 - t0) + r * cx * (math.sin(t1) - math.sin(t0))
                      - r * cy * (math.cos(t1) - math.cos(t0)))

    def sample(self, n: int) -> np.ndarray:
        t = self.start + self.sweep * np.linspace(0.0, 1.0, n + 1)
        return self.center + self.radius * np.exp(1j * t)


@dataclass(frozen=True)
class ArcChain:
    """Closed chain of circular arcs; consecutive endpoints coincide."""

    arcs: tuple[Arc, ...]

    def __post_init__(self):
        if not self.arcs:
            raise ValidationError("an arc chain needs at least one arc")
        n = len(self.arcs)
        for k in range(n):
            gap = abs(self.arcs[k].p1 - self.arcs[(k + 1) % n].p0)
            if gap > 1e-9 * max(1.0, self.arcs[k].radius):
                raise ValidationError(f"arc chain does not close at arc {k} (gap {gap:.3g})")

    @property
    def length(self) -> float:
        return sum(a.length for a in self.arcs)

    @property
    def signed_area(self) -> float:
        return sum(a.signed_area_term() for a in self.arcs)

    def sample(self, per_arc: int = 32) -> np.ndarray:
        return np.concatenate([a.sample(per_arc)[:-1] for a in self.arcs])


def tangency_check(a: Disc, b: Disc) -> None:
    """Raise when two circles meet at an intersection angle below the tangency threshold."""
    d = abs(a.center - b.center)
    r1, r2 = a.radius, b.radius
    if d > r1 + r2 + TOL or d < abs(r1 - r2) - TOL:
        return
    cos_t = (r1 * r1 + r2 * r2 - d * d) / (2.0 * r1 * r2)
    theta = math.acos(max(-1.0, min(1.0, cos_t)))
    if min(theta, math.pi - theta) < TANGENCY_ANGLE:
        raise DegenerateTangency(f"circles at {a.center} and {b.center} are tangent")


def _free_intervals(i: int, discs: Sequence[Disc], neighbours: Sequence[int]):
    """Angular intervals of circle i lying outside every other open disc (None: circle hidden)."""
    ci, ri = discs[i].center, discs[i].radius
    covered = []
    for j in neighbours:
        cj, rj = discs[j].center, discs[j].radius
        d = abs(cj - ci)
        if d + ri <= rj:
            return None  # circle i lies inside disc j
        if d + rj <= ri or d >= ri + rj:
            continue
        phi = math.atan2((cj - ci).imag, (cj - ci).real)
        alpha = math.acos(max(-1.0, min(1.0, (ri * ri + d * d - rj * rj) / (2.0 * ri * d))))
        covered.append((phi - alpha, phi + alpha))
    if not covered:
        return [(0.0, TWO_PI, True)]
    # unroll onto [0, 2pi) starting at the first covered interval, so 0 is never free
    base = covered[0][0]
    segs = []
    for lo, hi in covered:
        lo2 = (lo - base) % TWO_PI
        hi2 = lo2 + (hi - lo)
        if hi2 > TWO_PI:
            segs.append((0.0, hi2 - TWO_PI))
            hi2 = TWO_PI
        segs.append((lo2, hi2))
    segs.sort()
    merged = []
    for lo, hi in segs:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    free = []
    for k in range(len(merged)):
        lo = merged[k][1]
        hi = merged[k + 1][0] if k + 1 < len(merged) else TWO_PI
        if hi - lo > 0:
            free.append((base + lo, base + hi, False))
    return free


def union_boundary_chains(component: Sequence[Disc]) -> list[ArcChain]:
    """All boundary chains of a chart disc union, each with the union on its left."""
    discs = list(component)
    if not discs:
        raise ValidationError("empty component")
    if any(d.kind != CHART for d in discs):
        raise KindMismatch("arc chains are computed in a planar chart")
    pairs = intersecting_pairs(discs)
    nbrs: dict[int, list[int]] = {i: [] for i in range(len(discs))}
    for i, j in pairs:
        tangency_check(discs[i], discs[j])
        nbrs[i].append(j)
        nbrs[j].append(i)
    # exact duplicates would make every boundary ambiguous
    for i, j in pairs:
        if abs(discs[i].center - discs[j].center) <= TOL and abs(discs[i].radius - discs[j].radius) <= TOL:
            raise DegenerateTangency("coincident circles")
    arcs: list[Arc] = []
    chains: list[ArcChain] = []
    for i, d in enumerate(discs):
        free = _free_intervals(i, discs, nbrs[i])
        if free is None:
            continue
        for lo, hi, whole in free:
            arc = Arc(d.center, d.radius, lo, hi - lo)
            if whole:
                chains.append(ArcChain((arc,)))
            else:
                arcs.append(arc)
    if arcs:
        starts = np.array([a.p0 for a in arcs])
        used = [False] * len(arcs)
        tree = cKDTree(np.column_stack([starts.real, starts.imag]))
        for k0 in range(len(arcs)):
            if used[k0]:
                continue
            seq = []
            k = k0
            while not used[k]:
                used[k] = True
                seq.append(arcs[k])
                e = arcs[k].p1
                dist, nxt = tree.query([e.real, e.imag], k=min(2, len(arcs)))
                dist, nxt = np.atleast_1d(dist), np.atleast_1d(nxt)
                k = int(nxt[0])
                if dist[0] > 1e-7 * max(1.0, arcs[k].radius):
                    raise DegenerateTangency("arc endpoints failed to match")
            if k != k0:
                raise DegenerateTangency("arc chain did not close")
            chains.append(_snap(seq))
    return chains


def _snap(seq: list[Arc]) -> ArcChain:
    """Re-derive each arc's sweep so its end lands exactly on the next arc's start."""
    out = []
    n = len(seq)
    for k, a in enumerate(seq):
        q = seq[(k + 1) % n].p0
        ang = math.atan2((q - a.center).imag, (q - a.center).real)
        sweep = (ang - a.start) % TWO_PI
        if sweep == 0.0:
            sweep = TWO_PI
        out.append(Arc(a.center, a.radius, a.start, sweep))
    return ArcChain(tuple(out))


def union_outer_boundary(component: Sequence[Disc]) -> ArcChain:
    """Outer boundary of a connected disc union, traversed counter-clockwise."""
    chains = union_boundary_chains(component)
    return max(chains, key=lambda ch: ch.signed_area)
