"""Near-optimal coverings by equal discs: of the round sphere and of planar chart domains.

Covering radii are computed exactly from Voronoi diagrams: the point of a
region farthest from a finite set is a Voronoi vertex, or lies on the region's
boundary circles (where a Voronoi edge crosses a circle, or at the point of a
circle diametrically opposite a site).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, SphericalVoronoi, Voronoi, cKDTree

from .errors import ValidationError
from .geometry import CHART, Domain

KERSHNER_DENSITY = 8.0 * math.pi * math.sqrt(3.0) / 9.0


# --------------------------------------------------------------------------
# sphere
# --------------------------------------------------------------------------

def _icosahedron():
    p = (1.0 + math.sqrt(5.0)) / 2.0
    V = []
    for a, b in itertools.product((-1.0, 1.0), repeat=2):
        V += [(0.0, a, b * p), (a, b * p, 0.0), (b * p, 0.0, a)]
    V = np.asarray(V)
    return V, ConvexHull(V).simplices


def geodesic_grid(n: int) -> np.ndarray:
    """Icosahedral grid with 10 n^2 + 2 points (each face subdivided n times)."""
    V, F = _icosahedron()
    pts = []
    for f in F:
        A, B, C = V[f]
        for i in range(n + 1):
            for j in range(n + 1 - i):
                k = n - i - j
                pts.append((i * A + j * B + k * C) / n)
    P = np.asarray(pts)
    P /= np.linalg.norm(P, axis=1)[:, None]
    _, keep = np.unique(np.round(P, 9), axis=0, return_index=True)
    return P[np.sort(keep)]


def fibonacci_sphere(s: int) -> np.ndarray:
    i = np.arange(s) + 0.5
    z = 1.0 - 2.0 * i / s
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _voronoi(P: np.ndarray) -> SphericalVoronoi:
    return SphericalVoronoi(P, radius=1.0, center=np.zeros(3))


def sphere_covering_radius(P: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact covering radius of the sphere by at least 4 points, with the farthest point."""
    if len(P) < 4:
        raise ValidationError("exact sphere covering radius needs at least 4 points")
    sv = _voronoi(P)
    V = sv.vertices
    tree = cKDTree(P)
    chord, _ = tree.query(V)
    ang = 2.0 * np.arcsin(np.minimum(1.0, chord / 2.0))
    k = int(np.argmax(ang))
    return float(ang[k]), V[k]


def _lloyd(P: np.ndarray, iters: int) -> np.ndarray:
    for _ in range(iters):
        sv = _voronoi(P)
        sv.sort_vertices_of_regions()
        Q = np.empty_like(P)
        for k, reg in enumerate(sv.regions):
            V = sv.vertices[reg]
            W = np.roll(V, -1, axis=0)
            c = P[k]
            cen = (c + V + W) / 3.0
            w = np.linalg.norm(np.cross(V - c, W - c), axis=1)
            m = (cen * w[:, None]).sum(axis=0)
            Q[k] = m / np.linalg.norm(m)
        P = Q
    return P


def _insert_farthest(P: np.ndarray, count: int) -> np.ndarray:
    """Greedily add points at the Voronoi vertices farthest from the set."""
    while count > 0:
        sv = _voronoi(P)
        V = sv.vertices
        chord, _ = cKDTree(P).query(V)
        order = np.argsort(-chord, kind="stable")
        sep = float(chord[order[0]])
        chosen: list[np.ndarray] = []
        for idx in order:
            if len(chosen) == count:
                break
            v = V[idx]
            if all(np.linalg.norm(v - c) >= sep for c in chosen):
                chosen.append(v)
            if chord[idx] < 0.5 * sep:
                break
        P = np.vstack([P, np.asarray(chosen)])
        count -= len(chosen)
    return P


@dataclass(frozen=True)
class SphereCover:
    centers: np.ndarray
    radius: float

    @property
    def s(self) -> int:
        return len(self.centers)

    @property
    def r0(self) -> float:
        """Scale-free radius: radius * sqrt(s)."""
        return self.radius * math.sqrt(self.s)

    @property
    def density(self) -> float:
        """s * radius^2; tends to the planar Kershner constant for optimal coverings."""
        return self.s * self.radius ** 2

    def audit(self, samples: int = 100_000, seed: int = 0) -> int:
        """Number of random sphere points farther than ``radius`` from every centre."""
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((samples, 3))
        X /= np.linalg.norm(X, axis=1)[:, None]
        chord, _ = cKDTree(self.centers).query(X)
        ang = 2.0 * np.arcsin(np.minimum(1.0, chord / 2.0))
        return int(np.sum(ang > self.radius))


def kershner_cover(s: int) -> SphereCover:
    """s centres covering the unit sphere with a small common radius.

    s = 1 and s = 2 are the trivial coverings (radius pi, pi/2).  Larger s start
    from the largest icosahedral grid with at most s points, relax it by Lloyd
    iterations, and add the remaining points at the farthest Voronoi vertices.
    The returned radius is the exact covering radius (plus 1e-12 relative slack).
    """
    if int(s) != s or s < 1:
        raise ValidationError("s must be a positive integer")
    s = int(s)
    if s == 1:
        return SphereCover(np.array([[0.0, 0.0, 1.0]]), math.pi)
    if s == 2:
        return SphereCover(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), math.pi / 2.0)
    if s == 3:
        # equilateral triangle on the equator; the poles are the farthest points
        t = 2.0 * math.pi * np.arange(3) / 3.0
        return SphereCover(np.column_stack([np.cos(t), np.sin(t), np.zeros(3)]), math.pi / 2.0)
    if s < 12:
        P = _lloyd(fibonacci_sphere(s), 20)
    else:
        n = int(math.floor(math.sqrt((s - 2) / 10.0)))
        P = _lloyd(geodesic_grid(n), 10)
        P = _insert_farthest(P, s - len(P))
    R, _ = sphere_covering_radius(P)
    return SphereCover(P, R * (1.0 + 1e-12))


# --------------------------------------------------------------------------
# planar chart domains
# --------------------------------------------------------------------------

def _circles(domain: Domain):
    out = []
    if domain.outer is not None:
        out.append((domain.outer.center, domain.outer.radius))
    out += [(h.center, h.radius) for h in domain.holes]
    return out


def _line_circle(p: np.ndarray, d: np.ndarray, c: complex, R: float) -> np.ndarray:
    """Points p + t d (all t) on the circle |z - c| = R."""
    f = p - c
    A = np.abs(d) ** 2
    B = 2.0 * (f * np.conj(d)).real
    C = np.abs(f) ** 2 - R * R
    disc = B * B - 4.0 * A * C
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    t0 = (-B - sq) / (2.0 * A)
    t1 = (-B + sq) / (2.0 * A)
    return np.concatenate([(p + t0 * d)[ok], (p + t1 * d)[ok]])


def chart_covering_radius(domain: Domain, S) -> tuple[float, complex]:
    """Exact max over the closed domain (holes removed) of the distance to the nearest point of S."""
    if domain.surface != CHART or domain.outer is None:
        raise ValidationError("chart covering needs a bounded chart domain")
    P = np.asarray(S, dtype=complex)
    if P.size == 0:
        raise ValidationError("empty point set")
    tree = cKDTree(np.column_stack([P.real, P.imag]))
    cands = []
    if len(P) >= 3:
        vor = Voronoi(np.column_stack([P.real, P.imag]))
        cands.append(vor.vertices[:, 0] + 1j * vor.vertices[:, 1])
        pairs = vor.ridge_points
        a, b = P[pairs[:, 0]], P[pairs[:, 1]]
    else:
        a, b = P[:1], P[-1:]
    mid = (a + b) / 2.0
    direction = 1j * (b - a)
    for c, R in _circles(domain):
        if len(P) >= 2:
            cands.append(_line_circle(mid, direction, c, R))
        off = P - c
        norm = np.abs(off)
        safe = np.where(norm > 0, off / np.where(norm > 0, norm, 1.0), 1.0)
        cands.append(c - R * safe)
        cands.append(c + R * safe)
    Z = np.concatenate(cands)
    Z = Z[np.asarray(domain.boundary_distance(Z)) >= -1e-12 * domain.outer.radius]
    d, _ = tree.query(np.column_stack([Z.real, Z.imag]))
    k = int(np.argmax(d))
    return float(d[k]), complex(Z[k])


def _grid_points(domain: Domain, h: float) -> np.ndarray:
    """Hexagonal lattice of pitch h inside the domain plus rings just inside each boundary circle."""
    o = domain.outer
    dy = h * math.sqrt(3.0) / 2.0
    ny = int(math.floor(2.0 * o.radius / dy)) + 2
    ys = -o.radius + dy * (np.arange(ny) + 0.5)
    rows = []
    for j, y in enumerate(ys):
        half = math.sqrt(max(0.0, o.radius ** 2 - y * y))
        shift = 0.5 * h if j % 2 else 0.0
        xs = shift + h * np.arange(math.ceil((-half - shift) / h), math.floor((half - shift) / h) + 1)
        rows.append(o.center + xs + 1j * y)
    Z = np.concatenate(rows) if rows else np.zeros(0, dtype=complex)
    Z = Z[np.asarray(domain.boundary_distance(Z)) >= 0.5 * h]
    rings = []
    inset = 0.25 * h
    R = o.radius - inset
    m = max(3, int(math.ceil(2 * math.pi * R / h)))
    rings.append(o.center + R * np.exp(2j * math.pi * (np.arange(m) + 0.5) / m))
    for hole in domain.holes:
        R = hole.radius + inset
        m = max(3, int(math.ceil(2 * math.pi * R / h)))
        rings.append(hole.center + R * np.exp(2j * math.pi * np.arange(m) / m))
    ring = np.concatenate(rings)
    ring = ring[np.asarray(domain.boundary_distance(ring)) > 0]
    if Z.size and ring.size:
        dz, _ = cKDTree(np.column_stack([ring.real, ring.imag])).query(np.column_stack([Z.real, Z.imag]))
        Z = Z[dz >= 0.5 * h]
    return np.concatenate([ring, Z])


def chart_covering_grid(domain: Domain, s: int) -> np.ndarray:
    """Exactly s points of the domain interior arranged as an economical covering.

    The lattice pitch is the smallest (found by bisection) whose point count is at
    most s; remaining points go to the farthest uncovered spots.
    """
    if domain.surface != CHART or domain.outer is None:
        raise ValidationError("chart covering needs a bounded chart domain")
    s = int(s)
    if s < 1:
        raise ValidationError("s must be positive")
    o = domain.outer
    area = math.pi * o.radius ** 2 - sum(math.pi * hh.radius ** 2 for hh in domain.holes)
    hi = 4.0 * o.radius
    lo = math.sqrt(area / (2.0 * s)) * 0.25
    while len(_grid_points(domain, lo)) <= s:
        lo *= 0.5
    best = None
    for _ in range(40):
        mid = math.sqrt(lo * hi)
        pts = _grid_points(domain, mid)
        if len(pts) <= s:
            hi, best = mid, pts
        else:
            lo = mid
        if hi / lo < 1.0 + 1e-6:
            break
    if best is None:
        best = _grid_points(domain, hi)
    pts = best[:s]
    if pts.size == 0:
        pts = np.array([_deepest_point(domain)])
    while len(pts) < s:
        _, z = chart_covering_radius(domain, pts)
        z = _nudge_inside(domain, z, hi)
        if np.min(np.abs(pts - z)) <= 1e-9:
            raise ValidationError("cannot place further covering points")
        pts = np.concatenate([pts, [z]])
    return pts


def _deepest_point(domain: Domain, n: int = 64) -> complex:
    """Point of a coarse lattice with the largest boundary distance."""
    o = domain.outer
    xs = np.linspace(-o.radius, o.radius, n)
    Z = (o.center + xs[None, :] + 1j * xs[:, None]).ravel()
    return complex(Z[int(np.argmax(np.asarray(domain.boundary_distance(Z))))])


def _nudge_inside(domain: Domain, z: complex, h: float) -> complex:
    """Move a closed-domain point slightly into the interior."""
    if float(domain.boundary_distance(z)) > 0:
        return z
    for c, R in _circles(domain):
        if abs(abs(z - c) - R) < 1e-9 * max(1.0, R):
            u = (z - c) / abs(z - c)
            inward = -u if domain.outer is not None and c == domain.outer.center and R == domain.outer.radius else u
            return z + 0.05 * h * inward
    return z
