"""Rerouting a simple loop around small discs centred at the punctures.

``procedure_star`` walks through the connected components of the union of
discs of radius a/s around the punctures (plus optional extra obstacle discs).
For every component the current loop meets, the stretch between the first
entry and the last exit is replaced by the shorter way around the component's
outer boundary.  The result keeps its homotopy class in the domain with the
punctures filled, stays a/s away from every puncture, and is longer by less
than pi*a in total.

The module also houses the explicit template loops, the base-point search and
the assembly of the constants that drive the upper-bound pipeline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .errors import (
    BadBase,
    BadParams,
    DegenerateTangency,
    KindMismatch,
    NearBase,
    NoRoomForBase,
    NotSimple,
    ValidationError,
)
from .geometry import (
    CHART,
    TOL,
    Arc,
    ArcChain,
    Disc,
    Domain,
    PolyLoop,
    bdp_constant,
    check_P1_P2,
    disc_area,
    injectivity_radius,
    point_segment_distance,
    segment_disc_interval,
    union_components,
    union_outer_boundary,
)
from .geometry.admissible import p2_worst
from .geometry.loops import loop_boundary_gaps
from .homotopy import is_simple, winding_number

TWO_PI = 2.0 * math.pi
GRAZE = 1e-9
BDP_RADIUS = 0.5


@dataclass(frozen=True)
class StarParams:
    a: float
    s: int
    c0: float = 2.0 * math.pi
    obstacles: tuple = ()  # extra (moving) discs to route around

    def __post_init__(self):
        if not self.a > 0:
            raise BadParams("a must be positive")
        if int(self.s) != self.s or self.s < 1:
            raise BadParams("s must be a positive integer")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @property
    def clearance(self) -> float:
        return self.a / self.s


@dataclass(frozen=True)
class ComponentStep:
    members: int  # puncture discs in the component
    extra: int  # obstacle discs in the component
    removed_length: float
    detour_length: float
    entry: complex
    exit: complex
    detour: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class RerouteResult:
    loop: PolyLoop
    steps: tuple[ComponentStep, ...]
    clearance: float
    delta: float
    inflation: float

    @property
    def detours(self) -> list[np.ndarray]:
        return [st.detour for st in self.steps]

    def to_json(self) -> dict:
        return {
            "loop": self.loop.to_json(),
            "clearance": self.clearance,
            "delta": self.delta,
            "inflation": self.inflation,
            "steps": [
                {
                    "members": st.members,
                    "extra": st.extra,
                    "removed_length": st.removed_length,
                    "detour_length": st.detour_length,
                    "entry": [st.entry.real, st.entry.imag],
                    "exit": [st.exit.real, st.exit.imag],
                }
                for st in self.steps
            ],
        }


# --------------------------------------------------------------------------
# arc-chain helpers
# --------------------------------------------------------------------------

def _chain_winding(chain: ArcChain, z: complex) -> int:
    """Winding number of an arc chain around a point outside every supporting disc."""
    total = 0.0
    for arc in chain.arcs:
        # seen from outside its disc a circle subtends less than pi, so principal values add up
        if abs(z - arc.center) <= arc.radius:
            raise ValueError("point inside a supporting disc")
        total += math.atan2(((arc.p1 - z) / (arc.p0 - z)).imag, ((arc.p1 - z) / (arc.p0 - z)).real)
    return int(round(total / TWO_PI))


def _locate(chain: ArcChain, p: complex) -> tuple[int, float]:
    """Arc index and angle of a point lying on the chain."""
    best = (math.inf, 0, 0.0)
    for k, arc in enumerate(chain.arcs):
        err = abs(abs(p - arc.center) - arc.radius)
        ang = math.atan2((p - arc.center).imag, (p - arc.center).real)
        off = (ang - arc.start) % TWO_PI
        if off > arc.sweep:
            # outside the angular range: distance to the nearer end
            err += min(off - arc.sweep, TWO_PI - off) * arc.radius
            off = arc.sweep if off - arc.sweep < TWO_PI - off else 0.0
        if err < best[0]:
            best = (err, k, arc.start + off)
    if best[0] > 1e-7 * max(1.0, chain.arcs[best[1]].radius):
        raise DegenerateTangency("entry point is not on the outer boundary")
    return best[1], best[2]


def _arc_pieces(chain: ArcChain, k0: int, a0: float, k1: int, a1: float):
    """Counter-clockwise sub-arcs of the chain from (k0, a0) to (k1, a1)."""
    arcs = chain.arcs
    n = len(arcs)
    out = []
    if k0 == k1:
        d = (a1 - arcs[k0].start) - (a0 - arcs[k0].start)
        if d >= 0:
            return [Arc(arcs[k0].center, arcs[k0].radius, a0, d)] if d > 0 else []
    out.append(Arc(arcs[k0].center, arcs[k0].radius, a0, arcs[k0].end - a0))
    k = (k0 + 1) % n
    guard = 0
    while k != k1:
        out.append(arcs[k])
        k = (k + 1) % n
        guard += 1
        if guard > n:
            raise DegenerateTangency("arc walk did not terminate")
    out.append(Arc(arcs[k1].center, arcs[k1].radius, arcs[k1].start, a1 - arcs[k1].start))
    return [a for a in out if a.sweep > 0]


def _polygonize(arcs: Sequence[Arc], step_of) -> np.ndarray:
    """Inscribed polyline through the arc endpoints, angular step per arc from ``step_of``."""
    pts = []
    for arc in arcs:
        m = max(1, int(math.ceil(abs(arc.sweep) / step_of(arc))))
        t = arc.start + arc.sweep * np.arange(m) / m
        pts.append(arc.center + arc.radius * np.exp(1j * t))
    if arcs:
        pts.append(np.array([arcs[-1].p1]))
    return np.concatenate(pts) if pts else np.zeros(0, dtype=complex)


def _reverse_arcs(arcs: Sequence[Arc]) -> list[Arc]:
    return [Arc(a.center, a.radius, a.end, -a.sweep) for a in reversed(arcs)]


# --------------------------------------------------------------------------
# procedure
# --------------------------------------------------------------------------

def _entry_exit(points: np.ndarray, discs: Sequence[Disc]):
    """First entry and last exit of the closed polyline into a union of closed discs.

    Returns ((segment, t), (segment, t), total contact length) or None when untouched.
    """
    a = points
    b = np.roll(points, -1)
    n = len(a)
    mids = (a + b) / 2.0
    half = np.abs(b - a) / 2.0
    tree = cKDTree(np.column_stack([mids.real, mids.imag]))
    first = None
    last = None
    contact = 0.0
    reach = float(half.max())
    for d in discs:
        idx = tree.query_ball_point([d.center.real, d.center.imag], d.radius + reach)
        if not idx:
            continue
        idx = np.asarray(idx, dtype=int)
        lo, hi = segment_disc_interval(a[idx], b[idx], d.center, d.radius)
        ok = ~np.isnan(lo)
        if not ok.any():
            continue
        idx, lo, hi = idx[ok], lo[ok], hi[ok]
        contact += float(np.sum((hi - lo) * np.abs(b[idx] - a[idx])))
        i0 = int(np.lexsort((lo, idx))[0])
        i1 = int(np.lexsort((hi, idx))[-1])
        f = (int(idx[i0]), float(lo[i0]))
        l = (int(idx[i1]), float(hi[i1]))
        if first is None or f < first:
            first = f
        if last is None or l > last:
            last = l
    if first is None or contact < GRAZE:
        return None
    return first, last, contact


def _point_at(points: np.ndarray, pos: tuple[int, float]) -> complex:
    k, t = pos
    n = len(points)
    return complex(points[k] + t * (points[(k + 1) % n] - points[k]))


def _path_between(points: np.ndarray, p0: tuple[int, float], p1: tuple[int, float]) -> np.ndarray:
    """Polyline of the loop from parameter p0 to p1 (p0 <= p1, no wrap through the base)."""
    k0, _ = p0
    k1, _ = p1
    inner = points[k0 + 1:k1 + 1] if k1 > k0 else points[0:0]
    return np.concatenate([[_point_at(points, p0)], inner, [_point_at(points, p1)]])


def _dedupe(pts: np.ndarray) -> np.ndarray:
    keep = [0]
    for i in range(1, len(pts)):
        if abs(pts[i] - pts[keep[-1]]) > TOL:
            keep.append(i)
    pts = pts[keep]
    while len(pts) > 1 and abs(pts[-1] - pts[0]) <= TOL:
        pts = pts[:-1]
    return pts


def procedure_star(domain: Domain, loop: PolyLoop, S: Sequence[complex], params: StarParams,
                   check: bool = True) -> RerouteResult:
    if domain.surface != CHART:
        raise KindMismatch("rerouting runs in a planar chart")
    S = [complex(p) for p in S]
    r = params.clearance
    pts = loop.points()
    base = complex(pts[0])
    if check:
        if not is_simple(loop):
            raise NotSimple("procedure needs a simple loop")
        rep = check_P1_P2(domain, loop, params.a)
        if not rep.ok:
            raise BadParams(f"a = {params.a} violates P1/P2 (P1 {rep.p1}, P2 {rep.p2})")
    # room between the base and the obstacles decides the inflation
    slack = math.inf
    if S:
        dS = min(abs(base - p) for p in S)
        if dS <= r:
            raise NearBase(f"base vertex lies within a/s = {r} of a puncture")
        slack = dS / r - 1.0
    for z in params.obstacles:
        g = abs(base - z.center) - z.radius
        if g <= 0:
            raise NearBase("base vertex lies inside an obstacle disc")
        slack = min(slack, g / r)
    if not S and not params.obstacles:
        return RerouteResult(PolyLoop(pts), (), r, 0.0, 0.0)
    kappa = min(1e-3, 0.5 * slack)
    last_error = None
    for attempt in range(8):
        try:
            return _reroute(domain, pts, S, params, kappa)
        except DegenerateTangency as exc:
            last_error = exc
            kappa *= 0.5 + 0.618 * ((attempt * 0.381966) % 1.0)
    raise last_error


def _reroute(domain, pts, S, params, kappa) -> RerouteResult:
    r = params.clearance
    grow = kappa * r
    originals = [Disc(p, r) for p in S] + list(params.obstacles)
    is_extra = [False] * len(S) + [True] * len(params.obstacles)
    enlarged = [Disc(d.center, d.radius + grow) for d in originals]
    comps = union_components(enlarged)
    base = complex(pts[0])
    steps = []
    for comp in comps:
        discs = [enlarged[i] for i in comp.indices]
        hit = _entry_exit(pts, discs)
        if hit is None:
            continue
        chain = union_outer_boundary(discs)
        if _chain_winding(chain, base) != 0:
            raise NearBase("base vertex is enclosed by a component")
        first, last, _ = hit
        s_pt = _point_at(pts, first)
        t_pt = _point_at(pts, last)
        k0, a0 = _locate(chain, s_pt)
        k1, a1 = _locate(chain, t_pt)
        ccw = _arc_pieces(chain, k0, a0, k1, a1)
        cw = _reverse_arcs(_arc_pieces(chain, k1, a1, k0, a0))
        arcs = ccw if sum(a.length for a in ccw) <= sum(a.length for a in cw) else cw
        detour = _polygonize(arcs, lambda arc: _chord_step(arc, grow))
        if len(detour) == 0:
            detour = np.array([s_pt, t_pt])
        detour[0], detour[-1] = s_pt, t_pt
        removed = _path_between(pts, first, last)
        _certify(domain, s_pt, removed, detour)
        new = np.concatenate([pts[:first[0] + 1], detour, pts[last[0] + 1:]])
        pts = _dedupe(new)
        members = sum(1 for i in comp.indices if not is_extra[i])
        steps.append(ComponentStep(
            members, len(comp.indices) - members,
            float(np.abs(np.diff(removed)).sum()), float(np.abs(np.diff(detour)).sum()),
            s_pt, t_pt, detour,
        ))
    delta = sum(st.detour_length - st.removed_length for st in steps)
    return RerouteResult(PolyLoop(pts), tuple(steps), r, float(delta), kappa)


def _chord_step(arc: Arc, grow: float) -> float:
    # chords of a circle of radius R stay at distance R cos(step/2) >= R - grow from its centre
    R = arc.radius
    return 2.0 * math.acos(max(0.0, min(1.0, (R - grow) / R)))


def _certify(domain: Domain, anchor: complex, removed: np.ndarray, detour: np.ndarray) -> None:
    """Both paths lie in one round disc free of holes, hence are homotopic rel endpoints."""
    room = float(domain.boundary_distance(anchor))
    reach = max(float(np.abs(removed - anchor).max()), float(np.abs(detour - anchor).max()))
    if not reach < room:
        raise BadParams("a rerouted stretch is not confined to a hole-free disc; shrink a")


# --------------------------------------------------------------------------
# certificates used by tests and the CLI
# --------------------------------------------------------------------------

def min_clearance(loop: PolyLoop, S: Sequence[complex], domain: Domain) -> float:
    """Exact distance from the polyline to the punctures and to the domain boundary."""
    a, b = loop.segments()
    holes, outer = loop_boundary_gaps(loop, domain)
    m = min([outer] + holes)
    if len(S):
        P = np.asarray(S, dtype=complex)
        mids = (a + b) / 2.0
        half = float(np.abs(b - a).max()) / 2.0
        tree = cKDTree(np.column_stack([mids.real, mids.imag]))
        dist0, _ = tree.query(np.column_stack([P.real, P.imag]))
        for j, p in enumerate(P):
            idx = tree.query_ball_point([p.real, p.imag], dist0[j] + 2.0 * half)
            m = min(m, float(point_segment_distance(p, a[idx], b[idx]).min()))
    return m


def obstacle_clearance(loop: PolyLoop, obstacles: Sequence[Disc]) -> float:
    a, b = loop.segments()
    m = math.inf
    for z in obstacles:
        m = min(m, float(point_segment_distance(z.center, a, b).min()) - z.radius)
    return m


# --------------------------------------------------------------------------
# base points
# --------------------------------------------------------------------------

def b_eps_area(domain: Domain, eps: float, grid: int = 400) -> float:
    """Area of B_eps, the points at distance >= eps from the domain boundary."""
    if domain.outer is None:
        raise ValidationError("B_eps needs an outer disc")
    R = domain.outer.radius - eps
    if R <= 0:
        return 0.0
    inflated = [Disc(h.center, h.radius + eps) for h in domain.holes]
    disjoint = all(
        abs(h.center - domain.outer.center) + h.radius < R for h in inflated
    ) and all(
        abs(inflated[i].center - inflated[j].center) > inflated[i].radius + inflated[j].radius
        for i in range(len(inflated)) for j in range(i + 1, len(inflated))
    )
    if disjoint:
        return math.pi * R * R - sum(math.pi * h.radius ** 2 for h in inflated)
    c = domain.outer.center
    xs = np.linspace(-R, R, grid)
    X, Y = np.meshgrid(xs, xs)
    Z = c + X + 1j * Y
    inside = np.asarray(domain.boundary_distance(Z)) >= eps
    return float(inside.mean() * (2 * R) ** 2)


def hex_rows(domain: Domain, pitch: float, inset: float = 0.0):
    """Row-major hexagonal lattice points of the outer disc's bounding box (lazy, bottom row first)."""
    c = domain.outer.center
    R = domain.outer.radius - inset
    dy = pitch * math.sqrt(3.0) / 2.0
    ny = int(math.floor(2 * R / dy)) + 1
    for j in range(ny):
        y = -R + j * dy
        half = math.sqrt(max(0.0, R * R - y * y))
        shift = 0.5 * pitch if j % 2 else 0.0
        k0 = math.ceil((-half - shift) / pitch)
        k1 = math.floor((half - shift) / pitch)
        if k1 < k0:
            continue
        xs = shift + pitch * np.arange(k0, k1 + 1)
        yield c + xs + 1j * y


def find_base_point(domain: Domain, S: Sequence[complex], A: float, s: int, eps: float) -> complex:
    """First lattice point of B_eps at distance >= 2A/s from S (lattice pitch A/(2s))."""
    if domain.surface != CHART:
        raise KindMismatch("base points are searched in a planar chart")
    s_eff = max(int(s), 1)
    rad = 2.0 * A / s_eff
    need = len(S) * disc_area(CHART, rad)
    have = b_eps_area(domain, eps)
    if not need < have / 4.0:
        raise NoRoomForBase(f"V(S, 2A/s) may cover {need:.4g} > area(B_eps)/4 = {have / 4:.4g}; shrink A")
    tree = None
    if len(S):
        P = np.asarray(S, dtype=complex)
        tree = cKDTree(np.column_stack([P.real, P.imag]))
    for row in hex_rows(domain, A / (2.0 * s_eff), eps):
        row = row[np.asarray(domain.boundary_distance(row)) >= eps]
        if row.size == 0:
            continue
        if tree is not None:
            d, _ = tree.query(np.column_stack([row.real, row.imag]))
            row = row[d >= rad]
        if row.size:
            return complex(row[0])
    raise NoRoomForBase("no lattice point of B_eps clears the punctures")


# --------------------------------------------------------------------------
# templates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TemplateGeometry:
    """Per-domain template scales: circumnavigation width per hole, stick half-width, eps."""

    widths: tuple[float, ...]
    half_width: float
    eps: float

    @classmethod
    def of(cls, domain: Domain) -> "TemplateGeometry":
        if domain.outer is None:
            raise ValidationError("templates need an outer disc")
        if not domain.holes:
            raise ValidationError("templates need at least one hole")
        ws = []
        for i, h in enumerate(domain.holes):
            gap = domain.outer.radius - abs(h.center - domain.outer.center) - h.radius
            for j, g in enumerate(domain.holes):
                if j != i:
                    gap = min(gap, abs(h.center - g.center) - h.radius - g.radius)
            if not gap > 0:
                raise ValidationError(f"hole {i} touches another hole or the outer boundary")
            ws.append(min(0.1 * h.radius, gap / 4.0))
        e = 0.25 * min(ws)
        return cls(tuple(ws), e, 3.0 * max(ws))


def _visibility_path(domain, geo: TemplateGeometry, start: complex, target: int) -> np.ndarray:
    """Shortest polyline from start to the centre of hole ``target`` around the other holes.

    Obstacles are the other holes inflated by their width plus two stick half-widths,
    approximated from outside by circumscribed 32-gons.
    """
    e = geo.half_width
    obst = [(h.center, h.radius + geo.widths[j] + 2.0 * e)
            for j, h in enumerate(domain.holes) if j != target]
    goal = domain.holes[target].center
    nodes = [start, goal]
    m = 32
    for c, rr in obst:
        R = rr / math.cos(math.pi / m) * (1.0 + 1e-9)
        for k in range(m):
            v = c + R * np.exp(1j * (TWO_PI * k / m))
            nodes.append(complex(v))
    nodes = np.asarray(nodes)
    inner = domain.outer.radius - e
    usable = np.abs(nodes - domain.outer.center) < inner
    usable[:2] = True
    N = len(nodes)

    def clear(p, q):
        for c, rr in obst:
            if point_segment_distance(c, p, q) < rr * (1.0 - 1e-12):
                return False
        return True

    W = np.zeros((N, N))
    for i in range(N):
        if not usable[i]:
            continue
        for j in range(i + 1, N):
            if usable[j] and clear(nodes[i], nodes[j]):
                W[i, j] = W[j, i] = abs(nodes[i] - nodes[j])
    dist, pred = dijkstra(W, directed=False, indices=0, return_predecessors=True)
    if not np.isfinite(dist[1]):
        raise ValidationError("no route from the base to the hole")
    path = [1]
    while path[-1] != 0:
        path.append(int(pred[path[-1]]))
    return nodes[path[::-1]]


def _offset(path: np.ndarray, e: float) -> tuple[np.ndarray, np.ndarray]:
    """Left and right miter offsets of an open polyline."""
    d = np.diff(path)
    u = d / np.abs(d)
    n = 1j * u  # left normal
    left, right = [path[0] + e * n[0]], [path[0] - e * n[0]]
    for k in range(1, len(path) - 1):
        bis = n[k - 1] + n[k]
        bis = bis / abs(bis)
        scale = e / max((bis * np.conj(n[k])).real, 0.2)
        left.append(path[k] + scale * bis)
        right.append(path[k] - scale * bis)
    left.append(path[-1] + e * n[-1])
    right.append(path[-1] - e * n[-1])
    return np.asarray(left), np.asarray(right)


def template_loop(domain: Domain, base: complex, hole: int, geo: TemplateGeometry | None = None) -> PolyLoop:
    """Simple loop at ``base`` going once counter-clockwise around hole ``hole``.

    A thin stick of half-width e runs from the base towards the hole, the loop
    goes out along one side, around the circle of radius rho + w the long way,
    and back along the other side.  The base vertex is the tip of a triangular cap.
    """
    geo = geo or TemplateGeometry.of(domain)
    base = complex(base)
    if any(abs(base - h.center) <= h.radius for h in domain.holes):
        raise BadBase("base lies inside a hole")
    if not float(domain.boundary_distance(base)) > 0:
        raise BadBase("base is outside the domain")
    h = domain.holes[hole]
    e = geo.half_width
    w = geo.widths[hole]
    Rc = h.radius + w
    if abs(base - h.center) <= Rc + 3.0 * e:
        raise BadBase("base is too close to the hole for a template")
    d0 = (h.center - base) / abs(h.center - base)
    q0 = base + e * d0
    path = _visibility_path(domain, geo, q0, hole)
    # truncate at the first entry into the disc of radius Rc + 2e, then go radially to Rc
    outer_r = Rc + 2.0 * e
    cut = None
    for k in range(len(path) - 1):
        lo, _ = segment_disc_interval(path[k], path[k + 1], h.center, outer_r)
        lo = float(lo)
        if not math.isnan(lo):
            cut = (k, lo)
            break
    k, t = cut
    entry = path[k] + t * (path[k + 1] - path[k])
    radial = (entry - h.center) / abs(entry - h.center)
    centre = np.concatenate([path[:k + 1], [entry, h.center + Rc * radial]])
    centre = _dedupe_open(centre)
    left, right = _offset(centre, e)
    # side end points pushed onto the circle along the final radial direction
    left_end = _onto_circle(left[-2], left[-1], h.center, Rc)
    right_end = _onto_circle(right[-2], right[-1], h.center, Rc)
    left[-1], right[-1] = left_end, right_end
    aL = math.atan2((left_end - h.center).imag, (left_end - h.center).real)
    aR = math.atan2((right_end - h.center).imag, (right_end - h.center).real)
    # long way from the right side to the left side: counter-clockwise from aR... passing opposite the mouth
    mouth = math.atan2(radial.imag, radial.real)
    sweep = (aL - aR) % TWO_PI
    if ((mouth - aR) % TWO_PI) < sweep:
        sweep = sweep - TWO_PI  # go clockwise instead, avoiding the mouth
    m = max(8, int(math.ceil(abs(sweep) / (TWO_PI / 96))))
    ts = aR + sweep * np.arange(1, m) / m
    ring = h.center + Rc * np.exp(1j * ts)
    pts = np.concatenate([[base], right, ring, left[::-1]])
    loop = PolyLoop(_dedupe(pts))
    if winding_number(loop, h.center) < 0:
        loop = loop.reversed().normalized()
    return loop


def _dedupe_open(pts: np.ndarray) -> np.ndarray:
    keep = [0]
    for i in range(1, len(pts)):
        if abs(pts[i] - pts[keep[-1]]) > TOL:
            keep.append(i)
    return pts[keep]


def _onto_circle(p: complex, q: complex, c: complex, R: float) -> complex:
    """Point where the ray from p through q first meets the circle (|.-c| = R) from outside."""
    d = q - p
    f = p - c
    A = abs(d) ** 2
    B = 2.0 * (f * d.conjugate()).real
    C = abs(f) ** 2 - R * R
    disc = B * B - 4 * A * C
    if disc < 0:
        raise BadBase("template stick misses its circle")
    t = (-B - math.sqrt(disc)) / (2 * A)
    return p + t * d


def template_loops(domain: Domain, base: complex) -> list[tuple[int, PolyLoop]]:
    geo = TemplateGeometry.of(domain)
    return [(i + 1, template_loop(domain, base, i, geo)) for i in range(len(domain.holes))]


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Constants:
    a: float
    H: float
    A: float
    L: float
    c: float
    c0: float
    r: float
    r0: float
    eps: float
    vol_b_eps: float
    eta: float
    sweep: int

    def to_json(self) -> dict:
        return {k: (v if math.isfinite(v) else str(v)) if isinstance(v, float) else v
                for k, v in self.__dict__.items()}


def base_sweep(domain: Domain, eps: float, pitch: float, ring: int = 24) -> list[complex]:
    """Lattice points of B_eps plus points on its boundary circles."""
    pts = []
    for row in hex_rows(domain, pitch, eps):
        pts.extend(row[np.asarray(domain.boundary_distance(row)) >= eps].tolist())
    circles = [(domain.outer.center, domain.outer.radius - eps)]
    circles += [(h.center, h.radius + eps) for h in domain.holes]
    for c, rr in circles:
        for k in range(ring):
            z = c + rr * complex(math.cos(TWO_PI * (k + 0.5) / ring), math.sin(TWO_PI * (k + 0.5) / ring))
            if float(domain.boundary_distance(z)) >= eps * (1.0 - 1e-12):
                pts.append(z)
    return pts


def largest_p2(loop: PolyLoop, hi: float, iters: int = 30) -> float:
    if p2_worst(loop, hi)[0] == 1:
        return hi
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if p2_worst(loop, mid)[0] == 1:
            lo = mid
        else:
            hi = mid
    return lo


def assemble_constants(domain: Domain, generators: Sequence[int] | None = None,
                       eta: float = 0.05, sweep_pitch: float | None = None) -> Constants:
    """a, H, A, L for the upper-bound pipeline.

    a is the largest parameter valid for every template over the base sweep, H the
    largest template length plus a Lipschitz margin for bases between sweep
    points; A = min(a, r, r0, sqrt(vol(B_eps) / (4 c0))) / 2 and L = c (H / A + c0),
    with c = 2 / (1 - eta) the factor of the certified length integrator.
    """
    if domain.surface != CHART:
        raise KindMismatch("constants are assembled in a planar chart")
    geo = TemplateGeometry.of(domain)
    gens = list(generators) if generators is not None else list(range(1, len(domain.holes) + 1))
    pitch = sweep_pitch or domain.outer.radius / 4.0
    bases = base_sweep(domain, geo.eps, pitch)
    a = math.inf
    H = 0.0
    for b in bases:
        for g in gens:
            loop = template_loop(domain, b, g - 1, geo)
            holes, outer = loop_boundary_gaps(loop, domain)
            p1 = min([outer] + holes) / 4.0 * (1.0 - 1e-12)
            a = min(a, largest_p2(loop, min(p1, a)))
            H = max(H, loop.length())
    H += 4.0 * pitch
    r = injectivity_radius(CHART)
    r0 = BDP_RADIUS
    c0 = bdp_constant(CHART, r0)
    vol = b_eps_area(domain, geo.eps)
    A = 0.5 * min(a, r, r0, math.sqrt(vol / (4.0 * c0)))
    c = 2.0 / (1.0 - eta)
    L = c * (H / A + c0)
    return Constants(a, H, A, L, c, c0, r, r0, geo.eps, vol, eta, len(bases))
