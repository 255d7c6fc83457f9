"""Surfaces, discs and domains.

Two surface kinds are supported: the round unit sphere (points are unit
3-vectors, stored as tuples) and a flat planar chart (points are Python
``complex``).  Distances are geodesic angles on the sphere and Euclidean moduli
in the chart.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..errors import BadRadius, KindMismatch, ValidationError

SPHERE = "sphere"
CHART = "chart"
KINDS = (SPHERE, CHART)

TOL = 1e-9


# --------------------------------------------------------------------------
# points
# --------------------------------------------------------------------------

def kind_of(p) -> str:
    if isinstance(p, (complex, float, int, np.complexfloating, np.floating, np.integer)):
        return CHART
    if len(p) == 3:
        return SPHERE
    raise KindMismatch(f"not a surface point: {p!r}")


def sphere_point(p) -> tuple[float, float, float]:
    """Validate a sphere point and return it as a float tuple."""
    v = tuple(float(x) for x in p)
    if len(v) != 3:
        raise KindMismatch(f"sphere points are 3-vectors, got {p!r}")
    n = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
    if abs(n - 1.0) > TOL:
        raise ValidationError(f"sphere point has norm {n}, expected 1")
    return v


def normalized(v) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float)
    a = a / np.linalg.norm(a)
    return (float(a[0]), float(a[1]), float(a[2]))


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    # atan2 form stays accurate near 0 and pi, unlike arccos of the dot product
    return float(math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v))))


def distance(p, q) -> float:
    kp, kq = kind_of(p), kind_of(q)
    if kp != kq:
        raise KindMismatch(f"cannot measure between a {kp} point and a {kq} point")
    if kp == CHART:
        return abs(complex(p) - complex(q))
    return _angle(np.asarray(p, dtype=float), np.asarray(q, dtype=float))


def sphere_angles(points: np.ndarray, q) -> np.ndarray:
    """Geodesic angles from each row of ``points`` (n, 3) to ``q``."""
    q = np.asarray(q, dtype=float)
    cr = np.linalg.norm(np.cross(points, q), axis=-1)
    return np.arctan2(cr, points @ q)


# --------------------------------------------------------------------------
# metric constants
# --------------------------------------------------------------------------

def curvature_mu(kind: str) -> float:
    """max |K| + 1 for the fixed metric of the surface kind."""
    _check_kind(kind)
    return 2.0 if kind == SPHERE else 1.0


def injectivity_radius(kind: str) -> float:
    _check_kind(kind)
    return math.pi if kind == SPHERE else math.inf


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise KindMismatch(f"unknown surface kind {kind!r}")


def _check_radius(kind: str, r: float) -> None:
    _check_kind(kind)
    if not (r > 0):
        raise BadRadius(f"radius must be positive, got {r}")
    if kind == SPHERE and not r <= math.pi:
        raise BadRadius(f"sphere radius must not exceed pi, got {r}")


def disc_boundary_length(kind: str, r: float) -> float:
    _check_radius(kind, r)
    if kind == CHART:
        return 2.0 * math.pi * r
    return 2.0 * math.pi * math.sin(r)


def disc_area(kind: str, r: float) -> float:
    _check_radius(kind, r)
    if kind == CHART:
        return math.pi * r * r
    return 2.0 * math.pi * (1.0 - math.cos(r))


def bdp_formula(kind: str, r0: float) -> float:
    """pi (2 + mu r0^2) / 3, the constant produced by the curvature expansion."""
    _check_radius(kind, r0)
    if not r0 < injectivity_radius(kind):
        raise BadRadius(f"r0 must be below the injectivity radius, got {r0}")
    return math.pi * (2.0 + curvature_mu(kind) * r0 * r0) / 3.0


def bdp_constant(kind: str, r0: float) -> float:
    """A constant c0 with length(dD(x,r)) <= c0 r and area(D(x,r)) <= c0 r^2 for r <= r0.

    The curvature-expansion value alone is below 2*pi for small r0, which would
    make the length inequality false even in the flat chart, so the flat
    circumference constant is taken as a floor.
    """
    return max(bdp_formula(kind, r0), 2.0 * math.pi)


# --------------------------------------------------------------------------
# discs and domains
# --------------------------------------------------------------------------

def _point_kind_and_value(center):
    k = kind_of(center)
    if k == CHART:
        return k, complex(center)
    return k, sphere_point(center)


@dataclass(frozen=True)
class Disc:
    center: object
    radius: float

    def __post_init__(self):
        k, c = _point_kind_and_value(self.center)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise BadRadius(f"disc radius must be positive, got {self.radius}")
        if k == SPHERE and not self.radius < math.pi:
            raise BadRadius(f"sphere disc radius must be below pi, got {self.radius}")

    @property
    def kind(self) -> str:
        return kind_of(self.center)

    def contains(self, p, strict: bool = False) -> bool:
        d = distance(self.center, p)
        return d < self.radius if strict else d <= self.radius + TOL

    def boundary_length(self) -> float:
        return disc_boundary_length(self.kind, self.radius)

    def area(self) -> float:
        return disc_area(self.kind, self.radius)

    def scaled(self, factor: float, origin: complex = 0j) -> "Disc":
        if self.kind != CHART:
            raise KindMismatch("only chart discs can be rescaled")
        return Disc(origin + factor * (self.center - origin), self.radius * factor)

    def to_json(self) -> dict:
        return {"c": _point_to_json(self.center), "r": self.radius}

    @classmethod
    def from_json(cls, obj, kind: str) -> "Disc":
        return cls(_point_from_json(obj["c"], kind), obj["r"])


def _point_to_json(p):
    if kind_of(p) == CHART:
        p = complex(p)
        return [p.real, p.imag]
    return list(p)


def _point_from_json(obj, kind: str):
    if kind == CHART:
        if len(obj) != 2:
            raise ValidationError(f"chart points are [re, im], got {obj!r}")
        return complex(float(obj[0]), float(obj[1]))
    if len(obj) != 3:
        raise ValidationError(f"sphere points are [x, y, z], got {obj!r}")
    return sphere_point(obj)


@dataclass(frozen=True)
class Domain:
    """A surface minus disjoint closed holes, inside an optional outer disc, minus punctures."""

    surface: str
    outer: Disc | None = None
    holes: tuple = ()
    punctures: tuple = ()
    _validated: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        _check_kind(self.surface)
        object.__setattr__(self, "holes", tuple(self.holes))
        pts = tuple(_point_kind_and_value(p)[1] for p in self.punctures)
        object.__setattr__(self, "punctures", pts)
        self._validate()

    # -- validation -------------------------------------------------------
    def _validate(self) -> None:
        discs = list(self.holes) + ([self.outer] if self.outer is not None else [])
        for d in discs:
            if d.kind != self.surface:
                raise KindMismatch(f"{d.kind} disc in a {self.surface} domain")
        for p in self.punctures:
            if kind_of(p) != self.surface:
                raise KindMismatch(f"{kind_of(p)} puncture in a {self.surface} domain")
        hs = self.holes
        for i in range(len(hs)):
            for j in range(i + 1, len(hs)):
                if distance(hs[i].center, hs[j].center) <= hs[i].radius + hs[j].radius + TOL:
                    raise ValidationError(f"holes {i} and {j} are not disjoint")
        if self.outer is not None:
            for i, h in enumerate(hs):
                if distance(h.center, self.outer.center) + h.radius >= self.outer.radius - TOL:
                    raise ValidationError(f"hole {i} meets the outer boundary")
        if self.punctures:
            if self.surface == CHART:
                pts = np.asarray(self.punctures, dtype=complex)
                coords = np.column_stack([pts.real, pts.imag])
            else:
                pts = np.asarray(self.punctures, dtype=float)
                coords = pts
            inside = np.atleast_1d(self.boundary_distance(pts)) > 0.0
            if not inside.all():
                i = int(np.argmin(inside))
                raise ValidationError(f"puncture {i} is not interior to the domain")
            if len(pts) > 1:
                close = cKDTree(coords).query_pairs(TOL)
                if close:
                    i, j = sorted(min(close))
                    raise ValidationError(f"punctures {i} and {j} coincide")

    def in_closure_interior(self, p) -> bool:
        """Interior of B_0 (holes and outer exterior removed, punctures ignored)."""
        return self.boundary_distance(p) > 0.0

    # -- metric queries ---------------------------------------------------
    @property
    def kind(self) -> str:
        return self.surface

    def boundary_distance(self, z):
        """Signed distance to the boundary of B_0: positive inside, negative outside.

        Vectorized over numpy arrays of chart points (complex) or sphere points (n, 3).
        """
        if self.surface == CHART:
            z = np.asarray(z, dtype=complex)
            out = np.full(z.shape, np.inf)
            for h in self.holes:
                out = np.minimum(out, np.abs(z - h.center) - h.radius)
            if self.outer is not None:
                out = np.minimum(out, self.outer.radius - np.abs(z - self.outer.center))
            return out if out.ndim else float(out)
        pts = np.asarray(z, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        out = np.full(len(pts), np.inf)
        for h in self.holes:
            out = np.minimum(out, sphere_angles(pts, h.center) - h.radius)
        if self.outer is not None:
            out = np.minimum(out, self.outer.radius - sphere_angles(pts, self.outer.center))
        return float(out[0]) if single else out

    def puncture_distance(self, z):
        if not self.punctures:
            if self.surface == CHART:
                z = np.asarray(z, dtype=complex)
                return np.full(z.shape, np.inf) if z.ndim else math.inf
            pts = np.asarray(z, dtype=float)
            return math.inf if pts.ndim == 1 else np.full(len(pts), np.inf)
        if self.surface == CHART:
            z = np.asarray(z, dtype=complex)
            P = np.asarray(self.punctures, dtype=complex)
            d = np.abs(z[..., None] - P).min(axis=-1)
            return d if d.ndim else float(d)
        pts = np.asarray(z, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        P = np.asarray(self.punctures, dtype=float)
        d = np.min([sphere_angles(pts, p) for p in P], axis=0)
        return float(d[0]) if single else d

    def clearance(self, z):
        """Distance to the full complement: holes, outer exterior and punctures."""
        return np.minimum(self.boundary_distance(z), self.puncture_distance(z))

    def contains(self, z) -> bool:
        return bool(self.clearance(z) > 0.0)

    # -- constructors -----------------------------------------------------
    def with_punctures(self, points: Iterable) -> "Domain":
        return Domain(self.surface, self.outer, self.holes, tuple(points))

    def without_punctures(self) -> "Domain":
        return Domain(self.surface, self.outer, self.holes, ())

    def scaled(self, factor: float, origin: complex = 0j) -> "Domain":
        if self.surface != CHART:
            raise KindMismatch("only chart domains can be rescaled")
        outer = self.outer.scaled(factor, origin) if self.outer is not None else None
        return Domain(
            CHART,
            outer,
            tuple(h.scaled(factor, origin) for h in self.holes),
            tuple(origin + factor * (p - origin) for p in self.punctures),
        )

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        obj = {"surface": self.surface}
        if self.outer is not None:
            obj["outer"] = self.outer.to_json()
        obj["holes"] = [h.to_json() for h in self.holes]
        obj["punctures"] = [_point_to_json(p) for p in self.punctures]
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "Domain":
        try:
            kind = obj["surface"]
        except (KeyError, TypeError):
            raise ValidationError("domain JSON needs a 'surface' field") from None
        _check_kind(kind)
        outer = Disc.from_json(obj["outer"], kind) if obj.get("outer") is not None else None
        if kind == CHART and outer is None and obj.get("allow_unbounded") is not True:
            raise ValidationError("chart domains need an 'outer' disc")
        holes = tuple(Disc.from_json(h, kind) for h in obj.get("holes", []))
        punctures = tuple(_point_from_json(p, kind) for p in obj.get("punctures", []))
        return cls(kind, outer, holes, punctures)

    @classmethod
    def loads(cls, text: str) -> "Domain":
        return cls.from_json(json.loads(text))


def annulus(inner: float, outer: float, center: complex = 0j) -> Domain:
    return Domain(CHART, Disc(center, outer), (Disc(center, inner),))


def pair_of_pants(R: float = 4.0, sep: float = 2.0, rho: float = 0.5) -> Domain:
    return Domain(CHART, Disc(0j, R), (Disc(-sep + 0j, rho), Disc(sep + 0j, rho)))


# --------------------------------------------------------------------------
# stereographic charts
# --------------------------------------------------------------------------

class Stereographic:
    """Stereographic projection from ``pole`` onto the plane through the origin orthogonal to it.

    A cap of angular radius rho around the pole maps to the exterior of the disc
    of radius cot(rho/2); the projection is conformal with length factor
    1 / (1 - x . pole).
    """

    def __init__(self, pole):
        self.pole = np.asarray(sphere_point(pole), dtype=float)
        # deterministic orthonormal basis of the tangent plane
        helper = np.array([1.0, 0.0, 0.0]) if abs(self.pole[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = helper - np.dot(helper, self.pole) * self.pole
        self.e1 = e1 / np.linalg.norm(e1)
        self.e2 = np.cross(self.pole, self.e1)

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        t = 1.0 - x @ self.pole
        w = (x @ self.e1 + 1j * (x @ self.e2)) / t
        return complex(w) if np.ndim(w) == 0 else w

    def inverse(self, w):
        w = np.asarray(w, dtype=complex)
        m2 = np.abs(w) ** 2
        s = 2.0 / (1.0 + m2)
        x = (s * w.real)[..., None] * self.e1 + (s * w.imag)[..., None] * self.e2 \
            + ((m2 - 1.0) / (m2 + 1.0))[..., None] * self.pole
        return x

    def length_factor(self, x):
        """|dw| / |dx| at the sphere point x."""
        x = np.asarray(x, dtype=float)
        return 1.0 / (1.0 - x @ self.pole)

    def image_disc(self, cap: Disc) -> Disc:
        """Image of a cap not containing the pole (circles go to circles)."""
        c = np.asarray(cap.center, dtype=float)
        if _angle(c, self.pole) <= cap.radius:
            raise ValidationError("cap contains the projection pole")
        u = np.cross(c, self.e1 if abs(np.dot(c, self.e1)) < 0.9 else self.e2)
        u /= np.linalg.norm(u)
        v = np.cross(c, u)
        pts = [math.cos(cap.radius) * c + math.sin(cap.radius) * (math.cos(t) * u + math.sin(t) * v)
               for t in (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)]
        a, b, d = (self.forward(p) for p in pts)
        center = _circumcenter(a, b, d)
        return Disc(center, abs(a - center))


def _circumcenter(a: complex, b: complex, c: complex) -> complex:
    ax, ay, bx, by, cx, cy = a.real, a.imag, b.real, b.imag, c.real, c.imag
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return complex(ux, uy)


def to_chart(domain: Domain, pole_hole: int = -1) -> tuple[Domain, Stereographic]:
    """Project a sphere domain from the centre of one hole; that hole becomes the outer exterior."""
    if domain.surface == CHART:
        raise KindMismatch("domain is already a chart")
    if not domain.holes:
        raise ValidationError("stereographic chart needs a hole to project from")
    idx = pole_hole % len(domain.holes)
    pole = domain.holes[idx]
    proj = Stereographic(pole.center)
    outer = Disc(0j, 1.0 / math.tan(pole.radius / 2.0))
    holes = tuple(proj.image_disc(h) for i, h in enumerate(domain.holes) if i != idx)
    punctures = tuple(proj.forward(p) for p in domain.punctures)
    return Domain(CHART, outer, holes, punctures), proj


def chart_points(points: Sequence) -> np.ndarray:
    return np.asarray([complex(p) for p in points], dtype=complex)
