"""Certified bounds for the Kobayashi–Royden density and for Kobayashi lengths of loops.

Normalization is curvature -1: the unit disc has density 2 / (1 - |z|^2).

Upper bounds come from the largest round disc around z that avoids the
complement (the inclusion of that disc is a holomorphic witness).  Lower bounds
come from the distance-decreasing property: the domain sits inside each of a
few model domains with known densities (a punctured disc around every
puncture, the exterior of every hole, the outer disc, and optional half-planes),
so the density is at least the largest model density.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import KindMismatch, OutsideDomain, TouchesComplement, ValidationError
from .geometry import CHART, SPHERE, Disc, Domain, PolyLoop, Stereographic, point_segment_distance

DEFAULT_ETA = 0.05
NEAREST_PUNCTURES = 8


@dataclass(frozen=True)
class HalfPlane:
    """{z : Re((z - point) * conj(normal)) > 0} with ``normal`` a unit inward normal."""

    point: complex
    normal: complex

    def depth(self, z):
        return ((np.asarray(z) - self.point) * np.conj(self.normal)).real


@dataclass(frozen=True, eq=False)
class DensityBand:
    domain: Domain
    half_planes: tuple[HalfPlane, ...] = ()
    puncture_radii: np.ndarray = field(init=False, repr=False)
    _tree: object = field(init=False, repr=False)
    _punct: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.domain.surface != CHART:
            raise KindMismatch("density bands live on planar charts; see sphere_density")
        P = np.asarray(self.domain.punctures, dtype=complex)
        outer = self.domain.outer
        if outer is not None:
            R = np.abs(P - outer.center) + outer.radius
        else:
            R = np.full(P.shape, np.inf)
        R.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "puncture_radii", R)
        object.__setattr__(self, "_punct", P)
        tree = cKDTree(np.column_stack([P.real, P.imag])) if P.size else None
        object.__setattr__(self, "_tree", tree)

    # -- distances --------------------------------------------------------
    def clearance(self, z):
        """Distance from z to the complement (holes, outer exterior, punctures, half-plane exteriors)."""
        z = np.asarray(z, dtype=complex)
        out = np.asarray(self.domain.boundary_distance(z), dtype=float)
        if self._tree is not None:
            d, _ = self._tree.query(np.column_stack([z.real.ravel(), z.imag.ravel()]))
            out = np.minimum(out, d.reshape(z.shape))
        for hp in self.half_planes:
            out = np.minimum(out, hp.depth(z))
        return out if out.ndim else float(out)

    def _check_inside(self, z) -> None:
        c = np.asarray(self.clearance(z))
        if not np.all(c > 0):
            raise OutsideDomain("point is not interior to the punctured domain")

    # -- densities --------------------------------------------------------
    def upper_density(self, z):
        self._check_inside(z)
        return 2.0 / self.clearance(z)

    def lower_density(self, z):
        """Max of the comparison densities at z.

        Differences such as z - c and R^2 - |z - c|^2 are formed in extended
        precision: near the boundary they lose about |z| / clearance ulps in
        float64, enough to push the bound above the true density.
        """
        self._check_inside(z)
        z = np.asarray(z, dtype=complex)
        zl = z.astype(np.clongdouble)
        out = np.zeros(z.shape, dtype=np.longdouble)
        if self._punct.size:
            k = min(NEAREST_PUNCTURES, self._punct.size)
            _, idx = self._tree.query(np.column_stack([z.real.ravel(), z.imag.ravel()]), k=k)
            idx = idx.reshape(z.size, k)
            P = self._punct.astype(np.clongdouble)[idx]
            d = np.abs(zl.reshape(z.size, 1) - P)
            o = self.domain.outer
            if o is not None:
                R = np.abs(P - np.clongdouble(o.center)) + np.longdouble(o.radius)
                v = 1 / (d * np.log(R / d))
            else:
                v = np.zeros(d.shape, dtype=np.longdouble)
            out = np.maximum(out, v.max(axis=1).reshape(z.shape))
        for h in self.domain.holes:
            dd = np.abs(zl - np.clongdouble(h.center))
            out = np.maximum(out, 1 / (dd * np.log(dd / np.longdouble(h.radius))))
        o = self.domain.outer
        if o is not None:
            dd = np.abs(zl - np.clongdouble(o.center))
            R = np.longdouble(o.radius)
            out = np.maximum(out, 2 * R / ((R - dd) * (R + dd)))
        for hp in self.half_planes:
            w = (zl - np.clongdouble(hp.point)) * np.conj(np.clongdouble(hp.normal))
            out = np.maximum(out, 1 / w.real)
        out = out.astype(float)
        return out if out.ndim else float(out)

    # -- per-piece infima -------------------------------------------------
    def piece_lower(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Lower bound for the density along each segment [a_i, b_i]."""
        out = np.zeros(a.shape)
        if self._punct.size:
            mid = (a + b) / 2.0
            k = min(NEAREST_PUNCTURES, self._punct.size)
            _, idx = self._tree.query(np.column_stack([mid.real, mid.imag]), k=k)
            idx = idx.reshape(len(a), k)
            for col in range(k):
                p = self._punct[idx[:, col]]
                R = self.puncture_radii[idx[:, col]]
                lo = point_segment_distance(p, a, b)
                hi = np.maximum(np.abs(a - p), np.abs(b - p))
                out = np.maximum(out, _punctured_inf(lo, hi, R))
        for h in self.domain.holes:
            hi = np.maximum(np.abs(a - h.center), np.abs(b - h.center))
            out = np.maximum(out, 1.0 / (hi * np.log(hi / h.radius)))
        o = self.domain.outer
        if o is not None:
            lo = point_segment_distance(o.center, a, b)
            out = np.maximum(out, 2.0 * o.radius / (o.radius ** 2 - lo ** 2))
        for hp in self.half_planes:
            hi = np.maximum(hp.depth(a), hp.depth(b))
            out = np.maximum(out, 1.0 / hi)
        return out


def _punctured_inf(lo, hi, R):
    """inf of 1 / (d ln(R/d)) over d in [lo, hi]; the function has its minimum at R/e."""
    with np.errstate(divide="ignore", invalid="ignore"):
        f = lambda d: 1.0 / (d * np.log(R / d))
        crit = R / math.e
        inside = (lo <= crit) & (crit <= hi)
        v = np.where(inside, math.e / R, np.minimum(f(np.maximum(lo, 1e-300)), f(hi)))
        v = np.where(np.isfinite(R) & (hi < R), v, 0.0)
    return np.where(np.isnan(v), 0.0, v)


def make_band(domain: Domain, half_planes: Sequence[HalfPlane] = ()) -> DensityBand:
    return DensityBand(domain, tuple(half_planes))


def upper_density(band: DensityBand, z):
    return band.upper_density(z)


def lower_density(band: DensityBand, z):
    return band.lower_density(z)


# --------------------------------------------------------------------------
# closed-form models
# --------------------------------------------------------------------------

MODELS = ("disc", "punctured_disc", "disc_exterior", "annulus", "strip")


def oracle_density(model: str, z, param: float = 1.0):
    """Exact curvature -1 densities of the model domains.

    disc(r): |z| < r; punctured_disc(r): 0 < |z| < r; disc_exterior(rho): |z| > rho
    in the plane; annulus(rho): rho < |z| < 1; strip(h): 0 < Im z < h.
    """
    z = np.asarray(z, dtype=complex)
    # extended precision keeps the boundary-adjacent differences accurate
    zl = z.astype(np.clongdouble)
    a = np.abs(zl)
    P = np.longdouble(param)
    PI = np.longdouble("3.14159265358979323846264338327950288")
    with np.errstate(divide="ignore", invalid="ignore"):
        if model == "disc":
            ok = a < P
            val = 2 * P / ((P - a) * (P + a))
        elif model == "punctured_disc":
            ok = (a > 0) & (a < P)
            val = 1 / (a * np.log(P / a))
        elif model == "disc_exterior":
            ok = a > P
            val = 1 / (a * np.log(a / P))
        elif model == "annulus":
            if not 0 < param < 1:
                raise ValidationError("annulus model needs 0 < rho < 1")
            ok = (a > P) & (a < 1)
            L = np.log(1 / P)
            val = (PI / L) / (a * np.sin(PI * np.log(a) / np.log(P)))
        elif model == "strip":
            y = zl.imag
            ok = (y > 0) & (y < P)
            val = (PI / P) / np.sin(PI * y / P)
        else:
            raise ValidationError(f"unknown model {model!r}; choose from {MODELS}")
    val = val.astype(float)
    if not np.all(ok):
        raise OutsideDomain(f"point outside the {model} model")
    return val if np.ndim(val) else float(val)


def model_band(model: str, param: float = 1.0) -> DensityBand:
    """A density band whose domain is exactly the model domain."""
    if model == "disc":
        return DensityBand(Domain(CHART, Disc(0j, param)))
    if model == "punctured_disc":
        return DensityBand(Domain(CHART, Disc(0j, param), (), (0j,)))
    if model == "disc_exterior":
        return DensityBand(Domain(CHART, None, (Disc(0j, param),)))
    if model == "annulus":
        return DensityBand(Domain(CHART, Disc(0j, 1.0), (Disc(0j, param),)))
    if model == "strip":
        return DensityBand(Domain(CHART, None), (HalfPlane(0j, 1j), HalfPlane(1j * param, -1j)))
    raise ValidationError(f"unknown model {model!r}; choose from {MODELS}")


# --------------------------------------------------------------------------
# sphere evaluation
# --------------------------------------------------------------------------

def sphere_density(domain: Domain, x) -> tuple[float, float]:
    """(lower, upper) density at a sphere point, per unit of round length.

    Works in the stereographic chart from the hole centre farthest from x; the
    chart density is multiplied by the conformal factor |dw|/|dx|.
    """
    from .geometry import sphere_point, to_chart, distance
    if domain.surface != SPHERE:
        raise KindMismatch("expected a sphere domain")
    if not domain.holes:
        raise ValidationError("sphere domains need a hole to project from")
    x = sphere_point(x)
    far = max(range(len(domain.holes)), key=lambda i: distance(domain.holes[i].center, x))
    chart, proj = to_chart(domain, far)
    w = proj.forward(np.asarray(x))
    band = DensityBand(chart)
    f = proj.length_factor(np.asarray(x))
    return float(band.lower_density(w)) * f, float(band.upper_density(w)) * f


# --------------------------------------------------------------------------
# loop lengths
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LengthBound:
    lower: float
    upper: float
    pieces: int
    eta: float


MAX_LEVELS = 60


def _pieces(loop: PolyLoop, band: DensityBand, eta: float):
    """Nested dyadic refinement until every piece has length <= eta * endpoint clearance.

    Returns the accepted pieces as (start, end, min endpoint clearance) arrays.
    """
    if not 0 < eta < 0.5:
        raise ValidationError("eta must lie in (0, 0.5)")
    a, b = loop.segments()
    ca = np.asarray(band.clearance(a), dtype=float)
    if not np.all(ca > 0):
        raise TouchesComplement("loop vertex touches the complement")
    cb = np.roll(ca, -1)
    acc_a, acc_b, acc_m = [], [], []
    for _ in range(MAX_LEVELS):
        ell = np.abs(b - a)
        m = np.minimum(ca, cb)
        ok = ell <= eta * m
        acc_a.append(a[ok])
        acc_b.append(b[ok])
        acc_m.append(m[ok])
        if ok.all():
            break
        a, b, ca, cb = a[~ok], b[~ok], ca[~ok], cb[~ok]
        mid = (a + b) / 2.0
        cm = np.asarray(band.clearance(mid), dtype=float)
        if not np.all(cm > 0):
            raise TouchesComplement("loop touches the complement")
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        ca, cb = np.concatenate([ca, cm]), np.concatenate([cm, cb])
    else:
        raise TouchesComplement("refinement did not terminate; clearance is too small")
    return np.concatenate(acc_a), np.concatenate(acc_b), np.concatenate(acc_m)


def hyp_length_upper(loop: PolyLoop, band: DensityBand, eta: float = DEFAULT_ETA) -> float:
    """Certified upper bound on the Kobayashi length of the loop.

    On a piece of length l whose endpoints have clearance >= m, the clearance is
    >= m - l everywhere (1-Lipschitz), so the density is <= 2 / (m - l).
    """
    a, b, m = _pieces(loop, band, eta)
    ell = np.abs(b - a)
    return float(np.sum(2.0 * ell / (m - ell)))


def hyp_length_lower(loop: PolyLoop, band: DensityBand, eta: float = DEFAULT_ETA) -> float:
    """Certified lower bound: piece length times the per-piece infimum of the comparison density."""
    a, b, _ = _pieces(loop, band, eta)
    ell = np.abs(b - a)
    return float(np.sum(ell * band.piece_lower(a, b)))


def length_bounds(loop: PolyLoop, band: DensityBand, eta: float = DEFAULT_ETA) -> LengthBound:
    a, b, m = _pieces(loop, band, eta)
    ell = np.abs(b - a)
    up = float(np.sum(2.0 * ell / (m - ell)))
    lo = float(np.sum(ell * band.piece_lower(a, b)))
    return LengthBound(lo, up, len(a), eta)
