"""Disjoint-disc coverings of finite point sets."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import BadBudget, NumericalFailure, ValidationError
from .core import CHART, Disc, distance, kind_of, sphere_point

# cap area 2*pi*(1 - cos r) <= pi r^2 <= 2*pi r^2, and flat area pi r^2 <= 2*pi r^2
AREA_CONSTANT = 2.0 * math.pi


def _dist_matrix(points: list, kind: str) -> np.ndarray:
    if kind == CHART:
        z = np.asarray(points, dtype=complex)
        return np.abs(z[:, None] - z[None, :])
    x = np.asarray(points, dtype=float)
    cr = np.linalg.norm(np.cross(x[:, None, :], x[None, :, :]), axis=-1)
    return np.arctan2(cr, x @ x.T)


def cover_by_disjoint_discs(points: Sequence, special: Sequence = (), eps: float = 0.1) -> list[Disc]:
    """Pairwise disjoint closed discs covering a finite set, with total area at most eps.

    Points of ``special`` are handled first and each receives its own disc,
    which contains no other special point.  The n-th disc (n = 1, 2, ...) has
    radius below delta / 2**n with delta = min(sqrt(eps / c0), eps, 1), so the
    total area is below c0 * delta**2 / 3 <= eps / 3; every disc boundary
    avoids every input point, so each point lies in a disc interior.
    """
    if not eps > 0:
        raise BadBudget(f"area budget must be positive, got {eps}")
    pts = list(points)
    if not pts:
        return []
    kind = kind_of(pts[0])
    if kind == CHART:
        pts = [complex(p) for p in pts]
    else:
        pts = [sphere_point(p) for p in pts]
    key = (lambda p: p) if kind == CHART else (lambda p: tuple(p))
    index = {}
    for i, p in enumerate(pts):
        if key(p) in index:
            raise ValidationError("points must be distinct")
        index[key(p)] = i
    sp_idx = []
    for t in special:
        t = complex(t) if kind == CHART else sphere_point(t)
        if key(t) not in index:
            raise ValidationError("special points must belong to the point list")
        sp_idx.append(index[key(t)])
    special_set = set(sp_idx)
    order = sp_idx + [i for i in range(len(pts)) if i not in special_set]

    D = _dist_matrix(pts, kind)
    delta = min(math.sqrt(eps / AREA_CONSTANT), eps, 1.0)
    discs: list[Disc] = []
    owners: list[int] = []
    for i in order:
        # already strictly inside an earlier disc?
        if any(D[i, k] < d.radius for d, k in zip(discs, owners)):
            continue
        n = len(discs) + 1
        cap = delta * 0.5 ** n
        gaps = [cap]
        gaps += [D[i, k] - d.radius for d, k in zip(discs, owners)]
        gaps += [D[i, t] for t in sp_idx if t != i]
        limit = min(gaps)
        if not limit > 0:
            raise NumericalFailure("point lies on an earlier disc boundary")
        r = 0.45 * limit
        others = np.delete(D[i], i)
        for _ in range(64):
            if others.size == 0 or np.min(np.abs(others - r)) > 1e-12 * max(r, 1e-300):
                break
            r *= 0.75
        if not r > 0 or r < 1e-300:
            raise NumericalFailure("disc radius underflow; too many points for double precision")
        discs.append(Disc(pts[i], r))
        owners.append(i)
    return discs


def verify_cover(points: Sequence, special: Sequence, eps: float, discs: Sequence[Disc]) -> list[str]:
    """Independent check of the four covering postconditions; returns the list of failures."""
    bad = []
    for i in range(len(discs)):
        for j in range(i + 1, len(discs)):
            if distance(discs[i].center, discs[j].center) <= discs[i].radius + discs[j].radius:
                bad.append(f"discs {i} and {j} intersect")
    for p in points:
        if not any(distance(d.center, p) < d.radius for d in discs):
            bad.append(f"point {p!r} not in a disc interior")
    total = sum(d.area() for d in discs)
    if total > eps:
        bad.append(f"total area {total} exceeds {eps}")
    for d in discs:
        if d.radius > eps:
            bad.append(f"radius {d.radius} exceeds {eps}")
    owner = {}
    for t in special:
        hits = [k for k, d in enumerate(discs) if distance(d.center, t) < d.radius]
        for k in hits:
            if k in owner and owner[k] != tuple(np.atleast_1d(t)):
                bad.append(f"disc {k} holds two special points")
            owner[k] = tuple(np.atleast_1d(t))
    return bad
