"""Admissibility of a rerouting parameter a for a loop.

P1 asks for 4a below the loop's distance to the domain boundary (and below the
injectivity radius, infinite in a flat chart).  P2 asks that for every sample x
on the loop, the loop meets the closed disc V(x, 2a) in one connected piece.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..errors import KindMismatch
from .core import CHART, injectivity_radius
from .loops import PolyLoop, loop_boundary_gaps, segment_disc_interval


@dataclass(frozen=True)
class AdmissibilityReport:
    p1: bool
    p2: bool
    boundary_gap: float
    injectivity: float
    worst_sample: complex | None = None
    worst_pieces: int = 1

    @property
    def ok(self) -> bool:
        return self.p1 and self.p2


def loop_samples(loop: PolyLoop, spacing: float) -> np.ndarray:
    """Vertices plus points along each segment no further than ``spacing`` apart."""
    a, b = loop.segments()
    counts = np.maximum(1, np.ceil(np.abs(b - a) / spacing).astype(int))
    pts = [a[i] + (b[i] - a[i]) * np.arange(counts[i]) / counts[i] for i in range(len(a))]
    return np.concatenate(pts)


def pieces_in_disc(loop: PolyLoop, x: complex, radius: float, tree=None, reach=None) -> int:
    """Number of connected components of loop ∩ closed disc(x, radius)."""
    a, b = loop.segments()
    n = len(a)
    if tree is not None:
        idx = np.asarray(sorted(tree.query_ball_point([x.real, x.imag], radius + reach)), dtype=int)
    else:
        idx = np.arange(n)
    if idx.size == 0:
        return 0
    lo, hi = segment_disc_interval(a[idx], b[idx], x, radius)
    hit = ~np.isnan(lo)
    if not hit.any():
        return 0
    hits = set(idx[hit].tolist())
    # segments k and k+1 join inside the disc when their shared vertex lies in it
    links = sum(1 for k in hits if (k + 1) % n in hits and abs(b[k] - x) <= radius)
    return max(1, len(hits) - links)


def check_P1_P2(domain, loop: PolyLoop, a: float) -> AdmissibilityReport:
    if domain.surface != CHART:
        raise KindMismatch("admissibility is checked in a planar chart")
    holes, outer = loop_boundary_gaps(loop, domain)
    gap = min([outer] + holes)
    inj = injectivity_radius(CHART)
    p1 = 4.0 * a < min(gap, inj)

    k, x = p2_worst(loop, a)
    return AdmissibilityReport(bool(p1), k == 1, gap, inj, x, k)


def p2_worst(loop: PolyLoop, a: float) -> tuple[int, complex | None]:
    """(pieces, sample) for the first sample whose 2a-disc meets the loop in != 1 piece."""
    A, B = loop.segments()
    n = len(A)
    samples = loop_samples(loop, a)
    mids = (A + B) / 2.0
    reach = float(np.abs(B - A).max()) / 2.0
    rad = 2.0 * a
    t_seg = cKDTree(np.column_stack([mids.real, mids.imag]))
    t_smp = cKDTree(np.column_stack([samples.real, samples.imag]))
    pairs = t_smp.sparse_distance_matrix(t_seg, rad + reach, output_type="ndarray")
    si = pairs["i"].astype(np.int64)
    kj = pairs["j"].astype(np.int64)
    x = samples[si]
    lo, _ = segment_disc_interval(A[kj], B[kj], x, rad)
    hit = ~np.isnan(lo)
    si, kj, x = si[hit], kj[hit], x[hit]
    keys = si * n + kj
    nxt = si * n + (kj + 1) % n
    linked = np.isin(nxt, keys) & (np.abs(B[kj] - x) <= rad)
    hits = np.bincount(si, minlength=len(samples))
    links = np.bincount(si[linked], minlength=len(samples))
    pieces = np.maximum(hits - links, 1)
    pieces[hits == 0] = 0
    bad = np.nonzero(pieces != 1)[0]
    if bad.size == 0:
        return 1, None
    return int(pieces[bad[0]]), complex(samples[bad[0]])


def largest_admissible(domain, loop: PolyLoop, hi: float | None = None, iters: int = 40) -> float:
    """Largest a (up to bisection resolution) passing both conditions."""
    holes, outer = loop_boundary_gaps(loop, domain)
    p1_limit = min([outer] + holes) / 4.0
    hi = p1_limit * (1.0 - 1e-12) if hi is None else min(hi, p1_limit * (1.0 - 1e-12))
    if hi <= 0:
        return 0.0
    if check_P1_P2(domain, loop, hi).ok:
        return hi
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if check_P1_P2(domain, loop, mid).ok:
            lo = mid
        else:
            hi = mid
    return lo
