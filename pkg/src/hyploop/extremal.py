"""Certified bracketing of the extremal length function L(alpha, s).

L(alpha, s) is the sup over puncture sets S with #S <= s of the infimum of
Kobayashi lengths of loops in the free class alpha.  ``scan_upper`` produces,
for adversarially chosen S, an explicit loop whose certified length bounds the
infimum from above; ``scan_lower`` places S as an economical covering and
bounds the infimum from below for every loop at once.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .covering import chart_covering_grid, chart_covering_radius
from .errors import InsufficientData, ObstructedRegime, ValidationError
from .geometry import CHART, Domain, PolyLoop
from .homotopy import Word, freely_homotopic, make_cut_system, systole_lower_bound
from .kobayashi import DEFAULT_ETA, DensityBand, hyp_length_upper
from .reroute import (
    Constants,
    StarParams,
    TemplateGeometry,
    assemble_constants,
    find_base_point,
    hex_rows,
    procedure_star,
    template_loop,
)

CSV_COLUMNS = ("s", "strategy", "trial", "lower", "upper", "base_re", "base_im")


# --------------------------------------------------------------------------
# strategies
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Context:
    domain: Domain
    base: complex  # reference base point (the one chosen when S is empty)
    loop: PolyLoop  # template loop at the reference base


def _inside(domain: Domain, z: np.ndarray) -> np.ndarray:
    return z[np.asarray(domain.clearance(z)) > 0]


def _distinct(z: np.ndarray) -> np.ndarray:
    _, idx = np.unique(np.round(np.column_stack([z.real, z.imag]), 12), axis=0, return_index=True)
    return z[np.sort(idx)]


def _rejection(domain: Domain, s: int, rng: np.random.Generator, sampler) -> np.ndarray:
    out = np.zeros(0, dtype=complex)
    for _ in range(1000):
        if len(out) >= s:
            break
        z = _inside(domain, sampler(max(16, 2 * (s - len(out)))))
        out = _distinct(np.concatenate([out, z]))
    if len(out) < s:
        raise ValidationError("could not sample enough interior points")
    return out[:s]


@dataclass(frozen=True)
class UniformRandom:
    name: str = "uniform"

    def points(self, ctx: Context, s: int, rng: np.random.Generator) -> np.ndarray:
        o = ctx.domain.outer

        def draw(n):
            r = o.radius * np.sqrt(rng.random(n))
            return o.center + r * np.exp(2j * math.pi * rng.random(n))

        return _rejection(ctx.domain, s, rng, draw)


@dataclass(frozen=True)
class EvenGrid:
    """s points picked at even index spacing from a hexagonal lattice with at least s interior points."""

    name: str = "grid"

    def points(self, ctx: Context, s: int, rng: np.random.Generator) -> np.ndarray:
        dom = ctx.domain
        area = math.pi * dom.outer.radius ** 2
        h = math.sqrt(area / s)
        for _ in range(200):
            z = np.concatenate(list(hex_rows(dom, h)))
            z = _inside(dom, z)
            if len(z) >= s:
                break
            h *= 0.9
        idx = (np.arange(s) * len(z)) // s
        return z[idx]


@dataclass(frozen=True)
class ClusterNearLoop:
    """Points scattered within ``width`` of the reference template loop."""

    width: float = 0.05
    name: str = "near-loop"

    def points(self, ctx: Context, s: int, rng: np.random.Generator) -> np.ndarray:
        a, b = ctx.loop.segments()
        seg = np.abs(b - a)
        cum = np.concatenate([[0.0], np.cumsum(seg)])

        def draw(n):
            t = rng.random(n) * cum[-1]
            k = np.minimum(np.searchsorted(cum, t, side="right") - 1, len(seg) - 1)
            u = (t - cum[k]) / seg[k]
            p = a[k] + u * (b[k] - a[k])
            return p + self.width * np.sqrt(rng.random(n)) * np.exp(2j * math.pi * rng.random(n))

        return _rejection(ctx.domain, s, rng, draw)


@dataclass(frozen=True)
class ClusterNearBase:
    """Points inside the disc of radius ``width`` around the reference base point."""

    width: float = 0.05
    name: str = "near-base"

    def points(self, ctx: Context, s: int, rng: np.random.Generator) -> np.ndarray:
        def draw(n):
            return ctx.base + self.width * np.sqrt(rng.random(n)) * np.exp(2j * math.pi * rng.random(n))

        return _rejection(ctx.domain, s, rng, draw)


@dataclass(frozen=True)
class KershnerCover:
    """The economical covering of the chart domain by s equal discs."""

    name: str = "kershner"

    def points(self, ctx: Context, s: int, rng: np.random.Generator) -> np.ndarray:
        return chart_covering_grid(ctx.domain, s)


STRATEGIES = {
    "uniform": UniformRandom,
    "grid": EvenGrid,
    "near-loop": ClusterNearLoop,
    "near-base": ClusterNearBase,
    "kershner": KershnerCover,
}


def default_strategies() -> list:
    return [UniformRandom(), EvenGrid(), ClusterNearLoop(), ClusterNearBase(), KershnerCover()]


def strategy_by_name(name: str):
    try:
        return STRATEGIES[name]()
    except KeyError:
        raise ValidationError(f"unknown strategy {name!r}; choose from {sorted(STRATEGIES)}") from None


def trial_rng(seed: int, s: int, strategy: str, trial: int) -> np.random.Generator:
    """Per-trial generator keyed by (seed, s, strategy, trial), independent of scheduling."""
    key = f"{int(seed)}|{int(s)}|{strategy}|{int(trial)}".encode()
    return np.random.default_rng(int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little"))


# --------------------------------------------------------------------------
# rows and reports
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Row:
    s: int
    strategy: str
    trial: int
    lower: float | None
    upper: float | None
    base: complex | None = None
    delta: float | None = None
    covering_radius: float | None = None
    within_linear_bound: bool | None = None
    template_within_H: bool | None = None


@dataclass(frozen=True)
class GrowthFit:
    deg_minus: float | None
    deg_plus: float | None
    L_hat: float | None
    raw_deg_minus: float | None
    s_used: tuple[int, ...]
    consistent: bool


@dataclass
class ScanReport:
    rows: list[Row]
    constants: Constants | None = None
    fit: GrowthFit | None = None
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([
                r.s, r.strategy, r.trial, _fmt(r.lower), _fmt(r.upper),
                _fmt(None if r.base is None else r.base.real),
                _fmt(None if r.base is None else r.base.imag),
            ])
        return buf.getvalue()

    def summary(self) -> dict:
        out = dict(self.meta)
        if self.constants is not None:
            out["constants"] = self.constants.to_json()
        if self.fit is not None:
            out["fit"] = {
                "deg_minus": self.fit.deg_minus,
                "deg_plus": self.fit.deg_plus,
                "L_hat": self.fit.L_hat,
                "raw_deg_minus": self.fit.raw_deg_minus,
                "s_used": list(self.fit.s_used),
                "consistent": self.fit.consistent,
            }
        out["rows"] = len(self.rows)
        out["linear_bound_violations"] = sum(1 for r in self.rows if r.within_linear_bound is False)
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2) + "\n"


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


# --------------------------------------------------------------------------
# lower bounds
# --------------------------------------------------------------------------

def punctured_comparison(delta: float, R: float) -> float:
    """Smallest punctured-disc comparison density 1/(d ln(R/d)) over 0 < d <= delta; 0 when vacuous.

    The function decreases on (0, R/e), so for delta < R/e the infimum is at d = delta.
    """
    if not delta < R / math.e:
        return 0.0
    return 1.0 / (delta * math.log(R / delta))


def lower_for_set(domain: Domain, systole: float, S: np.ndarray) -> tuple[float, float]:
    """(lower bound, covering radius) valid for every loop when every domain point is near S."""
    delta, _ = chart_covering_radius(domain, S)
    delta *= 1.0 + 1e-12
    o = domain.outer
    R = float(np.max(np.abs(np.asarray(S) - o.center))) + o.radius
    return systole * punctured_comparison(delta, R), delta


def _generator_of(domain: Domain, alpha: Word) -> int:
    cuts = make_cut_system(domain)
    for g in range(1, cuts.rank + 1):
        if freely_homotopic(alpha, Word(((g, 1),))):
            return g
    raise ValidationError("templates exist for the generator classes x_i only")


def scan_lower(domain: Domain, alpha: Word, s_list: Sequence[int]) -> ScanReport:
    """Covering placement of S and the resulting lower bound for each s."""
    if domain.surface != CHART:
        raise ValidationError("scans run on chart domains")
    systole = systole_lower_bound(domain, alpha)
    rows = []
    for s in s_list:
        S = chart_covering_grid(domain, s)
        lo, delta = lower_for_set(domain, systole, S)
        rows.append(Row(int(s), "kershner", 0, lo, None, covering_radius=delta))
    return ScanReport(rows, meta={"kind": "lower", "alpha": str(alpha), "systole": systole})


# --------------------------------------------------------------------------
# upper bounds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UpperJob:
    domain: Domain
    hole: int
    constants: Constants
    context: Context
    systole: float
    strategy: object
    s: int
    trial: int
    seed: int
    eta: float


def run_upper(job: UpperJob) -> Row:
    dom, k = job.domain, job.constants
    rng = trial_rng(job.seed, job.s, job.strategy.name, job.trial)
    S = job.strategy.points(job.context, job.s, rng) if job.s > 0 else np.zeros(0, dtype=complex)
    geo = TemplateGeometry.of(dom)
    b = find_base_point(dom, S, k.A, job.s, k.eps)
    loop = template_loop(dom, b, job.hole, geo)
    within_H = loop.length() <= k.H
    delta = 0.0
    if job.s > 0:
        res = procedure_star(dom, loop, S, StarParams(k.A, job.s, k.c0))
        loop, delta = res.loop, res.delta
    band = DensityBand(dom.with_punctures(S))
    up = hyp_length_upper(loop, band, job.eta)
    lo, cov = (lower_for_set(dom, job.systole, S) if job.s > 0 else (0.0, None))
    return Row(job.s, job.strategy.name, job.trial, lo, up, b, delta, cov,
               up <= k.L * (job.s + 1), within_H)


def _workers(workers: int | None) -> int:
    env = os.environ.get("HYPLOOP_WORKERS")
    if env:
        workers = int(env)
    return max(1, int(workers or 1))


def run_jobs(fn, jobs: list, workers: int | None = None) -> list:
    """Map fn over jobs, in order, optionally on a process pool."""
    n = _workers(workers)
    if n == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(n, len(jobs))) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * n))))


def scan_upper(domain: Domain, alpha: Word, s_list: Sequence[int], strategies: Sequence | None = None,
               trials: int = 1, seed: int = 0, eta: float = DEFAULT_ETA,
               workers: int | None = None, constants: Constants | None = None) -> ScanReport:
    if domain.surface != CHART:
        raise ValidationError("scans run on chart domains")
    s_list = [int(s) for s in s_list]
    if any(b <= a for a, b in zip(s_list, s_list[1:])):
        raise ValidationError("s list must be strictly increasing")
    strategies = list(strategies) if strategies is not None else default_strategies()
    g = _generator_of(domain, alpha)
    k = constants or assemble_constants(domain, [g], eta=eta)
    geo = TemplateGeometry.of(domain)
    ref_base = find_base_point(domain, [], k.A, 1, k.eps)
    ctx = Context(domain, ref_base, template_loop(domain, ref_base, g - 1, geo))
    systole = systole_lower_bound(domain, alpha)
    jobs = []
    for s in s_list:
        strats = strategies if s > 0 else strategies[:1]
        for st in strats:
            for t in range(trials if s > 0 else 1):
                jobs.append(UpperJob(domain, g - 1, k, ctx, systole, st, s, t, seed, eta))
    rows = run_jobs(run_upper, jobs, workers)
    return ScanReport(rows, k, meta={"kind": "upper", "alpha": str(alpha), "seed": int(seed),
                                     "trials": int(trials), "eta": eta})


# --------------------------------------------------------------------------
# growth fits
# --------------------------------------------------------------------------

def _slope(x: np.ndarray, y: np.ndarray) -> float:
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0])


def _top_half(s: np.ndarray) -> np.ndarray:
    """Mask of the largest dyadic half of the samples (at least 4 of them)."""
    lo, hi = math.log2(s.min()), math.log2(s.max())
    mask = np.log2(s) >= (lo + hi) / 2.0 - 1e-12
    if mask.sum() < 4:
        mask = np.zeros(len(s), dtype=bool)
        mask[-4:] = True
    return mask


def per_s(rows: Iterable[Row]) -> dict[int, tuple[float | None, float | None]]:
    """Per-s maxima over trials and strategies of the lower and upper columns."""
    out: dict[int, list] = {}
    for r in rows:
        lo, up = out.setdefault(r.s, [None, None])
        if r.lower is not None:
            lo = r.lower if lo is None else max(lo, r.lower)
        if r.upper is not None:
            up = r.upper if up is None else max(up, r.upper)
        out[r.s] = [lo, up]
    return {s: (v[0], v[1]) for s, v in sorted(out.items())}


def fit_growth(rows: Iterable[Row]) -> GrowthFit:
    """Growth exponents over the largest dyadic half of the s samples.

    deg_plus is the log-log slope of the upper maxima against s + 1.  deg_minus
    is the exponent d in lower ~ C s^d / ln(s + 2), the shape of the covering
    lower bound; the plain log-log slope of the lower column is also reported.
    L_hat = max_s upper(s) / (s + 1).  A column with fewer than 4 usable
    (positive) values gets no exponent.
    """
    table = per_s(rows)
    s_all = np.array([s for s in table if s > 0], dtype=float)
    if len(s_all) < 4:
        raise InsufficientData("need at least 4 distinct positive s values")
    ups = [(s, u) for s, (_, u) in table.items() if s > 0 and u is not None and u > 0]
    lows = [(s, l) for s, (l, _) in table.items() if s > 0 and l is not None and l > 0]
    deg_plus = L_hat = None
    if len(ups) >= 4:
        su = np.array([s for s, _ in ups], dtype=float)
        u = np.array([v for _, v in ups])
        m = _top_half(su)
        deg_plus = _slope(np.log(su[m] + 1.0), np.log(u[m]))
        L_hat = float(max(v / (s + 1.0) for s, (_, v) in table.items() if v is not None))
    deg_minus = raw = None
    if len(lows) >= 4:
        sl = np.array([s for s, _ in lows], dtype=float)
        l = np.array([v for _, v in lows])
        m = _top_half(sl)
        deg_minus = _slope(np.log(sl[m]), np.log(l[m] * np.log(sl[m] + 2.0)))
        raw = _slope(np.log(sl[m]), np.log(l[m]))
    consistent = True
    if deg_minus is not None and deg_plus is not None:
        consistent = 0.0 <= deg_minus <= deg_plus
    used = tuple(int(s) for s in s_all[_top_half(s_all)])
    return GrowthFit(deg_minus, deg_plus, L_hat, raw, used, consistent)


# --------------------------------------------------------------------------
# budget analysis
# --------------------------------------------------------------------------

def reroute_budget(p: float, s: int, H: float, a: float, c: float, c0: float) -> float:
    """(c / a) (H s^p + c0 a s): the length budget when the clearance is a / s^p.

    Exponents below 1/2 are obstructed: s discs of radius a / s^p have total
    area ~ s^(1 - 2p) which eventually exceeds the area of the surface.
    """
    if p < 0.5:
        raise ObstructedRegime(f"p = {p} < 1/2: the discs V(S, a/s^p) would cover the surface")
    if s < 1:
        raise ValidationError("s must be >= 1")
    return (c / a) * (H * s ** p + c0 * a * s)
