"""Exact evaluators for the counting bounds on integral points and related rank estimates.

Everything is integer or rational arithmetic.  The one square root, in the
lattice counting comparator, is carried symbolically as x + y sqrt(p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from math import comb
from numbers import Rational

from .errors import NotElliptic, ValidationError
from .growth import surface_rank


def _rational(x, name: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (Rational, str)):
        if isinstance(x, float) and x.is_integer():
            return Fraction(int(x))
        raise ValidationError(f"{name} must be an integer or a fraction")
    return Fraction(x)


def _exact(x: Fraction):
    return x.numerator if x.denominator == 1 else x


@dataclass(frozen=True)
class FibrationData:
    dimA: int
    g: int
    t: int
    m: Fraction | int = 1
    conductor: int | None = None

    def __post_init__(self):
        for name in ("dimA", "g", "t"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"{name} must be an integer")
        if self.dimA < 1:
            raise ValidationError("dimA must be >= 1")
        if self.g < 0 or self.t < 0:
            raise ValidationError("g and t must be >= 0")
        m = _rational(self.m, "m")
        if m < 0:
            raise ValidationError("m must be >= 0")
        object.__setattr__(self, "m", _exact(m))
        if self.conductor is not None and (not isinstance(self.conductor, int) or self.conductor < 0):
            raise ValidationError("conductor degree must be a non-negative integer")

    @property
    def rank(self) -> int:
        """Rank of the free fundamental group of the base with t points removed."""
        return surface_rank(self.g, self.t)

    @property
    def exponent(self) -> int:
        return 2 * self.dimA * self.rank


def _check_s(s) -> int:
    if isinstance(s, bool) or not isinstance(s, int) or s < 0:
        raise ValidationError("s must be a non-negative integer")
    return s


def theoremA_bound(data: FibrationData, s: int):
    """m (s+1)^(2 dimA rank): bound on integral points over all S with #S <= s."""
    s = _check_s(s)
    return _exact(Fraction(data.m) * (s + 1) ** data.exponent)


def corollaryA_E_bound(data: FibrationData, s: int):
    """m s (s+1)^(2 dimA rank): bound on #(E meet B_0)."""
    s = _check_s(s)
    return _exact(Fraction(data.m) * s * (s + 1) ** data.exponent)


def rank_comparisons(data: FibrationData, elliptic: bool | None = None) -> dict:
    """Known Mordell-Weil rank bounds and growth degrees for comparison.

    shioda: r <= 2(2g - 2 + t), elliptic curves only.
    ogg_shafarevich: r <= 2 dimA (2g - 2 + t).
    noguchi_winkelmann_degree: r/2 <= 2 g dimA for constant families.
    conductor_band: [ceil(f/2), f] for the number of bad fibres when the conductor degree f is known.
    Rank bounds are clipped at 0 since a rank is never negative.
    """
    chi = 2 * data.g - 2 + data.t
    if elliptic is None:
        elliptic = data.dimA == 1
    if elliptic and data.dimA != 1:
        raise NotElliptic("the elliptic rank bound needs dimA = 1")
    out = {
        "shioda": max(0, 2 * chi) if elliptic else None,
        "ogg_shafarevich": max(0, 2 * data.dimA * chi),
        "noguchi_winkelmann_degree": 2 * data.g * data.dimA,
        "conductor_band": None,
    }
    if data.conductor is not None:
        f = data.conductor
        out["conductor_band"] = [(f + 1) // 2, f]
    return out


def shioda_bound(data: FibrationData) -> int:
    if data.dimA != 1:
        raise NotElliptic("the elliptic rank bound needs dimA = 1")
    return rank_comparisons(data)["shioda"]


@dataclass(frozen=True)
class Surd:
    """The exact real number x + y sqrt(p) with x, y rational and p a non-negative rational."""

    x: Fraction
    y: Fraction
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        object.__setattr__(self, "p", Fraction(self.p))

    def rational(self) -> Fraction | None:
        """The value as a Fraction when it is rational, else None."""
        if self.y == 0 or self.p == 0:
            return self.x
        root = _rational_sqrt(self.p)
        return None if root is None else self.x + self.y * root

    def to_decimal(self, digits: int = 50) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            val = (Decimal(self.x.numerator) / Decimal(self.x.denominator)
                   + Decimal(self.y.numerator) / Decimal(self.y.denominator)
                   * (Decimal(self.p.numerator) / Decimal(self.p.denominator)).sqrt())
            ctx.prec = digits
            return +val

    def __float__(self) -> float:
        return float(self.to_decimal(30))

    def __str__(self) -> str:
        q = self.rational()
        if q is not None:
            return str(q)
        return f"{self.x} + {self.y}*sqrt({self.p})"


def _rational_sqrt(p: Fraction) -> Fraction | None:
    a, b = math.isqrt(p.numerator), math.isqrt(p.denominator)
    if a * a == p.numerator and b * b == p.denominator:
        return Fraction(a, b)
    return None


def lattice_count_comparator(c, p_of_s, rank: int) -> Surd:
    """(c sqrt(p) + 1)^rank, expanded binomially into x + y sqrt(p)."""
    c = _rational(c, "c")
    p = _rational(p_of_s, "p_of_s")
    if p < 0:
        raise ValidationError("p_of_s must be >= 0")
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 0:
        raise ValidationError("rank must be a non-negative integer")
    x = Fraction(0)
    y = Fraction(0)
    for k in range(rank + 1):
        term = comb(rank, k) * c ** k * p ** (k // 2)
        if k % 2:
            y += term
        else:
            x += term
    root = _rational_sqrt(p)
    if root is not None:
        return Surd(x + y * root, 0, 0)
    return Surd(x, y, p)


def evaluate_all(data: FibrationData, s: int, c=1, p_of_s=None) -> dict:
    """All evaluators at once; p_of_s defaults to s and the comparator rank to the best rank bound."""
    ranks = rank_comparisons(data)
    r = ranks["shioda"] if ranks["shioda"] is not None else ranks["ogg_shafarevich"]
    comp = lattice_count_comparator(c, s if p_of_s is None else p_of_s, r)
    return {
        "rank_pi1": data.rank,
        "exponent": data.exponent,
        "theoremA_bound": theoremA_bound(data, s),
        "corollaryA_E_bound": corollaryA_E_bound(data, s),
        "rank_comparisons": ranks,
        "lattice_count_comparator": {"rank": r, "exact": str(comp), "decimal": str(comp.to_decimal(30))},
    }
