"""Independent re-derivation of the integral-point counting formulas.

Written directly from the statements: base B of genus g minus t points has
free fundamental group of rank 2g - 1 + t; the count bound is m (s + 1) to the
power 2 dim A times that rank; the emptiness bound carries one more factor s.
The comparator is evaluated in decimal arithmetic straight from (c sqrt p + 1)^r.
"""
from decimal import Decimal, localcontext
from fractions import Fraction


def second_evaluator(dimA, g, t, m, s, c=1, conductor=None):
    rank = 2 * g - 1 + t
    power = Fraction(s + 1)
    total = Fraction(1)
    for _ in range(2 * dimA * rank):
        total *= power
    count = Fraction(m) * total
    emptiness = count * s
    euler = 2 * g - 2 + t
    ranks = {
        "shioda": max(0, 2 * euler) if dimA == 1 else None,
        "ogg_shafarevich": max(0, 2 * dimA * euler),
        "noguchi_winkelmann_degree": 2 * g * dimA,
        "conductor_band": None if conductor is None else [-(-conductor // 2), conductor],
    }
    r = ranks["shioda"] if dimA == 1 else ranks["ogg_shafarevich"]
    with localcontext() as ctx:
        ctx.prec = 200
        val = (Decimal(c) * Decimal(s).sqrt() + 1) ** r
        ctx.prec = 60
        comparator = +val
    return {"count": count, "emptiness": emptiness, "ranks": ranks, "comparator": comparator}
