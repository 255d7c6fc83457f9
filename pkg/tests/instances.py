"""Random rerouting instances shared by the unit and acceptance suites."""
import math

import numpy as np

from hyploop.geometry import PolyLoop, annulus, largest_admissible, pair_of_pants
from hyploop.homotopy import is_simple


def wobbly_circle(rng, center, radius, amp, n=240):
    """Star-shaped loop r(t) = radius (1 + small Fourier terms) around ``center``."""
    t = 2 * math.pi * np.arange(n) / n + rng.uniform(0, 2 * math.pi)
    r = np.ones(n)
    for k in range(2, 5):
        r += amp * rng.uniform(-1, 1) / k * np.cos(k * t + rng.uniform(0, 2 * math.pi))
    return PolyLoop(center + radius * r * np.exp(1j * t))


def random_instance(rng, which):
    """(domain, loop, S, a, s) with a simple loop, |S| <= 50 and an admissible a."""
    if which == "annulus":
        dom = annulus(1.0, 4.0)
        loop = wobbly_circle(rng, 0j, rng.uniform(1.8, 2.6), 0.15)
    else:
        dom = pair_of_pants()
        if rng.random() < 0.5:
            h = dom.holes[int(rng.integers(0, 2))]
            loop = wobbly_circle(rng, h.center, rng.uniform(1.0, 1.3), 0.08)
        else:
            loop = wobbly_circle(rng, 0j, rng.uniform(2.9, 3.3), 0.05)
    assert is_simple(loop)
    a = 0.5 * largest_admissible(dom, loop, iters=12)
    n = int(rng.integers(1, 51))
    pts = loop.points()
    seg = np.abs(np.diff(np.concatenate([pts, pts[:1]])))
    s = n
    r = a / s
    S = []
    base = pts[0]
    tries = 0
    while len(S) < n and tries < 20 * n:
        tries += 1
        # cluster points within 2r of the loop so that many discs cut it
        k = int(rng.integers(0, len(pts)))
        u = rng.random()
        p = pts[k] + u * (pts[(k + 1) % len(pts)] - pts[k])
        q = p + rng.uniform(0, 2 * r) * np.exp(2j * math.pi * rng.random())
        if abs(q - base) <= 3 * r or float(dom.boundary_distance(q)) <= 3 * r:
            continue
        if any(abs(q - x) < 1e-6 * r for x in S):
            continue
        S.append(complex(q))
    return dom, loop, S, a, s
