import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyploop.errors import NoGenerators, NullClass, ValidationError
from hyploop.geometry import CHART, Disc, Domain, PolyLoop, annulus, pair_of_pants
from hyploop.homotopy import (
    Word,
    freely_homotopic,
    is_simple,
    loop_word,
    make_cut_system,
    systole_lower_bound,
    winding_number,
)

words = st.lists(st.tuples(st.integers(1, 3), st.sampled_from([1, -1])), max_size=12).map(lambda l: Word(tuple(l)))


def test_parse_and_print():
    w = Word.parse("x1 x2^-1 x2^-1 x3")
    assert str(w) == "x1 x2^-2 x3"
    assert Word.parse("x1·x2") == Word.parse("x1*x2") == Word(((1, 1), (2, 1)))
    assert Word.parse("x1 x1^-1") == Word.parse("") == Word.parse("1")
    with pytest.raises(ValidationError):
        Word.parse("y1")


@given(words)
def test_word_roundtrip_and_inverse(w):
    assert Word.parse(str(w)) == w
    assert not (w * w.inverse())


def test_freely_homotopic_examples():
    assert freely_homotopic(Word.parse("x1 x2"), Word.parse("x2 x1"))
    assert not freely_homotopic(Word.parse("x1"), Word.parse("x1^-1"))


@given(words, words)
def test_conjugates_are_freely_homotopic(w, g):
    assert freely_homotopic(w, g * w * g.inverse())


def test_conjugation_oracle_500():
    rng = np.random.default_rng(11)
    for _ in range(500):
        w = Word(tuple((int(rng.integers(1, 4)), int(rng.choice([1, -1]))) for _ in range(rng.integers(0, 10))))
        g = Word(tuple((int(rng.integers(1, 4)), int(rng.choice([1, -1]))) for _ in range(rng.integers(0, 10))))
        assert freely_homotopic(w, g * w * g.inverse())


def test_is_simple_examples():
    assert is_simple(PolyLoop.circle(0j, 1.0, 64))
    t = np.linspace(0, 2 * math.pi, 200, endpoint=False)
    fig8 = np.sin(t) + 1j * np.sin(t) * np.cos(t)
    assert not is_simple(PolyLoop(fig8 + 0.001))


def test_random_angular_polygons_are_simple():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        n = int(rng.integers(3, 40))
        ang = np.sort(rng.uniform(0, 2 * math.pi, n))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
        # angular sort around the origin gives a simple polygon when every gap is below pi
        if gaps.min() < 1e-6 or gaps.max() >= math.pi:
            continue
        r = rng.uniform(0.2, 1.0, n)
        assert is_simple(PolyLoop(r * np.exp(1j * ang)))


def test_cut_system_ranks():
    assert make_cut_system(annulus(1, 4)).rank == 1
    assert make_cut_system(pair_of_pants()).rank == 2
    holes = tuple(Disc(3 * np.exp(2j * math.pi * k / 5), 0.4) for k in range(5))
    assert make_cut_system(Domain(CHART, Disc(0j, 6.0), holes)).rank == 5
    with pytest.raises(NoGenerators):
        make_cut_system(Domain(CHART, Disc(0j, 1.0)))


def test_loop_words():
    dom = pair_of_pants()
    cuts = make_cut_system(dom)
    h1, h2 = dom.holes
    assert str(loop_word(PolyLoop.circle(h1.center, h1.radius + 0.2, 64), cuts)) == "x1"
    assert str(loop_word(PolyLoop.circle(h1.center, h1.radius + 0.2, 64, ccw=False), cuts)) == "x1^-1"
    tri = PolyLoop([2.5j, 2.9j + 0.3, 2.9j - 0.3])
    assert not loop_word(tri, cuts)
    big = PolyLoop.circle(0j, 3.2, 256)
    w = loop_word(big, cuts)
    assert freely_homotopic(w, Word.parse("x1 x2")) or freely_homotopic(w, Word.parse("x2 x1"))
    # winding-number oracle per hole gives the exponent sums
    sums = w.exponent_sums()
    for g, h in ((1, h1), (2, h2)):
        assert sums.get(g, 0) == winding_number(big, h.center)


@given(st.floats(0.0, 2 * math.pi), st.floats(1.2, 3.8), st.integers(8, 200))
def test_circle_word_matches_winding(phase, r, n):
    dom = annulus(1, 4)
    cuts = make_cut_system(dom)
    loop = PolyLoop.circle(0j, r, n, phase=phase)
    assert loop_word(loop, cuts) == Word.parse("x1")


def test_systole_examples():
    assert systole_lower_bound(annulus(1, 4), Word.parse("x1")) == pytest.approx(2 * math.pi)
    dom = Domain(CHART, Disc(0j, 10.0), (Disc(-4 + 0j, 0.5), Disc(4 + 0j, 2.0)))
    assert systole_lower_bound(dom, Word.parse("x1 x2")) == pytest.approx(4 * math.pi)
    tiny = annulus(1e-6, 4)
    assert systole_lower_bound(tiny, Word.parse("x1")) < 1e-5
    with pytest.raises(NullClass):
        systole_lower_bound(annulus(1, 4), Word.parse("x1 x1^-1"))


@given(st.lists(st.floats(1.05, 3.9), min_size=3, max_size=30), st.floats(0, 1))
def test_random_loops_never_beat_systole(radii, phase):
    """Star-shaped loops around the hole of the annulus are at least as long as the bound."""
    n = len(radii)
    ang = phase + 2 * math.pi * np.arange(n) / n
    loop = PolyLoop(np.array(radii) * np.exp(1j * ang))
    dom = annulus(1, 4)
    if not (np.abs(PolyLoop.refined(loop, 64).points()) > 1).all():
        return
    cuts = make_cut_system(dom)
    w = loop_word(loop, cuts)
    assert w == Word.parse("x1")
    assert loop.length() >= systole_lower_bound(dom, w) - 1e-12
