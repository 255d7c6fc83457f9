import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyploop.errors import BadLattice, NotBordered, ValidationError
from hyploop.growth import (
    Free,
    FreeAbelian,
    Lattice,
    ball_size,
    ball_size_bfs,
    euclid_distance,
    exponential_bound,
    homotopy_count_torus,
    parse_model,
    polynomial_constant,
    quasi_isometry_constants,
    surface_rank,
    word_distance,
)


def test_ball_examples():
    assert ball_size(Free(2), 2) == 17 <= 25
    assert ball_size(FreeAbelian(2, 1), 2) == 13
    for m in (Free(3), FreeAbelian(4, 2), Lattice.square()):
        assert ball_size(m, 0) == (m.t if isinstance(m, FreeAbelian) else 1)
    assert ball_size(FreeAbelian(3), 0) == 1


def reduced_words(k, R):
    """Brute-force oracle: all words of length <= R over the 2k letters, kept if freely reduced."""
    letters = [(g, e) for g in range(k) for e in (1, -1)]
    n = 0
    for L in range(R + 1):
        for w in itertools.product(letters, repeat=L):
            if all(not (a[0] == b[0] and a[1] == -b[1]) for a, b in zip(w, w[1:])):
                n += 1
    return n


@pytest.mark.parametrize("k", [1, 2, 3])
def test_free_ball_matches_bfs(k):
    for R in range(9):
        assert ball_size(Free(k), R) == ball_size_bfs(Free(k), R)
    for R in range(5 if k < 3 else 4):
        assert ball_size(Free(k), R) == reduced_words(k, R)


def box_count_l1(r, R):
    return sum(1 for x in itertools.product(range(-R, R + 1), repeat=r) if sum(map(abs, x)) <= R)


@pytest.mark.parametrize("r,t", [(1, 1), (2, 1), (2, 3), (3, 1)])
def test_abelian_ball_matches_oracles(r, t):
    for R in range(7):
        assert ball_size(FreeAbelian(r, t), R) == t * box_count_l1(r, R) == ball_size_bfs(FreeAbelian(r, t), R)


@given(st.sampled_from([Free(1), Free(2), Free(3), FreeAbelian(1), FreeAbelian(2, 2), FreeAbelian(3)]),
       st.integers(1, 12))
def test_exponential_bound(model, R):
    assert ball_size(model, R) <= exponential_bound(model, R)


@given(st.sampled_from([Free(1), Free(2), Free(3), FreeAbelian(1), FreeAbelian(2), FreeAbelian(3)]),
       st.integers(0, 10), st.integers(0, 10))
def test_submultiplicative(model, R1, R2):
    assert ball_size(model, R1 + R2) <= ball_size(model, R1) * ball_size(model, R2)


def test_qi_square_examples():
    sq = Lattice.square()
    g, h = np.array([3, 4]), np.array([0, 0])
    dw, de = int(word_distance(g, h)), float(euclid_distance(sq, g, h))
    assert (dw, de) == (7, 5.0)
    assert dw / math.sqrt(2) <= de <= dw
    q = quasi_isometry_constants(sq, 10)
    assert q.L_squared == 2 and q.A == 0.0
    assert q.L == math.sqrt(2)
    assert q.max_deviation <= 1e-12


def test_qi_square_ten_thousand_pairs():
    sq = Lattice.square()
    rng = np.random.default_rng(0)
    g = rng.integers(-50, 51, (10_000, 2))
    h = rng.integers(-50, 51, (10_000, 2))
    d = g - h
    # exact integer check of d_w^2 <= 2 d_e^2 and d_e^2 <= d_w^2
    dw2 = np.abs(d).sum(axis=1) ** 2
    de2 = (d ** 2).sum(axis=1)
    assert np.all(dw2 <= 2 * de2) and np.all(de2 <= dw2)


def test_qi_hexagonal_stable():
    hexl = Lattice.hexagonal()
    q = [quasi_isometry_constants(hexl, r) for r in (5, 10, 20)]
    for x in q:
        assert 1 <= x.L <= 2
        assert x.max_deviation <= 1e-9
    assert q[0].L == q[1].L == q[2].L


def test_bad_lattice():
    with pytest.raises(BadLattice):
        Lattice(((1.0, 2.0), (2.0, 4.0)))
    with pytest.raises(ValidationError):
        quasi_isometry_constants(Lattice.square(), 0)


def box_oracle(model, L):
    B = np.asarray(model.basis)
    N = int(math.ceil(3 * L)) + 2
    m, n = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1))
    v = m.ravel()[:, None] * B[0] + n.ravel()[:, None] * B[1]
    return int(np.count_nonzero((v ** 2).sum(axis=1) <= L * L + 1e-9))


def test_torus_examples():
    sq = Lattice.square()
    assert homotopy_count_torus(sq, 2) == 13
    assert homotopy_count_torus(sq, 0) == 1
    X, Y = np.meshgrid(np.arange(-10, 11), np.arange(-10, 11))
    assert homotopy_count_torus(sq, 10) == int(np.count_nonzero(X ** 2 + Y ** 2 <= 100)) == 317


@pytest.mark.parametrize("model", [Lattice.square(), Lattice.hexagonal(), Lattice(((1.0, 0.0), (0.3, 0.7)))])
def test_torus_counts_match_box(model):
    prev = 0
    for L in np.linspace(0, 50, 101):
        n = homotopy_count_torus(model, float(L))
        assert n == box_oracle(model, float(L))
        assert n >= prev
        prev = n


def test_torus_bounded_by_abelian_ball():
    sq = Lattice.square()
    counts = []
    for L in range(0, 51):
        n = homotopy_count_torus(sq, L)
        assert n <= ball_size(FreeAbelian(2), math.ceil(math.sqrt(2) * L))
        counts.append((L, n))
    a = polynomial_constant(counts)
    assert all(n <= a * (L + 1) ** 2 for L, n in counts)


def test_surface_rank():
    assert surface_rank(0, 3) == 2
    assert surface_rank(1, 1) == 2
    assert surface_rank(2, 4) == 7
    with pytest.raises(NotBordered):
        surface_rank(1, 0)


def test_parse_model():
    assert parse_model("free:2") == Free(2)
    assert parse_model("abelian:2:3") == FreeAbelian(2, 3)
    assert parse_model("lattice:square") == Lattice.square()
    assert parse_model("lattice:1,0,0,2").basis == ((1.0, 0.0), (0.0, 2.0))
    with pytest.raises(ValidationError):
        parse_model("klein:2")
