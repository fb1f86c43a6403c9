import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbtkit.errors import FormatError, InvalidPermutation, InvalidTransposition
from sbtkit.perm import (
    Permutation,
    Transposition,
    all_transpositions,
    apply_transposition,
    breakpoint_count,
    breakpoint_lower_bound,
    breakpoints,
    invert_transposition,
    three_bp_moves,
)

P = Permutation.parse


@st.composite
def permutations(draw, min_n=3, max_n=12):
    n = draw(st.integers(min_n, max_n))
    inner = draw(st.permutations(range(1, n)))
    return Permutation((0, *inner, n))


@st.composite
def perm_and_move(draw, max_n=12):
    p = draw(permutations(max_n=max_n))
    i = draw(st.integers(1, p.n - 2))
    j = draw(st.integers(i + 1, p.n - 1))
    k = draw(st.integers(j + 1, p.n))
    return p, Transposition(i, j, k)


def test_apply_matches_sorting_example():
    p = P("0 2 4 3 1 5")
    p1 = apply_transposition(p, Transposition(1, 3, 5))
    assert str(p1) == "0 3 1 2 4 5"
    assert apply_transposition(p1, Transposition(1, 2, 4)).is_identity()


def test_apply_on_identity():
    assert str(apply_transposition(Permutation.identity(3), Transposition(1, 2, 3))) == "0 2 1 3"


def test_inverse_examples():
    assert invert_transposition(Transposition(1, 3, 5)) == Transposition(1, 3, 5)
    assert invert_transposition(Transposition(1, 2, 4)) == Transposition(1, 3, 4)


def test_transposition_as_position_map():
    t = Transposition(2, 4, 7)
    images = [t(x) for x in range(9)]
    assert sorted(images) == list(range(9))
    assert images[:2] == [0, 1] and images[7:] == [7, 8]
    assert all(t.inverse()(t(x)) == x for x in range(9))


@pytest.mark.parametrize("ijk", [(0, 1, 2), (1, 1, 2), (2, 1, 3), (1, 3, 3)])
def test_bad_transpositions_rejected(ijk):
    with pytest.raises(InvalidTransposition):
        Transposition(*ijk)


def test_transposition_beyond_n_rejected():
    with pytest.raises(InvalidTransposition):
        apply_transposition(Permutation.identity(3), Transposition(1, 2, 4))


@pytest.mark.parametrize("images", [(1, 0, 2), (0, 2, 1), (0, 1, 1, 3), ()])
def test_bad_permutations_rejected(images):
    with pytest.raises(InvalidPermutation):
        Permutation(images)


@pytest.mark.parametrize("text", ["", "0 x 2", "0 2 1", "0 1 1 3"])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        P(text)


def test_breakpoint_examples():
    bp = breakpoints(P("0 2 4 3 1 5"))
    assert bp.positions == {1, 2, 3, 4, 5} and bp.count == 5
    assert breakpoints(Permutation.identity(7)).count == 0
    assert breakpoints(P("0 3 1 2 4 5")).positions == {1, 2, 4}
    assert breakpoint_lower_bound(P("0 2 4 3 1 5")) == 2


def test_three_bp_moves_examples(var_or_perm):
    assert three_bp_moves(Permutation.identity(6)) == []
    assert three_bp_moves(P("0 2 4 3 1 5")) == []
    moves = three_bp_moves(var_or_perm)
    assert Transposition(1, 6, 11) in moves
    assert Transposition(4, 8, 18) in moves


@settings(max_examples=300, deadline=None)
@given(perm_and_move())
def test_breakpoints_drop_by_at_most_three(pt):
    p, t = pt
    q = apply_transposition(p, t)
    assert breakpoint_count(q.images) >= breakpoint_count(p.images) - 3
    assert q[0] == 0 and q[q.n] == q.n


@settings(max_examples=300, deadline=None)
@given(perm_and_move())
def test_inverse_undoes(pt):
    p, t = pt
    assert apply_transposition(apply_transposition(p, t), invert_transposition(t)) == p
    assert invert_transposition(invert_transposition(t)) == t


@settings(max_examples=150, deadline=None)
@given(permutations(max_n=10))
def test_three_bp_moves_match_brute_force(p):
    db = breakpoint_count(p.images)
    brute = [t for t in all_transpositions(p.n) if breakpoint_count(apply_transposition(p, t).images) == db - 3]
    assert sorted(three_bp_moves(p), key=lambda t: (t.i, t.j, t.k)) == sorted(brute, key=lambda t: (t.i, t.j, t.k))


def test_three_bp_moves_exhaustive_small():
    for n in range(3, 7):
        for inner in itertools.permutations(range(1, n)):
            p = Permutation((0, *inner, n))
            db = breakpoint_count(p.images)
            brute = {t for t in all_transpositions(n) if breakpoint_count(apply_transposition(p, t).images) == db - 3}
            assert set(three_bp_moves(p)) == brute
