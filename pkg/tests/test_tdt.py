import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import VAR_OR_WALK
from sbtkit.errors import FormatError, InvalidInstance, NotWellOrdered, SpanMismatch
from sbtkit.perm import Permutation, apply_transposition, breakpoint_count, three_bp_moves
from sbtkit.tdt import (
    TdtInstance,
    Triple,
    apply_step,
    enabled_triples,
    is_equivalent,
    is_well_ordered,
    step_transposition,
    succ_map,
)

I = TdtInstance.from_words("a1 c2 b1 b2 c1 a2", [("a1", "b1", "c1"), ("a2", "b2", "c2")])
I_PRIME = TdtInstance.from_words(". b2 . c2 . a2", [("a2", "b2", "c2")])


def test_succ_maps():
    assert succ_map(I) == {1: 3, 2: 6, 3: 5, 4: 2, 5: 1, 6: 4}
    assert succ_map(I_PRIME) == {2: 4, 4: 6, 6: 2}
    assert succ_map(TdtInstance.empty(4)) == {}


def test_enabled_and_step():
    assert enabled_triples(I) == [Triple("a1", "b1", "c1")]
    assert enabled_triples(I_PRIME) == [Triple("a2", "b2", "c2")]
    assert str(step_transposition(I, ("a1", "b1", "c1"))) == "tau(1,3,5)"
    assert str(step_transposition(I_PRIME, ("a2", "b2", "c2"))) == "tau(2,4,6)"


def test_apply_step_example():
    after = apply_step(I, ("a1", "b1", "c1"))
    assert after == I_PRIME
    assert after.word_string() == ". b2 . c2 . a2"
    final = apply_step(after, ("a2", "b2", "c2"))
    assert final.is_empty() and final.word_string() == ". . . . . ."


def test_step_on_disabled_triple():
    with pytest.raises(NotWellOrdered):
        step_transposition(I, ("a2", "b2", "c2"))
    with pytest.raises(NotWellOrdered):
        apply_step(I, ("a1", "b1", "zz"))


def test_var_or_enabled_and_first_step(var_or_named):
    inst = var_or_named.instance
    assert enabled_triples(inst) == [Triple("d1", "e1", "f1"), Triple("d2", "e2", "f2")]
    assert str(step_transposition(inst, ("d1", "e1", "f1"))) == "tau(1,6,11)"
    after = apply_step(inst, ("d1", "e1", "f1"))
    assert " ".join(after.projected()) == VAR_OR_WALK[0][1] + " " + VAR_OR_WALK[0][2]


def test_equivalence_examples(var_or, var_or_perm):
    assert is_equivalent(var_or.instance, var_or_perm)
    assert is_equivalent(TdtInstance.empty(5), Permutation.identity(5))
    assert not is_equivalent(I, Permutation.identity(6))
    with pytest.raises(SpanMismatch):
        is_equivalent(I, Permutation.identity(5))


def test_invariant_violations():
    with pytest.raises(InvalidInstance):
        TdtInstance.from_words("a b a", [("a", "b", "c")])
    with pytest.raises(InvalidInstance):
        TdtInstance.from_words("a b c d", [("a", "b", "c")])
    with pytest.raises(InvalidInstance):
        TdtInstance.from_words("a b .", [("a", "b", "c")])


def test_serialization_roundtrip(var_or_named):
    for inst in (I, I_PRIME, TdtInstance.empty(3), var_or_named.instance):
        text = inst.serialize()
        again = TdtInstance.parse(text)
        assert again.word == inst.word and set(again.triples) == set(inst.triples)
        assert again.serialize() == text


def test_serialize_format():
    assert I.serialize() == "span 6\nword a1 c2 b1 b2 c1 a2\ntriple a1 b1 c1\ntriple a2 b2 c2\n"
    assert TdtInstance.empty(2).serialize() == "span 2\nword . .\n"


@pytest.mark.parametrize(
    "text",
    [
        "",
        "span x\nword a\n",
        "span 2\nword a\n",
        "span 3\nword a b c\ntriple a b\n",
        "span 3\nword a b d\ntriple a b c\n",
        "span 0\nword\n",
        "spam 3\nword a b c\ntriple a b c\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(FormatError):
        TdtInstance.parse(text)


def test_state_key_ignores_names():
    renamed = TdtInstance.from_words("p r q s t u", [("p", "q", "t"), ("u", "s", "r")])
    assert renamed.state_key() == I.state_key()
    assert I.state_key() != I_PRIME.state_key()


def _walk(inst, p, choose):
    """Follow steps picked by ``choose`` and yield (instance, permutation) pairs."""
    yield inst, p
    while True:
        enabled = enabled_triples(inst)
        if not enabled:
            return
        t = choose(enabled)
        tau = step_transposition(inst, t)
        inst, p = apply_step(inst, t), apply_transposition(p, tau)
        yield inst, p


def _check_correspondence(inst, p):
    assert is_equivalent(inst, p)
    assert breakpoint_count(p.images) == 3 * len(inst.triples)
    moves = {step_transposition(inst, t) for t in enabled_triples(inst)}
    assert set(three_bp_moves(p)) == moves


def test_var_or_walk_replay_preserves_equivalence(var_or_named, var_or_perm):
    inst, p = var_or_named.instance, var_or_perm
    _check_correspondence(inst, p)
    for t, _, _ in VAR_OR_WALK:
        tau = step_transposition(inst, t)
        inst, p = apply_step(inst, t), apply_transposition(p, tau)
        _check_correspondence(inst, p)
    assert inst.is_empty() and p.is_identity()


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_walks_preserve_equivalence(var_or_named, var_or_perm, rnd):
    for inst, p in _walk(var_or_named.instance, var_or_perm, rnd.choice):
        _check_correspondence(inst, p)
        for t in inst.triples:
            assert is_well_ordered(inst, t) == (t in enabled_triples(inst))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_succ_is_fixed_point_free_of_order_three(data):
    span = data.draw(st.integers(3, 15))
    k = data.draw(st.integers(0, span // 3))
    positions = data.draw(st.permutations(range(span)))[: 3 * k]
    word = [None] * span
    triples = []
    for t in range(k):
        names = (f"a{t}", f"b{t}", f"c{t}")
        for name, pos in zip(names, positions[3 * t : 3 * t + 3]):
            word[pos] = name
        triples.append(names)
    inst = TdtInstance(tuple(word), tuple(triples))
    succ = succ_map(inst)
    assert set(succ) == inst.domain
    for u in succ:
        assert succ[u] != u and succ[succ[succ[u]]] == u
    for t in enabled_triples(inst):
        after = apply_step(inst, t)
        assert len(after.triples) == len(inst.triples) - 1
        assert after.span == inst.span
