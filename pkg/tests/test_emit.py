import dataclasses

import pytest

from conftest import VAR_OR_IMAGES, SATISFIABLE_CORPUS, UNSATISFIABLE_CORPUS
from sbtkit import emit
from sbtkit.emit import (
    EmittedPermutation,
    check_emission,
    compute_layout,
    emit_permutation,
    instance_of_permutation,
    is_three_permutation,
)
from sbtkit.errors import LayoutError
from sbtkit.gadgets import make_harness
from sbtkit.perm import Permutation, breakpoint_count
from sbtkit.reduction import normalize, reduce
from sbtkit.tdt import is_equivalent

CORPUS = {**SATISFIABLE_CORPUS, **UNSATISFIABLE_CORPUS}


def test_var_or_layout(var_or):
    layout = compute_layout(var_or)
    assert layout.p == (0, 15) and layout.q == (15, 33)
    assert layout.alpha == {"Y": 5, "X1": 15, "X2": 18}
    assert layout.beta == {"Y": 9, "X1": 28, "X2": 31}


def test_var_or_images(var_or, var_or_perm):
    emitted = emit_permutation(var_or)
    assert str(emitted.permutation) == VAR_OR_IMAGES
    p = emitted.permutation
    assert (p[1], p[19], p[33]) == (17, 22, 33)
    assert emitted.permutation == var_or_perm


def test_var_or_checks(var_or):
    emitted = emit_permutation(var_or)
    assert check_emission(var_or, emitted) == []
    assert is_equivalent(var_or.instance, emitted.permutation)
    assert breakpoint_count(emitted.permutation.images) == 33


def test_block_image_sets(var_or):
    emitted = emit_permutation(var_or)
    p = emitted.permutation
    dec = var_or.decomposition
    for h in range(2):
        got = {p[u] for u in range(dec.start(h) + 1, dec.end(h) + 1)}
        assert got == emitted.image_set(var_or, h)
    # the var block borrows alpha+1, alpha+2, beta+1 of X1 and X2 from the or block
    assert {16, 17, 29, 19, 20, 32} <= emitted.image_set(var_or, 0)


def test_three_permutation_examples(var_or_perm):
    assert is_three_permutation(var_or_perm)
    assert not is_three_permutation(Permutation.identity(6))
    assert not is_three_permutation(Permutation.parse("0 2 4 3 1 5"))


def test_instance_of_permutation(var_or_perm):
    inst = instance_of_permutation(var_or_perm)
    assert len(inst.triples) == 11
    assert is_equivalent(inst, var_or_perm)
    with pytest.raises(ValueError):
        instance_of_permutation(Permutation.identity(3))


def test_harness_blocks_rejected():
    with pytest.raises(LayoutError):
        compute_layout(make_harness("copy"))


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_emission(name):
    asm = reduce(normalize(CORPUS[name])).assembling
    emitted = emit_permutation(asm)
    p = emitted.permutation
    assert emitted.layout.p[0] == 0 and emitted.layout.q[-1] == asm.span
    assert check_emission(asm, emitted) == []
    assert is_equivalent(asm.instance, p)
    assert is_three_permutation(p)
    assert breakpoint_count(p.images) == asm.span


def test_checker_catches_table_typos(var_or, monkeypatch):
    table = dict(emit.IMAGE_TABLE)
    row = list(table["or"])
    row[0], row[1] = row[1], row[0]
    table["or"] = tuple(row)
    monkeypatch.setattr(emit, "IMAGE_TABLE", table)
    bad = emit_permutation(var_or)
    assert check_emission(var_or, bad)


def test_checker_catches_layout_errors(var_or):
    emitted = emit_permutation(var_or)
    alpha = dict(emitted.layout.alpha, Y=6)
    shifted = EmittedPermutation(emitted.permutation, dataclasses.replace(emitted.layout, alpha=alpha))
    problems = check_emission(var_or, shifted)
    assert any(p.startswith("pi(z) = alpha+3 for Y") for p in problems)
