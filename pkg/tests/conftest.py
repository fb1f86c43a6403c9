import random

import pytest

from sbtkit.gadgets import BlockSpec, assemble
from sbtkit.perm import Permutation
from sbtkit.reduction import CnfFormula

DEFAULT_SEED = 20120406

VAR_OR_IMAGES = (
    "0 17 5 3 20 12 1 14 4 29 16 13 9 8 2 11 32 19 15 22 28 18 24 7 27 26 10 6 31 21 30 25 23 33"
)

SIX_CLAUSES = CnfFormula(4, ((1, 2, -3), (1, -2), (-1, 2, -4), (-1, 3, 4), (3, -4), (-2, -3, 4)))

SATISFIABLE_CORPUS = {
    "six-clauses": SIX_CLAUSES,
    "xor2": CnfFormula(2, ((1, 2), (-1, -2))),
    "unit-x1": CnfFormula(1, ((1,),)),
    "chain3": CnfFormula(3, ((1, -2), (2, -3), (3, -1))),
    "mixed3": CnfFormula(3, ((1, 2, 3), (-1,), (-2, 3))),
    "forced3": CnfFormula(3, ((1, 2), (1, -2), (-1, 3))),
}

# Blind search on mixed3 wanders through well over 10^5 dead states before
# finding a collapse, so only guided collapse covers it.
SEARCHABLE = ("six-clauses", "xor2", "unit-x1", "chain3", "forced3")

UNSATISFIABLE_CORPUS = {
    "x1-and-not-x1": CnfFormula(1, ((1,), (-1,))),
    "all-pairs2": CnfFormula(2, ((1, 2), (1, -2), (-1, 2), (-1, -2))),
}


def pytest_addoption(parser):
    parser.addoption(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help=f"seed for randomized property tests (default {DEFAULT_SEED})",
    )


def pytest_collection_modifyitems(config, items):
    # pin hypothesis to the same seed so runs are reproducible
    seed = config.getoption("--seed")
    for item in items:
        fn = getattr(item, "obj", None)
        if fn is not None and getattr(fn, "is_hypothesis_test", False):
            fn._hypothesis_internal_use_seed = seed


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request) -> list:
    return request.config.stash[ACCEPTANCE_LINES]


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> random.Random:
    return random.Random(seed)


@pytest.fixture(scope="session")
def var_or():
    """[X1,X2] = var(Y) followed by Y = or(X1,X2)."""
    return assemble([BlockSpec("var", ("Y",), ("X1", "X2")), BlockSpec("or", ("X1", "X2"), ("Y",))])


@pytest.fixture(scope="session")
def var_or_perm() -> Permutation:
    return Permutation.parse(VAR_OR_IMAGES)


class ToyNamer:
    """Symbol names of the two-block toy assembling as printed: x1, b2, a'' ..."""

    suffix = {"Y": "", "X1": "1", "X2": "2"}

    def external(self, role, var_id, slot):
        return role + self.suffix[var_id]

    def internal(self, role, block):
        return role + "'" if block == 1 and role.endswith("'") else role


@pytest.fixture(scope="session")
def var_or_named():
    specs = [BlockSpec("var", ("Y",), ("X1", "X2")), BlockSpec("or", ("X1", "X2"), ("Y",))]
    return assemble(specs, ToyNamer())


# (triple fired, block 1 after, block 2 after), dots omitted
VAR_OR_WALK = [
    (("d1", "e1", "f1"), "a' e2 x1 b1 y1 a d2 y2 c' z b' c x2 b2 f2", "a1 b'' z1 a2 d y a'' x b f z2 c1 e c'' c2"),
    (("x1", "y1", "z1"), "a' e2 a d2 y2 c' z b' c x2 b2 f2", "a1 b'' b1 a2 d y a'' x b f z2 c1 e c'' c2"),
    (("a1", "b1", "c1"), "a' e2 a d2 y2 c' z b' c x2 b2 f2", "a2 d y a'' x b f z2 b'' e c'' c2"),
    (("a''", "b''", "c''"), "a' e2 a d2 y2 c' z b' c x2 b2 f2", "a2 d y e x b f z2 c2"),
    (("d", "e", "f"), "a' e2 a d2 y2 c' z b' c x2 b2 f2", "a2 x b y z2 c2"),
    (("x", "y", "z"), "a' e2 a d2 y2 c' b b' c x2 b2 f2", "a2 z2 c2"),
    (("a", "b", "c"), "a' e2 b' d2 y2 c' x2 b2 f2", "a2 z2 c2"),
    (("a'", "b'", "c'"), "d2 y2 e2 x2 b2 f2", "a2 z2 c2"),
    (("d2", "e2", "f2"), "x2 b2 y2", "a2 z2 c2"),
    (("x2", "y2", "z2"), "", "a2 b2 c2"),
    (("a2", "b2", "c2"), "", ""),
]
