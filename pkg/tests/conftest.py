import random

import pytest
from hypothesis import strategies as st

from pathfreq.cli import generate
from pathfreq.tree_core import make_tree

T7_PARENTS = [1, 1, 2, 2, 3, 3]
T7_COLORS = [1, 2, 1, 2, 3, 1, 3]
T7_WEIGHTS = [5, 1, 2, 1, 7, 3, 2]
T7_TEXT = "7\n1 1 2 2 3 3\n1 2 1 2 3 1 3\n5 1 2 1 7 3 2\n"


@pytest.fixture
def t7():
    return make_tree(T7_PARENTS, T7_COLORS, T7_WEIGHTS)


@pytest.fixture
def six_path():
    return make_tree([1, 2, 3, 4, 5], [1, 2, 3, 4, 5, 6])


def random_tree(rng: random.Random, n: int, shape: str = "random", colors: int | None = None,
                weights: bool = False):
    return generate(n, rng.randrange(1 << 32), colors or n, shape, weights)


@st.composite
def trees(draw, min_n=1, max_n=40, weights=False):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(1, v - 1)) for v in range(2, n + 1)]
    ncol = draw(st.integers(1, n))
    colors = [draw(st.integers(1, ncol)) for _ in range(n)]
    w = [draw(st.integers(-50, 50)) for _ in range(n)] if weights else None
    return make_tree(parents, colors, w)


def naive_parent_walk(tree, u):
    out = []
    while u:
        out.append(u)
        u = int(tree.parent[u])
    return out


def partition_violations(idx, ms, part, t) -> list:
    """Every blocking invariant that fails for (marked set, partition) at factor t."""
    n = idx.N
    bad = []
    seen = sorted(v for b in part.blocks for v in b)
    if seen != list(range(1, n + 1)):
        bad.append("partition")
    for b, members in enumerate(part.blocks):
        inside = set(members)
        tops = [v for v in members if idx.parent[v] not in inside]
        if len(tops) != 1:
            bad.append(f"block {b} not connected")
        if len(members) > 2 * t:
            bad.append(f"block {b} has {len(members)} > 2t nodes")
        if any(part.block_of[v] != b for v in members):
            bad.append(f"block_of disagrees on block {b}")
    marked = ms.members
    flags = ms.is_marked
    if len(marked) > 4 * -(-n // t):
        bad.append(f"|M| = {len(marked)} > 4 ceil(n/t)")
    pairs = [(a, b) for a in marked for b in marked] if len(marked) <= 500 else [
        (marked[k], marked[(k * 7919) % len(marked)]) for k in range(len(marked))]
    if any(not flags[idx.lca(a, b)] for a, b in pairs):
        bad.append("not closed under LCA")
    # unmarked components by union into the parent when both are unmarked
    comp = [0] * (n + 1)
    for v in reversed(idx.order):
        if not flags[v]:
            comp[v] += 1
            p = idx.parent[v]
            if p and not flags[p]:
                comp[p] += comp[v]
            elif comp[v] > t:
                bad.append(f"unmarked component of {comp[v]} > t nodes")
    return bad


def deep_tree(rng: random.Random, n: int, colors: int, weights: bool = False):
    """Random tree whose parents are among the four previous nodes (long thin paths)."""
    parents = [rng.randint(max(1, v - 4), v - 1) for v in range(2, n + 1)]
    cols = [rng.randint(1, colors) for _ in range(n)]
    w = [rng.randint(-5, 9) for _ in range(n)] if weights else None
    return make_tree(parents, cols, w)


def mixed_tree(rng: random.Random, n: int, shape: str, colors: int, weights: bool = False):
    if shape == "deep":
        return deep_tree(rng, n, colors, weights)
    return random_tree(rng, n, shape, colors, weights)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
