"""Brute-force reference answers.

Nothing here touches the fast indexes: paths are found by walking parent
pointers with locally computed depths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .tree_core import ColoredTree


@dataclass
class PathView:
    nodes: list
    freq: dict
    wsum: dict

    @property
    def length(self) -> int:
        return len(self.nodes)


_depth_cache: dict = {}


def _depths(tree: ColoredTree) -> list:
    key = id(tree)
    hit = _depth_cache.get(key)
    if hit is not None and hit[0] is tree:
        return hit[1]
    parent = tree.parent.tolist()
    depth = [-1] * (tree.n + 1)
    depth[1] = 0
    for v in range(2, tree.n + 1):
        chain = []
        x = v
        while depth[x] < 0:
            chain.append(x)
            x = parent[x]
        d = depth[x]
        for y in reversed(chain):
            d += 1
            depth[y] = d
    _depth_cache.clear()
    _depth_cache[key] = (tree, depth)
    return depth


def path_nodes(tree: ColoredTree, i: int, j: int) -> PathView:
    n = tree.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"query nodes ({i}, {j}) out of range 1..{n}")
    depth = _depths(tree)
    parent = tree.parent
    left, right = [], []
    a, b = i, j
    while depth[a] > depth[b]:
        left.append(a)
        a = int(parent[a])
    while depth[b] > depth[a]:
        right.append(b)
        b = int(parent[b])
    while a != b:
        left.append(a)
        right.append(b)
        a, b = int(parent[a]), int(parent[b])
    nodes = left + [a] + right[::-1]
    freq, wsum = {}, {}
    color, weight = tree.color, tree.weight
    for v in nodes:
        c = int(color[v])
        freq[c] = freq.get(c, 0) + 1
        if weight is not None:
            wsum[c] = wsum.get(c, 0) + int(weight[v])
    return PathView(nodes, freq, wsum)


def brute_gmax(tree: ColoredTree, view: PathView, semantics: str):
    """Best color on the path for ``mode``, ``lfe`` or ``sum``; ties go to the smallest color.

    Returns ``(color, value, (l, r))`` with ``l``/``r`` the occurrences nearest to each end.
    """
    if semantics == "mode":
        scores = view.freq
    elif semantics == "lfe":
        scores = {c: -f for c, f in view.freq.items()}
    elif semantics == "sum":
        if tree.weight is None:
            raise ValueError("sum semantics need weights")
        scores = view.wsum
    else:
        raise ValueError(f"unknown semantics {semantics!r}")
    best = min(scores, key=lambda c: (-scores[c], c))
    ends = [v for v in view.nodes if int(tree.color[v]) == best]
    return best, scores[best], (ends[0], ends[-1])


def brute_minorities(view: PathView, alpha) -> set:
    alpha = Fraction(alpha)
    bound = alpha * view.length
    return {c for c, f in view.freq.items() if f <= bound}


def first_on_path(tree: ColoredTree, i: int, j: int, c: int):
    """First c-colored node met walking from i to j, or None."""
    for v in path_nodes(tree, i, j).nodes:
        if int(tree.color[v]) == c:
            return v
    return None


def _block_colors(tree: ColoredTree, hierarchy, level: int, u: int) -> set:
    members = hierarchy.levels[level].blocks[hierarchy.block_of(u, level)]
    return {int(tree.color[v]) for v in members}


def brute_decompose(tree: ColoredTree, hierarchy, i: int, j: int) -> list:
    """Ten disjoint color classes of P(i, j); index 0 holds class 1."""
    path = set(path_nodes(tree, i, j).freq)
    B = {(k, side): _block_colors(tree, hierarchy, k, x)
         for k in (1, 2, 3) for side, x in (("i", i), ("j", j))}
    classes = [set() for _ in range(10)]
    for c in path:
        li = c in B[1, "i"]
        lj = c in B[1, "j"]
        if li or lj:
            classes[9].add(c)
            continue
        Pi, Qi = c in B[3, "i"], c in B[2, "i"]
        Pj, Qj = c in B[3, "j"], c in B[2, "j"]
        key = (Pi, Qi, Pj, Qj)
        table = {
            (False, False, False, False): 0,
            (True, False, False, False): 1,
            (True, True, False, False): 2,
            (False, False, True, False): 3,
            (True, False, True, False): 4,
            (True, True, True, False): 5,
            (False, False, True, True): 6,
            (True, False, True, True): 7,
            (True, True, True, True): 8,
        }
        classes[table[key]].add(c)
    return classes
