"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are repeated
in the terminal summary.
"""

import math
import os
import random
import subprocess
import sys
import time
import zlib
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import binomtest

from pathfreq import cli, oracle
from pathfreq.blocking import compute_marked, compute_partition
from pathfreq.gvalue import make_sum_g
from pathfreq.minority import MinorityIndex, MinorityTrace, candidate_reach, query_rng
from pathfreq.subtask_engine import PathQueries, PathStructure, decompose_colors
from pathfreq.tree_core import NONE, build_index, make_tree

from conftest import (
    ACCEPTANCE_LINES,
    T7_COLORS,
    T7_PARENTS,
    T7_WEIGHTS,
    partition_violations,
)

SHAPES = ("random", "path", "star", "caterpillar")
OP_CONSTANT = 64


def report(number: int, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def t7_tree():
    return make_tree(T7_PARENTS, T7_COLORS, T7_WEIGHTS)


def grid():
    """(label, tree) for every size / shape / color-count combination."""
    for n in (1, 2, 7, 50, 500, 5000):
        for shape in SHAPES:
            for colors in sorted({1, 3, max(1, math.isqrt(n)), n}):
                if n == 7 and shape == "random" and colors == 3:
                    yield "T7", t7_tree()
                    continue
                seed = zlib.crc32(f"{n} {shape} {colors}".encode())
                yield f"{shape} n={n} colors={colors}", cli.generate(n, seed, colors, shape, True)


def test_criterion_01_gmax_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(1)
    configs = queries = mismatches = 0
    first = None
    for label, tree in grid():
        pq = PathQueries(tree)
        engines = {kind: pq.engine(kind) for kind in ("mode", "lfe", "sum")}
        configs += 1
        for _ in range(1000):
            i, j = rng.randint(1, tree.n), rng.randint(1, tree.n)
            view = oracle.path_nodes(tree, i, j)
            for kind, eng in engines.items():
                queries += 1
                got = eng.query_max_gvalue(i, j).gvalue
                want = oracle.brute_gmax(tree, view, kind)[1]
                if got != want:
                    mismatches += 1
                    first = first or (label, kind, i, j, got, want)
    elapsed = time.perf_counter() - start
    report(1, mismatches == 0 and elapsed < 300,
           f"{configs} configurations, {queries} g-max queries, {mismatches} mismatches, "
           f"{elapsed:.0f}s (limit 300s)" + (f", first {first}" if first else ""))


def test_criterion_02_t7_goldens():
    tree = t7_tree()
    pq = PathQueries(tree)
    view = oracle.path_nodes(tree, 4, 6)
    golden = {"mode": (1, 3), "lfe": (2, 2), "sum": (1, 10)}
    problems = []
    for kind, (color, value) in golden.items():
        oc, ov, _ = oracle.brute_gmax(tree, view, kind)
        res = pq.engine(kind).query_max_gvalue(4, 6)
        shown = res.frequency if kind != "sum" else res.gvalue
        oracle_shown = abs(ov) if kind != "sum" else ov
        if (oc, oracle_shown) != (color, value):
            problems.append(f"oracle {kind} {(oc, oracle_shown)}")
        if (res.color, shown) != (color, value):
            problems.append(f"engine {kind} {(res.color, shown)}")
    report(2, not problems, "mode (c1, 3), LFE (c2, 2), max-sum (c1, 10) on P(4, 6)"
           + (f"; {problems}" if problems else ""))


def test_criterion_03_blocking_invariants():
    problems = []
    checked = 0
    six = make_tree([1, 2, 3, 4, 5], [1] * 6)
    idx = build_index(six)
    ms = compute_marked(six, idx, 2)
    part = compute_partition(six, idx, ms)
    if ms.members != [1, 3, 5] or part.blocks != [[1], [2, 3], [4, 5], [6]]:
        problems.append(f"six-path golden {ms.members} {part.blocks}")
    for n in (10, 100, 1000, 5000):
        for shape in SHAPES:
            tree = cli.generate(n, n + len(shape), n, shape, False)
            idx = build_index(tree)
            for t in sorted({1, 2, math.isqrt(n), n // 4, n}):
                ms = compute_marked(tree, idx, t)
                part = compute_partition(tree, idx, ms)
                checked += 1
                for p in partition_violations(idx, ms, part, t):
                    problems.append(f"{shape} n={n} t={t}: {p}")
    report(3, not problems, f"{checked} (tree, t) pairs plus six-path golden, "
           f"{len(problems)} violations" + (f", first {problems[0]}" if problems else ""))


def test_criterion_04_decomposition_completeness():
    rng = random.Random(4)
    trees = [(label, tree) for label, tree in grid() if tree.n >= 7]
    bad = 0
    for q in range(1000):
        label, tree = trees[q % len(trees)]
        if q < len(trees):
            trees[q] = (label, PathStructure(tree))
        ps = trees[q % len(trees)][1]
        tree = ps.tree
        i, j = rng.randint(1, tree.n), rng.randint(1, tree.n)
        classes = decompose_colors(ps, i, j)
        ref = oracle.brute_decompose(tree, ps.h, i, j)
        union = set().union(*classes)
        disjoint = sum(map(len, classes)) == len(union)
        if not disjoint or union != set(oracle.path_nodes(tree, i, j).freq) or classes != ref:
            bad += 1
    report(4, bad == 0, f"1000 queries over {len(trees)} trees, {bad} failures "
           "(disjoint, union equals path colors, matches independent recomputation)")


def test_criterion_05_first_occurrence():
    rng = random.Random(5)
    tuples = mismatches = 0
    while tuples < 10_000:
        n = rng.choice([50, 300, 1500])
        tree = cli.generate(n, rng.randrange(1 << 32), rng.choice([3, math.isqrt(n), n]),
                            rng.choice(SHAPES), False)
        ps = PathStructure(tree, t1=rng.choice([None, 1, 2]))
        cbi, h = ps.cbi, ps.h
        for _ in range(2000):
            i, j = rng.randint(1, n), rng.randint(1, n)
            levels = rng.choice([(3, 3), (2, 3), (3, 2), (2, 2)])
            ki, kj = levels
            cands = [c for c in cbi.block_colors[ki][h.block_of(i, ki)]
                     if not cbi.in_block(c, i, ki - 1)
                     and cbi.in_block(c, j, kj) and not cbi.in_block(c, j, kj - 1)]
            if not cands:
                continue
            c = rng.choice(cands)
            want = oracle.first_on_path(tree, i, j, c) or NONE
            mismatches += cbi.first_occurrence_on_path(i, j, levels, c) != want
            tuples += 1
            if tuples == 10_000:
                break
    report(5, mismatches == 0, f"{tuples} precondition-satisfying tuples, {mismatches} mismatches")


def _two_arm_path(seq, root_pos):
    """The path ``seq`` as a tree rooted at position root_pos; returns (tree, i, j) for its ends."""
    n = len(seq)
    order = [root_pos] + list(range(root_pos - 1, -1, -1)) + list(range(root_pos + 1, n))
    node = {p: k + 1 for k, p in enumerate(order)}
    parents = [0] * (n + 1)
    colors = [0] * (n + 1)
    for p in range(n):
        colors[node[p]] = seq[p]
        if p != root_pos:
            parents[node[p]] = node[p + 1] if p < root_pos else node[p - 1]
    return make_tree(parents[2:], colors[1:]), node[0], node[n - 1]


def _crowded_path(rng, alpha, extra):
    """Barely-majority colors near i, more minority singletons near j than j can reach.

    The LCA sits mid-path so no majority is pruned by a half count, and the
    majorities are only seen from i, so they stay in the sampling pool.
    """
    k = math.ceil(2 / alpha)
    m = max(1, math.ceil(1 / alpha) - 1)
    singles = 2 * k + extra
    c = 2
    while c <= alpha * (m * c + singles):
        c += 1
    heavy = list(range(1, m + 1))
    bulk = [h for h in heavy for _ in range(c - 1)]
    rng.shuffle(bulk)
    first = heavy[:]
    rng.shuffle(first)
    seq = first + bulk + list(range(m + 1, m + 1 + singles))
    return _two_arm_path(seq, len(first) + len(bulk) // 2)


def _distinct_to_lca(mi, u, w):
    seen = set()
    while True:
        seen.add(mi.vf.color[u])
        if u == w:
            return len(seen)
        u = mi.idx.parent[u]


def test_criterion_06_monte_carlo_minority():
    rng = random.Random(6)
    trials = successes = 0
    det_trials = det_fail = 0
    adversarial = [0, 0]
    # adversarial paths first, then mixed random trees, until 2 * 10^4 trials with a minority
    alphas = [Fraction(1, 2), Fraction(2, 5), Fraction(1, 3), Fraction(3, 10),
              Fraction(1, 4), Fraction(1, 5), Fraction(1, 7), Fraction(1, 10)]
    cases = []
    for alpha in alphas:
        for extra in (0, 1, 3, 10):
            tree, i, j = _crowded_path(rng, alpha, extra)
            cases.append((MinorityIndex(tree), [(i, j)] * 250, alpha, True))
    while sum(len(c[1]) for c in cases) < 40_000:
        n = rng.choice([20, 100, 600])
        shape = rng.choice(SHAPES)
        tree = cli.generate(n, rng.randrange(1 << 32), rng.choice([2, 3, 6, math.isqrt(n), n]),
                            shape, False)
        pairs = [(rng.randint(1, n), rng.randint(1, n)) for _ in range(200)]
        cases.append((MinorityIndex(tree), pairs, None, False))
    seed = 0
    for mi, pairs, fixed_alpha, adv in cases:
        tree = mi.tree
        for i, j in pairs:
            alpha = fixed_alpha or Fraction(rng.randint(1, 10), 10)
            mins = oracle.brute_minorities(oracle.path_nodes(tree, i, j), alpha)
            seed += 1
            if not mins:
                continue
            got = mi.monte_carlo(i, j, alpha, query_rng(2024, seed))
            ok = got in mins
            trials += 1
            successes += ok
            if adv:
                adversarial[0] += 1
                adversarial[1] += ok
            w = mi.idx.lca(i, j)
            reach = candidate_reach(alpha)
            if _distinct_to_lca(mi, i, w) <= reach and _distinct_to_lca(mi, j, w) <= reach:
                det_trials += 1
                det_fail += not ok
    rate = successes / trials
    pvalue = binomtest(successes, trials, 0.5, alternative="less").pvalue
    adv_rate = adversarial[1] / adversarial[0]
    ok = trials >= 20_000 and rate >= 0.5 and pvalue >= 0.01 and det_fail == 0
    report(6, ok, f"{trials} trials, success {rate:.4f} (adversarial {adv_rate:.4f} "
           f"over {adversarial[0]}), one-sided p={pvalue:.3g} vs 1/2, "
           f"deterministic regime {det_trials - det_fail}/{det_trials}")


def test_criterion_07_las_vegas_minority():
    rng = random.Random(7)
    cases = mismatches = 0
    draws = []
    rounds = 0
    while cases < 10_000:
        rounds += 1
        if rounds % 4 == 0:
            # crowded paths keep majorities in the sampling pool
            alpha = Fraction(1, rng.randint(2, 10))
            tree, i, j = _crowded_path(rng, alpha, rng.randint(0, 10))
            queries = [(i, j, alpha)] * 100
        else:
            n = rng.choice([5, 30, 150, 600])
            tree = cli.generate(n, rng.randrange(1 << 32),
                                rng.choice([1, 2, 4, math.isqrt(n), n]), rng.choice(SHAPES), False)
            queries = [(rng.randint(1, n), rng.randint(1, n), Fraction(rng.randint(1, 10), 10))
                       for _ in range(100)]
        mi = MinorityIndex(tree)
        for i, j, alpha in queries:
            mins = oracle.brute_minorities(oracle.path_nodes(tree, i, j), alpha)
            trace = MinorityTrace()
            got = mi.las_vegas(i, j, alpha, query_rng(77, cases), trace)
            cases += 1
            if (got in mins) if mins else got == NONE:
                if mins and trace.phase == 4:
                    draws.append(trace.draws)
            else:
                mismatches += 1
    mean = float(np.mean(draws))
    report(7, mismatches == 0 and mean <= 2.5,
           f"{cases} cases, {mismatches} mismatches, mean sampled verifications {mean:.3f} "
           f"over {len(draws)} sampling queries, max {max(draws)} (limit on mean 2.5)")


def test_criterion_08_sum_prefix_formula():
    rng = random.Random(8)
    checks = bad = 0
    while checks < 10_000:
        n = rng.choice([10, 200, 2000])
        tree = cli.generate(n, rng.randrange(1 << 32), rng.choice([2, math.isqrt(n), n]),
                            rng.choice(SHAPES), True)
        ps = PathStructure(tree, t1=1)
        g = make_sum_g(ps.vf, tree)
        for _ in range(500):
            i, j = rng.randint(1, n), rng.randint(1, n)
            view = oracle.path_nodes(tree, i, j)
            c = rng.choice(sorted(view.freq))
            left, right = ps.vf.path_color_endpoints(i, j, c)
            checks += 1
            bad += g.eval_contracted(left, right) != view.wsum[c]
    report(8, bad == 0, f"{checks} (i, j, c) sums, {bad} mismatches")


def test_criterion_09_table_dimensions():
    problems = []
    checked = 0
    for n in (50, 500, 5000, 20000):
        for shape in SHAPES:
            tree = cli.generate(n, 9, math.isqrt(n), shape, False)
            eng = PathQueries(tree).engine("mode")
            st = eng.table_stats()
            n1, n2, n3, _ = st["blocks"]
            t2 = eng.ps.h.factors[1]
            checked += 1
            if st["T1"] != n3 * n3 or st["T2"] != n2 * n3 or st["T3"] != n1 * n3:
                problems.append(f"{shape} n={n} dims")
            if st["T5_bits"] > 16 * (n / t2) ** 2:
                problems.append(f"{shape} n={n} T5 bits {st['T5_bits']}")
    report(9, not problems, f"{checked} trees: |T1|, |T2|, |T3| exact, T5 bits within 16 (n/t2)^2"
           + (f"; {problems}" if problems else ""))


def test_criterion_10_build_cost():
    worst = 0.0
    for shape in SHAPES:
        for colors in (3, 70, 5000):
            tree = cli.generate(5000, 10, colors, shape, True)
            pq = PathQueries(tree)
            t2 = pq.ps.h.factors[1]
            for kind in ("mode", "lfe", "sum"):
                ratio = pq.engine(kind).build_ops / (tree.n * tree.n / t2)
                worst = max(worst, ratio)
    big_s = {}
    for shape in ("random", "path"):
        start = time.perf_counter()
        pq = PathQueries(cli.generate(100_000, 10, 1000, shape, True))
        for kind in ("mode", "lfe", "sum"):
            pq.engine(kind)
        big_s[shape] = time.perf_counter() - start
    report(10, worst <= OP_CONSTANT and max(big_s.values()) < 600,
           f"n=5000 worst ops / (n * n / t2) = {worst:.2f} (C = {OP_CONSTANT}); n=10^5 "
           + ", ".join(f"{k} {v:.0f}s" for k, v in big_s.items())
           + " for three engines each (limit 600s)")


def test_criterion_11_determinism(tmp_path):
    tree = tmp_path / "tree.txt"
    script = tmp_path / "script.txt"
    env = dict(os.environ)

    def cli_run(*args):
        return subprocess.run([sys.executable, "-m", "pathfreq", *args], capture_output=True,
                              env=env, check=False)

    assert cli_run("gen", "--n", "2000", "--seed", "11", "--colors", "40",
                   "--weights", "--out", str(tree)).returncode == 0
    rng = random.Random(11)
    lines = []
    for _ in range(400):
        i, j = rng.randint(1, 2000), rng.randint(1, 2000)
        op = rng.choice(["MODE", "LFE", "MAXSUM", "MINORITY"])
        if op == "MINORITY":
            lines.append(f"MINORITY {i} {j} {rng.choice(['0.1', '1/4', '0.5'])} "
                         f"{rng.choice(['mc', 'lv'])}")
        else:
            lines.append(f"{op} {i} {j}")
    script.write_text("\n".join(lines) + "\n")
    runs = []
    for hashseed in ("1", "2"):
        env["PYTHONHASHSEED"] = hashseed
        gen = cli_run("gen", "--n", "2000", "--seed", "11", "--colors", "40", "--weights")
        q = cli_run("query", "--tree", str(tree), "--queries", str(script), "--seed", "5")
        runs.append((gen.returncode, gen.stdout, q.returncode, q.stdout))
    same = runs[0] == runs[1] and runs[0][0] == 0 and runs[0][2] == 0
    report(11, same, f"two processes, gen plus {len(lines)} queries "
           f"({sum('mc' in x for x in lines)} Monte Carlo): "
           + ("byte-identical" if same else "outputs differ"))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
