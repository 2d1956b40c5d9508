"""Command-line interface.

    pathfreq gen --n 1000 --seed 1 --colors 10 --shape random > tree.txt
    pathfreq query --tree tree.txt --queries script.txt --seed 7
    pathfreq verify --tree tree.txt --queries script.txt
    pathfreq bench --tree tree.txt --queries script.txt --trials 3
    pathfreq stats --tree tree.txt

Query scripts hold one query per line (blank lines and ``#`` comments are
skipped)::

    MODE i j
    LFE i j
    MAXSUM i j
    MINORITY i j alpha [mc|lv]
    GMAXCHECK i j          (verify only)

Exit codes: 1 usage, 2 malformed tree or script, 3 verification failure,
4 unreadable file.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .blocking import hierarchy_factors
from .minority import MinorityIndex, parse_alpha, query_rng
from .oracle import brute_gmax, brute_minorities, path_nodes
from .subtask_engine import FALLBACK, STRATIFIED, PathQueries
from .tree_core import NONE, TreeFormatError, make_tree, parse_tree, format_tree

EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_VERIFY = 3
EXIT_IO = 4

KINDS = {"MODE": "mode", "LFE": "lfe", "MAXSUM": "sum"}
SHAPES = ("random", "path", "star", "caterpillar")


class UsageError(Exception):
    pass


class ScriptError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class Query:
    line_no: int
    op: str
    i: int
    j: int
    alpha: Fraction | None = None
    variant: str = "lv"

    def text(self) -> str:
        parts = [self.op, str(self.i), str(self.j)]
        if self.op == "MINORITY":
            parts += [str(self.alpha), self.variant]
        return " ".join(parts)


def parse_script(text: str, n: int, has_weights: bool) -> list:
    queries = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        op = line[0].upper()
        try:
            if op in KINDS or op == "GMAXCHECK":
                if len(line) != 3:
                    raise ValueError("expected two node indices")
                q = Query(line_no, op, int(line[1]), int(line[2]))
            elif op == "MINORITY":
                if len(line) not in (4, 5):
                    raise ValueError("expected MINORITY i j alpha [mc|lv]")
                variant = line[4].lower() if len(line) == 5 else "lv"
                if variant not in ("mc", "lv"):
                    raise ValueError(f"unknown variant {variant!r}")
                q = Query(line_no, op, int(line[1]), int(line[2]), parse_alpha(line[3]), variant)
            else:
                raise ValueError(f"unknown query {line[0]!r}")
        except ValueError as exc:
            raise ScriptError(f"line {line_no}: {exc}") from None
        if not (1 <= q.i <= n and 1 <= q.j <= n):
            raise ScriptError(f"line {line_no}: node index outside 1..{n}")
        if op == "MAXSUM" and not has_weights:
            raise ScriptError(f"line {line_no}: MAXSUM needs a weights line in the tree file")
        queries.append(q)
    return queries


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from None


# -- tree generation ---------------------------------------------------------


def generate(n: int, seed: int, colors: int, shape: str, weights: bool):
    if n < 1 or colors < 1:
        raise UsageError("--n and --colors must be positive")
    if shape not in SHAPES:
        raise UsageError(f"unknown shape {shape!r}")
    rng = np.random.default_rng(seed)
    v = np.arange(2, n + 1)
    if shape == "random":
        parents = rng.integers(1, v) if n > 1 else v
    elif shape == "path":
        parents = v - 1
    elif shape == "star":
        parents = np.ones(n - 1, dtype=np.int64)
    else:
        # spine of odd nodes, each with one leaf hanging off it
        parents = np.where(v % 2 == 1, v - 2, v - 1)
    cols = rng.integers(1, colors + 1, size=n)
    w = rng.integers(-1000, 1001, size=n).tolist() if weights else None
    return make_tree([int(p) for p in parents], cols.tolist(), w)


# -- query execution ------------------------------------------------------------


class Session:
    """Lazily built engines and minority index for one tree."""

    def __init__(self, tree, t1=None, word_size=64, mode=STRATIFIED):
        self.tree = tree
        self.pq = PathQueries(tree, t1=t1, mode=mode, word_size=word_size)
        self._minority = None

    @property
    def minority(self) -> MinorityIndex:
        if self._minority is None:
            ps = self.pq.ps
            self._minority = MinorityIndex(self.tree, ps.idx, ps.vf)
        return self._minority

    def answer(self, q: Query, seed: int):
        """(color or NONE, printed value or None)."""
        if q.op in KINDS:
            res = self.pq.engine(KINDS[q.op]).query_max_gvalue(q.i, q.j)
            value = res.frequency if q.op in ("MODE", "LFE") else res.gvalue
            return res.color, value
        if q.op == "MINORITY":
            mi = self.minority
            rng = query_rng(seed, q.line_no)
            if q.variant == "mc":
                c = mi.monte_carlo(q.i, q.j, q.alpha, rng)
            else:
                c = mi.las_vegas(q.i, q.j, q.alpha, rng)
            if c == NONE:
                return NONE, None
            return c, mi.frequency(mi.query(q.i, q.j, q.alpha), c)
        raise UsageError(f"line {q.line_no}: {q.op} is only valid under verify")

    def format(self, color, value) -> str:
        if color == NONE:
            return "NONE"
        return f"{self.tree.label(color)} {value}"


def _verify_one(session: Session, q: Query, seed: int) -> tuple:
    """(ok, message) for one query line."""
    tree = session.tree
    view = path_nodes(tree, q.i, q.j)
    if q.op == "GMAXCHECK":
        kinds = ["mode", "lfe"] + (["sum"] if tree.weight is not None else [])
        bad = []
        for kind in kinds:
            res = session.pq.engine(kind).query_max_gvalue(q.i, q.j)
            want = brute_gmax(tree, view, kind)
            if res.gvalue != want[1]:
                bad.append(f"{kind}: engine {res.gvalue} oracle {want[1]}")
        return (not bad), "; ".join(bad)
    if q.op in KINDS:
        color, value = session.answer(q, seed)
        kind = KINDS[q.op]
        want_c, want_v, _ = brute_gmax(tree, view, kind)
        if kind == "lfe":
            want_v = -want_v
        if value != want_v:
            return False, (f"engine {session.format(color, value)} "
                           f"oracle {session.format(want_c, want_v)}")
        return True, ""
    color, value = session.answer(q, seed)
    mins = brute_minorities(view, q.alpha)
    if q.variant == "mc":
        # Monte Carlo answers may miss; only consistency with the path is checked here
        if color != NONE and color not in view.freq:
            return False, f"color {session.format(color, value)} not on the path"
        return True, ""
    if color == NONE:
        if mins:
            return False, f"engine NONE oracle {len(mins)} minorities"
        return True, ""
    if color not in mins:
        return False, f"engine {session.format(color, value)} is not an alpha-minority"
    return True, ""


# -- commands --------------------------------------------------------------------


def _load(args):
    tree = parse_tree(_read(args.tree))
    queries = None
    if getattr(args, "queries", None):
        queries = parse_script(_read(args.queries), tree.n, tree.weight is not None)
    return tree, queries


def _session(args, tree) -> Session:
    if args.t1 is not None and args.t1 < 1:
        raise UsageError("--t1 must be positive")
    return Session(tree, t1=args.t1, word_size=args.word_size, mode=args.mode)


def _engine_kinds(tree) -> list:
    return ["mode", "lfe"] + (["sum"] if tree.weight is not None else [])


def cmd_gen(args, out):
    tree = generate(args.n, args.seed, args.colors, args.shape, args.weights)
    text = format_tree(tree)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_build(args, out):
    tree, _ = _load(args)
    s = _session(args, tree)
    h = s.pq.ps.h
    out.write(f"n {tree.n} colors {tree.n_colors} factors {' '.join(map(str, h.factors))}\n")
    out.write(f"blocks {' '.join(str(h.block_count(k)) for k in range(1, 5))}\n")
    for kind in _engine_kinds(tree):
        eng = s.pq.engine(kind)
        out.write(f"engine {kind} build_ops {eng.build_ops}\n")
    return 0


def cmd_query(args, out):
    tree, queries = _load(args)
    for q in queries:
        if q.op == "GMAXCHECK":
            raise UsageError(f"line {q.line_no}: GMAXCHECK is only valid under verify")
    s = _session(args, tree)
    for q in queries:
        out.write(s.format(*s.answer(q, args.seed)) + "\n")
    return 0


def cmd_verify(args, out):
    tree, queries = _load(args)
    s = _session(args, tree)
    failed = 0
    for q in queries:
        ok, msg = _verify_one(s, q, args.seed)
        if ok:
            out.write("OK\n")
        else:
            failed += 1
            out.write(f"FAIL line {q.line_no} {q.text()}: {msg}\n")
    return EXIT_VERIFY if failed else 0


def cmd_bench(args, out):
    tree, queries = _load(args)
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    t0 = time.perf_counter()
    s = _session(args, tree)
    t_struct = time.perf_counter() - t0
    out.write(f"backend {kernels.BACKEND}\n")
    out.write(f"structure_build_s {t_struct:.4f}\n")
    for kind in _engine_kinds(tree):
        t0 = time.perf_counter()
        eng = s.pq.engine(kind)
        out.write(f"engine {kind} build_s {time.perf_counter() - t0:.4f} build_ops {eng.build_ops}\n")
    lat = {}
    for _ in range(args.trials):
        for q in queries:
            if q.op == "GMAXCHECK":
                continue
            t0 = time.perf_counter()
            s.answer(q, args.seed)
            key = q.op if q.op != "MINORITY" else f"MINORITY-{q.variant}"
            lat.setdefault(key, []).append(time.perf_counter() - t0)
    for key in sorted(lat):
        xs = lat[key]
        out.write(f"{key} count {len(xs)} mean_us {1e6 * statistics.fmean(xs):.1f} "
                  f"median_us {1e6 * statistics.median(xs):.1f}\n")
    return 0


def _unmarked_gap(idx, is_marked) -> int:
    """Largest unmarked component, in nodes."""
    size = [0] * (idx.N + 1)
    parent = idx.parent
    best = 0
    for v in reversed(idx.order):
        if is_marked[v]:
            continue
        size[v] += 1
        best = max(best, size[v])
        p = parent[v]
        if p and not is_marked[p]:
            size[p] += size[v]
    return best


def cmd_stats(args, out):
    tree, _ = _load(args)
    s = _session(args, tree)
    ps = s.pq.ps
    h = ps.h
    n = tree.n
    L, LL, _ = hierarchy_factors(n, ps.t1)
    out.write(f"n {n} colors {tree.n_colors} log_n {L} loglog_n {LL}\n")
    out.write(f"factors t1 {h.factors[0]} t2 {h.factors[1]} t3 {h.factors[2]} t4 {h.factors[3]}\n")
    for k in range(1, 5):
        lv = h.levels[k]
        sizes = [len(b) for b in lv.blocks]
        out.write(
            f"level {k} t {lv.t} marked {len(lv.marked.members)} blocks {len(sizes)} "
            f"max_block {max(sizes)} mean_block {statistics.fmean(sizes):.2f} "
            f"max_gap {_unmarked_gap(ps.idx, lv.marked.is_marked)}\n")
    eng = s.pq.engine("mode")
    st = eng.table_stats()
    n2, n3 = h.block_count(2), h.block_count(3)
    n1 = h.block_count(1)
    t2 = h.factors[1]
    out.write(f"T1 entries {st['T1']} expected {n3 * n3}\n")
    out.write(f"T2 entries {st['T2']} expected {n2 * n3}\n")
    out.write(f"T3 entries {st['T3']} expected {n1 * n3}\n")
    out.write(f"T5 entries {st['T5_entries']} width {st['t5_width']} bits {st['T5_bits']} "
              f"budget {16 * (n / t2) ** 2:.0f}\n")
    out.write(f"strata {' '.join(map(str, st['strata']))}\n")
    out.write(f"build_ops {st['build_ops']} per_n_n_over_t2 {st['build_ops'] / (n * n / t2):.2f}\n")
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "build": cmd_build,
    "query": cmd_query,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pathfreq", description="Frequency queries on colored tree paths.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("gen", help="generate a random colored tree")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--colors", type=int, default=None, help="distinct color values (default n)")
    g.add_argument("--shape", choices=SHAPES, default="random")
    g.add_argument("--weights", action="store_true", help="add a signed weights line")
    g.add_argument("--out", default=None)

    for name in ("build", "query", "verify", "bench", "stats"):
        c = sub.add_parser(name)
        c.add_argument("--tree", required=True)
        if name in ("query", "verify", "bench"):
            c.add_argument("--queries", required=True)
        c.add_argument("--t1", type=int, default=None)
        c.add_argument("--word-size", type=int, default=64)
        c.add_argument("--seed", type=int, default=0)
        c.add_argument("--mode", choices=(STRATIFIED, FALLBACK), default=STRATIFIED)
        c.add_argument("--trials", type=int, default=1)
    return p


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command == "gen" and args.colors is None:
            args.colors = args.n
        if args.seed < 0 or args.seed >= 1 << 64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"pathfreq: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TreeFormatError, ScriptError) as exc:
        print(f"pathfreq: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"pathfreq: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
