"""``hatters`` command line.

Exit codes: 0 success or verified, 2 counterexample / failed theorem check,
3 undecided within budget, 64 bad usage or malformed input.  Output is JSON
with sorted keys; with the same arguments and seed it is byte-identical
unless ``--timing`` is given.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path
from typing import Sequence

from . import constructions as cons
from . import demon
from .bounds import bound_report
from .game import (
    GameSpec, SearchBudget, SpaceTooLarge, SpecError, coloring_from_json, coloring_to_json,
    evaluate, strategy_from_json, strategy_to_json, verify_winning,
)
from .graphcore import (
    Graph, GraphError, VertexOrder, degeneracy_order, make_complete, make_complete_bipartite,
    make_cycle, make_empty, make_kstar, make_path, make_tree_random, subdivide,
)
from .solver import UNKNOWN, WINNABLE, decide_winnable, hat_number
from .suites import SUITES, run_suite

EXIT_OK, EXIT_COUNTER, EXIT_UNKNOWN, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- input ---------------------------------------------------------------------

def load_json(path: str):
    """Parse a JSON file; syntax errors report the byte offset."""
    try:
        raw = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UsageError(f"{path}: not UTF-8 at byte {exc.start}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[:exc.pos].encode("utf-8"))
        raise UsageError(f"{path}: invalid JSON at byte {offset}: {exc.msg}") from None


def _graph(path: str) -> Graph:
    data = load_json(path)
    if isinstance(data, dict) and "graph" in data:
        data = data["graph"]
    return Graph.from_json(data)


_INLINE = re.compile(r"^\s*\d+(\s*,\s*\d+)*\s*$")


def _int_list(arg: str) -> list[int]:
    """Inline ``"0,1,2"`` or a JSON file holding a list or ``{"colors": [...]}``."""
    if _INLINE.match(arg):
        return [int(x) for x in arg.split(",")]
    data = load_json(arg)
    if isinstance(data, dict):
        return list(coloring_from_json(data))
    return [int(x) for x in data]


def _strategy_doc(path: str) -> dict:
    data = load_json(path)
    return {"strategy": data} if isinstance(data, list) else data


def _spec(args, g: Graph, doc: dict | None = None) -> GameSpec:
    doc = doc or {}
    s = args.s if args.s is not None else int(doc.get("s", 1))
    if args.k is not None:
        palette = (args.k,) * g.n
    elif "palette" in doc:
        palette = tuple(doc["palette"])
    else:
        raise UsageError("--k is required (no palette in the strategy file)")
    admissible = None
    if getattr(args, "admissible", None):
        admissible = [tuple(c) for c in load_json(args.admissible)]
    return GameSpec(g, palette, s, admissible)


def _budget(args) -> SearchBudget:
    kw = {"threads": args.threads}
    if args.budget_nodes is not None:
        kw["node_limit"] = args.budget_nodes
    if args.budget_secs is not None:
        kw["time_limit"] = args.budget_secs
    return SearchBudget(**kw)


# -- subcommands -----------------------------------------------------------------

def cmd_gen(args) -> tuple[dict, int]:
    fam, n = args.family, args.n
    extra: dict = {}
    if fam in ("complete", "cycle", "path", "empty", "tree") and n is None:
        raise UsageError(f"gen {fam} needs --n")
    if fam == "complete":
        g = make_complete(n)
    elif fam == "cycle":
        g = make_cycle(n)
    elif fam == "path":
        g = make_path(n)
    elif fam == "empty":
        g = make_empty(n)
    elif fam == "tree":
        g = make_tree_random(n, args.seed)
    elif fam == "bipartite":
        if args.a is None or args.b is None:
            raise UsageError("gen bipartite needs --a and --b")
        g = make_complete_bipartite(args.a, args.b)
    elif fam == "kstar":
        if args.clique is None or n is None:
            raise UsageError("gen kstar needs --clique and --n")
        g, clique, leaves = make_kstar(args.clique, n)
        extra = {"clique": clique, "leaves": leaves}
    else:  # subdivide
        if not args.graph:
            raise UsageError("gen subdivide needs --graph")
        g, orig, new = subdivide(_graph(args.graph))
        extra = {"original": orig, "subdividers": new}
    return {**g.to_json(), **extra}, EXIT_OK


def cmd_eval(args) -> tuple[dict, int]:
    g = _graph(args.graph)
    doc = _strategy_doc(args.strategy)
    spec = _spec(args, g, doc)
    strat = strategy_from_json(doc["strategy"], spec, cons.rule_from_descriptor)
    if args.coloring is None:
        res = verify_winning(spec, strat, threads=args.threads)
        if res:
            return {"winning": True, "colorings": res.checked}, EXIT_OK
        return {"winning": False, "counterexample": list(res.coloring)}, EXIT_COUNTER
    c = _int_list(args.coloring)
    if len(c) != g.n:
        raise UsageError(f"coloring has {len(c)} entries, graph has {g.n} vertices")
    correct = sorted(evaluate(spec, strat, c))
    return {"coloring": c, "correct": correct, "demonic": not correct}, EXIT_OK


def cmd_construct(args) -> tuple[dict, int]:
    name = args.name
    if name == "clique_sum":
        if args.n is None:
            raise UsageError("construct clique_sum needs --n")
        spec = cons.clique_sum_spec(args.n, args.k)
        strat = cons.clique_sum_strategy(args.n, args.k)
    elif name == "tree_power":
        if not args.graph:
            raise UsageError("construct tree_power needs --graph")
        g = _graph(args.graph)
        palette, strat = cons.tree_power_strategy(g)
        spec = GameSpec(g, palette)
    elif name == "kn_admissible":
        if args.n is None or args.k is None or not args.admissible:
            raise UsageError("construct kn_admissible needs --n, --k and --admissible")
        A = [tuple(c) for c in load_json(args.admissible)]
        spec = GameSpec.uniform(make_complete(args.n), args.k, admissible=A)
        strat = cons.kn_admissible_strategy(args.n, args.k, A)
    else:  # kstar
        if args.clique is None:
            raise UsageError("construct kstar needs --clique")
        spec, strat = cons.kstar_strategy(args.clique)
    out = {"graph": spec.graph.to_json(), "palette": list(spec.palette), "s": spec.guesses,
           "strategy": strategy_to_json(strat, spec.guesses)}
    if spec.admissible is not None:
        out["admissible"] = [list(c) for c in spec.admissible]
    code = EXIT_OK
    if args.verify:
        res = verify_winning(spec, strat, threads=args.threads)
        out["verified"] = bool(res)
        if not res:
            out["counterexample"] = list(res.coloring)
            code = EXIT_COUNTER
    return out, code


_SUB_DEMONS = {"independent": demon.independent_demon, "tree": demon.tree_demon,
               "exhaustive": demon.exhaustive_demon}


def cmd_demon(args) -> tuple[dict, int]:
    g = _graph(args.graph)
    doc = _strategy_doc(args.strategy)
    spec = _spec(args, g, doc)
    if len(set(spec.palette)) != 1:
        raise UsageError("demons need a uniform palette")
    k, s = spec.palette[0] if g.n else 1, spec.guesses
    strat = strategy_from_json(doc["strategy"], spec, cons.rule_from_descriptor)
    out: dict = {"mode": args.mode}
    if args.mode == "tree":
        c = demon.tree_demonic(g, strat, k, s)
    elif args.mode == "partition":
        if args.part_a is None or args.k1 is None:
            raise UsageError("partition mode needs --part-a and --k1")
        A = _int_list(args.part_a)
        B = [v for v in range(g.n) if v not in set(A)]
        c = demon.partition_demonic(g, A, B, strat, k, s, args.k1,
                                    _SUB_DEMONS[args.demon_a], _SUB_DEMONS[args.demon_b])
    elif args.mode == "bipolar":
        order = VertexOrder.of(g, _int_list(args.order)) if args.order else degeneracy_order(g)[0]
        out["order"] = list(order.order)
        c = demon.bipolar_demonic(g, order, strat, k)
    else:
        c = demon.exhaustive_demonic_search(spec, strat)
        if c is None:
            out.update({"coloring": None, "verified": False})
            return out, EXIT_OK
    out.update({**coloring_to_json(c), "verified": not evaluate(spec, strat, c)})
    return out, EXIT_OK if out["verified"] else EXIT_COUNTER


def cmd_solve(args) -> tuple[dict, int]:
    g = _graph(args.graph)
    spec = _spec(args, g)
    res = decide_winnable(spec, _budget(args), symmetry=args.symmetry)
    out = {"verdict": res.verdict, "nodes": res.nodes, "notes": res.notes}
    if res.verdict == WINNABLE:
        out["strategy"] = strategy_to_json(res.strategy, spec.guesses)
    if args.timing:
        out["seconds"] = round(res.seconds, 3)
    return out, EXIT_UNKNOWN if res.verdict == UNKNOWN else EXIT_OK


def cmd_mu(args) -> tuple[dict, int]:
    g = _graph(args.graph)
    hn = hat_number(g, args.s or 1, args.k_max, _budget(args), symmetry=args.symmetry)
    out = hn.to_json()
    return out, EXIT_OK if hn.value is not None else EXIT_UNKNOWN


def cmd_bounds(args) -> tuple[dict, int]:
    return bound_report(_graph(args.graph), _budget(args)).to_json(), EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    names = list(SUITES) if args.theorem == "all" else [args.theorem]
    if any(n not in SUITES for n in names):
        raise UsageError(f"unknown theorem {args.theorem!r}; choose from all, {', '.join(SUITES)}")
    budget = _budget(args)
    reports = [run_suite(n, args.trials, args.seed, budget) for n in names]
    verdicts = [r.verdict for r in reports]
    code = (EXIT_COUNTER if "fail" in verdicts
            else EXIT_UNKNOWN if "inconclusive" in verdicts else EXIT_OK)
    body = [r.to_json(args.timing) for r in reports]
    return (body[0] if len(body) == 1 else {"suites": body}), code


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--graph", help="graph JSON file ({'n':..., 'edges': [[u,v],...]})")
    common.add_argument("--k", type=int, help="colors per vertex")
    common.add_argument("--s", type=int, help="guesses per vertex (default 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int)
    common.add_argument("--budget-nodes", type=int)
    common.add_argument("--budget-secs", type=float, help="default $HATTERS_BUDGET_SECS or 60")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock fields")

    p = _Parser(prog="hatters", description="Hat-guessing games on graphs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("gen", parents=[common], help="generate a graph")
    q.add_argument("family", choices=["complete", "cycle", "path", "empty", "tree",
                                      "bipartite", "kstar", "subdivide"])
    q.add_argument("--n", type=int)
    q.add_argument("--a", type=int)
    q.add_argument("--b", type=int)
    q.add_argument("--clique", type=int, help="clique size for kstar")

    q = sub.add_parser("eval", parents=[common], help="play a strategy")
    q.add_argument("--strategy", required=True)
    q.add_argument("--coloring", help="'0,1,2' or JSON file; omit to check every coloring")

    q = sub.add_parser("construct", parents=[common], help="build a known winning strategy")
    q.add_argument("name", choices=["clique_sum", "tree_power", "kn_admissible", "kstar"])
    q.add_argument("--n", type=int)
    q.add_argument("--clique", type=int, help="k for the kstar construction (1 or 2)")
    q.add_argument("--admissible", help="JSON list of colorings")
    q.add_argument("--verify", action="store_true")

    q = sub.add_parser("demon", parents=[common], help="find a coloring nobody guesses")
    q.add_argument("--strategy", required=True)
    q.add_argument("--mode", choices=["tree", "partition", "bipolar", "exhaustive"], required=True)
    q.add_argument("--part-a", help="vertices of A for partition mode")
    q.add_argument("--k1", type=int, help="colors available to A in partition mode")
    q.add_argument("--demon-a", choices=sorted(_SUB_DEMONS), default="independent")
    q.add_argument("--demon-b", choices=sorted(_SUB_DEMONS), default="tree")
    q.add_argument("--order", help="vertex order for bipolar mode (default: degeneracy)")

    q = sub.add_parser("solve", parents=[common], help="decide winnability")
    q.add_argument("--admissible", help="JSON list of admissible colorings")
    q.add_argument("--symmetry", action="store_true", help="fix one guess by color renaming")

    q = sub.add_parser("mu", parents=[common], help="hat number of a graph")
    q.add_argument("--k-max", type=int)
    q.add_argument("--symmetry", action="store_true")

    sub.add_parser("bounds", parents=[common], help="upper bounds on the hat number")

    q = sub.add_parser("verify", parents=[common], help="run a theorem check")
    q.add_argument("--theorem", required=True, help=f"all, {', '.join(SUITES)}")
    return p


_COMMANDS = {"gen": cmd_gen, "eval": cmd_eval, "construct": cmd_construct, "demon": cmd_demon,
             "solve": cmd_solve, "mu": cmd_mu, "bounds": cmd_bounds, "verify": cmd_verify}


def run(argv: Sequence[str] | None = None) -> int:
    t0 = time.monotonic()
    try:
        args = build_parser().parse_args(argv)
        if args.command not in ("gen", "verify", "construct") and not args.graph:
            raise UsageError(f"{args.command} needs --graph")
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        out, code = _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, SpecError, SpaceTooLarge, demon.DemonError, KeyError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing and isinstance(out, dict) and "seconds" not in out:
        out["seconds"] = round(time.monotonic() - t0, 3)
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
