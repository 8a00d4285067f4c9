"""Command-line front end: ``matfol <subcommand> [options]``.

Exit status 0 means the command ran (the verdict is in the output), 2 means an
error, 3 means the local and brute-force pipelines disagreed in ``--mode both``.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
from typing import List, Optional

from . import io
from .errors import MatfolError
from .logic import decide_sentence, eval_bruteforce, parse
from .matroid import DEFAULT_BUDGET, validate_axioms
from .mdwc import (
    INF,
    ColoringMode,
    mdwc_bruteforce,
    mdwc_cographic,
    mdwc_graphic,
    solve_mdwc,
)
from .metric import (
    branch_width_bruteforce,
    distance_table,
    element_distance,
    gaifman_graph,
    gaifman_graph_dp,
    min_circuit_length,
)
from .sums import validate_tree

EXIT_OK, EXIT_ERROR, EXIT_MISMATCH = 0, 2, 3

log = logging.getLogger("matfol")


class CliError(MatfolError):
    pass


def _num(x):
    return None if x == INF else int(x)


def _text_num(x) -> str:
    return "inf" if x == INF else str(int(x))


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get("MATFOL_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"MATFOL_BUDGET must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


def _need(args, name: str):
    val = getattr(args, name)
    if val is None:
        raise CliError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return val


def _emit(args, payload: dict, text: str):
    if args.json:
        print(io.dump_json(payload))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_decide(args) -> int:
    m = io.matroid_from_json(io.load_json(_need(args, "matroid")))
    s = parse(io.read_text(_need(args, "sentence")))
    d = args.d if args.d is not None else s.depth
    budget = _budget(args)
    payload = {"d": d, "mode": args.mode}
    verdicts = {}
    if args.mode in ("local", "both"):
        trace: list = []
        verdicts["local"] = decide_sentence(s, m, d, budget=budget, trace=trace, threads=args.threads)
        payload["stats"] = {"leaves": [t.stats() for t in trace]}
    if args.mode in ("brute", "both"):
        verdicts["brute"] = eval_bruteforce(s, m, d, budget=budget)
    verdict = verdicts.get("local", verdicts.get("brute"))
    payload["verdict"] = verdict
    if args.mode == "both" and verdicts["local"] != verdicts["brute"]:
        payload["mismatch"] = verdicts
        _emit(args, payload, "MISMATCH")
        print(f"mismatch: local={verdicts['local']} brute={verdicts['brute']}", file=sys.stderr)
        return EXIT_MISMATCH
    _emit(args, payload, "TRUE" if verdict else "FALSE")
    return EXIT_OK


def cmd_gaifman(args) -> int:
    d = _need(args, "d")
    if args.decomposition:
        t = io.tree_from_json(io.load_json(args.decomposition))
        g = gaifman_graph_dp(t, d)
    else:
        m = io.matroid_from_json(io.load_json(_need(args, "matroid")))
        g = gaifman_graph(m, d, budget=_budget(args))
    edges = [list(e) for e in g.edges()]
    _emit(args, {"d": d, "edges": edges}, "\n".join(f"{u} {v}" for u, v in edges))
    return EXIT_OK


def cmd_distance(args) -> int:
    m = io.matroid_from_json(io.load_json(_need(args, "matroid")))
    cap = args.d if args.d is not None else len(m)
    budget = _budget(args)
    if args.pair:
        e, f = args.pair
        dist = element_distance(m, e, f, cap, budget=budget)
        _emit(args, {"pair": [e, f], "cap": cap, "distance": _num(dist)}, _text_num(dist))
        return EXIT_OK
    table = distance_table(m, cap, budget=budget)
    rows = [[e, f, _num(table(e, f))] for e, f in itertools.combinations(m.elements, 2)]
    _emit(
        args,
        {"cap": cap, "distances": rows},
        "\n".join(f"{e} {f} {'inf' if v is None else v}" for e, f, v in rows),
    )
    return EXIT_OK


def cmd_mdwc(args) -> int:
    inst = io.mdwc_from_json(io.load_json(_need(args, "instance")))
    opts = dict(mode=ColoringMode(args.coloring), failure_bound=args.mc_fail, seed=args.seed)
    if args.solver == "brute":
        val = mdwc_bruteforce(inst, budget=_budget(args))
    elif args.solver == "graphic":
        val = mdwc_graphic(inst, **opts)
    elif args.solver == "cographic":
        val = mdwc_cographic(inst)
    else:
        val = solve_mdwc(inst, budget=_budget(args), **opts)
    _emit(args, {"value": _num(val), "solver": args.solver}, _text_num(val))
    return EXIT_OK


def cmd_circuit(args) -> int:
    t = io.tree_from_json(io.load_json(_need(args, "decomposition")))
    f1, f2, d = _need(args, "f1"), _need(args, "f2"), _need(args, "d")
    opts = dict(mode=ColoringMode(args.coloring), failure_bound=args.mc_fail, seed=args.seed)
    val = min_circuit_length(t, f1, f2, d, **opts)
    _emit(args, {"f1": f1, "f2": f2, "d": d, "length": _num(val)}, _text_num(val))
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.decomposition:
        t = io.tree_from_json(io.load_json(args.decomposition))
        violations = validate_tree(t).violations
        kind = "decomposition"
    else:
        m = io.matroid_from_json(io.load_json(_need(args, "matroid")))
        violations = validate_axioms(m, bound=args.bound).violations
        kind = "matroid"
    text = "VALID" if not violations else "INVALID\n" + "\n".join(violations)
    _emit(args, {"kind": kind, "valid": not violations, "violations": violations}, text)
    return EXIT_OK


def cmd_branchwidth(args) -> int:
    m = io.matroid_from_json(io.load_json(_need(args, "matroid")))
    b = branch_width_bruteforce(m, bound=args.bound)
    _emit(args, {"branch_width": b}, str(b))
    return EXIT_OK


COMMANDS = {
    "decide": (cmd_decide, "decide a sentence on a matroid"),
    "gaifman": (cmd_gaifman, "print the circuit Gaifman graph"),
    "distance": (cmd_distance, "circuit distance of a pair, or all pairs"),
    "mdwc": (cmd_mdwc, "solve a minimum dependency weight circuit instance"),
    "circuit": (cmd_circuit, "shortest circuit through two elements of a decomposed matroid"),
    "validate": (cmd_validate, "check matroid axioms or a decomposition tree"),
    "branchwidth": (cmd_branchwidth, "exact branch-width of a small matroid"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matroid", metavar="PATH", help="matroid JSON file")
    common.add_argument("--decomposition", metavar="PATH", help="decomposition tree JSON file")
    common.add_argument("--sentence", metavar="PATH", help="sentence text file")
    common.add_argument("--instance", metavar="PATH", help="MDWC instance JSON file")
    common.add_argument("--d", type=int, help="circuit length bound (decide: defaults to quantifier depth)")
    common.add_argument("--mode", choices=("local", "brute", "both"), default="local")
    common.add_argument("--budget", type=int, help="subset budget for exhaustive steps (env MATFOL_BUDGET)")
    common.add_argument("--mc-fail", type=float, default=1e-6, help="Monte Carlo failure bound")
    common.add_argument("--coloring", choices=[c.value for c in ColoringMode], default="exhaustive")
    common.add_argument("--solver", choices=("auto", "brute", "graphic", "cographic"), default="auto")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    common.add_argument("--f1", help="first element (circuit)")
    common.add_argument("--f2", help="second element (circuit)")
    common.add_argument("--pair", nargs=2, metavar=("E", "F"), help="element pair (distance)")
    common.add_argument("--bound", type=int, default=10, help="size limit for exhaustive checks")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="matfol", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except (MatfolError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
