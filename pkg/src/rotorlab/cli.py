"""Command-line front end: aggregation, group checks, escape calculus.

Exit codes: 0 success, 1 a verified property failed (that would be a bug),
2 bad input, 3 word not realizable.  Output is deterministic JSON: same
request, same bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from rotorlab import acceptance
from rotorlab.escape import (
    NotRealizableError,
    WordError,
    is_escape_branch,
    is_escape_tree,
    residues,
    simulate_config,
    synthesize_branch,
    synthesize_tree,
    descriptor_to_branch_config,
    validate_word,
    violating_window,
)
from rotorlab.graph import GraphError, graph_from_json
from rotorlab.group import order_of_generator, verify_isomorphism
from rotorlab.lazytree import (
    LazyTreeConfig,
    LazyTreeError,
    NotAcyclicError,
    aggregate,
    ball_size,
    dot_snapshot,
    alternating_tree_config,
    run_chips_infinite,
    uniform_config,
)
from rotorlab.trees import BadParametersError, build_wired_tree

OK, VERDICT_FAIL, INPUT_ERROR, NOT_REALIZABLE = 0, 1, 2, 3


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_aggregate(args) -> int:
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = LazyTreeConfig.from_json(fh.read())
            if cfg.d != args.d:
                return _fail("config degree does not match --d", INPUT_ERROR)
        else:
            cfg = uniform_config(args.d, 1)
        if args.radius is not None and args.chips is not None:
            return _fail("--chips and --radius are mutually exclusive",
                         INPUT_ERROR)
        if args.radius is not None:
            chips = ball_size(args.d, args.radius)
        else:
            chips = args.chips
        if chips is None or chips < 1:
            return _fail("need --chips or --radius", INPUT_ERROR)
    except (OSError, ValueError, LazyTreeError) as exc:
        return _fail(str(exc), INPUT_ERROR)

    try:
        res = aggregate(cfg, chips)
    except NotAcyclicError as exc:
        return _fail(str(exc), INPUT_ERROR)
    except BadParametersError as exc:
        return _fail(str(exc), INPUT_ERROR)

    payload = {
        "d": args.d,
        "chips": chips,
        "cluster_size": len(res.occupied),
        "max_depth": res.max_depth,
        "ball_checks": [{"rho": r, "exact": ok} for r, ok in res.ball_checks],
        "sandwich_ok": res.sandwich_ok,
    }
    if args.radius is not None:
        payload["final_exact_ball"] = res.is_exact_ball(args.radius)
    _emit(payload, args.out)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(dot_snapshot(res.state, cluster=res.occupied) + "\n")
    all_ok = (res.sandwich_ok and all(ok for _, ok in res.ball_checks)
              and payload.get("final_exact_ball", True))
    return OK if all_ok else VERDICT_FAIL


def cmd_group(args) -> int:
    path = args.graph_pos or args.graph
    if bool(path) == bool(args.wired):
        return _fail("need exactly one of a graph file or --wired D N",
                     INPUT_ERROR)
    try:
        if args.wired:
            d, n = args.wired
            g, _ = build_wired_tree(d, n)
        else:
            with open(path) as fh:
                g = graph_from_json(fh.read())
    except (OSError, json.JSONDecodeError, KeyError, GraphError,
            BadParametersError) as exc:
        return _fail(str(exc), INPUT_ERROR)

    report = verify_isomorphism(g)
    payload = report.to_json_dict()
    if args.wired:
        root_order = order_of_generator(g, "r", verify_witnesses=1)
        payload["root_order"] = root_order
    _emit(payload, args.out)
    return OK if report.ok else VERDICT_FAIL


def _load_escape_config(args) -> LazyTreeConfig:
    if args.preset:
        if args.preset == "alternating":
            return alternating_tree_config()
        if args.preset.startswith("uniform-"):
            _, d, c = args.preset.split("-")
            return uniform_config(int(d), int(c))
        raise ValueError(f"unknown preset {args.preset!r}")
    with open(args.config) as fh:
        return LazyTreeConfig.from_json(fh.read())


def cmd_escape(args) -> int:
    if args.action == "check":
        try:
            word = validate_word(args.word)
        except WordError as exc:
            return _fail(str(exc), INPUT_ERROR)
        if args.tree:
            valid = is_escape_tree(word)
            parts = residues(word)
            payload = {
                "word": word, "mode": "tree", "valid": valid,
                "residues": [
                    {"word": r, "valid": is_escape_branch(r),
                     "violating_window": _window_dict(r)}
                    for r in parts
                ],
            }
        else:
            valid = is_escape_branch(word)
            payload = {
                "word": word, "mode": "branch", "valid": valid,
                "violating_window": _window_dict(word),
            }
        _emit(payload, args.out)
        return OK if valid else NOT_REALIZABLE

    if args.action == "synthesize":
        try:
            word = validate_word(args.word)
        except WordError as exc:
            return _fail(str(exc), INPUT_ERROR)
        try:
            if args.tree:
                cfg = synthesize_tree(word)
            else:
                cfg = descriptor_to_branch_config(synthesize_branch(word))
        except NotRealizableError as exc:
            return _fail(str(exc), NOT_REALIZABLE)
        check = simulate_config(cfg, len(word))
        payload = {
            "word": word,
            "mode": "tree" if args.tree else "branch",
            "config": cfg.to_json_dict(),
            "simulated": check,
            "round_trip_ok": check == word,
        }
        _emit(payload, args.out)
        return OK if check == word else VERDICT_FAIL

    if args.action == "simulate":
        try:
            cfg = _load_escape_config(args)
        except (OSError, ValueError, KeyError, LazyTreeError) as exc:
            return _fail(str(exc), INPUT_ERROR)
        if args.m < 0:
            return _fail("--m must be nonnegative", INPUT_ERROR)
        res = run_chips_infinite(cfg, args.m)
        payload = {
            "m": args.m,
            "word": res.word,
            "returns": res.returns,
            "escapes": res.escapes,
        }
        _emit(payload, args.out)
        return OK

    return _fail(f"unknown escape action {args.action!r}", INPUT_ERROR)


def _window_dict(word: str) -> dict | None:
    win = violating_window(word)
    if win is None:
        return None
    k, start, end = win
    return {"k": k, "start": start, "end": end}


def cmd_verify_all(args) -> int:
    results = acceptance.run_all(verbose=True)
    failed = [r for r in results if not r.ok]
    print()
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return OK if not failed else VERDICT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotorlab",
        description="rotor-router walks, groups, and escape sequences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_agg = sub.add_parser("aggregate", help="grow a rotor-router cluster")
    p_agg.add_argument("--d", type=int, required=True, help="tree degree")
    p_agg.add_argument("--chips", type=int, help="number of chips")
    p_agg.add_argument("--radius", type=int,
                       help="grow exactly b_radius chips")
    p_agg.add_argument("--config", help="lazy tree config JSON path")
    p_agg.add_argument("--out", help="write the JSON report here")
    p_agg.add_argument("--dot", help="write a DOT snapshot here")
    p_agg.set_defaults(func=cmd_aggregate)

    p_grp = sub.add_parser("group", help="verify the group isomorphism")
    p_grp.add_argument("graph_pos", nargs="?", metavar="GRAPH",
                       help="graph JSON path")
    p_grp.add_argument("--graph", help="graph JSON path")
    p_grp.add_argument("--wired", nargs=2, type=int, metavar=("D", "N"),
                       help="use the wired regular tree")
    p_grp.add_argument("--out", help="write the JSON report here")
    p_grp.set_defaults(func=cmd_group)

    p_esc = sub.add_parser("escape", help="escape-sequence calculus")
    p_esc.add_argument("action", choices=["check", "synthesize", "simulate"])
    p_esc.add_argument("word", nargs="?", help="binary word")
    kind = p_esc.add_mutually_exclusive_group()
    kind.add_argument("--branch", action="store_true",
                      help="single branch (default)")
    kind.add_argument("--tree", action="store_true", help="full ternary tree")
    p_esc.add_argument("--config", help="config JSON path (simulate)")
    p_esc.add_argument("--preset",
                       help="simulate preset: alternating or uniform-D-C")
    p_esc.add_argument("--m", type=int, default=0,
                       help="number of chips (simulate)")
    p_esc.add_argument("--out", help="write the JSON report here")
    p_esc.set_defaults(func=cmd_escape)

    p_all = sub.add_parser("verify-all", help="run the full acceptance suite")
    p_all.set_defaults(func=cmd_verify_all)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "escape":
        if args.action in ("check", "synthesize") and not args.word:
            parser.error("check/synthesize need a word")
        if args.action == "simulate" and not (args.config or args.preset):
            parser.error("simulate needs --config or --preset")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
