"""Command-line front end.

Exit codes: 0 analysis completed (whatever the verdict), 1 input or parse
error, 2 internal invariant violation.  Reports go to stdout, diagnostics to
stderr.  All randomness is seeded; identical invocations produce identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from random import Random
from typing import Optional, Sequence

from . import blowup as B
from . import subgroups as S
from . import traintrack as T
from . import whitehead as WH
from .decide import AnalysisOptions, Report, analyze
from .graphs import GraphMap, parse_graph_map, print_graph_map, rose
from .randmaps import random_positive_automorphism
from .traintrack import InternalCheckError
from .words import (
    Automorphism,
    parse_automorphism,
    parse_inline_map,
    print_automorphism,
    word_from_str,
)


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; bad flags are input errors
        raise _CliError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ttiwip", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_options(p):
        p.add_argument("input", nargs="?", help="automorphism DSL file or graph-map JSON file")
        p.add_argument("--map", dest="inline", help="inline automorphism, e.g. 'a->b; b->a b'")
        p.add_argument("--auto-reduce", action="store_true", help="freely reduce non-reduced images instead of rejecting them")

    p = sub.add_parser("analyze", help="full verdict pipeline")
    add_input_options(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--pmax", type=int, default=12)
    p.add_argument("--carriage-lmax", type=int, default=10)
    p.add_argument("--atoroidal", choices=["yes", "no", "unknown"], default="unknown")

    p = sub.add_parser("tt-check", help="train-track verdict with witness chain")
    add_input_options(p)

    p = sub.add_parser("matrix", help="exact transition matrix (optionally powered)")
    add_input_options(p)
    p.add_argument("--power", type=int, default=1)

    p = sub.add_parser("whitehead", help="per-vertex Whitehead graphs")
    add_input_options(p)

    p = sub.add_parser("blowup", help="vertex-splitting construction and its invariant subgraph")
    add_input_options(p)

    p = sub.add_parser("core", help="fold a subgroup to its Stallings core")
    add_input_options(p)
    p.add_argument("--rank", type=int, help="ambient rank when no input map is given")
    p.add_argument("--subgroup", required=True, help="comma-separated generator words, e.g. 'a b a^-1, b'")

    p = sub.add_parser("carriage", help="leaf-window carriage check against a subgroup core")
    add_input_options(p)
    p.add_argument("--subgroup", required=True)
    p.add_argument("--lmax", type=int, default=10)

    p = sub.add_parser("segments", help="stable set of length-L windows of iterated edge images")
    add_input_options(p)
    p.add_argument("--length", type=int, default=2)

    p = sub.add_parser("generate", help="write seeded random positive automorphism fixtures")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--rank-min", type=int, default=2)
    p.add_argument("--rank-max", type=int, default=5)
    p.add_argument("--max-image-len", type=int, default=6)
    p.add_argument("--out", default="fixtures")
    return parser


def _load_input(args) -> GraphMap | Automorphism:
    if args.inline and args.input:
        raise _CliError("give either an input file or --map, not both")
    if args.inline:
        return parse_inline_map(args.inline, auto_reduce=args.auto_reduce)
    if not args.input:
        raise _CliError("missing input (file argument or --map)")
    path = Path(args.input)
    try:
        text = path.read_text()
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from exc
    if path.suffix == ".json":
        return parse_graph_map(text)
    return parse_automorphism(text, auto_reduce=args.auto_reduce)


def _as_graph_map(obj) -> GraphMap:
    if isinstance(obj, Automorphism):
        from .graphs import rose_representative

        return rose_representative(obj).map
    return obj


def _subgroup_words(spec: str, rank: int):
    words = [word_from_str(rank, part) for part in spec.split(",")]
    if any(w.is_trivial for w in words):
        raise _CliError("subgroup generators must be nontrivial")
    return words


def _ambient_rank(args, obj) -> int:
    if obj is not None:
        return _as_graph_map(obj).graph.edge_count
    if getattr(args, "rank", None):
        return args.rank
    raise _CliError("need --rank or an input map to fix the ambient rose")


def _cmd_analyze(args, out) -> int:
    obj = _load_input(args)
    options = AnalysisOptions(
        atoroidal={"yes": "asserted-true", "no": "asserted-false", "unknown": "unknown"}[
            args.atoroidal
        ],
        lmax=args.lmax,
        pmax=args.pmax,
        carriage_lmax=args.carriage_lmax,
    )
    report = analyze(obj, options)
    out.write(report.to_json() if args.format == "json" else report.to_text())
    return 0


def _cmd_tt_check(args, out) -> int:
    f = _as_graph_map(_load_input(args))
    closure = T.taken_turn_closure(f)
    if T.is_train_track(f, closure):
        out.write("train-track map: yes\n")
        out.write(f"taken turns: {len([t for t in closure.taken])}\n")
        return 0
    out.write("not a train-track map\n")
    worst = closure.degenerate_turns()[0]
    g = f.graph
    out.write("degenerate turn witness chain:\n")
    for turn, edge, depth in closure.witness_chain(worst):
        out.write(
            f"  {{{g.edge_name(turn[0])}, {g.edge_name(turn[1])}}} contained in "
            f"iterate {depth} of edge {g.edge_name(edge)}\n"
        )
    return 0


def _cmd_matrix(args, out) -> int:
    f = _as_graph_map(_load_input(args))
    if args.power < 0:
        raise _CliError("--power must be >= 0")
    a = T.transition_matrix(f).power(args.power)
    out.write("edges: " + " ".join(a.edge_names) + "\n")
    out.write(a.grid_str() + "\n")
    return 0


def _cmd_whitehead(args, out) -> int:
    f = _as_graph_map(_load_input(args))
    closure = T.taken_turn_closure(f)
    if not T.is_train_track(f, closure):
        out.write("not a train-track map; Whitehead graphs undefined\n")
        return 0
    g = f.graph
    for w in WH.whitehead_graphs(f, closure):
        out.write(f"vertex {w.vertex}: connected={w.is_connected()}\n")
        for node in w.nodes:
            nbrs = " ".join(g.edge_name(n) for n in w.neighbors(node))
            out.write(f"  {g.edge_name(node)}: {nbrs if nbrs else '-'}\n")
    return 0


def _cmd_blowup(args, out) -> int:
    f = _as_graph_map(_load_input(args))
    bu = B.blow_up(f)
    out.write("split map:\n")
    out.write(print_graph_map(bu.blown))
    names = [bu.blown.graph.edge_names[k - 1] for k in sorted(bu.delta_edges)]
    out.write(f"invariant subgraph: {' '.join(names)}\n")
    witness = B.verify_reduction(bu.blown, set(bu.delta_edges))
    out.write(
        f"reduction checks: invariant={witness.invariant} "
        f"nontrivial={witness.homotopically_nontrivial} "
        f"not-homotopy-equivalence={witness.not_homotopy_equivalence}\n"
    )
    out.write(
        f"betti: subgraph {witness.betti_delta}, ambient {witness.betti_ambient}\n"
    )
    if witness.ok:
        out.write("verdict: reduction witness; the automorphism is reducible\n")
    else:
        out.write(
            f"verdict: no reduction from the blow-up (failed: {', '.join(witness.failed_checks())})\n"
        )
    return 0


def _cmd_core(args, out) -> int:
    obj = _load_input(args) if (args.input or args.inline) else None
    rank = _ambient_rank(args, obj)
    words = _subgroup_words(args.subgroup, rank)
    core = S.core_of_words(words, rank)
    out.write(S.print_core(core))
    out.write(f"finite index: {S.is_finite_index(core)}\n")
    if S.is_finite_index(core):
        out.write(f"index: {core.vertex_count}\n")
    return 0


def _cmd_carriage(args, out) -> int:
    f = _as_graph_map(_load_input(args))
    rank = f.graph.edge_count
    words = _subgroup_words(args.subgroup, rank)
    core = S.core_of_words(words, rank)
    refutation = S.first_refutation(core, f, args.lmax)
    if refutation is None:
        out.write(
            f"carried up to window {args.lmax} (inconclusive; no refutation found)\n"
        )
    else:
        length, segment = refutation
        g = f.graph
        seg = " ".join(g.edge_name(e) for e in segment)
        out.write(f"refuted at window {length}: segment `{seg}` has no lift\n")
    return 0


def _cmd_segments(args, out) -> int:
    f = _as_graph_map(_load_input(args))
    segs = S.leaf_segments(f, args.length)
    g = f.graph
    out.write(f"window {segs.length}: {len(segs.segments)} segments")
    out.write(" (truncated)\n" if segs.truncated else "\n")
    for s in sorted(segs.segments, key=S.segment_sort_key):
        out.write("  " + " ".join(g.edge_name(e) for e in s) + "\n")
    return 0


def _cmd_generate(args, out) -> int:
    if args.count < 1 or args.rank_min < 2 or args.rank_max < args.rank_min:
        raise _CliError("bad generation bounds")
    rng = Random(args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        rank = rng.randint(args.rank_min, args.rank_max)
        aut = random_positive_automorphism(rng, rank, args.max_image_len)
        path = out_dir / f"seed{args.seed}_{i:03d}.aut"
        path.write_text(
            f"# seed {args.seed} index {i}\n" + print_automorphism(aut)
        )
        out.write(f"{path}\n")
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "tt-check": _cmd_tt_check,
    "matrix": _cmd_matrix,
    "whitehead": _cmd_whitehead,
    "blowup": _cmd_blowup,
    "core": _cmd_core,
    "carriage": _cmd_carriage,
    "segments": _cmd_segments,
    "generate": _cmd_generate,
}


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except (_CliError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    except InternalCheckError as exc:
        err.write(f"internal invariant violation: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
