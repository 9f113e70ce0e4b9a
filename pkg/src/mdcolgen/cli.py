"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 solve failure (including a
benchmark run with a failing row).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

from . import bench as bench_mod
from . import report as report_mod
from .colgen import ColGenConfig, InconsistentPrimal, run_colgen
from .gadgets import build_ap_gadget, build_md_gadget
from .graph import Graph, GraphFormatError, induced_edge_count, read_edge_list
from .lp import LpError
from .oracles import (brute_force_densest, brute_force_max_cut, brute_force_partition_opt,
                      brute_force_pricing)
from .peeling import PeelConfig, peel_densest, peel_pricing
from .pricing import enumerate_pricing

EXIT_OK, EXIT_USAGE, EXIT_SOLVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _csv_floats(text: str) -> List[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _read_graph(args) -> Graph:
    if getattr(args, "format", "edgelist") != "edgelist":
        raise UsageError(f"unsupported format {args.format!r}")
    try:
        return read_edge_list(args.input, one_indexed=args.one_indexed)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror or exc}")
    except GraphFormatError as exc:
        raise UsageError(f"{args.input}: {exc}")


def _read_lambda(args, G: Graph, exact: bool = False):
    if args.lam is not None and args.lam_file is not None:
        raise UsageError("give either --lam or --lam-file, not both")
    if args.lam is not None:
        tokens = args.lam.replace(",", " ").split()
    elif args.lam_file is not None:
        try:
            tokens = Path(args.lam_file).read_text(encoding="utf-8").split()
        except OSError as exc:
            raise UsageError(f"cannot read {args.lam_file}: {exc.strerror or exc}")
    else:
        tokens = ["0"] * G.n
    try:
        vals = [Fraction(t) if exact else float(t) for t in tokens]
    except ValueError:
        raise UsageError("lambda values must be numbers")
    if len(vals) != G.n:
        raise UsageError(f"expected {G.n} lambda values, got {len(vals)}")
    return vals


def _labels(G: Graph, S) -> List[str]:
    return [G.label(v) for v in S]


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def cmd_solve(args) -> int:
    G = _read_graph(args)
    extra = []
    if args.columns:
        try:
            extra = json.loads(Path(args.columns).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read columns file {args.columns}: {exc}")
    try:
        cfg = ColGenConfig(peel=PeelConfig(p_grid=tuple(args.p_grid), q_grid=tuple(args.q_grid)),
                           epsilon=args.epsilon, time_limit=args.time_limit,
                           max_iterations=args.max_iterations, initial_columns=extra)
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        rep = run_colgen(G, cfg)
    except (LpError, InconsistentPrimal) as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    name = args.name or Path(args.input).stem
    data = report_mod.build_report(G, rep, cfg, name)
    if args.out:
        Path(args.out).write_text(report_mod.dumps(data), encoding="utf-8")
        res = data["result"]
        print(f"{name}: D={res['modularity_density']:.6f} dual={res['dual_objective']:.6f} "
              f"{res['primal_status']} certificate={res['certificate']} status={res['status']}")
    else:
        sys.stdout.write(report_mod.dumps(data))
    return EXIT_OK


def cmd_peel(args) -> int:
    G = _read_graph(args)
    if args.densest:
        S = peel_densest(G)
        _emit({"set": _labels(G, S), "density": induced_edge_count(G, S) / len(S)}, args.out)
        return EXIT_OK
    lam = _read_lambda(args, G)
    try:
        cfg = PeelConfig(p_grid=tuple(args.p_grid), q_grid=tuple(args.q_grid), epsilon=args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc))
    fam = peel_pricing(G, lam, cfg)
    _emit({"sets": [_labels(G, S) for S in fam]}, args.out)
    return EXIT_OK


def cmd_ap_oracle(args) -> int:
    G = _read_graph(args)
    lam = _read_lambda(args, G, exact=args.exact)
    try:
        opt, S = enumerate_pricing(G, lam, exact=args.exact)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit({"optimum": str(opt) if args.exact else opt, "best_set": _labels(G, S)}, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    G = _read_graph(args)
    try:
        if args.mode == "partition":
            D, P = brute_force_partition_opt(G, args.min_clusters)
            out = {"value": D, "clusters": [_labels(G, C) for C in P.clusters]}
        elif args.mode == "max-cut":
            val, (X, Y) = brute_force_max_cut(G)
            out = {"value": val, "cut": [_labels(G, X), _labels(G, Y)]}
        elif args.mode == "densest":
            dens, S = brute_force_densest(G)
            out = {"value": dens, "set": _labels(G, S)}
        else:
            val, S = brute_force_pricing(G, _read_lambda(args, G))
            out = {"value": val, "set": _labels(G, S)}
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(out, args.out)
    return EXIT_OK


def cmd_gadget(args) -> int:
    G = _read_graph(args)
    try:
        if args.kind == "md":
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                g = build_md_gadget(G, args.k, args.m_override)
            for w in caught:
                print(f"warning: {w.message}", file=sys.stderr)
            graph, meta = g.complement_g_star, g.metadata()
        else:
            if args.m_override is not None:
                raise UsageError("--m-override applies to --kind md only")
            g = build_ap_gadget(G, args.k)
            graph, meta = g.graph, g.metadata()
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.out_prefix:
        Path(args.out_prefix + ".txt").write_text(graph.edge_list_text(), encoding="utf-8")
        Path(args.out_prefix + ".json").write_text(json.dumps(meta, indent=2) + "\n",
                                                   encoding="utf-8")
    sys.stdout.write(json.dumps(meta, indent=2) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        entries = bench_mod.load_manifest(args.manifest)
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad manifest {args.manifest}: {exc}")
    if args.only:
        keep = set(args.only.split(","))
        entries = [e for e in entries if e["name"] in keep]
    rows = bench_mod.run_bench(entries, args.time_limit, args.workers)
    print(bench_mod.format_table(rows))
    return EXIT_SOLVE if any(r.outcome == "FAIL" for r in rows) else EXIT_OK


# -- parser --------------------------------------------------------------------


def _add_input(p, one_indexed=True):
    p.add_argument("--input", required=True, help="edge-list file")
    p.add_argument("--format", default="edgelist", help="input format (only 'edgelist')")
    if one_indexed:
        p.add_argument("--one-indexed", action="store_true",
                       help="tokens are integers starting at 1")


def _add_lambda(p):
    p.add_argument("--lam", help="comma-separated dual values, one per vertex "
                   "(write --lam=-1,2 when the first value is negative)")
    p.add_argument("--lam-file", help="file with whitespace-separated dual values")


def _add_grids(p):
    p.add_argument("--p-grid", type=_csv_floats, default=PeelConfig().p_grid)
    p.add_argument("--q-grid", type=_csv_floats, default=PeelConfig().q_grid)
    p.add_argument("--epsilon", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mdcolgen", description="Modularity density maximization by column generation.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run column generation and write a JSON report")
    _add_input(p)
    _add_grids(p)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--columns", help="JSON list of extra initial columns (vertex ids)")
    p.add_argument("--name", help="instance name in the report (default: file stem)")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("peel", help="peeling heuristics")
    _add_input(p)
    _add_lambda(p)
    _add_grids(p)
    p.add_argument("--densest", action="store_true", help="min-degree densest-subgraph peel")
    p.add_argument("--out")
    p.set_defaults(func=cmd_peel)

    p = sub.add_parser("ap-oracle", help="exact pricing optimum by subset enumeration")
    _add_input(p)
    _add_lambda(p)
    p.add_argument("--exact", action="store_true", help="rational arithmetic")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ap_oracle)

    p = sub.add_parser("oracle", help="brute-force reference solvers")
    _add_input(p)
    _add_lambda(p)
    p.add_argument("--mode", required=True, choices=["partition", "max-cut", "densest", "pricing"])
    p.add_argument("--min-clusters", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gadget", help="hardness-reduction instance generators")
    _add_input(p)
    p.add_argument("--kind", required=True, choices=["md", "ap"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m-override", type=int, default=None,
                   help="blow-up size other than n^3 (output is stamped non-certifying)")
    p.add_argument("--out-prefix", help="write PREFIX.txt (edge list) and PREFIX.json")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("bench", help="solve the instances of a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--time-limit", type=float, default=None, help="seconds per instance")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--only", help="comma-separated instance names")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG if args.verbose > 1 else logging.INFO,
                            stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mdcolgen {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
