"""
🖥️ Command-Line Handlers
One handler per command; `create_cli_application` wires them into an argparse parser
"""

import argparse
import json
import logging
import sys

from app.modules import brillnoether, corpus, divisor, jacobian, multigraph, rank, reports

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CAP = 4


def _emit(text: str, payload: dict, as_json: bool):
    if not as_json:
        print(text)
    print(json.dumps(payload, indent=2, sort_keys=True))


def _base_vertex(G: multigraph.Multigraph, base) -> int:
    return divisor.BASE_VERTEX if base is None else G.vertex_index(base)


def rank_command(args) -> int:
    """Handle `rank GRAPH DIVISOR [--sharp] [--base q]`"""
    G = multigraph.load_graph(args.graph)
    D = divisor.parse_divisor(G, args.divisor)
    q = _base_vertex(G, args.base)
    compute = rank.rank_sharp if args.sharp else rank.rank
    result = compute(G, D, q, memoize=not args.naive)
    payload = {"success": True, "divisor": divisor.format_divisor(D), "sharp": args.sharp, "base": q}
    payload.update(result.to_dict())
    _emit(result.describe(), payload, args.json)
    return EXIT_OK


def reduce_command(args) -> int:
    """Handle `reduce GRAPH DIVISOR [--base q]`"""
    G = multigraph.load_graph(args.graph)
    D = divisor.parse_divisor(G, args.divisor)
    q = _base_vertex(G, args.base)
    reduced = divisor.reduce(G, D, q)
    text = f"🎯 **{G.vertex_name(q)}-reduced form:** `{divisor.format_divisor(reduced, use_labels=True) or '0'}`"
    payload = {
        "success": True,
        "divisor": divisor.format_divisor(D),
        "base": q,
        "reduced": divisor.format_divisor(reduced),
        "effective_class": reduced[q] >= 0,
    }
    _emit(text, payload, args.json)
    return EXIT_OK


def jacobian_command(args) -> int:
    """Handle `jacobian GRAPH`"""
    G = multigraph.load_graph(args.graph)
    structure = jacobian.jacobian(G)
    text = f"🧮 **Jac:** {structure.describe()}\n• Order: {structure.order}\n• Genus: {multigraph.genus(G)}"
    payload = {"success": True, "genus": multigraph.genus(G), "group": structure.describe()}
    payload.update(structure.to_dict())
    _emit(text, payload, args.json)
    return EXIT_OK


def wrd_command(args) -> int:
    """Handle `wrd GRAPH --degree d --rank r [--no-sharp]`"""
    G = multigraph.load_graph(args.graph)
    query = brillnoether.BNQuery(args.degree, args.rank, not args.no_sharp)
    result = brillnoether.wrd(G, query)
    g = multigraph.genus(G)
    value = brillnoether.rho(g, query.r, query.d)
    text = f"🔭 **W^{query.r}_{query.d}** (g={g}, rho={value}): "
    text += "empty" if result.empty else f"{len(result)} of {result.jacobian_order} classes"
    if result.empty and result.exhausted:
        text += f"\n• Exhausted all {result.classes_tested} classes"
    payload = {"success": True, "genus": g, "rho": value}
    payload.update(result.to_dict())
    _emit(text, payload, args.json)
    return EXIT_OK


def gonality_command(args) -> int:
    """Handle `gonality GRAPH` (reports both r# and r)"""
    G = multigraph.load_graph(args.graph)
    sharp = brillnoether.gonality(G, use_sharp=True)
    plain = brillnoether.gonality(G, use_sharp=False)
    text = f"📐 **Gonality:** {sharp} (r#), {plain} (r)\n"
    text += f"• Hyperelliptic: {'yes' if sharp <= 2 else 'no'} (r#), {'yes' if plain <= 2 else 'no'} (r)"
    payload = {
        "success": True,
        "gonality_sharp": sharp,
        "gonality": plain,
        "hyperelliptic_sharp": sharp <= 2,
        "hyperelliptic": plain <= 2,
    }
    _emit(text, payload, args.json)
    return EXIT_OK


def scan_command(args) -> int:
    """Handle `scan [CORPUS] --mode ...`; the report file is written atomically"""
    jobs = args.jobs if args.jobs is not None else brillnoether.get_default_jobs()
    g_range = range(args.gmin, args.gmax + 1)
    options = dict(dmax=args.dmax, jobs=jobs, witness_cap=args.witness_cap, progress=not args.quiet)
    if args.mode == "existence":
        entries = list(corpus.load_corpus(args.corpus, cap=args.cap))
        if not entries:
            raise multigraph.ValidationError("corpus is empty")
        report = brillnoether.existence_scan(entries, use_sharp=not args.no_sharp, **options)
    elif args.mode == "cdpr":
        report = brillnoether.cdpr_scan(g_range, use_sharp=not args.no_sharp, **options)
    else:
        report = brillnoether.conjecture_scan(g_range, args.mode, cap=args.cap, **options)

    if args.out:
        reports.atomic_write(args.out, report.to_json())
    if args.csv:
        reports.atomic_write(args.csv, report.to_csv())
    print(report.describe())
    if not args.out:
        print(report.to_json())
    if report.skipped:
        logger.warning(f"⚠️ {len(report.skipped)} entries skipped, report is partial")
        return EXIT_CAP
    return EXIT_OK


def families_command(args) -> int:
    """Handle `families --family NAME --size N [--out-dir DIR]`"""
    entries = corpus.family_entries(args.family, args.size, cap=args.cap)
    if args.out_dir:
        for path in corpus.write_entries(entries, args.out_dir):
            print(f"✅ {path}")
    else:
        for entry in entries:
            print(multigraph.format_graph(entry.graph, comment=entry.name))
    return EXIT_OK


def _add_graph_argument(parser):
    parser.add_argument("graph", help="graph file (`vertices N` then one `u w` line per edge)")


def _add_divisor_arguments(parser):
    _add_graph_argument(parser)
    parser.add_argument("divisor", nargs="?", default="", help="divisor as `v:k` pairs, e.g. 0:2,3:-1")
    parser.add_argument("--base", help="base vertex q (index or label, default 0)")


def create_cli_application() -> argparse.ArgumentParser:
    """Create and configure the command parser"""
    parser = argparse.ArgumentParser(
        prog="bngraph",
        description="Divisor theory on finite multigraphs: rank, Jacobians and Brill-Noether loci",
    )
    parser.add_argument("--json", action="store_true", help="print only the JSON payload")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("rank", help="rank r(D), or r#(D) with --sharp")
    _add_divisor_arguments(p)
    p.add_argument("--sharp", action="store_true", help="loop-refined rank r#")
    p.add_argument("--naive", action="store_true", help="literal quantifier sweep, no memo")
    p.set_defaults(handler=rank_command)

    p = commands.add_parser("reduce", help="q-reduced representative of D")
    _add_divisor_arguments(p)
    p.set_defaults(handler=reduce_command)

    p = commands.add_parser("jacobian", help="invariant factors and order of Jac")
    _add_graph_argument(p)
    p.set_defaults(handler=jacobian_command)

    p = commands.add_parser("wrd", help="classes of W^r_d")
    _add_graph_argument(p)
    p.add_argument("--degree", "-d", type=int, required=True)
    p.add_argument("--rank", "-r", type=int, required=True)
    p.add_argument("--no-sharp", action="store_true", help="use r instead of r#")
    p.set_defaults(handler=wrd_command)

    p = commands.add_parser("gonality", help="gonality and hyperellipticity")
    _add_graph_argument(p)
    p.set_defaults(handler=gonality_command)

    p = commands.add_parser("scan", help="Brill-Noether sweeps producing a ScanReport")
    p.add_argument("corpus", nargs="?", default="bundled",
                   help="`bundled`, a YAML manifest, a .graph file or a directory (existence mode)")
    p.add_argument("--mode", choices=brillnoether.SCAN_MODES, default="existence")
    p.add_argument("--gmin", type=int, default=2)
    p.add_argument("--gmax", type=int, default=3)
    p.add_argument("--dmax", type=int, default=None, help="upper end of the degree window (default 2g-2)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--csv", help="CSV summary path")
    p.add_argument("--no-sharp", action="store_true", help="use r instead of r# (existence, cdpr)")
    p.add_argument("--witness-cap", type=int, default=None)
    p.add_argument("--cap", type=int, default=None, help="enumeration genus cap (default BNGRAPH_CAP or 5)")
    p.add_argument("--quiet", action="store_true", help="no progress bar")
    p.set_defaults(handler=scan_command)

    p = commands.add_parser("families", help="emit bundled or generated graphs")
    p.add_argument("--family", choices=corpus.FAMILIES, required=True)
    p.add_argument("--size", type=int, default=None,
                   help="genus (cubic, stable, chain) or vertex count (cycle, complete); required for those")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--out-dir")
    p.set_defaults(handler=families_command)

    return parser


def run(argv=None) -> int:
    """Parse arguments, dispatch, and map domain errors to exit codes"""
    parser = create_cli_application()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except multigraph.ParseError as e:
        print(f"❌ Parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as e:
        print(f"❌ Cannot read input: {e}", file=sys.stderr)
        return EXIT_PARSE
    except multigraph.CapExceededError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CAP
    except multigraph.ValidationError as e:
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as e:
        logger.debug("rejected request", exc_info=True)
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
