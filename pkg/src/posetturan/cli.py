"""Command-line front end.

Exit status: 0 success, 1 nothing found (no embedding, budget exhausted),
2 usage error, 3 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys

from .embed import (
    comparability_graph,
    embed_poset,
    embed_tree_in_graph,
    format_certificate,
    hasse_graph,
    tree_threshold,
)
from .errors import (
    FamilyFormatError,
    PosetFormatError,
    PreconditionError,
    SearchBudgetExceeded,
    WindowTooSmall,
)
from .extremal import LevelWindow, default_window, ex_bruteforce, levels_union, verify_l, verify_theorem
from .lattice import (
    Family,
    brace,
    count_marked_chains,
    enumerate_marked_chains,
    format_family,
    parse_family,
    to_bits,
)
from .poset import analyze, format_poset, maximal_chains, parse_poset
from .trees import leaf_interval, saturate

EXIT_OK, EXIT_ABSENT, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class Absent(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _poset(args):
    path = args.poset or args.input
    if not path:
        raise PreconditionError("a poset file is required (--poset FILE)")
    return parse_poset(_read(path))


def _family(args):
    path = args.family or args.input
    if not path:
        raise PreconditionError("a family file is required (--family FILE)")
    return parse_family(_read(path))


def _need(value, flag):
    if value is None:
        raise PreconditionError(f"{flag} is required")
    return value


def _bool(x: bool) -> str:
    return "true" if x else "false"


def _emit(args, fields: dict, text: str | None = None) -> None:
    if args.json:
        sys.stdout.write(json.dumps(fields, sort_keys=True) + "\n")
    elif text is not None:
        sys.stdout.write(text)
    else:
        for key, value in fields.items():
            if isinstance(value, bool):
                value = _bool(value)
            elif isinstance(value, list):
                value = " ".join(map(str, value))
            sys.stdout.write(f"{key}={value}\n")


def cmd_analyze(args):
    r = analyze(_poset(args))
    fields = {
        "height": r.height,
        "saturated": r.is_saturated,
        "tree": r.hasse_is_tree,
        "maximal_chains": r.num_maximal_chains,
    }
    text = (f"height={r.height} saturated={_bool(r.is_saturated)} "
            f"tree={_bool(r.hasse_is_tree)} maximal_chains={r.num_maximal_chains}\n")
    _emit(args, fields, text)


def cmd_chains(args):
    chains = maximal_chains(_poset(args))
    _emit(args, {"chains": chains}, "".join(" ".join(c) + "\n" for c in chains))


def cmd_count_marked(args):
    F = _family(args)
    k = _need(args.k, "--k")
    _emit(args, {"count": str(count_marked_chains(F, k)), "k": k, "n": F.n})


def cmd_enumerate_marked(args):
    F = _family(args)
    k = _need(args.k, "--k")
    chains = enumerate_marked_chains(F, k)
    rows = [{"chain": list(mc.chain), "markers": [to_bits(m, F.n) for m in mc.markers]} for mc in chains]
    text = "".join(
        "chain=" + ",".join(map(str, mc.chain)) + " markers=" + " ".join(brace(m) for m in mc.markers) + "\n"
        for mc in chains
    ) + f"total={len(chains)}\n"
    _emit(args, {"marked_chains": rows, "total": len(chains)}, text)


def cmd_saturate(args):
    S = saturate(_poset(args))
    _emit(args, {"poset": format_poset(S)}, format_poset(S))


def cmd_leaf_interval(args):
    lr = leaf_interval(_poset(args))
    _emit(args, {"leaf": lr.leaf, "interval": list(lr.interval), "orientation": lr.orientation})


def _mapping_fields(mapping, n):
    return {x: to_bits(s, n) for x, s in sorted(mapping.items())}


def cmd_embed(args):
    P, F = _poset(args), _family(args)
    emb = embed_poset(P, F)
    if emb is None:
        raise Absent("no embedding")
    fields = {"route": emb.route, "map": _mapping_fields(emb.mapping, F.n)}
    if args.json:
        _emit(args, fields)
        return
    lines = [f"{x}={brace(s)}" for x, s in sorted(emb.mapping.items())]
    lines.append(f"route={emb.route}")
    cert = format_certificate(emb)
    sys.stdout.write("\n".join(lines) + "\n" + cert)


def cmd_embed_graph(args):
    P, F = _poset(args), _family(args)
    T, G = hasse_graph(P), comparability_graph(F)
    avg = G.average_degree()
    info = {"threshold": tree_threshold(len(P)), "average_degree": str(avg)}
    pi = embed_tree_in_graph(T, G)
    if pi is None:
        if not args.json:
            sys.stdout.write(f"threshold={info['threshold']} average_degree={avg}\n")
        raise Absent("no embedding")
    fields = {**info, "map": _mapping_fields(pi, F.n)}
    text = "".join(f"{x}={brace(s)}\n" for x, s in sorted(pi.items()))
    text += f"threshold={info['threshold']} average_degree={avg}\n"
    _emit(args, fields, text)


def cmd_ex(args):
    P = _poset(args)
    n = _need(args.n, "--n")
    res = ex_bruteforce(P, n, args.time_budget)
    witness = [to_bits(s, n) for s in res.witness.ordered()]
    _emit(args, {"ex": res.value, "nodes_explored": res.nodes_explored, "witness": witness})


def cmd_verify_theorem(args):
    P = _poset(args)
    n = _need(args.n, "--n")
    r = verify_theorem(P, n, args.time_budget)
    _emit(args, {
        "ex": r.ex,
        "leading_term": r.leading_term,
        "ratio": None if r.ratio is None else str(r.ratio),
        "lower_bound_free": r.lower_bound_free,
        "witness": [to_bits(s, n) for s in r.witness.ordered()],
        "nodes_explored": r.nodes_explored,
    })


def cmd_verify_l(args):
    P = _poset(args)
    w = LevelWindow(args.window) if args.window else default_window(P)
    r = verify_l(P, w)
    _emit(args, {"lower_ok": r.lower_ok, "upper_ok": r.upper_ok, "levels": r.levels, "window": r.window})
    if not (r.lower_ok and r.upper_ok):
        raise Absent("l(P) = h(P) - 1 not confirmed")


def cmd_levels(args):
    w = LevelWindow(_need(args.window, "--window"))
    count = _need(args.levels, "--levels")
    F: Family = levels_union(w, w.consecutive(count))
    _emit(args, {"n": F.n, "sets": [to_bits(s, F.n) for s in F.ordered()]}, format_family(F))


COMMANDS = {
    "analyze": cmd_analyze,
    "chains": cmd_chains,
    "count-marked": cmd_count_marked,
    "enumerate-marked": cmd_enumerate_marked,
    "saturate": cmd_saturate,
    "leaf-interval": cmd_leaf_interval,
    "embed": cmd_embed,
    "embed-graph": cmd_embed_graph,
    "ex": cmd_ex,
    "verify-theorem": cmd_verify_theorem,
    "verify-l": cmd_verify_l,
    "levels": cmd_levels,
}


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="poset or family file (same as --poset/--family)")
    common.add_argument("--poset")
    common.add_argument("--family")
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=_positive)
    common.add_argument("--levels", type=int)
    common.add_argument("--window", type=_positive)
    common.add_argument("--json", action="store_true")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--time-budget", type=float, dest="time_budget")
    parser = argparse.ArgumentParser(prog="posetturan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        COMMANDS[args.command](args)
    except Absent as exc:
        print(str(exc), file=sys.stderr if args.json else sys.stdout)
        return EXIT_ABSENT
    except SearchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABSENT
    except (InputError, PosetFormatError, FamilyFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, WindowTooSmall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
