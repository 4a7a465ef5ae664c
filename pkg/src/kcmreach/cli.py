"""Command-line interface.

Exit codes: 0 success or passed verification, 1 verification failure,
2 usage or input error, 3 search truncated by a resource cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .constructions import BUILTINS, builtin_family
from .dynamics import BootstrapState, Boundary, bootstrap_closure, infection_times
from .errors import KCMError
from .family import (
    classify,
    find_spanning_stable_directions,
    interaction_range,
    load_family,
    stable_arcs_2d,
    stable_set_1d,
)
from .harness import (
    PASS,
    TRUNCATED,
    RunReport,
    sweep_rows,
    verify_basis,
    verify_classification,
    verify_east_threshold,
    verify_fa1f_mobility,
    verify_lemma_zero_outside,
    verify_theorem_box,
)
from .lattice import BoxSpec, make_box
from .search import CAP_ENV, Caps, ZeroAt, explore

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATED = 0, 1, 2, 3

# options whose values may legitimately start with "-"
_VALUE_FLAGS = {"--box", "--seed", "--n", "--N"}


class UsageError(Exception):
    pass


def parse_box(text: str, d: int) -> BoxSpec:
    """``LO..HI`` (same bounds on every axis) or ``l1,l2..h1,h2``."""
    try:
        lo_s, hi_s = text.split("..")
        lo = tuple(int(c) for c in lo_s.split(","))
        hi = tuple(int(c) for c in hi_s.split(","))
    except ValueError:
        raise UsageError(f"bad box {text!r}; expected LO..HI") from None
    if len(lo) == 1:
        lo = lo * d
    if len(hi) == 1:
        hi = hi * d
    if len(lo) != d or len(hi) != d:
        raise UsageError(f"box {text!r} does not have dimension {d}")
    return BoxSpec(lo, hi)


def parse_int_list(text: str) -> list[int]:
    """``1,2,5`` or ``0..4``."""
    if ".." in text:
        a, b = text.split("..")
        return list(range(int(a), int(b) + 1))
    return [int(c) for c in text.split(",") if c]


def _family(args):
    if args.file:
        return load_family(args.file)
    if args.family:
        try:
            return builtin_family(args.family)
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError("give a family with -f FILE or --family NAME")


def _caps(args) -> Caps:
    if getattr(args, "max_states", None):
        return Caps(max_states=args.max_states)
    return Caps()


def _emit(doc, out=None):
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_classify(args) -> int:
    fam = _family(args)
    cls = classify(fam)
    dirs = find_spanning_stable_directions(fam)
    doc = {"family": fam.to_json(), "classification": str(cls), "r": interaction_range(fam)}
    if fam.d == 1:
        doc["stable_directions"] = sorted(u.vec[0] for u in stable_set_1d(fam))
    elif fam.d == 2:
        doc["stable_arcs"] = str(stable_arcs_2d(fam))
    if dirs is not None:
        doc["spanning_stable_directions"] = [list(u.vec) for u in dirs]
    if args.json:
        _emit(doc)
    else:
        print(cls)
        for k, v in doc.items():
            if k not in ("family", "classification"):
                print(f"{k}: {v}")
    return EXIT_OK


def cmd_reach(args) -> int:
    fam = _family(args)
    dom = make_box(parse_box(args.box, fam.d))
    target = None if args.all else ZeroAt((0,) * fam.d)
    report = explore(
        fam, dom, args.budget, Boundary.parse(args.boundary), target,
        want_certificate=bool(args.certificate), caps=_caps(args), workers=args.workers,
    )
    doc = report.to_json()
    doc.pop("certificate")
    if target is not None:
        doc["reachable"] = report.reached_target
    if args.certificate and report.certificate is not None:
        _emit(report.certificate.to_json(), args.certificate)
        doc["certificate_file"] = args.certificate
    _emit(doc)
    if report.truncated and not report.reached_target:
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    fam = _family(args)
    dom = make_box(parse_box(args.box, fam.d))
    seeds = [tuple(int(c) for c in s.split(",")) for s in args.seed]
    state = BootstrapState.of(dom, seeds)
    closure, steps = bootstrap_closure(state, fam)
    times = infection_times(state, fam)
    origin = (0,) * fam.d
    _emit({
        "infected": [list(s) for s in sorted(closure.infected)],
        "size": len(closure.infected),
        "region_size": len(dom),
        "steps": steps,
        "origin_infection_step": times.get(origin),
    })
    return EXIT_OK


def _finish(report: RunReport, args) -> int:
    if args.out:
        Path(args.out).write_text(report.to_json(not args.no_timing) + "\n")
    print(report.to_json(not args.no_timing))
    print(f"verdict: {report.verdict}", file=sys.stderr)
    if report.verdict == TRUNCATED:
        return EXIT_TRUNCATED
    return EXIT_OK if report.verdict == PASS else EXIT_FAIL


def cmd_verify(args) -> int:
    caps, w = _caps(args), args.workers
    if args.what == "east-threshold":
        report = verify_east_threshold(args.n_max, caps, w)
    elif args.what == "fa1f":
        report = verify_fa1f_mobility(parse_int_list(args.N), args.bfs_limit, caps, w)
    elif args.what in ("theorem", "lemma"):
        fam = _family(args)
        ns = parse_int_list(args.n)
        fn = verify_theorem_box if args.what == "theorem" else verify_lemma_zero_outside
        report = fn(fam, ns, caps, w)
    elif args.what == "basis":
        report = verify_basis(args.trials, seed=args.seed)
    else:
        report = verify_classification()
    return _finish(report, args)


def cmd_sweep(args) -> int:
    fam = _family(args)
    ns = parse_int_list(args.n)
    Ns = parse_int_list(args.N) if args.N else None
    rows = sweep_rows(fam, ns, Ns, _caps(args), args.workers)
    writer = csv.DictWriter(sys.stdout, ["family", "n", "N", "reachable", "states", "millis"])
    writer.writeheader()
    writer.writerows(rows)
    if any(r["reachable"] is None for r in rows):
        return EXIT_TRUNCATED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kcmreach",
        description="Exact reachability for kinetically constrained models.",
        epilog=f"The default state cap can be overridden with ${CAP_ENV}.",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def fam_opts(sp):
        sp.add_argument("-f", "--file", help="family JSON file {\"d\": .., \"rules\": [...]}")
        sp.add_argument("--family", help=f"builtin family: {', '.join(sorted(BUILTINS))}")

    def search_opts(sp):
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--max-states", type=int, default=None,
                        help=f"state cap (default ${CAP_ENV} or 2^26)")

    sp = sub.add_parser("classify", help="stable directions and classification")
    fam_opts(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("reach", help="can the origin be set to 0 with a zero budget?")
    fam_opts(sp)
    search_opts(sp)
    sp.add_argument("--box", required=True, help="LO..HI or l1,l2..h1,h2")
    sp.add_argument("--budget", type=int, required=True, help="maximum simultaneous zeros")
    sp.add_argument("--boundary", choices=["zero", "one"], default="zero")
    sp.add_argument("--certificate", metavar="OUT.json")
    sp.add_argument("--all", action="store_true", help="enumerate V(n, box) instead of stopping at the origin")
    sp.set_defaults(func=cmd_reach)

    sp = sub.add_parser("bootstrap", help="bootstrap percolation closure in a box")
    fam_opts(sp)
    sp.add_argument("--box", required=True)
    sp.add_argument("--seed", nargs="+", required=True, help="infected sites, e.g. 0 3 or 1,2")
    sp.set_defaults(func=cmd_bootstrap)

    sp = sub.add_parser("verify", help="run a verification task")
    sp.add_argument("what", choices=["east-threshold", "fa1f", "theorem", "lemma", "basis", "classification"])
    fam_opts(sp)
    search_opts(sp)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--n", default="1..3", help="budgets for theorem/lemma, e.g. 1..3")
    sp.add_argument("--N", default="0,1,2,3,4,5,6,7,8,10000", help="half-widths for fa1f")
    sp.add_argument("--bfs-limit", type=int, default=8)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="also write the JSON report here")
    sp.add_argument("--no-timing", action="store_true", help="omit timing fields")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="CSV of origin reachability over (n, N)")
    fam_opts(sp)
    search_opts(sp)
    sp.add_argument("--n", default="1..3")
    sp.add_argument("--N", default=None, help="half-widths (default 0..2^n-1 per n)")
    sp.set_defaults(func=cmd_sweep)
    return p


def _join_negative_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def run_cli(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, KCMError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
