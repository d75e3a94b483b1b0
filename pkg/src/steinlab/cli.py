"""Command-line driver: ``steinlab <verb> --q Q --n N [options]``."""
from __future__ import annotations

import argparse
import json
import sys

from . import checks


def _basis(text: str | None):
    if text is None:
        return None
    rows = [r for r in text.replace(";", ",").split(",") if r]
    return [[int(ch) for ch in (r.split() if " " in r else r)] for r in rows]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steinlab",
                                description="Verify building sphericity and Steinberg surjectivity over F_q^n.")
    sub = p.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, required=True, help="prime field size")
    common.add_argument("--n", type=int, required=True, help="ambient rank")
    common.add_argument("--rank-v", type=int, help="only this rank of V")
    common.add_argument("--rank-k", type=int, help="only this corank of K")
    common.add_argument("--basis-v", help="explicit V, rows like 1000,0100")
    common.add_argument("--basis-k", help="explicit K, rows like 1000,0100")
    common.add_argument("--all", dest="all_subspaces", action="store_true",
                        help="every subspace of each rank instead of one representative")
    common.add_argument("--sweep-lh", action="store_true",
                        help="morse: every admissible (L, H) instead of the canonical one")
    common.add_argument("--cm", dest="cm_links", action="store_true", default=None,
                        help="force the full Cohen-Macaulay link check")
    common.add_argument("--no-cm", dest="cm_links", action="store_false")
    common.add_argument("--cache", dest="cache_dir", metavar="DIR")
    common.add_argument("--out", metavar="FILE", help="write the run document here (default stdout)")
    common.add_argument("--modular-check", dest="modular_check", action="store_true", default=True,
                        help="cross-check integer ranks modulo a random 62-bit prime (default)")
    common.add_argument("--no-modular-check", dest="modular_check", action="store_false")
    common.add_argument("--max-seconds", type=float)
    common.add_argument("--max-mb", type=int)
    common.add_argument("--workers", type=int, default=1)
    for verb in checks.CHECKS:
        sub.add_parser(verb, parents=[common])
    rep = sub.add_parser("report", parents=[common],
                         help="run every check (or merge --inputs) into one document")
    rep.add_argument("--inputs", nargs="*", default=None, metavar="FILE",
                     help="merge these run documents instead of running checks")
    return p


def _limit_memory(mb: int | None):
    if not mb:
        return
    import resource
    limit = mb * 1024 * 1024
    resource.setrlimit(resource.RLIMIT_AS, (limit, limit))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = checks.RunConfig(
        q=args.q, n=args.n, rank_v=args.rank_v, rank_k=args.rank_k,
        basis_v=_basis(args.basis_v), basis_k=_basis(args.basis_k), check=args.verb,
        cache_dir=args.cache_dir, out=args.out, all_subspaces=args.all_subspaces,
        sweep_lh=args.sweep_lh, modular_check=args.modular_check, cm_links=args.cm_links,
        max_seconds=args.max_seconds, max_mb=args.max_mb, workers=args.workers)
    _limit_memory(args.max_mb)
    if args.verb == "report" and args.inputs:
        reports = []
        for path in args.inputs:
            with open(path) as fh:
                reports.extend(json.load(fh)["reports"])
    else:
        names = checks.CHECKS if args.verb == "report" else [args.verb]
        reports = checks.run_checks(cfg, names)
    doc = checks.cmd_report(reports, cfg.to_dict())
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(checks.summary_table(doc), file=sys.stderr)
    return 0 if doc["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
