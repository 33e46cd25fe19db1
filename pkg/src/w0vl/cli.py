"""Command line surface: classify single weights, sweep ranges, list forms."""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys

from .conjecture import SCHEMA_VERSION, table_predicate, verify_range
from .hwmodule import SizeCapError
from .rootsystem import weyl_dim
from .satake import CatalogError, catalog_names, lookup_form
from .w0action import MINUS_ID, NON_SCALAR, PLUS_ID, VACUOUS_ZERO, classify_w0

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_BAD_ARGS = 2
EXIT_SIZE_CAP = 3


def _parse_weight(text: str, rank: int) -> tuple:
    try:
        coords = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise CatalogError(f"weight {text!r} is not a comma-separated integer list")
    if len(coords) != rank:
        raise CatalogError(f"weight has {len(coords)} coordinates, form has rank {rank}")
    if any(c < 0 for c in coords):
        raise CatalogError(f"weight {text!r} is not dominant")
    return coords


def _parse_caps(text: str, rank: int) -> tuple:
    parts = text.split(",")
    try:
        caps = [int(x) for x in parts]
    except ValueError:
        raise CatalogError(f"bad coefficient cap {text!r}")
    if len(caps) == 1:
        caps = caps * rank
    if len(caps) != rank or any(c < 0 for c in caps):
        raise CatalogError(f"expected 1 or {rank} nonnegative caps, got {text!r}")
    return tuple(caps)


def _cache_dir(args):
    if getattr(args, "no_cache", False):
        return None
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    return os.environ.get("W0VL_CACHE_DIR") or None


def cmd_classify(args) -> int:
    sd = lookup_form(args.form)
    lam = _parse_weight(args.weight, sd.rs.rank)
    try:
        cls = classify_w0(sd, lam, size_cap=args.dim_cap, cache_dir=_cache_dir(args), rule=args.word_rule)
    except SizeCapError as e:
        print(f"error: module dimension {e.required} exceeds cap {e.cap}", file=sys.stderr)
        return EXIT_SIZE_CAP
    member = table_predicate(sd.name, lam)
    if member:
        consistent = cls.verdict in (VACUOUS_ZERO, PLUS_ID, MINUS_ID)
    else:
        consistent = cls.dim_VL == 0 or cls.verdict == NON_SCALAR
    record = {
        "schema_version": SCHEMA_VERSION,
        "form": cls.form,
        "lambda": list(cls.lam),
        "dim_V": cls.dim_V,
        "dim_VL": cls.dim_VL,
        "verdict": cls.verdict,
        "sign": cls.sign,
        "table_member": member,
        "consistent": consistent,
        "certificate": cls.certificate,
    }
    if args.format == "json":
        print(json.dumps(record, indent=2))
    elif args.format == "csv":
        print("form,lambda,dim_V,dim_VL,verdict,sign,table_member,consistent")
        sign = "" if cls.sign is None else cls.sign
        print(
            f"{cls.form},{' '.join(map(str, cls.lam))},{cls.dim_V},{cls.dim_VL},"
            f"{cls.verdict},{sign},{int(member)},{int(consistent)}"
        )
    else:
        sign = "" if cls.sign is None else f"  sign={cls.sign:+d}"
        print(f"{cls.form}  weight={','.join(map(str, cls.lam))}")
        print(f"  dim V = {cls.dim_V}   dim V^L = {cls.dim_VL}")
        print(f"  verdict: {cls.verdict}{sign}")
        print(f"  table member: {member}   consistent: {consistent}")
        if cls.certificate:
            print(f"  witness: {cls.certificate}")
    return EXIT_OK


def cmd_verify(args) -> int:
    sd = lookup_form(args.form)
    caps = _parse_caps(args.max_coeff, sd.rs.rank)
    report = verify_range(
        sd.name, caps, dim_cap=args.dim_cap, jobs=args.jobs, cache_dir=_cache_dir(args), rule=args.word_rule
    )
    if args.format == "csv":
        text = report.to_csv()
    elif args.format == "pretty":
        lines = [f"{report.form}  caps={','.join(map(str, report.max_coeff))}  dim_cap={report.dim_cap}"]
        for rec in report.records:
            lam = ",".join(map(str, rec["lambda"]))
            if rec["skipped"]:
                lines.append(f"  {lam}: skipped ({rec['skipped']}, dim {rec['dim_V']})")
            else:
                lines.append(
                    f"  {lam}: dim {rec['dim_V']}, dim VL {rec['dim_VL']}, {rec['verdict']}"
                    f"{'' if rec['sign'] is None else ' sign %+d' % rec['sign']}"
                    f", member={rec['table_member']}, consistent={rec['consistent']}"
                )
        s = report.summary
        lines.append(
            f"  total {s['total']}, checked {s['checked']}, skipped {len(s['skipped'])}, failures {len(s['failures'])}"
        )
        text = "\n".join(lines) + "\n"
    else:
        text = report.to_json() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report.all_consistent:
        print(f"INCONSISTENT: {report.summary['failures']}", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_forms(args) -> int:
    for name in catalog_names(args.max_n):
        sd = lookup_form(name)
        rr = sd.restricted_roots()
        tag = " (non-reduced)" if rr.non_reduced else ""
        print(
            f"{sd.name:<10} complex={sd.cartan_type}  real_rank={sd.real_rank}  restricted={rr.display}{tag}"
        )
    return EXIT_OK


def cmd_cache(args) -> int:
    d = args.cache_dir or os.environ.get("W0VL_CACHE_DIR")
    if not d:
        print("no cache directory configured", file=sys.stderr)
        return EXIT_BAD_ARGS
    if args.action == "info":
        if not os.path.isdir(d):
            print(f"{d}: empty (not created yet)")
            return EXIT_OK
        files = sorted(f for f in os.listdir(d) if f.endswith(".json"))
        size = sum(os.path.getsize(os.path.join(d, f)) for f in files)
        print(f"{d}: {len(files)} cached modules, {size} bytes")
        return EXIT_OK
    if args.action == "clear":
        if os.path.isdir(d):
            shutil.rmtree(d)
        print(f"cleared {d}")
        return EXIT_OK
    return EXIT_BAD_ARGS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="w0vl", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--dim-cap", type=int, default=20000, help="module dimension cap")
        p.add_argument("--cache-dir", help="directory for the module cache")
        p.add_argument("--no-cache", action="store_true", help="ignore any configured cache")
        p.add_argument("--word-rule", choices=["lowest", "highest"], default="lowest",
                       help="descent rule used to pick reduced words")
        p.add_argument("--format", choices=["json", "csv", "pretty"], default="pretty")

    p = sub.add_parser("classify", help="classify a single (form, weight) pair")
    p.add_argument("--form", required=True, help="e.g. 'so(2,7)', 'so*(10)', 'G', 'FI', 'EIII'")
    p.add_argument("--weight", required=True, help="comma-separated fundamental-weight coefficients")
    common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("verify", help="sweep a coefficient box and check table consistency")
    p.add_argument("--form", required=True)
    p.add_argument("--max-coeff", required=True, help="single cap or per-coordinate comma list")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for the sweep")
    p.add_argument("--out", help="write the report to a file instead of stdout")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("forms", help="list the catalog")
    p.add_argument("--max-n", type=int, default=12, help="largest p+q / 2r to list for so forms")
    p.set_defaults(fn=cmd_forms)

    p = sub.add_parser("cache", help="inspect or clear the module cache")
    p.add_argument("action", choices=["info", "clear"])
    p.add_argument("--cache-dir", help="cache directory (or W0VL_CACHE_DIR)")
    p.set_defaults(fn=cmd_cache)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (CatalogError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
