"""Command-line front end: verify, classify and extremal subcommands.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage error.
Reports are byte-identical for identical configurations (any worker
count); opt-in --timing embeds wall-clock data and breaks that property.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from . import __version__
from .field import context_for_q
from .forms import HYPERBOLIC
from .hermitian import format_point
from .intersect import (
    AffineQuadric,
    check_ovoid,
    check_permutable,
    classify_quadric,
    family_quadratic_parts,
    fast_intersection_size,
    intersection_points,
    oracle_intersection_size,
)
from .sweep import (
    FAMILY_KINDS,
    SweepConfig,
    UsageError,
    expected_spectra,
    iter_instance_rows,
    run_sweep,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_FAMILY_SPECIES = {"hyp-point": "hyperbolic", "hyp-line": "hyperbolic",
                   "hyp-twolines": "hyperbolic", "cone-point": "cone",
                   "cone-line": "cone", "elliptic": "elliptic"}

CSV_COLUMNS = ["q", "a", "b", "c", "d", "e", "f", "species", "cinf", "case",
               "size_fast", "size_oracle", "ovoid", "permutable"]


def _env(name, default=None):
    return os.environ.get("HQL_" + name, default)


def _field_header(ctx):
    return {
        "h": ctx.h,
        "q": ctx.q,
        "q2": ctx.q2,
        "modulus": ctx.modulus,
        "modulus_poly": ctx.modulus_str(),
        "nu": ctx.nu,
        "epsilon": "e^2 = e + nu, e^q = e + 1",
        "element_encoding": "code = x0 | (x1 << h) for x0 + e*x1; GF(q) codes are "
                            "little-endian polynomial-basis bits",
    }


def _species_section(mode, species, agg, expected, targeted=True):
    sizes = sorted(s for (sp, s) in agg["counts"] if sp == species)
    observed = sorted(set(sizes))
    counts = [[s, agg["counts"][(species, s)]] for s in observed]
    witnesses = []
    for s in observed:
        tup = agg["witness"].get((species, s))
        if tup is not None:
            witnesses.append([s, list(tup)])
    contained = set(observed) <= set(expected)
    complete = set(observed) == set(expected)
    must_be_complete = targeted and mode in ("exhaustive", "normalized")
    return {
        "observed_sizes": observed,
        "expected_sizes": expected,
        "counts": counts,
        "witnesses": witnesses,
        "contained": contained,
        "complete": complete,
        "pass": contained and (complete or not must_be_complete),
    }


def build_report(config: SweepConfig, agg, command="verify", timing=None):
    ctx = context_for_q(config.q)
    expected = expected_spectra(config.q)
    if config.families:
        targeted = {_FAMILY_SPECIES[f] for f in config.families}
    else:
        targeted = {"elliptic", "cone", "hyperbolic"}
    species = {}
    for sp in ("elliptic", "cone", "hyperbolic"):
        species[sp] = _species_section(config.mode, sp, agg, expected[sp], sp in targeted)
    policy, n = config.resolved_oracle()
    violations = agg["violations"]
    report = {
        "tool": "hql",
        "version": __version__,
        "command": command,
        # workers are an execution detail: reports must be byte-identical
        # across worker counts, so the count is not embedded
        "config": {
            "q": config.q,
            "mode": config.mode,
            "samples": config.samples,
            "seed": config.seed,
            "oracle": f"sample:{n}" if policy == "sample" else policy,
            "families": list(config.families) if config.families else None,
            "prng": "Philox4x64",
        },
        "field": _field_header(ctx),
        "totals": {
            "tuples": agg["total"],
            "reducible": agg["reducible"],
            "irreducible": agg["total"] - agg["reducible"],
        },
        "species": species,
        "cases": {k: agg["cases"][k] for k in sorted(agg["cases"])},
        "oracle": {
            "policy": f"sample:{n}" if policy == "sample" else policy,
            "checked": agg["oracle_checked"],
            "mismatches": [
                {"coeffs": [ctx.format_q2(v) for v in m["coeffs"]],
                 "fast": m["fast"], "oracle": m["oracle"]}
                for m in agg["mismatches"][:100]
            ],
            "mismatch_count": len(agg["mismatches"]),
        },
        "exclusions": {
            "violation_count": len(violations),
            "violations": [
                {"coeffs": [ctx.format_q2(v) for v in viol["coeffs"]],
                 "rule": viol["rule"]}
                for viol in violations[:100]
            ],
        },
    }
    if agg["family_sizes"]:
        fam_spectra = {}
        for (fam, size), count in sorted(agg["family_sizes"].items()):
            fam_spectra.setdefault(fam, []).append([size, count])
        report["family_spectra"] = fam_spectra
    report["pass"] = (all(sec["pass"] for sec in species.values())
                      and not agg["mismatches"] and not violations)
    if timing is not None:
        report["timing"] = timing
    # serialize witness coefficients after the pass computation
    for sec in species.values():
        sec["witnesses"] = [[s, [context_for_q(config.q).format_q2(v) for v in tup]]
                            for s, tup in sec["witnesses"]]
    return report


def render_report(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _write_output(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_text(config: SweepConfig) -> str:
    ctx = context_for_q(config.q)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    q = config.q
    extremal_sizes = {q * q + 1, 2 * q ** 3 + q * q + 1}
    for row in iter_instance_rows(config):
        quad = row["quad"]
        coeffs = [ctx.format_q2(v) for v in quad]
        if row["species"] == "reducible":
            writer.writerow([q] + coeffs + ["reducible", "", "", "", "", "", ""])
            continue
        ovoid = permutable = ""
        if row["species"] == HYPERBOLIC and row["size_fast"] in extremal_sizes:
            if row["size_fast"] == q * q + 1:
                ovoid = "1" if check_ovoid(ctx, quad) else "0"
            else:
                ok, _ = check_permutable(ctx, quad)
                permutable = "1" if ok else "0"
        writer.writerow([q] + coeffs + [row["species"], row["cinf"], row["case"],
                                        row["size_fast"], row.get("size_oracle", ""),
                                        ovoid, permutable])
    return buf.getvalue()


def cmd_verify(args) -> int:
    families = tuple(args.family) if args.family else None
    config = SweepConfig(q=args.q, mode=args.mode, samples=args.samples,
                         seed=args.seed, workers=args.workers,
                         oracle=args.oracle, families=families)
    if args.q > 8:
        print(f"warning: q={args.q} is outside the verified desk-scale range "
              "{2,4,8}; results are computed but unreviewed", file=sys.stderr)
    t0 = time.time()
    if args.format == "csv":
        text = _csv_text(config)
        _write_output(text, args.out)
        print(f"csv rows written in {time.time()-t0:.1f}s", file=sys.stderr)
        return EXIT_PASS
    agg = run_sweep(config)
    timing = {"seconds": round(time.time() - t0, 3)} if args.timing else None
    report = build_report(config, agg, timing=timing)
    _write_output(render_report(report), args.out)
    print(f"verify q={config.q} mode={config.mode}: "
          f"{'PASS' if report['pass'] else 'FAIL'} ({time.time()-t0:.1f}s)",
          file=sys.stderr)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def _parse_coeffs(ctx, text):
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 6:
        raise UsageError("need 6 coefficients a,b,c,d,e,f")
    return AffineQuadric(*(ctx.parse_q2(p) for p in parts))


def cmd_classify(args) -> int:
    ctx = context_for_q(args.q)
    quad = _parse_coeffs(ctx, args.coeffs)
    labels = ["a", "b", "c", "d", "e", "f"]
    print(f"q: {args.q}")
    print("coefficients: " + " ".join(f"{n}={ctx.format_q2(v)}" for n, v in zip(labels, quad)))
    if classify_quadric(ctx, quad) == "reducible":
        print("species: reducible")
        return EXIT_PASS
    rep = fast_intersection_size(ctx, quad)
    print(f"species: {rep.species}")
    print(f"infinity section: {rep.cinf_kind} ({rep.cinf_size} points)")
    print(f"case: {rep.case}")
    print(f"lift: {rep.species_lift} (rank {rep.rank_lift}); "
          f"section: {rep.species_inf} (rank {rep.rank_inf})")
    print(f"size (fast): {rep.size_total}")
    with_oracle = args.oracle != "off"
    if with_oracle:
        osize = oracle_intersection_size(ctx, quad)
        print(f"size (oracle): {osize}")
        if osize != rep.size_total:
            print("ORACLE MISMATCH", file=sys.stderr)
            return EXIT_FAIL
    q = args.q
    if rep.species == HYPERBOLIC and rep.size_total == q * q + 1:
        print(f"ovoid: {str(check_ovoid(ctx, quad)).lower()}")
    if rep.species == HYPERBOLIC and rep.size_total == 2 * q ** 3 + q * q + 1:
        ok, dists = check_permutable(ctx, quad)
        print(f"permutable: {str(ok).lower()} regulus distributions: {dists}")
    return EXIT_PASS


def _extremal_candidates(ctx, target):
    order = (("hyp-twolines", "hyp-line", "hyp-point") if target == "permutable"
             else ("hyp-point", "hyp-line", "hyp-twolines"))
    q2 = ctx.q2
    for kind in order:
        for a, b, c in family_quadratic_parts(ctx, kind):
            for d in range(q2):
                for e in range(q2):
                    for f1 in range(ctx.q):
                        yield AffineQuadric(a, b, c, d, e, f1 << ctx.h)


def cmd_extremal(args) -> int:
    if args.q not in (2, 4):
        raise UsageError("extremal search supports q in {2,4}")
    ctx = context_for_q(args.q)
    q = args.q
    target_size = q * q + 1 if args.target == "ovoid" else 2 * q ** 3 + q * q + 1
    witnesses = []
    for quad in _extremal_candidates(ctx, args.target):
        rep = fast_intersection_size(ctx, quad)
        if rep.size_total != target_size:
            continue
        entry = {"coeffs": [ctx.format_q2(v) for v in quad], "size": rep.size_total}
        if args.target == "ovoid":
            entry["check"] = check_ovoid(ctx, quad)
            entry["regulus_distributions"] = None
            entry["points"] = [format_point(p, ctx)
                               for p in intersection_points(ctx, quad)]
        else:
            ok, dists = check_permutable(ctx, quad)
            entry["check"] = ok
            entry["regulus_distributions"] = [list(d) for d in dists]
        witnesses.append(entry)
        if len(witnesses) >= args.limit:
            break
    passed = bool(witnesses) and all(w["check"] for w in witnesses)
    result = {"tool": "hql", "version": __version__, "command": "extremal",
              "q": q, "target": args.target, "target_size": target_size,
              "witnesses": witnesses, "pass": passed}
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    _write_output(text, args.out)
    return EXIT_PASS if passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hql",
        description="Intersection spectra of the Hermitian surface and tangent "
                    "quadrics in PG(3,q^2), q even; flags default from HQL_* "
                    "environment variables.")
    parser.add_argument("--version", action="version", version=f"hql {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--q", type=int, default=int(_env("Q", "2")),
                       help="field order q (even)")
        p.add_argument("--out", default=_env("OUT"), help="output path (default stdout)")

    p_verify = sub.add_parser("verify", help="sweep instances and verify the spectra")
    add_common(p_verify)
    p_verify.add_argument("--mode", choices=["exhaustive", "random", "normalized"],
                          default=_env("MODE", "exhaustive"))
    p_verify.add_argument("--samples", type=int,
                          default=int(_env("SAMPLES", "0")) or None)
    p_verify.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
    p_verify.add_argument("--workers", type=int, default=int(_env("WORKERS", "1")))
    p_verify.add_argument("--oracle", default=_env("ORACLE", "default"),
                          help="all | off | sample:N (default: all at q=2 "
                               "exhaustive, else sample:10000)")
    p_verify.add_argument("--format", choices=["json", "csv"],
                          default=_env("FORMAT", "json"))
    p_verify.add_argument("--family", action="append", choices=list(FAMILY_KINDS),
                          default=_env("FAMILY") and [_env("FAMILY")],
                          help="restrict normalized mode to a family (repeatable)")
    p_verify.add_argument("--timing", action="store_true",
                          help="embed wall-clock timing (breaks byte-identical output)")

    p_classify = sub.add_parser("classify", help="classify a single quadric")
    add_common(p_classify)
    p_classify.add_argument("--coeffs", required=True,
                            help="a,b,c,d,e,f as integer codes or x0+e*x1 forms")
    p_classify.add_argument("--oracle", default=_env("ORACLE", "all"),
                            help="off to skip the brute-force check")

    p_extremal = sub.add_parser("extremal", help="find extremal-size witnesses")
    add_common(p_extremal)
    p_extremal.add_argument("--target", choices=["ovoid", "permutable"], required=True)
    p_extremal.add_argument("--limit", type=int, default=3,
                            help="stop after this many witnesses")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "extremal":
            return cmd_extremal(args)
        parser.error("unknown command")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
