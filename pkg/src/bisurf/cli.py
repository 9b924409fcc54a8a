"""Command-line pipeline: dataset verification, scans, lifts, recognition,
fiber analysis, and coordinator/worker mode.

Every JSON report is deterministic for a fixed config (timings go to stderr,
never into the report), and carries provenance: config hash, dataset hashes,
seed, version.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .arith import GF
from .families import (check_associativity, graded_series, instantiate_nine_param,
                       load_dataset, manifest, nine_param_symbolic,
                       perturb_quadric, s2_minpoly_coeffs, verify_dataset_integrity,
                       y0_system)
from .geomverify import (BirationalMap, CheckResult, CurveParam,
                         fiber_hilbert_polynomial, fiber_singular_points,
                         sigma_curve_cycle, verify_cover_function,
                         verify_on_surface, verify_section_form,
                         verify_sigma_order3)
from .lift import hensel_univariate, format_residue_file, parse_residue_file
from .poly import WeightTable, bidegree, format_poly
from .recog import minpoly_from_padic
from .search import (SearchSpace, bench_eval_throughput, make_shards,
                     roots_mod_p, scan, scan_sharded, scan_with_checkpoint)

DEFAULT_SEED = 0x5EED


def _config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]


def _dataset_hashes(ids) -> dict:
    m = manifest()["datasets"]
    return {i: m[i]["sha256"][:16] for i in sorted(ids) if i in m}


def _emit(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(config: dict, checks: list[CheckResult], datasets=(),
            extra: dict | None = None) -> dict:
    rep = {
        "version": __version__,
        "config": config,
        "config_hash": _config_hash(config),
        "dataset_hashes": _dataset_hashes(datasets),
        "seed": config.get("seed", DEFAULT_SEED),
        "checks": [c.as_json() for c in checks],
        "ok": all(c.passed for c in checks),
    }
    if extra:
        rep.update(extra)
    return rep


def _finish(report: dict, out, t0: float) -> int:
    _emit(report, out)
    n = len(report.get("checks", []))
    npass = sum(1 for c in report.get("checks", []) if c["status"] == "pass")
    print(f"[{report['config']['command']}] {npass}/{n} checks passed "
          f"in {time.time() - t0:.1f}s", file=sys.stderr)
    return 0 if report["ok"] else 1


# ---------------------------------------------------------------------------
# Subcommands.

def cmd_verify_family(args) -> int:
    t0 = time.time()
    import random
    config = {"command": "verify-family", "primes": args.primes,
              "tuples": args.tuples, "seed": args.seed}
    checks = []
    sym = nine_param_symbolic()
    wt = sym.weight_table()
    degs = sorted(bidegree(q, wt) for q in sym.quadrics)
    want = [(2, 8)] * 3 + [(2, 9)] * 3 + [(2, 10)] * 3
    checks.append(CheckResult("family_bigrading", degs == want,
                              {"got": [list(d) for d in degs]}))
    rng = random.Random(args.seed)
    for p in args.primes:
        dom = GF(p)
        ok, tried = True, 0
        for _ in range(args.tuples):
            while True:
                d = [rng.randrange(p) for _ in range(9)]
                if d[1] % p and d[8] % p:
                    break
            rep = check_associativity(instantiate_nine_param(d, dom))
            tried += 1
            if not rep.ok:
                ok = False
                checks.append(CheckResult(f"associativity_p{p}", False,
                                          {"d": d, "failures": rep.failures[:5]}))
                break
        if ok:
            checks.append(CheckResult(f"associativity_p{p}", True, {"tuples": tried}))
    # falsification: a one-coefficient perturbation must break associativity
    dom = GF(args.primes[0])
    while True:
        d = [rng.randrange(args.primes[0]) for _ in range(9)]
        if d[1] and d[8]:
            break
    sysd = instantiate_nine_param(d, dom)
    mono = [0] * len(sysd.vars)
    mono[sysd.vars.index("u0")] = 2
    mono[sysd.vars.index("v1")] = 1
    mono[sysd.vars.index("v3")] = 1
    bad = perturb_quadric(sysd, 0, tuple(mono), 1)
    rep = check_associativity(bad)
    checks.append(CheckResult("associativity_perturbation_fails", not rep.ok,
                              {"failures": len(rep.failures)}))
    return _finish(_report(config, checks, ["NINE_PARAM_FAMILY"]), args.out, t0)


def cmd_verify_surface(args) -> int:
    t0 = time.time()
    config = {"command": "verify-surface", "dataset": args.dataset, "p": args.p,
              "branch": args.branch, "fibers": args.fibers,
              "sample": args.sample, "seed": args.seed}
    checks = []
    used = [args.dataset]
    sysq = y0_system(args.dataset)
    wt = sysq.weight_table()
    degs = sorted(bidegree(q, wt) for q in sysq.quadrics)
    want = [(2, 8)] * 3 + [(2, 9)] * 3 + [(2, 10)] * 3
    checks.append(CheckResult("bigrading", degs == want,
                              {"got": [list(d) for d in degs]}))
    branches = ["plus", "minus"] if args.branch == "both" else [args.branch]
    if args.dataset == "Y0_C20":
        used += ["S2_PARAM", "S1_PARAM", "F18", "F110", "SIGMA3", "G7_C20"]
        s2 = CurveParam.from_dataset("S2_PARAM")
        s1 = CurveParam.from_dataset("S1_PARAM")
        f18 = load_dataset("F18").polys[0]
        f110 = load_dataset("F110").polys[0]
        c = verify_on_surface(sysq, s2); c.name = "s2_on_surface"; checks.append(c)
        c = verify_on_surface(sysq, s1); c.name = "s1_on_surface"; checks.append(c)
        c = verify_section_form(f18, s2); c.name = "f18_on_s2"; checks.append(c)
        c = verify_section_form(f110, s1); c.name = "f110_on_s1"; checks.append(c)
        sigma = BirationalMap.from_dataset("SIGMA3")
        checks.extend(sigma.structural_checks())
        cyc = sigma_curve_cycle(sigma, s2, s1, f18, f110)
        checks.append(CheckResult("sigma_section_cycle", cyc["three_cycle"],
                                  cyc["permutation"]))
        for br in branches:
            c = verify_sigma_order3(args.dataset, args.p, br, args.sample, args.seed)
            c.name = f"sigma_order3_{br}"
            checks.append(c)
        cover = "G7_C20"
    else:
        cover = "G7_KEUM"
        used.append("G7_KEUM")
    for c in verify_cover_function(cover):
        checks.append(c)
    # fiber geometry
    import random
    rng = random.Random(args.seed)
    good = 0
    tried = []
    while good < args.fibers and len(tried) < 40:
        a, b = rng.randrange(1, args.p), rng.randrange(1, args.p)
        if (a**3 - b**2) % args.p == 0:
            continue
        tried.append((a, b))
        H, hp = fiber_hilbert_polynomial(args.dataset, (a, b), args.p,
                                         branches[0])
        if hp == [0, 6]:
            good += 1
        else:
            checks.append(CheckResult("fiber_hilbert_6T", False,
                                      {"fiber": [a, b], "poly": [str(x) for x in hp]}))
            break
    else:
        checks.append(CheckResult("fiber_hilbert_6T", good >= args.fibers,
                                  {"fibers": good}))
    rep = fiber_singular_points(args.dataset, (1, 1), args.p, branches[0],
                                args.seed)
    verdicts = sorted(pc.verdict for pc in rep.singular)
    if args.dataset == "Y0_C20":
        ok = verdicts == ["node", "worse", "worse"]
    else:
        ok = len(verdicts) == 3 and verdicts.count("worse") >= 2
    checks.append(CheckResult("special_fiber_singularities", ok, {
        "classified": verdicts,
        "curve_singular_points": rep.curve_singular_count,
        "points": [{k: str(v) for k, v in pc.point.items()} for pc in rep.points],
    }))
    return _finish(_report(config, checks, used), args.out, t0)


def cmd_series(args) -> int:
    t0 = time.time()
    config = {"command": "series", "amax": args.amax, "bmax": args.bmax}
    gens = [(0, 0), (1, 4), (1, 4), (1, 5), (1, 5), (2, 9)]
    base = [(0, 2), (0, 3), (1, 0), (1, 3)]
    gs = graded_series(gens, base, (args.amax, args.bmax))
    # independent oracle: direct monomial enumeration
    def count(a, b):
        total = 0
        def rec(i, m, n):
            nonlocal total
            if m > b or n > a:
                return
            if i == len(base):
                total += sum(1 for gm, gn in gens if (m + gm, n + gn) == (b, a))
                return
            bm, bn = base[i]
            e = 0
            while m + e * bm <= b and n + e * bn <= a:
                rec(i + 1, m + e * bm, n + e * bn)
                e += 1
        rec(0, 0, 0)
        return total

    mismatches = [(a, b) for a in range(args.amax + 1) for b in range(args.bmax + 1)
                  if gs.coefficient(a, b) != count(a, b)]
    checks = [
        CheckResult("series_matches_enumeration", not mismatches,
                    {"mismatches": mismatches[:5]}),
        CheckResult("series_spot_values",
                    gs.coefficient(6, 0) == 2 and gs.coefficient(4, 1) == 3
                    and gs.coefficient(0, 1) == 1,
                    {"(6,0)": gs.coefficient(6, 0), "(4,1)": gs.coefficient(4, 1),
                     "(0,1)": gs.coefficient(0, 1)}),
    ]
    extra = {"closed_form": gs.closed_form()}
    return _finish(_report(config, checks, extra=extra), args.out, t0)


def cmd_roots(args) -> int:
    t0 = time.time()
    config = {"command": "roots", "dataset": args.dataset, "poly": args.poly,
              "p": args.p, "all": args.all}
    if args.dataset:
        f = load_dataset(args.dataset).polys[0]
        used = [args.dataset]
    else:
        from .arith import QQ
        from .poly import parse_poly
        f = parse_poly(args.poly, QQ, ("x",))
        used = []
    roots = roots_mod_p(f, args.p)
    shown = [r for r, m in roots if args.all or m == 1]
    print(" ".join(str(r) for r in shown))
    report = _report(config, [CheckResult("roots", True)], used,
                     {"roots": [[r, m] for r, m in roots],
                      "simple_roots": [r for r, m in roots if m == 1]})
    if args.out:
        _emit(report, args.out)
    print(f"[roots] done in {time.time() - t0:.1f}s", file=sys.stderr)
    return 0


def cmd_scan(args) -> int:
    t0 = time.time()
    with open(args.space) as fh:
        space = SearchSpace.from_json(json.load(fh))
    config = {"command": "scan", "space": space.as_json(), "shards": args.shards,
              "checkpoint": bool(args.checkpoint)}
    if args.checkpoint:
        hits = scan_with_checkpoint(space, args.shards, args.checkpoint)
    elif args.shards > 1:
        hits = scan_sharded(space, args.shards)
    else:
        hits = scan(space)
    report = _report(config, [CheckResult("scan", True)],
                     extra={"space_hash": space.space_hash(),
                            "hits": [h.as_json() for h in hits],
                            "total_space": space.total()})
    _emit(report, args.out)
    print(f"[scan] {len(hits)} hits in {time.time() - t0:.1f}s", file=sys.stderr)
    return 0


def cmd_bench(args) -> int:
    coeffs = s2_minpoly_coeffs()
    rate = bench_eval_throughput(coeffs, args.p, seconds=args.seconds)
    report = {"version": __version__,
              "config": {"command": "bench", "p": args.p},
              "rate_evals_per_s": rate, "target": 1e6, "ok": rate >= 1e6}
    print(f"{rate:.3e} evaluations/s (target 1e6)")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2)
    return 0 if rate >= 1e6 else 1


def cmd_lift(args) -> int:
    t0 = time.time()
    config = {"command": "lift", "dataset": args.dataset, "p": args.p,
              "root": args.root, "prec": args.prec}
    f = load_dataset(args.dataset).polys[0]
    value, cert = hensel_univariate(f, args.p, args.root, args.prec)
    text = format_residue_file({"x": value}, cert)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"[lift] root {args.root} -> mod {args.p}^{args.prec} "
          f"in {time.time() - t0:.1f}s", file=sys.stderr)
    return 0


def cmd_recognize(args) -> int:
    t0 = time.time()
    config = {"command": "recognize", "deg": args.deg, "height": args.height,
              "residue_file": bool(args.residue_file)}
    if args.residue_file:
        with open(args.residue_file) as fh:
            residues = parse_residue_file(fh.read())
        x = residues[args.name]
    else:
        from .arith import PadicApprox
        x = PadicApprox(int(args.value), args.p, args.prec)
    rec = minpoly_from_padic(x, args.deg, args.height)
    poly_text = " + ".join(
        (f"{c}*x^{i}" if i > 1 else (f"{c}*x" if i == 1 else str(c)))
        for i, c in enumerate(rec.coeffs) if c)
    print(poly_text)
    ok = True
    if args.expect:
        want = load_dataset(args.expect).polys[0]
        out = [0] * (want.degree_in(want.vars[0]) + 1)
        for m, c in want.coeffs.items():
            out[m[0]] = int(c)
        ok = rec.coeffs == out or rec.coeffs == [-c for c in out]
    report = _report(config, [CheckResult("recognized", ok)],
                     [args.expect] if args.expect else [],
                     {"coefficients": rec.coeffs, "tie": rec.tie,
                      "provenance": {"p": x.p, "K": x.k,
                                     "degree_bound": args.deg,
                                     "height_bound": args.height}})
    if args.out:
        _emit(report, args.out)
    print(f"[recognize] degree {len(rec.coeffs) - 1} in {time.time() - t0:.1f}s",
          file=sys.stderr)
    return 0 if ok else 1


def cmd_fiber_sing(args) -> int:
    t0 = time.time()
    config = {"command": "fiber-sing", "dataset": args.dataset,
              "u0": args.u0, "u1": args.u1, "p": args.p, "branch": args.branch,
              "seed": args.seed}
    rep = fiber_singular_points(args.dataset, (args.u0, args.u1), args.p,
                                args.branch, args.seed)
    for pc in rep.points:
        coords = {k: str(v) for k, v in pc.point.items()}
        print(f"{pc.verdict:7s} quad_rank={pc.quad_rank} {coords}")
    report = _report(config, [CheckResult("fiber_sing", True)], [args.dataset], {
        "curve_singular_points": rep.curve_singular_count,
        "points": [{"verdict": pc.verdict, "quad_rank": pc.quad_rank,
                    "coords": {k: str(v) for k, v in pc.point.items()}}
                   for pc in rep.points],
    })
    if args.out:
        _emit(report, args.out)
    print(f"[fiber-sing] {len(rep.points)} points in {time.time() - t0:.1f}s",
          file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from .distrib import Coordinator
    with open(args.space) as fh:
        space = SearchSpace.from_json(json.load(fh))
    coord = Coordinator(space, args.shards, args.host, args.port,
                        args.timeout, args.checkpoint).start()
    print(f"coordinator on {coord.address[0]}:{coord.address[1]} "
          f"({args.shards} shards)", file=sys.stderr)
    hits = coord.result()
    report = {"version": __version__,
              "config": {"command": "serve", "space": space.as_json(),
                         "shards": args.shards},
              "space_hash": space.space_hash(),
              "hits": [h.as_json() for h in hits], "ok": True}
    _emit(report, args.out)
    coord.shutdown()
    return 0


def cmd_work(args) -> int:
    from .distrib import work
    with open(args.space) as fh:
        space = SearchSpace.from_json(json.load(fh))
    done = work(space, args.host, args.port)
    print(f"worker finished {done} shards", file=sys.stderr)
    return 0


def cmd_verify_datasets(args) -> int:
    t0 = time.time()
    config = {"command": "verify-datasets"}
    checks = []
    ids = sorted(manifest()["datasets"])
    for dsid in ids:
        try:
            verify_dataset_integrity(dsid)
            checks.append(CheckResult(f"dataset_{dsid}", True))
        except Exception as e:
            checks.append(CheckResult(f"dataset_{dsid}", False, str(e)))
    return _finish(_report(config, checks, ids), args.out, t0)


def cmd_report(args) -> int:
    with open(args.input) as fh:
        rep = json.load(fh)
    print(f"command : {rep['config']['command']}")
    print(f"config  : {rep.get('config_hash', '-')}")
    print(f"version : {rep.get('version', '-')}")
    for c in rep.get("checks", []):
        mark = "ok " if c["status"] == "pass" else "FAIL"
        extra = f"  {c['witness']}" if c.get("witness") not in (None, "") else ""
        print(f"  [{mark}] {c['name']}{extra}")
    print("overall :", "pass" if rep.get("ok") else "fail")
    return 0 if rep.get("ok") else 1


# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bisurf",
        description="bigraded surface toolkit: verification, scans, lifting, recognition")
    ap.add_argument("--out", help="write the JSON report here (default stdout)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-family", help="associativity of the nine-parameter family")
    p.add_argument("--primes", type=lambda s: [int(x) for x in s.split(",")],
                   default=[79, 101, 1009])
    p.add_argument("--tuples", type=int, default=20)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify_family)

    p = sub.add_parser("verify-surface", help="full verification suite for a surface")
    p.add_argument("--dataset", required=True, choices=["Y0_C20", "Y0_KEUM"])
    p.add_argument("--p", type=int, default=79)
    p.add_argument("--branch", default="plus", choices=["plus", "minus", "both"])
    p.add_argument("--fibers", type=int, default=5)
    p.add_argument("--sample", type=int, default=30)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify_surface)

    p = sub.add_parser("series", help="graded dimension series check")
    p.add_argument("--amax", type=int, default=20)
    p.add_argument("--bmax", type=int, default=6)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("roots", help="roots of a univariate polynomial mod p")
    p.add_argument("--dataset")
    p.add_argument("--poly", help="polynomial text in x (alternative to --dataset)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--all", action="store_true", help="include multiple roots")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("scan", help="finite-field parameter scan")
    p.add_argument("--space", required=True, help="space config JSON file")
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--checkpoint")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bench", help="evaluation throughput bench")
    p.add_argument("--p", type=int, default=79)
    p.add_argument("--seconds", type=float, default=1.0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("lift", help="Hensel lift a root to mod p^K")
    p.add_argument("--dataset", default="S2MINPOLY")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--root", type=int, required=True)
    p.add_argument("--prec", type=int, required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("recognize", help="algebraic recognition of a residue")
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--height", type=int, default=1 << 40)
    p.add_argument("--residue-file")
    p.add_argument("--name", default="x")
    p.add_argument("--value")
    p.add_argument("--p", type=int)
    p.add_argument("--prec", type=int)
    p.add_argument("--expect", help="dataset id to compare against")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("fiber-sing", help="singular points of one fiber")
    p.add_argument("--dataset", required=True, choices=["Y0_C20", "Y0_KEUM"])
    p.add_argument("--u0", type=int, required=True)
    p.add_argument("--u1", type=int, required=True)
    p.add_argument("--p", type=int, default=79)
    p.add_argument("--branch", default="plus", choices=["plus", "minus"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_fiber_sing)

    p = sub.add_parser("serve", help="run the scan coordinator")
    p.add_argument("--space", required=True)
    p.add_argument("--shards", type=int, default=8)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--checkpoint")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("work", help="run a scan worker")
    p.add_argument("--space", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, required=True)
    p.set_defaults(func=cmd_work)

    p = sub.add_parser("verify-datasets", help="dataset hash and bigrading audit")
    p.set_defaults(func=cmd_verify_datasets)

    p = sub.add_parser("report", help="render a JSON report")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, KeyError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
