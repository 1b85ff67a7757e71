"""Command-line front end: `resolvent <command> ...`.

Exit codes: 0 when every verdict matches, 1 on any mismatch, 2 on usage
errors (bad flags, out-of-budget requests, malformed input).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import pathlib
import sys
from fractions import Fraction

from . import __version__, braidhur, cohomology, localzeta, nichols, prehomog, qseries, verify
from .localzeta import format_fraction

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output helpers

def _emit(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _series_payload(kind: str, d: int, series: qseries.TruncatedTSeries, b_min: int, b_max: int, fmt: str):
    rows = [(b, series[b]) for b in range(b_min, b_max + 1)]
    if fmt == "csv":
        return _csv_text(["b", "poly"], [[b, c.to_pairs()] for b, c in rows])
    return {"d": d, "kind": kind, "rows": [{"b": b, "poly": c.to_json()} for b, c in rows]}


def _betti_payload(d: int, b_min: int, b_max: int, fmt: str):
    rows = [(b, qseries.betti_numbers(d, b)) for b in range(b_min, b_max + 1)]
    if fmt == "csv":
        return _csv_text(["b", "betti"], [[b, ";".join(map(str, v))] for b, v in rows])
    return {"d": d, "kind": "betti", "rows": [{"b": b, "betti": v} for b, v in rows]}


def _cohomology_payload(d: int, b_min: int, b_max: int, fmt: str):
    series = qseries.cohomology_series(d, max(b_max, 0))
    rows = [(a, b, int(series[b].coeff(a))) for b in range(b_min, b_max + 1)
            for a in sorted(series[b].terms)]
    if fmt == "csv":
        return _csv_text(["a", "b", "dim"], [list(r) for r in rows])
    return {"d": d, "kind": "cohomology", "rows": [{"a": a, "b": b, "dim": v} for a, b, v in rows]}


def _orbits_payload(d: int, n_min: int, n_max: int, cls: str, fmt: str, budget: int):
    reps = [braidhur.braid_orbits(d, n, cls, budget) for n in range(max(n_min, 1), n_max + 1)]
    if fmt == "csv":
        return _csv_text(["n", "orbits", "sizes", "by_product_class"],
                         [[r.n, r.orbit_count,
                           ";".join(f"{k}:{v}" for k, v in sorted(r.orbit_sizes.items())),
                           ";".join(f"{k}:{v}" for k, v in sorted(r.with_product_classes.items()))]
                          for r in reps])
    return {"d": d, "kind": "orbits", "class": cls, "rows": [r.to_json() for r in reps]}


def _write(payload, args, out) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if getattr(args, "out", None):
        pathlib.Path(args.out).write_text(text)
    else:
        out.write(text)


def _need_d(d: int) -> None:
    if d not in (3, 4):
        raise UsageError("--d must be 3 or 4")


# ---------------------------------------------------------------- commands

def cmd_zeta(args, cfg, out) -> int:
    if args.action == "check-secondary":
        _need_d(args.d)
        rep = qseries.secondary_term_check(args.d, args.bmax)
        _emit(rep.to_json(), out)
        return EXIT_OK if rep.passed else EXIT_MISMATCH
    if args.action == "check-conjecture5":
        if not args.file:
            raise UsageError("check-conjecture5 needs --file")
        try:
            series = qseries.TruncatedTSeries.from_json(json.loads(pathlib.Path(args.file).read_text()))
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read series: {exc}") from exc
        holds = qseries.conjecture5_check(series, args.strength)
        _emit({"strength": args.strength, "order": series.order, "holds": holds}, out)
        return EXIT_OK if holds else EXIT_MISMATCH
    _need_d(args.d)
    return _export(args.action, args.d, 0, args.bmax, args, cfg, out)


def _export(kind: str, d: int, lo: int, hi: int, args, cfg, out) -> int:
    fmt = args.format
    if kind == "orbits":
        payload = _orbits_payload(d, lo, hi, args.cls, fmt, cfg.budget("orbit_tuples"))
    else:
        _need_d(d)
        if kind == "local":
            payload = _series_payload(kind, d, qseries.local_table(d, max(hi, 0)), lo, hi, fmt)
        elif kind == "global":
            payload = _series_payload(kind, d, qseries.global_table(d, max(hi, 0)), lo, hi, fmt)
        elif kind == "cohomology":
            payload = _cohomology_payload(d, lo, hi, fmt)
        else:
            payload = _betti_payload(d, lo, hi, fmt)
    _write(payload, args, out)
    return EXIT_OK


def cmd_export(args, cfg, out) -> int:
    return _export(args.kind, args.d, args.bmin, args.bmax, args, cfg, out)


def _density_json(r: localzeta.DensityResult) -> dict:
    pred = localzeta.predicted_coefficient(r.d, r.p, r.b)
    base = {"d": r.d, "p": r.p, "b": r.b, "mode": r.mode}
    if r.mode == "exact":
        coeff = r.coefficient
        return {**base, "count": str(r.count), "total": str(r.total), "coefficient": format_fraction(coeff),
                "predicted": format_fraction(pred), "verdict": "match" if coeff == pred else "mismatch"}
    verdict, _ = localzeta.mc_verdict(r)
    return {**base, "samples": str(r.samples), "seed": r.seed, "hits": str(r.hits),
            "estimate": format_fraction(Fraction(r.hits, r.samples)), "stderr": r.stderr,
            "predicted_density": format_fraction(localzeta.predicted_density(r.d, r.p, r.b)),
            "predicted": format_fraction(pred), "verdict": verdict}


def _parse_mc_plan(text: str | None, seed: int) -> list[tuple[int, int, int]]:
    plan = []
    for item in (text or "").split(","):
        item = item.strip()
        if not item:
            continue
        try:
            head, *rest = item.split(":")
            key, b = head.split("=")
            if key.strip() != "b" or not rest:
                raise ValueError
            samples = int(float(rest[0]))
            s = int(rest[1]) if len(rest) > 1 else seed
            plan.append((int(b), samples, s))
        except ValueError:
            raise UsageError(f"bad --mc item {item!r}; expected b=B:SAMPLES[:SEED]") from None
    return plan


def cmd_oracle(args, cfg, out) -> int:
    if args.d not in localzeta.DIM:
        raise UsageError("--d must be 3 or 4")
    if args.action == "density":
        if args.b is None:
            raise UsageError("density needs --b")
        if args.samples is not None and not args.exact:
            seed = cfg.seed if args.seed_override is None else args.seed_override
            r = verify.density(cfg, args.d, args.p, args.b, samples=int(float(args.samples)), seed=seed)
        else:
            r = verify.density(cfg, args.d, args.p, args.b)
        res = _density_json(r)
        _emit(res, out)
        return EXIT_MISMATCH if res["verdict"] == "mismatch" else EXIT_OK
    results = []
    for b in range(args.exact_bmax + 1):
        results.append(_density_json(verify.density(cfg, args.d, args.p, b)))
    for b, samples, seed in _parse_mc_plan(args.mc, cfg.seed):
        results.append(_density_json(verify.density(cfg, args.d, args.p, b, samples=samples, seed=seed)))
    _emit({"d": args.d, "p": args.p, "seed": cfg.seed, "results": results}, out)
    return EXIT_MISMATCH if any(r["verdict"] == "mismatch" for r in results) else EXIT_OK


def cmd_nichols(args, cfg, out) -> int:
    _need_d(args.d)
    if args.action == "check-braid":
        ok = nichols.braid_equation_holds(args.d)
        _emit({"d": args.d, "braid_equation": ok, "verdict": "match" if ok else "mismatch"}, out)
        return EXIT_OK if ok else EXIT_MISMATCH
    res: dict = {"d": args.d}
    rs = verify.rewrite_system(cfg, args.d)
    dims = rs.dims
    groebner = dims.dims[: dims.top_degree + 1]
    if args.method in ("groebner", "both"):
        res["groebner"] = groebner
        res["rules"] = len(rs.rules)
        res["total"] = dims.total
        res["palindromic"] = dims.palindromic()
    ok = True
    if args.method in ("symmetrizer", "both"):
        top = args.nmax if args.nmax is not None else (len(groebner) if args.d == 3 else 6)
        sym, methods = [1], ["exact"]
        for n in range(1, top + 1):
            rep = nichols.quantum_symmetrizer_report(args.d, n, seed=cfg.seed)
            sym.append(rep.rank)
            methods.append(rep.label)
        res["symmetrizer"] = sym
        res["symmetrizer_methods"] = methods
        if args.method == "both":
            ok = all(sym[n] == (groebner[n] if n < len(groebner) else 0) for n in range(len(sym)))
            res["verdict"] = "match" if ok else "mismatch"
    _emit(res, out)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_coh(args, cfg, out) -> int:
    _need_d(args.d)
    override = args.override_budget
    if args.action == "check":
        table = _invariant(cfg, args.d, "geometric", args.bmax, override)
        full = _full_ext(cfg, args.d, args.bmax, override) if args.d == 3 or args.bmax <= 4 else None
        rows = []
        for row in cohomology.compare_with_zeta(table, args.d, args.bmax):
            if full is not None:
                row = {"a": row["a"], "b": row["b"], "dim": full[(row["a"], row["b"])], **{
                    k: row[k] for k in ("invariant_dim", "predicted", "verdict")}}
            rows.append(row)
        _emit({"d": args.d, "b_max": args.bmax, "invariants": "geometric", "rows": rows}, out)
        return EXIT_MISMATCH if any(r["verdict"] == "mismatch" for r in rows) else EXIT_OK
    if args.invariants == "none":
        table = _full_ext(cfg, args.d, args.bmax, override)
        key = "dim"
    else:
        table = _invariant(cfg, args.d, args.invariants, args.bmax, override)
        key = "invariant_dim"
    rows = [{"a": a, "b": b, key: v, "method": table.methods.get((a, b), "exact")}
            for (a, b), v in sorted(table.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])) if v]
    if args.format == "csv":
        _write(_csv_text(["a", "b", key, "method"], [[r["a"], r["b"], r[key], r["method"]] for r in rows]),
               args, out)
    else:
        _write({"d": args.d, "b_max": args.bmax, "invariants": args.invariants, "seed": cfg.seed,
                "rows": rows}, args, out)
    return EXIT_OK


def _invariant(cfg, d, mode, b_max, override):
    if not override:
        cohomology._check_budget(d, b_max, cohomology.INVARIANT_BUDGET, "invariant_ext_dims", False)
    return verify.invariant_table(cfg, d, mode, b_max)


def _full_ext(cfg, d, b_max, override):
    return cohomology.ext_dims(d, b_max, b_max, seed=cfg.seed, override_budget=override,
                               rs=verify.rewrite_system(cfg, d))


def cmd_braid(args, cfg, out) -> int:
    fn = braidhur.unmarked_orbits if args.unmarked else braidhur.braid_orbits
    rep = fn(args.d, args.n, args.cls, cfg.budget("orbit_tuples"))
    _emit(rep.to_json(), out)
    return EXIT_OK


def cmd_prehomog(args, cfg, out) -> int:
    ring = prehomog.CoeffRing.parse(args.ring)
    coeffs = prehomog.parse_coeffs(ring, args.coeffs)
    if args.action == "disc3":
        if len(coeffs) != 4:
            raise UsageError("disc3 needs 4 coefficients a,b,c,d")
        v = prehomog.BinaryCubic.of(ring, coeffs)
    else:
        if len(coeffs) != 12:
            raise UsageError("disc4 needs 12 coefficients: A then B, each ordered 00,11,22,01,02,12")
        v = prehomog.TernaryQuadPair.of(ring, coeffs[:6], coeffs[6:])
    value = prehomog.disc(v)
    val = prehomog.valuation(value) if ring.N > 1 else (0 if any(value) else prehomog.GE_N)
    _emit({"ring": str(ring), "kind": args.action, "disc": prehomog.format_elem(ring, value),
           "valuation": val}, out)
    return EXIT_OK


def cmd_verify_all(args, cfg, out) -> int:
    report = verify.verify_all(cfg, args.only.split(",") if args.only else None)
    text = report.dumps(include_runtime=args.include_runtime) + "\n"
    if args.out:
        pathlib.Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_MISMATCH if report.failed else EXIT_OK


# ---------------------------------------------------------------- parser

def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=int, default=d if suppress else 1)
    p.add_argument("--cache-dir", default=d)
    p.add_argument("--no-cache", action="store_true", default=d if suppress else False)
    p.add_argument("--seed", type=int, default=d if suppress else 0)
    p.add_argument("--budget", action="append", metavar="KEY=VALUE", default=d if suppress else None)
    p.add_argument("--format", choices=("csv", "json"), default=d if suppress else "json")
    p.add_argument("-v", "--verbose", action="store_true", default=d if suppress else False)
    return p


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    g = _global_flags(True)
    parser = _Parser(prog="resolvent", parents=[_global_flags(False)],
                     description="Discriminant densities, Igusa series, Nichols algebras and Hurwitz orbits.")
    parser.add_argument("--version", action="version", version=f"resolvent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    z = sub.add_parser("zeta", parents=[g], help="Igusa series tables and checks")
    z.add_argument("action", choices=("local", "global", "cohomology", "betti", "check-secondary",
                                      "check-conjecture5"))
    z.add_argument("--d", type=int, default=3)
    z.add_argument("--bmax", type=int, default=12)
    z.add_argument("--file")
    z.add_argument("--strength", choices=("a", "b"), default="a")
    z.add_argument("--out")
    z.set_defaults(func=cmd_zeta)

    o = sub.add_parser("oracle", parents=[g], help="brute-force and Monte-Carlo local densities")
    o.add_argument("action", choices=("density", "compare"))
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--p", type=int, required=True)
    o.add_argument("--b", type=int)
    o.add_argument("--exact", action="store_true")
    o.add_argument("--samples")
    o.add_argument("--mc-seed", dest="seed_override", type=int)
    o.add_argument("--exact-bmax", type=int, default=-1)
    o.add_argument("--mc")
    o.set_defaults(func=cmd_oracle)

    n = sub.add_parser("nichols", parents=[g], help="Nichols algebra dimensions")
    n.add_argument("action", choices=("hilbert", "check-braid"))
    n.add_argument("--d", type=int, required=True)
    n.add_argument("--method", choices=("symmetrizer", "groebner", "both"), default="groebner")
    n.add_argument("--nmax", type=int)
    n.set_defaults(func=cmd_nichols)

    c = sub.add_parser("coh", parents=[g], help="Ext of Nichols algebras")
    c.add_argument("action", choices=("ext", "check"))
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--bmax", type=int, default=4)
    c.add_argument("--invariants", choices=("geometric", "standard", "none"), default="geometric")
    c.add_argument("--override-budget", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_coh)

    b = sub.add_parser("braid", parents=[g], help="Hurwitz orbits")
    b.add_argument("action", choices=("orbits",))
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--class", dest="cls", choices=("transpositions", "all"), default="transpositions")
    b.add_argument("--unmarked", action="store_true")
    b.set_defaults(func=cmd_braid)

    v = sub.add_parser("verify-all", parents=[g], help="run every cross-check")
    v.add_argument("--skip-heavy", action="store_true")
    v.add_argument("--only", help="comma-separated check names: " + ",".join(verify.CHECKS))
    v.add_argument("--include-runtime", action="store_true")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify_all)

    e = sub.add_parser("export", parents=[g], help="write tables as CSV or JSON")
    e.add_argument("kind", choices=("local", "global", "cohomology", "betti", "orbits"))
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--bmin", type=int, default=0, help="first b (or n for orbits)")
    e.add_argument("--bmax", type=int, default=12, help="last b (or n for orbits)")
    e.add_argument("--class", dest="cls", choices=("transpositions", "all"), default="transpositions")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)

    h = sub.add_parser("prehomog", parents=[g], help="evaluate a single discriminant")
    h.add_argument("action", choices=("disc3", "disc4"))
    h.add_argument("--ring", default="fp:5")
    h.add_argument("--coeffs", required=True)
    h.set_defaults(func=cmd_prehomog)
    return parser


def _budgets(items) -> dict[str, int]:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--budget expects key=value, got {item!r}")
        try:
            out[key.strip()] = int(float(value))
        except ValueError:
            raise UsageError(f"budget {key} must be an integer") from None
    return out


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = verify.RunConfig(threads=args.threads, cache_dir=args.cache_dir, seed=args.seed,
                               budgets=_budgets(args.budget), skip_heavy=getattr(args, "skip_heavy", False),
                               use_cache=not args.no_cache)
        return args.func(args, cfg, out)
    except UsageError as exc:
        print(f"resolvent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, IndexError, localzeta.BudgetExceeded, cohomology.BudgetExceeded,
            braidhur.BudgetExceeded, nichols.BudgetExceeded, qseries.ExpandFurther) as exc:
        print(f"resolvent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
