"""Cross-module checks and the consolidated verdict report."""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import __version__, braidhur, cohomology, localzeta, nichols, prehomog, qseries
from .cache import ResultCache
from .localzeta import format_fraction

VERDICTS = ("match", "mismatch", "skipped", "within-CI")

# I_3 t-coefficients for b <= 12 as q-coefficient lists, by hand division.
IGUSA3_REFERENCE = ((1,), (1,), (2,), (2,), (3,), (2,), (3, 1), (2, 1), (3, 2), (2, 2), (3, 3), (2, 2), (3, 3, 1))

BUDGET_KEYS = {
    "exact_vectors": localzeta.DEFAULT_BUDGET,
    "orbit_tuples": braidhur.DEFAULT_BUDGET,
    "mc_samples": 10**8,
    "equivariance_cases": 1000,
}


@dataclass
class RunConfig:
    threads: int = 1
    cache_dir: Any = None
    seed: int = 0
    budgets: dict[str, int] = field(default_factory=dict)
    skip_heavy: bool = False
    use_cache: bool = True

    def __post_init__(self):
        for k, v in self.budgets.items():
            if k not in BUDGET_KEYS:
                raise ValueError(f"unknown budget {k!r}; known: {', '.join(sorted(BUDGET_KEYS))}")
            if int(v) <= 0:
                raise ValueError(f"budget {k} must be positive")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        self.cache = ResultCache(self.cache_dir, audit_seed=self.seed, enabled=self.use_cache)

    def budget(self, key: str) -> int:
        return int(self.budgets.get(key, BUDGET_KEYS[key]))


@dataclass
class Verdict:
    check_id: str
    parameters: dict
    expected: Any
    computed: Any
    verdict: str
    runtime: float = 0.0

    def to_json(self, include_runtime: bool = False) -> dict:
        out = {"check_id": self.check_id, "parameters": self.parameters,
               "expected": self.expected, "computed": self.computed, "verdict": self.verdict}
        if include_runtime:
            out["runtime"] = round(self.runtime, 3)
        return out


@dataclass
class VerdictReport:
    seed: int
    threads: int
    entries: list[Verdict] = field(default_factory=list)
    version: str = __version__

    @property
    def failed(self) -> bool:
        return any(v.verdict == "mismatch" for v in self.entries)

    def to_json(self, include_runtime: bool = False) -> dict:
        return {"version": self.version, "seed": self.seed, "threads": self.threads,
                "all_match": not self.failed,
                "checks": [v.to_json(include_runtime) for v in self.entries]}

    def dumps(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_json(include_runtime), indent=2, sort_keys=False)


def _verdict(ok: bool) -> str:
    return "match" if ok else "mismatch"


def _timed(fn: Callable[[], list[Verdict]]) -> list[Verdict]:
    t0 = time.perf_counter()
    out = fn()
    dt = (time.perf_counter() - t0) / max(len(out), 1)
    for v in out:
        v.runtime = dt
    return out


# ---------------------------------------------------------------- cached producers

def density(cfg: RunConfig, d: int, p: int, b: int, samples: int | None = None,
            seed: int | None = None) -> localzeta.DensityResult:
    if samples is None:
        params = {"d": d, "p": p, "b": b, "mode": "exact"}
        name = f"d{d}-p{p}-b{b}"
        compute = lambda: localzeta.density_exact(  # noqa: E731
            d, p, b, cfg.budget("exact_vectors"), cfg.threads).to_json()
    else:
        seed = cfg.seed if seed is None else seed
        params = {"d": d, "p": p, "b": b, "mode": "montecarlo", "samples": samples, "seed": seed,
                  "chunk": localzeta.MC_CHUNK}
        name = f"d{d}-p{p}-b{b}-mc{samples}-s{seed}"
        compute = lambda: localzeta.density_mc(d, p, b, samples, seed, cfg.threads).to_json()  # noqa: E731
    return localzeta.DensityResult.from_json(cfg.cache.fetch("density", name, params, compute))


def invariant_table(cfg: RunConfig, d: int, mode: str, b_max: int) -> cohomology.BigradedTable:
    params = {"d": d, "mode": mode, "b_max": b_max, "seed": cfg.seed}

    def compute():
        t = cohomology.invariant_ext_dims(d, mode, b_max=b_max, seed=cfg.seed,
                                          override_budget=True, rs=rewrite_system(cfg, d))
        return [[a, b, v, t.methods.get((a, b), "exact")] for (a, b), v in sorted(t.entries.items())]

    rows = cfg.cache.fetch("cohomology", f"d{d}-{mode}-b{b_max}", params, compute)
    return cohomology.BigradedTable({(a, b): v for a, b, v, _ in rows}, {(a, b): m for a, b, _, m in rows})


def rewrite_system(cfg: RunConfig, d: int) -> nichols.RewriteSystem:
    if cfg.cache.enabled:
        return nichols.load_or_complete(d, cfg.cache.root)
    return nichols.nichols_system(d)


def _cells(table: dict) -> dict[str, int]:
    return {f"{a},{b}": v for (a, b), v in sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0])) if v}


# ---------------------------------------------------------------- checks

def check_expansion(cfg: RunConfig) -> list[Verdict]:
    series = qseries.local_table(3, 12)
    ref = [qseries.LaurentQPoly({k: Fraction(c) for k, c in enumerate(cs) if c}) for cs in IGUSA3_REFERENCE]
    return [Verdict("igusa-expansion", {"d": 3, "b_max": 12}, [r.to_pairs() for r in ref],
                    [c.to_pairs() for c in series.coeffs], _verdict(series.coeffs == ref))]


def check_local_d3(cfg: RunConfig) -> list[Verdict]:
    out = []
    for p, b in ((5, 0), (5, 1), (5, 2), (7, 0), (7, 1)):
        r = density(cfg, 3, p, b)
        exp, got = localzeta.predicted_coefficient(3, p, b), r.coefficient
        out.append(Verdict("local-d3-exact", {"p": p, "b": b}, format_fraction(exp),
                           {"count": str(r.count), "total": str(r.total), "coefficient": format_fraction(got)},
                           _verdict(exp == got)))
    return out


def check_local_d4(cfg: RunConfig) -> list[Verdict]:
    r = density(cfg, 4, 5, 0)
    mu = localzeta.mu_G(4, 5)
    out = [Verdict("local-d4-exact", {"p": 5, "b": 0}, format_fraction(mu), format_fraction(r.density),
                   _verdict(r.density == mu * localzeta.predicted_coefficient(4, 5, 0)))]
    samples = cfg.budget("mc_samples")
    params = {"p": 5, "b": 1, "samples": samples, "seed": cfg.seed}
    pred = localzeta.predicted_density(4, 5, 1)
    if cfg.skip_heavy:
        out.append(Verdict("local-d4-mc", params, format_fraction(pred), None, "skipped"))
        return out
    m = density(cfg, 4, 5, 1, samples=samples)
    verdict, _ = localzeta.mc_verdict(m)
    out.append(Verdict("local-d4-mc", params, format_fraction(pred),
                       {"hits": str(m.hits), "estimate": format_fraction(Fraction(m.hits, m.samples)), "stderr": m.stderr},
                       verdict))
    return out


def check_global(cfg: RunConfig) -> list[Verdict]:
    out = []
    for d in (3, 4):
        out.append(Verdict("duality", {"d": d, "b_max": 30}, True, qseries.duality_holds(d, 30),
                           _verdict(qseries.duality_holds(d, 30))))
        ok = qseries.nonnegative_integral(qseries.global_table(d, 40)) and \
            qseries.nonnegative_integral(qseries.local_table(d, 40))
        out.append(Verdict("nonnegative-integral", {"d": d, "b_max": 40}, True, ok, _verdict(ok)))
    return out


def check_secondary(cfg: RunConfig) -> list[Verdict]:
    out = []
    for d, b_max in ((4, 220), (3, 60)):
        rep = qseries.secondary_term_check(d, b_max)
        out.append(Verdict("secondary-terms", {"d": d, "b_max": b_max, "period": rep.period}, True,
                           {"passed": rep.passed, "first_failure": rep.first_failure}, _verdict(rep.passed)))
    return out


def check_hilbert(cfg: RunConfig) -> list[Verdict]:
    out = []
    for d in (3, 4):
        dims = rewrite_system(cfg, d).dims
        got = dims.dims[: dims.top_degree + 1]
        exp = nichols.hilbert_target(d)
        ok = got == exp and dims.palindromic()
        out.append(Verdict("hilbert-groebner", {"d": d}, exp, got, _verdict(ok)))
    return out


def check_two_routes(cfg: RunConfig) -> list[Verdict]:
    out = []
    for d, plan in ((3, [(n, "exact") for n in range(1, 6)]),
                    (4, [(n, "exact") for n in range(1, 5)] + [(5, "modular"), (6, "modular")])):
        dims = rewrite_system(cfg, d).dims.dims
        for n, mode in plan:
            rep = nichols.quantum_symmetrizer_report(d, n, mode, seed=cfg.seed)
            out.append(Verdict("symmetrizer-vs-groebner", {"d": d, "n": n, "rank": rep.label},
                               dims[n], rep.rank, _verdict(dims[n] == rep.rank)))
    return out


def _coh_windows(cfg: RunConfig) -> list[tuple[int, int]]:
    return [(3, 8), (4, 6)] if cfg.skip_heavy else [(3, 10), (4, 7)]


def check_cohomology(cfg: RunConfig) -> list[Verdict]:
    out = []
    for d, b_max in _coh_windows(cfg):
        table = invariant_table(cfg, d, "geometric", b_max)
        pred = qseries.cohomology_table(d, b_max, b_max)
        got = {(a, b): table[(a, b)] for (a, b) in pred}
        out.append(Verdict("cohomology-vs-zeta", {"d": d, "b_max": b_max, "invariants": "geometric"},
                           _cells(pred), _cells(got), _verdict(got == pred)))
    if cfg.skip_heavy:
        out.append(Verdict("cohomology-vs-zeta", {"d": 3, "b_max": 10, "invariants": "geometric"},
                           None, None, "skipped"))
        out.append(Verdict("cohomology-vs-zeta", {"d": 4, "b_max": 7, "invariants": "geometric"},
                           None, None, "skipped"))
    return out


def check_bosonization(cfg: RunConfig) -> list[Verdict]:
    out = []
    for d, b_max in _coh_windows(cfg):
        geo = invariant_table(cfg, d, "geometric", b_max)
        std = invariant_table(cfg, d, "standard", b_max)
        rep = cohomology.bosonization_even_check(d, b_max, geometric=geo, standard=std)
        even = {k: v for k, v in geo.entries.items() if k[1] % 2 == 0}
        even_std = {k: std[k] for k in even}
        out.append(Verdict("bosonization-even", {"d": d, "b_max": b_max}, _cells(even), _cells(even_std),
                           _verdict(rep.passed)))
    return out


def check_braid(cfg: RunConfig) -> list[Verdict]:
    rep = braidhur.braid_orbits(3, 2, budget=cfg.budget("orbit_tuples"))
    got = {"orbits": rep.orbit_count, "sizes": {str(k): v for k, v in sorted(rep.orbit_sizes.items())}}
    exp = {"orbits": 5, "sizes": {"1": 3, "3": 2}}
    out = [Verdict("braid-orbits", {"d": 3, "n": 2}, exp, got, _verdict(got == exp))]
    ok = all(braidhur.braid_relations_hold(t) for t in braidhur._all_tuples(braidhur.class_elements(3), 3))
    out.append(Verdict("braid-relations", {"d": 3, "n": 3, "tuples": 27}, True, ok, _verdict(ok)))
    h0 = cohomology.shuffle_ext_small(3, 2)[(2, 2)]
    coinv = braidhur.coinvariant_dim(3, 2)
    out.append(Verdict("shuffle-h0-vs-coinvariants", {"d": 3, "n": 2}, {"orbits": 5, "coinvariants": 5},
                       {"ext_2_2": h0, "coinvariants": coinv}, _verdict(h0 == coinv == rep.orbit_count == 5)))
    return out


def check_properties(cfg: RunConfig) -> list[Verdict]:
    out = []
    cases = cfg.budget("equivariance_cases")
    for ring_spec in ("fp:5", "fpt:7:3"):
        ring = prehomog.CoeffRing.parse(ring_spec)
        for d in (3, 4):
            ok = equivariance_holds(ring, d, cases, cfg.seed)
            out.append(Verdict("discriminant-equivariance", {"d": d, "ring": ring_spec, "cases": cases},
                               True, ok, _verdict(ok)))
    for d in (3, 4):
        ok = nichols.braid_equation_holds(d)
        out.append(Verdict("braid-equation", {"d": d}, True, ok, _verdict(ok)))
    rs = rewrite_system(cfg, 3)
    ok = differential_squares_zero(rs, 6)
    out.append(Verdict("bar-d-squared", {"d": 3, "b_max": 6}, True, ok, _verdict(ok)))
    table = cohomology.ext_dims(3, 6, 6, seed=cfg.seed, rs=rs)
    bad = cohomology.euler_characteristic_check(table, 3, 6)
    out.append(Verdict("bar-euler-characteristic", {"d": 3, "b_max": 6}, [], bad, _verdict(not bad)))
    counts = {str(d): format_fraction(localzeta.etale_weighted_count(d)) for d in range(1, 9)}
    out.append(Verdict("etale-weighted-count", {"d_max": 8}, {str(d): "1" for d in range(1, 9)}, counts,
                       _verdict(all(v == "1" for v in counts.values()))))
    return out


def equivariance_holds(ring: prehomog.CoeffRing, d: int, cases: int, seed: int = 0) -> bool:
    """disc(g.v) == chi(g)^2 disc(v) on seeded random (g, v)."""
    rng = random.Random(f"equivariance-{d}-{ring}-{seed}")
    for _ in range(cases):
        if d == 3:
            g, v = prehomog.random_group3(ring, rng), prehomog.random_cubic(ring, rng)
        else:
            g, v = prehomog.random_group4(ring, rng), prehomog.random_pair(ring, rng)
        chi = g.character()
        if prehomog.disc(prehomog.act(g, v)) != ring.mul(ring.mul(chi, chi), prehomog.disc(v)):
            return False
    return True


def differential_squares_zero(rs: nichols.RewriteSystem, b_max: int) -> bool:
    for b in range(2, b_max + 1):
        for a in range(2, b + 1):
            first, _, _ = cohomology.bar_differential(rs, a - 1, b)
            second, _, _ = cohomology.bar_differential(rs, a, b)
            if not cohomology.compose_zero(first, second):
                return False
    return True


CHECKS: dict[str, Callable[[RunConfig], list[Verdict]]] = {
    "expansion": check_expansion,
    "local-d3": check_local_d3,
    "local-d4": check_local_d4,
    "global": check_global,
    "secondary": check_secondary,
    "hilbert": check_hilbert,
    "two-routes": check_two_routes,
    "cohomology": check_cohomology,
    "bosonization": check_bosonization,
    "braid": check_braid,
    "properties": check_properties,
}


def verify_all(cfg: RunConfig, only: list[str] | None = None) -> VerdictReport:
    """Run every check; a failing check is recorded as a mismatch rather than raised."""
    report = VerdictReport(cfg.seed, cfg.threads)
    for name, fn in CHECKS.items():
        if only and name not in only:
            continue
        try:
            report.entries.extend(_timed(lambda: fn(cfg)))
        except Exception as exc:  # collected, not fatal
            report.entries.append(Verdict(name, {}, None, f"{type(exc).__name__}: {exc}", "mismatch"))
    return report
