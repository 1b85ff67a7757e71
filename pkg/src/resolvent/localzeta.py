"""Brute-force and Monte-Carlo densities of discriminant valuations.

The valuation of the discriminant of v depends only on v mod t^(b+1), so the
density of val = b is a count over V_d(F_p[t]/t^(b+1)).  Dividing by the
volume of G_d(O) and rescaling by p^b turns it into the weighted orbit count
that the Igusa coefficient predicts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels, qseries

DIM = {3: 4, 4: 12}
DEFAULT_BUDGET = 10**9
MC_CHUNK = 1 << 16


class BudgetExceeded(RuntimeError):
    pass


class ExactMismatch(AssertionError):
    def __init__(self, b: int, expected, computed):
        super().__init__(f"exact mismatch at b={b}: expected {expected}, computed {computed}")
        self.b = b


def _check(d: int, p: int) -> None:
    if d not in DIM:
        raise ValueError("d must be 3 or 4")
    if p < 5 or p % 2 == 0 or p % 3 == 0 or any(p % k == 0 for k in range(5, math.isqrt(p) + 1)):
        raise ValueError(f"p={p} must be a prime coprime to 6")


def mu_G(d: int, p: int) -> Fraction:
    """(1)(2) for d=3 and (1)(2)^2(3) for d=4, where (a) = 1 - p^-a."""
    _check(d, p)
    f = lambda a: 1 - Fraction(1, p**a)  # noqa: E731
    return f(1) * f(2) if d == 3 else f(1) * f(2) ** 2 * f(3)


@dataclass
class DensityResult:
    d: int
    p: int
    b: int
    mode: str
    histogram: list[int]
    total: int
    count: int = 0
    samples: int = 0
    hits: int = 0
    seed: int | None = None

    @property
    def density(self):
        if self.mode == "exact":
            return Fraction(self.count, self.total)
        return self.hits / self.samples

    @property
    def stderr(self) -> float:
        if self.mode == "exact":
            return 0.0
        rho = self.hits / self.samples
        return math.sqrt(rho * (1 - rho) / self.samples)

    @property
    def coefficient(self):
        return to_coefficient(self)

    def to_json(self) -> dict:
        out = {"d": self.d, "p": self.p, "b": self.b, "mode": self.mode,
               "histogram": [int(x) for x in self.histogram], "total": self.total}
        if self.mode == "exact":
            out.update(count=self.count, density=format_fraction(self.density), coefficient=format_fraction(self.coefficient))
        else:
            est, err = self.coefficient
            out.update(samples=self.samples, hits=self.hits, seed=self.seed, estimate=self.density,
                       stderr=self.stderr, coefficient_estimate=est, coefficient_stderr=err)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DensityResult":
        return cls(data["d"], data["p"], data["b"], data["mode"], list(data["histogram"]), data["total"],
                   data.get("count", 0), data.get("samples", 0), data.get("hits", 0), data.get("seed"))


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def exact_histogram(d: int, p: int, n: int, budget: int = DEFAULT_BUDGET, threads: int = 1) -> list[int]:
    """Counts of val(disc) = 0..n-1 and >= n over V_d(F_p[t]/t^n)."""
    _check(d, p)
    total = p ** (DIM[d] * n)
    if total > budget:
        raise BudgetExceeded(f"{total} vectors exceed budget {budget}: use density_mc")
    if d == 3:
        hist = kernels.hist_d3(p, n, threads)
    elif n == 1:
        hist = kernels.hist_d4_field(p, threads)
    else:
        hist = kernels.hist_range(4, p, n, 0, total)
    return [int(x) for x in hist]


def density_exact(d: int, p: int, b: int, budget: int = DEFAULT_BUDGET, threads: int = 1) -> DensityResult:
    n = b + 1
    hist = exact_histogram(d, p, n, budget, threads)
    total = p ** (DIM[d] * n)
    return DensityResult(d, p, b, "exact", hist, total, count=hist[b])


def density_mc(d: int, p: int, b: int, samples: int, seed: int, threads: int = 1,
               chunk: int = MC_CHUNK) -> DensityResult:
    """Monte-Carlo estimate from uniform samples of V_d(F_p[t]/t^(b+1)).

    Chunk c uses the splitmix64 stream seeded by mix(mix(seed) + G*(c+1)),
    so results depend only on (seed, samples, chunk), not on threads.
    """
    _check(d, p)
    if samples < 10**4:
        raise ValueError("at least 10^4 samples are required")
    n = b + 1
    hist = [int(x) for x in kernels.mc_hist(d, p, n, samples, seed, chunk, threads)]
    return DensityResult(d, p, b, "montecarlo", hist, samples, samples=samples, hits=hist[b], seed=seed)


def to_coefficient(r: DensityResult):
    """p^b * density / mu_G; exact rational, or (estimate, standard error) for MC."""
    mu = mu_G(r.d, r.p)
    scale = Fraction(r.p**r.b) / mu
    if r.mode == "exact":
        return r.density * scale
    return float(r.density * scale), float(r.stderr * scale)


def predicted_coefficient(d: int, p: int, b: int) -> Fraction:
    return qseries.local_table(d, b).coeffs[b](p)


def predicted_density(d: int, p: int, b: int) -> Fraction:
    return predicted_coefficient(d, p, b) * mu_G(d, p) / p**b


@dataclass
class LocalVerdict:
    b: int
    mode: str
    expected: str
    computed: str
    verdict: str
    detail: dict = field(default_factory=dict)


def mc_verdict(r: DensityResult, sigmas: float = 4.0) -> tuple[str, float]:
    """'within-CI' when |estimate - predicted| <= 4 sigma.

    With zero hits the plug-in sigma vanishes; the tolerance then falls back
    to the rule-of-three bound 3/samples.
    """
    pred = float(predicted_density(r.d, r.p, r.b))
    est = r.density
    tol = sigmas * r.stderr if r.hits not in (0, r.samples) else 3.0 / r.samples
    return ("within-CI" if abs(est - pred) <= tol else "mismatch"), pred


def compare_local(d: int, p: int, b_exact_max: int, mc_plan: Sequence[tuple[int, int, int]] = (),
                  budget: int = DEFAULT_BUDGET, threads: int = 1) -> list[LocalVerdict]:
    """Exact comparisons for b <= b_exact_max and MC ones for each (b, samples, seed)."""
    out = []
    for b in range(b_exact_max + 1):
        r = density_exact(d, p, b, budget, threads)
        got = to_coefficient(r)
        exp = predicted_coefficient(d, p, b)
        if got != exp:
            raise ExactMismatch(b, exp, got)
        out.append(LocalVerdict(b, "exact", format_fraction(exp), format_fraction(got), "match", {"count": r.count, "total": r.total}))
    for b, samples, seed in mc_plan:
        r = density_mc(d, p, b, samples, seed, threads)
        verdict, pred = mc_verdict(r)
        out.append(LocalVerdict(b, "montecarlo", repr(pred), repr(r.density), verdict,
                                {"stderr": r.stderr, "samples": samples, "seed": seed}))
    return out


def etale_weighted_count(d: int) -> Fraction:
    """sum over partitions lambda of d of 1/z_lambda, z_lambda = prod e^m_e m_e!."""
    if d < 1:
        raise ValueError("d must be positive")
    total = Fraction(0)
    for part in _partitions(d, d):
        z = 1
        for e in set(part):
            m = part.count(e)
            z *= e**m * math.factorial(m)
        total += Fraction(1, z)
    return total


def _partitions(n: int, largest: int):
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def synthetic_event_estimate(p: int, samples: int, seed: int, chunk: int = MC_CHUNK) -> DensityResult:
    """Estimate P(first coordinate = 0) = 1/p from the same random stream as density_mc."""
    from ._fallback import _draws

    hits = 0
    for c in range(0, (samples + chunk - 1) // chunk):
        count = min(chunk, samples - c * chunk)
        s = kernels.chunk_seed(seed, c)
        counters = np.arange(count, dtype=np.int64) * 4
        hits += int((_draws(s, counters, p) == 0).sum())
    return DensityResult(3, p, 0, "montecarlo", [hits, samples - hits], samples, samples=samples,
                         hits=hits, seed=seed)
