"""Dyadic bookkeeping for a variance-to-almost-sure summation lemma.

Given weights ``phi_k >= 1`` with prefix sums ``Phi(n)``, the index map
``u -> n_u`` (largest ``n`` with ``Phi(n) < u``) pulls intervals ``(u, v]`` of
"variance time" back to index intervals ``sigma((u, v]) = (n_u, n_v]``.
Dyadic families of variance-time intervals then control every partial sum.
The exact combinatorics live here, next to two Monte Carlo checks: the
second-moment bound for normalised recurrence indicators and the exponential
decay of correlations.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import rng
from .maps import Engine, IntervalMap, MapKind, Orbit, orbit_points, random_bitstream, window_values
from .measure import InvariantMeasure, radius_for_mass, sample_points
from .schedule import MassSchedule


class Interval(NamedTuple):
    """The integer interval ``(lo, hi]``; empty when ``hi <= lo``."""

    lo: int
    hi: int

    @property
    def empty(self) -> bool:
        return self.hi <= self.lo

    def as_set(self) -> set[int]:
        return set(range(self.lo + 1, self.hi + 1))


class PhiAccumulator:
    """Prefix sums ``Phi(0) = 0, Phi(n) = phi_1 + ... + phi_n``."""

    def __init__(self, phi):
        phi = np.asarray(phi, dtype=float)
        if phi.ndim != 1 or phi.size == 0:
            raise ValueError("phi must be a non-empty sequence")
        if np.any(phi < 1.0):
            raise ValueError("every phi_k must be at least 1")
        self.phi = phi
        self.prefix = np.concatenate(([0.0], np.cumsum(phi)))
        self.prefix_list = self.prefix.tolist()
        self.total = self.prefix_list[-1]

    def __len__(self) -> int:
        return self.phi.size

    def Phi(self, n):
        return self.prefix[n]

    def interval_mass(self, interval: Interval) -> float:
        """``Phi`` of an index interval (0 when empty)."""
        if interval.empty:
            return 0.0
        return float(self.prefix[interval.hi] - self.prefix[interval.lo])


def n_u(acc: PhiAccumulator, u):
    """Largest ``n`` with ``Phi(n) < u`` (0 when ``Phi(1) >= u``).

    Requires ``u <= Phi(len)`` so that ``Phi(n_u + 1)`` exists.
    """
    if np.ndim(u) == 0:
        if u > acc.total:
            raise ValueError("u exceeds Phi of the whole sequence")
        return max(bisect.bisect_left(acc.prefix_list, u) - 1, 0)
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr > acc.total):
        raise ValueError("u exceeds Phi of the whole sequence")
    return np.maximum(np.searchsorted(acc.prefix, u_arr, side="left") - 1, 0)


def sigma(acc: PhiAccumulator, interval: tuple[int, int]) -> Interval:
    u, v = interval
    if not u < v:
        raise ValueError("need u < v")
    return Interval(n_u(acc, u), n_u(acc, v))


def sigma_additive(acc: PhiAccumulator, a: int, b: int, c: int) -> bool:
    """``sigma((a,b]) ∪ sigma((b,c]) = sigma((a,c])`` as a disjoint union.

    Integer intervals ``(lo, hi]`` with ``lo <= hi`` are compared through their
    endpoints: the pieces must abut and reproduce the endpoints of the whole.
    """
    left, right, whole = sigma(acc, (a, b)), sigma(acc, (b, c)), sigma(acc, (a, c))
    ordered = left.lo <= left.hi <= right.hi and right.lo <= right.hi
    return bool(ordered and left.hi == right.lo and left.lo == whole.lo and right.hi == whole.hi)


def dyadic_family(r: int, s: int) -> list[Interval]:
    """``J_{r,s}``: the intervals ``(i 2^s, (i+1) 2^s]`` for ``0 <= i < 2^(r-s)``."""
    if not 0 <= s <= r:
        raise ValueError("need 0 <= s <= r")
    w = 1 << s
    return [Interval(i * w, (i + 1) * w) for i in range(1 << (r - s))]


def dyadic_cover(v: int, r: int) -> list[Interval]:
    """Split ``(0, v]`` into aligned dyadic blocks, largest first (binary digits of v)."""
    if v < 1 or v > 1 << r:
        raise ValueError(f"need 1 <= v <= 2^{r}")
    out = []
    start = 0
    for s in range(r, -1, -1):
        if v & (1 << s):
            out.append(Interval(start, start + (1 << s)))
            start += 1 << s
    return out


@dataclass
class PartitionReport:
    r: int
    target: float
    sublevel_sums: list[float]
    total: float
    ok: bool


def partition_mass_check(acc: PhiAccumulator, r: int) -> PartitionReport:
    """Check ``sum_{I in J_{r,s}} Phi(sigma(I)) = Phi(n_{2^r}) < 2^r`` for every ``s``.

    Also checks that the total over all sublevels stays below ``(r + 1) 2^r``.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    top = 1 << r
    target = float(acc.prefix[n_u(acc, top)])
    sums = []
    for s in range(r + 1):
        ends = n_u(acc, np.arange(0, top + 1, 1 << s))
        ends[0] = 0
        sums.append(math.fsum(np.diff(acc.prefix[ends])))
    total = math.fsum(sums)
    ok = all(x == target for x in sums) and target < top and total < (r + 1) * top
    return PartitionReport(r, target, sums, total, ok)


def random_phi(generator: np.random.Generator, length: int, low: float = 1.0, high: float = 4.0) -> np.ndarray:
    """Random weights on the dyadic grid ``2**-20``, so every prefix sum is exact."""
    steps = int(round((high - low) * 2**20))
    return low + generator.integers(0, steps + 1, size=length) * 2.0**-20


@dataclass
class LemmaReport:
    name: str
    passed: bool
    detail: str


def check_sequence(acc: PhiAccumulator, generator: np.random.Generator, pairs: int = 200) -> list[LemmaReport]:
    """Exact property checks of the machinery on one weight sequence."""
    out = []
    top_u = int(math.floor(acc.prefix[-1]))
    us = np.arange(1, top_u + 1)
    nu = n_u(acc, us)
    sandwich = bool(np.all(acc.prefix[nu] < us) and np.all(us <= acc.prefix[nu + 1]))
    out.append(LemmaReport("n_u sandwich", sandwich, f"u <= {top_u}"))

    ok = True
    for _ in range(pairs):
        a, b, c = (int(t) for t in np.sort(generator.choice(top_u + 1, size=3, replace=False)))
        ok &= sigma_additive(acc, a, b, c)
    out.append(LemmaReport("sigma additivity", bool(ok), f"{pairs} adjacent pairs"))

    r_max = int(math.floor(math.log2(top_u))) if top_u >= 1 else 0
    reports = [partition_mass_check(acc, r) for r in range(min(r_max, 16) + 1)]
    out.append(LemmaReport("partition sums", all(p.ok for p in reports), f"r <= {min(r_max, 16)}"))
    return out


def check_dyadic_covers(v_max: int = 1 << 10) -> LemmaReport:
    """Exhaustive cover check for ``1 <= v <= v_max``."""
    for v in range(1, v_max + 1):
        r = max(1, v.bit_length())
        cover = dyadic_cover(v, r)
        if len(cover) > int(math.floor(math.log2(v))) + 1:
            return LemmaReport("dyadic cover", False, f"too many blocks for v={v}")
        for iv in cover:
            width = iv.hi - iv.lo
            if width & (width - 1) or iv.lo % width or iv.hi > 1 << r:
                return LemmaReport("dyadic cover", False, f"block {iv} of v={v} is not in J_r")
        covered = set()
        for iv in cover:
            if covered & iv.as_set():
                return LemmaReport("dyadic cover", False, f"overlap for v={v}")
            covered |= iv.as_set()
        if covered != set(range(1, v + 1)):
            return LemmaReport("dyadic cover", False, f"wrong union for v={v}")
    return LemmaReport("dyadic cover", True, f"all v <= {v_max}")


def machinery_suite(seed: int, sequences: int = 200, max_length: int = 1 << 16) -> list[LemmaReport]:
    """Run the exact checks on ``sequences`` random weight sequences."""
    reports = [check_dyadic_covers()]
    for i in range(sequences):
        g = rng.stream(seed, i)
        length = int(g.integers(1, max_length + 1))
        acc = PhiAccumulator(random_phi(g, length))
        for rep in check_sequence(acc, g):
            if not rep.passed:
                reports.append(LemmaReport(rep.name, False, f"sequence {i}: {rep.detail}"))
    names = {"n_u sandwich", "sigma additivity", "partition sums"}
    failed = {r.name for r in reports if not r.passed}
    for name in sorted(names - failed):
        reports.append(LemmaReport(name, True, f"{sequences} sequences"))
    return reports


# -- second-moment bound -----------------------------------------------------


@dataclass
class VarianceCheck:
    window: tuple[int, int]
    lhs: float
    rhs: float
    ratio: float
    rejected: bool = False


def recurrence_indicators(
    tmap: IntervalMap,
    mu: InvariantMeasure,
    schedule: MassSchedule,
    n: int,
    points: int,
    seed: int,
    engine: Engine = Engine.EXACT_BITSTREAM,
) -> np.ndarray:
    """Boolean matrix ``[point, k-1]`` of ``|T^k x - x| < r_k(x)`` for ``k <= n``."""

    masses = schedule.masses(n)
    full = masses >= 1.0
    out = np.empty((points, n), dtype=bool)
    starts = None if engine is Engine.EXACT_BITSTREAM else sample_points(mu, points, seed)
    for i in range(points):
        if engine is Engine.EXACT_BITSTREAM:
            if tmap.kind is not MapKind.DOUBLING:
                raise ValueError("exact engine requires the doubling map")
            words = random_bitstream(seed, i, n)
            x0 = float(window_values(words, 0, 1)[0])
            pts = window_values(words, 1, n + 1)
        else:
            x0 = float(starts[i])
            pts = orbit_points(tmap, Orbit(n, x0=x0))
        radii = np.full(n, np.inf)
        if not np.all(full):
            radii[~full] = radius_for_mass(mu, np.full(int((~full).sum()), x0), masses[~full])
        out[i] = np.abs(pts - x0) < radii
    return out


def _log_guard(k: np.ndarray) -> np.ndarray:
    # log k vanishes at k = 1; the bound only needs a positive slowly growing weight
    return np.maximum(np.log(k), 1.0)


def variance_bound_check(hits: np.ndarray, window: tuple[int, int]) -> VarianceCheck:
    """Compare ``∫ (sum (1_E_k / mu(E_k) - 1))^2`` with the product bound.

    ``hits`` is the indicator matrix from :func:`recurrence_indicators`.  The
    same ensemble estimates ``mu(E_k)`` and the second moment.  The returned
    ratio is ``lhs / rhs`` with ``rhs`` lacking its unknown constant.
    """
    m, n = window
    if not 0 <= m < n <= hits.shape[1]:
        raise ValueError("window outside the indicator matrix")
    block = hits[:, m:n]
    p = block.mean(axis=0)
    k = np.arange(m + 1, n + 1, dtype=float)
    if np.any(p == 0):
        return VarianceCheck(window, math.nan, math.nan, math.nan, rejected=True)
    centred = (block / p - 1.0).sum(axis=1)
    lhs = float(np.mean(centred**2))
    rhs = float(np.sum(1.0 / (k**3 * p)) * np.sum(_log_guard(k) / p))
    return VarianceCheck(window, lhs, rhs, lhs / rhs)


# -- decay of correlations -----------------------------------------------------


@dataclass(frozen=True)
class Observable:
    """A function on [0, 1] with a known BV norm ``sup |g| + var g``."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    sup: float
    variation: float

    @property
    def bv_norm(self) -> float:
        return self.sup + self.variation

    def __call__(self, x):
        return self.func(x)


def observable_from_spec(spec: str) -> Observable:
    """``centered-identity`` (x - 1/2), ``identity`` or ``indicator:a:b``."""
    parts = spec.split(":")
    if parts[0] == "centered-identity":
        return Observable(spec, lambda x: x - 0.5, 0.5, 1.0)
    if parts[0] == "identity":
        return Observable(spec, lambda x: x, 1.0, 1.0)
    if parts[0] == "indicator" and len(parts) == 3:
        a, b = float(parts[1]), float(parts[2])
        var = float(a > 0.0) + float(b < 1.0)
        return Observable(spec, lambda x: ((x >= a) & (x < b)).astype(float), 1.0, var)
    raise ValueError(f"unknown observable {spec!r}")


def total_variation(func, grid: int = 100_001) -> float:
    """Total variation of ``func`` sampled on a uniform grid."""
    x = np.linspace(0.0, 1.0, grid)
    return float(np.abs(np.diff(func(x))).sum())


@dataclass
class CorrelationEstimate:
    lags: np.ndarray
    estimate: np.ndarray
    stderr: np.ndarray
    c: float
    tau: float
    c_stderr: float
    tau_stderr: float
    fitted_lags: np.ndarray


def correlation_decay(
    tmap: IntervalMap,
    mu: InvariantMeasure,
    f: Observable,
    g: Observable,
    max_lag: int,
    samples: int,
    seed: int,
    chunk: int = 1 << 20,
) -> CorrelationEstimate:
    """Monte Carlo estimate of ``|∫ f∘T^n g dmu - ∫ f dmu ∫ g dmu|`` for ``n <= max_lag``.

    Samples are drawn from ``mu`` by inverse CDF in chunks, chunk ``c`` using
    stream ``(seed, c)``.  ``log C(n)`` is fitted linearly in ``n`` by weighted
    least squares, using only lags whose estimate exceeds three standard
    errors (weights from the delta method).
    """
    lags = np.arange(max_lag + 1)
    s_fg = np.zeros(lags.size)
    s_fg2 = np.zeros(lags.size)
    s_f = np.zeros(lags.size)
    s_g = 0.0
    done = 0
    c = 0
    while done < samples:
        size = min(chunk, samples - done)
        x = mu.quantile(rng.uniforms(seed, c, size))
        gx = g(x)
        s_g += gx.sum()
        y = x
        for n in lags:
            if n:
                y = tmap(y)
            fy = f(y)
            prod = fy * gx
            s_f[n] += fy.sum()
            s_fg[n] += prod.sum()
            s_fg2[n] += (prod * prod).sum()
        done += size
        c += 1
    N = float(samples)
    mean_fg = s_fg / N
    cov = mean_fg - (s_f / N) * (s_g / N)
    var_prod = np.maximum(s_fg2 / N - mean_fg**2, 0.0)
    stderr = np.sqrt(var_prod / N)
    est = np.abs(cov)
    use = est > 3.0 * stderr
    c_fit = tau_fit = c_se = tau_se = math.nan
    if use.sum() >= 2:
        n_fit = lags[use].astype(float)
        y_fit = np.log(est[use])
        w = (est[use] / stderr[use]) ** 2
        A = np.column_stack([np.ones_like(n_fit), n_fit])
        AtW = A.T * w
        cov_beta = np.linalg.inv(AtW @ A)
        beta = cov_beta @ (AtW @ y_fit)
        c_fit, tau_fit = math.exp(beta[0]), -beta[1]
        c_se = c_fit * math.sqrt(cov_beta[0, 0])
        tau_se = math.sqrt(cov_beta[1, 1])
    return CorrelationEstimate(lags, est, stderr, c_fit, tau_fit, c_se, tau_se, lags[use])
