"""From Cesàro averages of ``x_k / a_k`` to the ratio ``sum x_k / sum a_k``.

If ``a_k`` decreases, diverges in sum and is regular (``a_k / a_[rho k]``
close to 1 for ``rho`` close to 1), then ``(1/n) sum x_k/a_k -> 1`` forces
``sum x_k / sum a_k -> 1``.  The functions here evaluate both sides exactly
(correctly rounded sums) and turn the block argument behind the implication
into an explicit finite-``n`` envelope that can be checked.

Sequences are written in a small grammar: a product of factors separated by
``*``, each factor one of

``power:s``      k^-s
``log:p``        (log k)^p          (0 at k = 1 when p > 0)
``geometric:q``  q^k
``alternating``  1 + (-1)^k
``const:c``      c
``shift:K:s``    (k + K)^-s
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .schedule import DEFAULT_RHOS, custom_schedule, regularity_ratio, regularity_trend_ok

ABEL_RHOS = (1.1, 1.05, 1.01)


def _factor(token: str) -> Callable[[np.ndarray], np.ndarray]:
    name, *args = token.strip().split(":")
    vals = [float(a) for a in args]
    if name == "power" and len(vals) == 1:
        return lambda k: k ** -vals[0]
    if name == "log" and len(vals) == 1:
        return lambda k: np.log(k) ** vals[0]
    if name == "geometric" and len(vals) == 1:
        return lambda k: vals[0] ** k
    if name == "alternating" and not vals:
        return lambda k: 1.0 + np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
    if name == "const" and len(vals) == 1:
        return lambda k: np.full(k.shape, vals[0])
    if name == "shift" and len(vals) == 2:
        return lambda k: (k + vals[0]) ** -vals[1]
    raise ValueError(f"unknown sequence factor {token!r}")


def parse_sequence(spec: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile a sequence spec such as ``"alternating*power:1"``."""
    factors = [_factor(t) for t in spec.split("*")]

    def seq(k):
        k = np.asarray(k, dtype=float)
        out = np.ones(k.shape)
        for f in factors:
            out = out * f(k)
        return out

    return seq


@dataclass(frozen=True)
class SequencePair:
    a: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    x: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    name: str = ""

    @classmethod
    def from_spec(cls, a_spec: str, x_spec: str) -> "SequencePair":
        return cls(parse_sequence(a_spec), parse_sequence(x_spec), f"a={a_spec}; x={x_spec}")

    @classmethod
    def from_arrays(cls, a, x, name: str = "arrays") -> "SequencePair":
        a = np.asarray(a, dtype=float)
        x = np.asarray(x, dtype=float)
        return cls(lambda k: a[np.asarray(k, dtype=np.int64) - 1],
                   lambda k: x[np.asarray(k, dtype=np.int64) - 1], name)

    def arrays(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        k = np.arange(1, n + 1, dtype=float)
        return self.a(k), self.x(k)


def cesaro_ratio(pair: SequencePair, n: int) -> float:
    """``(1/n) sum_{k<=n} x_k / a_k``."""
    a, x = pair.arrays(n)
    if np.any(a == 0):
        raise ValueError("a_k must be non-zero")
    return math.fsum((x / a).tolist()) / n


def sum_ratio(pair: SequencePair, n: int) -> float:
    """``sum_{k<=n} x_k / sum_{k<=n} a_k``."""
    a, x = pair.arrays(n)
    denom = math.fsum(a.tolist())
    if not denom > 0:
        raise ValueError("sum of a_k must be positive")
    return math.fsum(x.tolist()) / denom


@dataclass
class RhoEnvelope:
    rho: float
    c_rho: float
    lower: float
    upper: float
    bound: float
    asymptotic: float


@dataclass
class TransferReport:
    applicable: bool
    premise_met: bool
    passed: bool | None
    reason: str
    n: int
    n1: int
    epsilon: float
    sum_ratio: float
    bound: float
    envelopes: list[RhoEnvelope]
    regularity: dict[float, float]

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "premise_met": self.premise_met,
            "passed": self.passed,
            "reason": self.reason,
            "n": self.n,
            "n1": self.n1,
            "epsilon": self.epsilon,
            "sum_ratio": self.sum_ratio,
            "bound": self.bound,
            "envelopes": [e.__dict__ for e in self.envelopes],
            "regularity": {str(k): v for k, v in self.regularity.items()},
        }


def _block_ends(n1: int, n: int, rho: float) -> np.ndarray:
    ends = [n1]
    j = 1
    while True:
        nxt = int(math.floor(rho**j * n1))
        j += 1
        if nxt >= n:
            break
        if nxt > ends[-1]:
            ends.append(nxt)
    ends.append(n)
    return np.array(ends, dtype=np.int64)


def _envelope(a, head_x: float, total_a: float, n1: int, n: int, eps: float, rho: float) -> RhoEnvelope:
    """Bounds on ``sum x / sum a`` from block sums over ``n_k = [rho^(k-1) n1]``.

    On a block ``(n_k, n_k+1]`` of length ``L`` the Cesàro premise gives
    ``sum x_l/a_l`` within ``L(1 ± eps) ± 2 eps n_k``; monotonicity of ``a``
    turns this into ``c (1 + eps + 2 eps n_k / L)`` times the block sum of
    ``a`` from above and ``(1 - eps - 2 eps n_k / L) / c`` from below, with
    ``c`` the largest ``a_{n_k} / a_{n_k+1}`` over the blocks.  For long
    blocks ``2 eps n_k / L <= 4 eps / (rho - 1)``.
    """
    ends = _block_ends(n1, n, rho)
    starts, stops = ends[:-1], ends[1:]
    c = float(np.max(a[starts - 1] / a[stops - 1]))
    L = (stops - starts).astype(float)
    a_list = a.tolist()
    block_a = np.array([math.fsum(a_list[s:t]) for s, t in zip(starts, stops)])
    spread = eps + 2.0 * eps * starts / L
    up = c * (1.0 + spread) * block_a
    low = np.maximum(1.0 - spread, 0.0) / c * block_a
    upper = (head_x + math.fsum(up)) / total_a
    lower = (head_x + math.fsum(low)) / total_a
    bound = max(upper - 1.0, 1.0 - lower)
    asymptotic = rho * c * (1.0 + eps + 4.0 * eps / (rho - 1.0))
    return RhoEnvelope(rho, c, lower, upper, bound, asymptotic)


def lemma_transfer_check(
    pair: SequencePair,
    n: int,
    delta: float | None = None,
    n1: int | None = None,
    rhos=ABEL_RHOS,
    divergence_tol: float = 1e-4,
) -> TransferReport:
    """Check that the sum ratio at ``n`` respects the envelope implied by the premise.

    The premise is ``|cesaro_ratio(m) - 1| <= delta`` for every ``n1 <= m <= n``
    (``n1`` defaults to ``n // 2``; ``delta`` defaults to the observed maximum).
    Hypotheses on ``a`` are gated first: positivity, monotone decrease, a
    divergence proxy (the upper half must carry more than ``divergence_tol``
    of the total sum) and the regularity trend of ``a_k / a_[rho k]``.
    """
    n1 = n // 2 if n1 is None else n1
    if not 1 <= n1 < n:
        raise ValueError("need 1 <= n1 < n")
    a, x = pair.arrays(n)
    total_a = math.fsum(a.tolist())
    ratio = math.fsum(x.tolist()) / total_a if total_a > 0 else math.nan

    def not_applicable(reason, table=None):
        return TransferReport(False, False, None, reason, n, n1, math.nan, ratio, math.nan, [], table or {})

    if np.any(a <= 0) or np.any(x < 0):
        return not_applicable("a_k must be positive and x_k non-negative")
    if np.any(np.diff(a) > 0):
        return not_applicable("a_k is not decreasing")
    if math.fsum(a[n // 2:].tolist()) <= divergence_tol * total_a:
        return not_applicable("partial sums of a_k have saturated (summable)")
    sched = custom_schedule(a, clip=False)
    table = {}
    for rho in DEFAULT_RHOS:
        k_hi = int(n / rho)
        if k_hi >= n1:
            table[rho] = regularity_ratio(sched, rho, n1, k_hi)
    if len(table) < 2 or not regularity_trend_ok(table):
        return not_applicable("a_k fails the regularity scan", table)

    cesaro = np.cumsum(x / a) / np.arange(1, n + 1)
    observed = float(np.max(np.abs(cesaro[n1 - 1:] - 1.0)))
    eps = observed if delta is None else float(delta)
    if observed > eps:
        return TransferReport(True, False, None, "Cesàro premise not met", n, n1, eps,
                              ratio, math.nan, [], table)
    head_x = math.fsum(x[:n1].tolist())
    envs = [_envelope(a, head_x, total_a, n1, n, eps, rho) for rho in rhos]
    best = min(e.bound for e in envs)
    # relative slack for the rounding in the correctly rounded sums
    passed = abs(ratio - 1.0) <= best + 1e-12
    return TransferReport(True, True, bool(passed), "checked", n, n1, eps, ratio, best, envs, table)


def random_compliant_pair(generator: np.random.Generator, n: int) -> SequencePair:
    """A decreasing regular divergent ``a`` with ``x = a (1 + noise)``.

    ``a_k = (k + K)^-q log(k + K)^p`` with ``K >= e^(p/q)`` so the sequence
    decreases; the noise is iid uniform or alternating with random amplitude.
    """
    q = generator.uniform(0.3, 1.0)
    p = generator.uniform(0.0, 3.0)
    K = math.ceil(math.exp(p / q)) + int(generator.integers(0, 50))
    k = np.arange(1, n + 1, dtype=float)
    a = (k + K) ** -q * np.log(k + K) ** p
    h = generator.uniform(0.0, 1.0)
    if generator.random() < 0.5:
        noise = generator.uniform(-h, h, size=n)
    else:
        noise = h * np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
    return SequencePair.from_arrays(a, a * (1.0 + noise), f"q={q:.3f} p={p:.3f} K={K} h={h:.3f}")
