"""Interval maps of [0, 1] and their orbits.

Two orbit engines are provided.  ``FLOAT64`` iterates the map in double
precision; for chaotic maps the computed orbit is a noisy pseudo-orbit, which
is the usual working assumption for statistical experiments.  ``EXACT_BITSTREAM``
is reserved for the doubling map: a point is a finite string of random bits
and ``T^k x`` is read off as the 64-bit window starting at bit ``k``, so the
orbit is exact for as many steps as there are bits.

Boundary conventions: at an interior branch boundary the right branch is
used, and ``T(1)`` is the limit of the last branch.  The Gauss map follows
its usual formula ``1/x - floor(1/x)`` with ``T(0) = 0``, which sends every
``1/n`` (and ``x = 1``) to 0.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import numpy as np
from scipy.special import digamma

from . import rng

CHUNK = 1 << 16


class MapKind(str, enum.Enum):
    DOUBLING = "doubling"
    TENT = "tent"
    SKEWED = "skewed"
    GAUSS = "gauss"
    PIECEWISE_LINEAR = "piecewise-linear"


class Engine(str, enum.Enum):
    FLOAT64 = "float64"
    EXACT_BITSTREAM = "exact-bitstream"


class ConfigurationError(ValueError):
    """Raised for inconsistent map, engine or orbit settings."""


@dataclass(frozen=True)
class Branch:
    """One strictly monotone branch ``[lo, hi] -> [image_lo, image_hi]``."""

    lo: float
    hi: float
    image_lo: float
    image_hi: float
    increasing: bool
    inverse: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)


def _linear_inverse(lo, hi, ylo, yhi, increasing):
    y_at_lo = ylo if increasing else yhi
    y_at_hi = yhi if increasing else ylo

    def inverse(y):
        y = np.asarray(y, dtype=float)
        return lo + (y - y_at_lo) * (hi - lo) / (y_at_hi - y_at_lo)

    return inverse


@dataclass(frozen=True)
class IntervalMap:
    """A piecewise monotone self-map of [0, 1].

    ``knots`` and ``values`` are only used by the piecewise-linear kind:
    segment ``i`` maps ``[knots[i], knots[i+1]]`` affinely onto
    ``values[i][0] -> values[i][1]``.
    """

    kind: MapKind
    p: float = 0.5
    knots: tuple[float, ...] = ()
    values: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", MapKind(self.kind))
        if self.kind is MapKind.SKEWED and not 0.0 < self.p < 1.0:
            raise ConfigurationError(f"skewed map needs 0 < p < 1, got {self.p}")
        if self.kind is MapKind.PIECEWISE_LINEAR:
            self._validate_piecewise()

    def _validate_piecewise(self):
        knots, values = self.knots, self.values
        if len(knots) < 2 or len(values) != len(knots) - 1:
            raise ConfigurationError("need m+1 knots and m segment values")
        if knots[0] != 0.0 or knots[-1] != 1.0:
            raise ConfigurationError("knots must start at 0 and end at 1")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ConfigurationError("knots must be strictly increasing")
        for y0, y1 in values:
            if y0 == y1:
                raise ConfigurationError("every segment must be strictly monotone")
            if not (0.0 <= y0 <= 1.0 and 0.0 <= y1 <= 1.0):
                raise ConfigurationError("segment values must lie in [0, 1]")

    # -- description -------------------------------------------------------

    @property
    def name(self) -> str:
        if self.kind is MapKind.SKEWED:
            return f"skewed(p={self.p!r})"
        return self.kind.value

    def spec(self) -> dict:
        out = {"kind": self.kind.value}
        if self.kind is MapKind.SKEWED:
            out["p"] = self.p
        if self.kind is MapKind.PIECEWISE_LINEAR:
            out["knots"] = list(self.knots)
            out["values"] = [list(v) for v in self.values]
        return out

    @property
    def branch_count(self) -> int | None:
        """Number of branches, ``None`` for the Gauss map."""
        if self.kind is MapKind.GAUSS:
            return None
        if self.kind is MapKind.PIECEWISE_LINEAR:
            return len(self.values)
        return 2

    def branches(self, limit: int | None = None) -> list[Branch]:
        """The branches in left-to-right order.

        For the Gauss map ``limit`` is required and the first ``limit``
        branches counted from the right, ``(1/(n+1), 1/n]`` for
        ``n = 1..limit``, are returned.
        """
        k = self.kind
        if k is MapKind.DOUBLING:
            return self._linear_branches((0.0, 0.5, 1.0), ((0.0, 1.0), (0.0, 1.0)))
        if k is MapKind.TENT:
            return self._linear_branches((0.0, 0.5, 1.0), ((0.0, 1.0), (1.0, 0.0)))
        if k is MapKind.SKEWED:
            return self._linear_branches((0.0, self.p, 1.0), ((0.0, 1.0), (0.0, 1.0)))
        if k is MapKind.PIECEWISE_LINEAR:
            return self._linear_branches(self.knots, self.values)
        if limit is None:
            raise ConfigurationError("the Gauss map has infinitely many branches; pass limit")
        out = []
        for n in range(limit, 0, -1):
            out.append(
                Branch(1.0 / (n + 1), 1.0 / n, 0.0, 1.0, False,
                       (lambda y, n=n: 1.0 / (n + np.asarray(y, dtype=float))))
            )
        return out

    @staticmethod
    def _linear_branches(knots, values):
        out = []
        for lo, hi, (y0, y1) in zip(knots, knots[1:], values):
            inc = y1 > y0
            ylo, yhi = min(y0, y1), max(y0, y1)
            out.append(Branch(lo, hi, ylo, yhi, inc, _linear_inverse(lo, hi, ylo, yhi, inc)))
        return out

    def gauss_tail_preimage(self, first_branch: int, y_edges: np.ndarray) -> np.ndarray:
        """Lebesgue measure of ``{x < 1/first_branch : T(x) in [y_j, y_j+1]}``.

        Sums the preimage lengths ``1/(n+a) - 1/(n+b)`` over all branches
        ``n >= first_branch`` in closed form through the digamma function.
        """
        if self.kind is not MapKind.GAUSS:
            raise ConfigurationError("tail preimages are only defined for the Gauss map")
        psi = digamma(first_branch + np.asarray(y_edges, dtype=float))
        return np.diff(psi)

    def min_slope(self) -> float:
        """Infimum of ``|T'|`` over the branches (Gauss: 1, approached at x=1)."""
        if self.kind is MapKind.GAUSS:
            return 1.0
        return min(
            (b.image_hi - b.image_lo) / (b.hi - b.lo) for b in self.branches()
        )

    def is_expanding(self) -> bool:
        # the Gauss map has |T'| = 1/x^2 > 1 except at the single point x = 1
        return self.kind is MapKind.GAUSS or self.min_slope() > 1.0

    # -- evaluation --------------------------------------------------------

    def __call__(self, x):
        return evaluate(self, x)

    def step_function(self) -> Callable[[float], float]:
        """A fast scalar implementation of ``T`` for orbit loops."""
        k = self.kind
        if k is MapKind.DOUBLING:
            return lambda x: 2.0 * x if x < 0.5 else 2.0 * x - 1.0
        if k is MapKind.TENT:
            return lambda x: 2.0 * x if x < 0.5 else 2.0 * (1.0 - x)
        if k is MapKind.SKEWED:
            p = self.p
            q = 1.0 - p
            return lambda x: x / p if x < p else (x - p) / q
        if k is MapKind.GAUSS:
            floor = math.floor

            def gauss(x):
                if x == 0.0:
                    return 0.0
                y = 1.0 / x
                return y - floor(y)

            return gauss
        return lambda x: float(evaluate(self, x))


def doubling() -> IntervalMap:
    return IntervalMap(MapKind.DOUBLING)


def tent() -> IntervalMap:
    return IntervalMap(MapKind.TENT)


def skewed(p: float) -> IntervalMap:
    return IntervalMap(MapKind.SKEWED, p=float(p))


def gauss() -> IntervalMap:
    return IntervalMap(MapKind.GAUSS)


def piecewise_linear(knots, values) -> IntervalMap:
    return IntervalMap(
        MapKind.PIECEWISE_LINEAR,
        knots=tuple(float(t) for t in knots),
        values=tuple((float(a), float(b)) for a, b in values),
    )


def map_from_spec(spec: dict) -> IntervalMap:
    """Build a map from a config fragment such as ``{"kind": "skewed", "p": 0.25}``."""
    try:
        kind = MapKind(spec["kind"])
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"unknown map spec {spec!r}") from exc
    if kind is MapKind.SKEWED:
        return skewed(spec.get("p", 0.5))
    if kind is MapKind.PIECEWISE_LINEAR:
        return piecewise_linear(spec["knots"], spec["values"])
    return IntervalMap(kind)


def evaluate(tmap: IntervalMap, x):
    """``T(x)`` for scalars or arrays of points in [0, 1]."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    k = tmap.kind
    if k is MapKind.DOUBLING:
        y = np.where(x < 0.5, 2.0 * x, 2.0 * x - 1.0)
    elif k is MapKind.TENT:
        y = np.where(x < 0.5, 2.0 * x, 2.0 * (1.0 - x))
    elif k is MapKind.SKEWED:
        p = tmap.p
        y = np.where(x < p, x / p, (x - p) / (1.0 - p))
    elif k is MapKind.GAUSS:
        with np.errstate(divide="ignore"):
            inv = np.where(x > 0.0, 1.0 / np.where(x > 0.0, x, 1.0), 0.0)
        y = np.where(x > 0.0, inv - np.floor(inv), 0.0)
    else:
        knots = np.asarray(tmap.knots)
        vals = np.asarray(tmap.values)
        i = np.clip(np.searchsorted(knots, x, side="right") - 1, 0, len(vals) - 1)
        t = (x - knots[i]) / (knots[i + 1] - knots[i])
        y = vals[i, 0] + t * (vals[i, 1] - vals[i, 0])
    y = np.clip(y, 0.0, 1.0)
    return float(y) if scalar else y


# -- orbits -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Orbit:
    """What to iterate: a start point, an engine and a length.

    For the exact engine the start point is given by ``words``, a uint64
    array holding its binary expansion most-significant bit first; it must
    hold at least ``n + 64`` bits.
    """

    n: int
    x0: float | None = None
    engine: Engine = Engine.FLOAT64
    words: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "engine", Engine(self.engine))
        if self.n < 0:
            raise ConfigurationError("orbit length must be non-negative")
        if self.engine is Engine.FLOAT64:
            if self.x0 is None or not 0.0 <= self.x0 <= 1.0:
                raise ConfigurationError(f"float orbit needs x0 in [0, 1], got {self.x0}")
        else:
            if self.words is None:
                raise ConfigurationError("exact orbit needs a bit stream")
            if 64 * len(self.words) < self.n + 64:
                raise ConfigurationError("bit stream shorter than n + 64 bits")

    @property
    def start(self) -> float:
        """The starting point as a double."""
        if self.engine is Engine.FLOAT64:
            return float(self.x0)
        return float(window_values(self.words, 0, 1)[0])


def words_for_bits(nbits: int) -> int:
    # one spare word so every 64-bit window has a successor word to read
    return nbits // 64 + 2


def random_bitstream(seed: int, index: int, n: int) -> np.ndarray:
    """Packed random bits for an exact orbit of length ``n``."""
    return rng.raw_words(seed, index, words_for_bits(n + 64))


def bits_to_words(bits) -> np.ndarray:
    """Pack a 0/1 sequence (MSB first) into uint64 words, zero padded."""
    bits = np.asarray(bits, dtype=np.uint8)
    nwords = words_for_bits(len(bits))
    padded = np.zeros(64 * nwords, dtype=np.uint8)
    padded[: len(bits)] = bits
    packed = np.packbits(padded)
    return packed.view(">u8").astype(np.uint64)


def window_words(words: np.ndarray, start: int, stop: int) -> np.ndarray:
    """The 64-bit integers formed by bits ``k .. k+63`` for ``start <= k < stop``."""
    if stop + 64 > 64 * (len(words) - 1):
        raise ConfigurationError("bit stream too short for the requested windows")
    k = np.arange(start, stop, dtype=np.int64)
    q = k >> 6
    s = (k & 63).astype(np.uint64)
    hi = words[q] << s
    # (w >> 1) >> (63 - s) is a safe form of w >> (64 - s) that is 0 for s = 0
    lo = (words[q + 1] >> np.uint64(1)) >> (np.uint64(63) - s)
    return hi | lo


def window_values(words: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Windows as doubles, truncated to 53 bits (exact floats, error < 2**-53)."""
    w = window_words(words, start, stop)
    return (w >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _float_chunks(tmap: IntervalMap, x: float, n: int, chunk: int) -> Iterator[np.ndarray]:
    step = tmap.step_function()
    done = 0
    while done < n:
        m = min(chunk, n - done)
        out = [0.0] * m
        for i in range(m):
            x = step(x)
            out[i] = x
        done += m
        yield np.asarray(out)


def orbit_chunks(tmap: IntervalMap, orbit: Orbit, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Yield ``T^1 x .. T^n x`` as consecutive arrays of at most ``chunk`` points."""
    if orbit.engine is Engine.EXACT_BITSTREAM:
        if tmap.kind is not MapKind.DOUBLING:
            raise ConfigurationError("the exact bit-stream engine only runs the doubling map")
        for start in range(1, orbit.n + 1, chunk):
            yield window_values(orbit.words, start, min(start + chunk, orbit.n + 1))
        return
    yield from _float_chunks(tmap, float(orbit.x0), orbit.n, chunk)


def iterate(tmap: IntervalMap, orbit: Orbit) -> Iterator[float]:
    """Lazily emit ``T^1 x, ..., T^n x``."""
    for block in orbit_chunks(tmap, orbit):
        yield from block.tolist()


def orbit_points(tmap: IntervalMap, orbit: Orbit) -> np.ndarray:
    """``T^1 x .. T^n x`` as one array."""
    blocks = list(orbit_chunks(tmap, orbit))
    return np.concatenate(blocks) if blocks else np.empty(0)
