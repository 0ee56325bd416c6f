"""Invariant measures on [0, 1], ball masses and their inversion.

A ball ``B(x, r)`` is the interval ``[x - r, x + r]`` cut down to [0, 1].  All
measures here have densities, so ``r -> mu(B(x, r))`` is continuous and can
be inverted to any prescribed mass.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import rng
from .maps import ConfigurationError, IntervalMap, MapKind

LN2 = math.log(2.0)
MASS_TOL = 1e-12
BISECTION_CAP = 200


class ConvergenceError(RuntimeError):
    pass


class InvariantMeasure:
    """Interface shared by the analytic and grid measures."""

    name = "measure"

    def density(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, u):
        raise NotImplementedError

    def spec(self) -> dict:
        return {"kind": self.name}

    @property
    def max_density(self) -> float:
        raise NotImplementedError


class LebesgueMeasure(InvariantMeasure):
    name = "lebesgue"
    max_density = 1.0

    def density(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def cdf(self, x):
        return np.clip(x, 0.0, 1.0)

    def quantile(self, u):
        return np.clip(u, 0.0, 1.0)


class GaussMeasure(InvariantMeasure):
    """The Gauss measure ``dx / ((1 + x) ln 2)``."""

    name = "gauss"
    max_density = 1.0 / LN2

    def density(self, x):
        return 1.0 / ((1.0 + np.asarray(x, dtype=float)) * LN2)

    def cdf(self, x):
        return np.log1p(np.clip(x, 0.0, 1.0)) / LN2

    def quantile(self, u):
        return np.expm1(np.clip(u, 0.0, 1.0) * LN2)


@dataclass(eq=False)
class GridDensity(InvariantMeasure):
    """Piecewise constant density on ``N`` equal bins."""

    values: np.ndarray
    _edges: np.ndarray = field(init=False, repr=False)
    _cum: np.ndarray = field(init=False, repr=False)

    name = "grid"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) < 1:
            raise ValueError("grid density needs a 1-d array of bin values")
        if np.any(v < 0):
            raise ValueError("density must be non-negative")
        total = v.mean()
        if not total > 0:
            raise ValueError("density has zero mass")
        self.values = v / total
        n = len(v)
        self._edges = np.linspace(0.0, 1.0, n + 1)
        cum = np.concatenate(([0.0], np.cumsum(self.values) / n))
        cum[-1] = 1.0
        self._cum = cum

    @property
    def bins(self) -> int:
        return len(self.values)

    @property
    def max_density(self) -> float:
        return float(self.values.max())

    def spec(self) -> dict:
        return {"kind": "grid", "bins": self.bins}

    def density(self, x):
        x = np.asarray(x, dtype=float)
        i = np.clip((x * self.bins).astype(np.int64), 0, self.bins - 1)
        return self.values[i]

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        n = self.bins
        i = np.clip((x * n).astype(np.int64), 0, n - 1)
        return np.minimum(self._cum[i] + (x - self._edges[i]) * self.values[i], 1.0)

    def quantile(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        i = np.clip(np.searchsorted(self._cum, u, side="right") - 1, 0, self.bins - 1)
        vals = self.values[i]
        safe = np.where(vals > 0, vals, 1.0)
        x = self._edges[i] + np.where(vals > 0, (u - self._cum[i]) / safe, 0.0)
        return np.clip(x, 0.0, 1.0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin", "density"])
        for i, d in enumerate(self.values):
            w.writerow([i, repr(float(d))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridDensity":
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda r: int(r["bin"]))
        return cls(np.array([float(r["density"]) for r in rows]))


def measure_from_spec(spec: dict, tmap: IntervalMap | None = None) -> InvariantMeasure:
    kind = spec.get("kind")
    if kind == "lebesgue":
        return LebesgueMeasure()
    if kind == "gauss":
        return GaussMeasure()
    if kind == "ulam":
        if tmap is None:
            raise ConfigurationError("an ulam measure needs a map")
        return ulam_measure(tmap, int(spec.get("bins", 4096)))
    raise ConfigurationError(f"unknown measure spec {spec!r}")


def sample_points(mu: InvariantMeasure, count: int, seed: int) -> np.ndarray:
    """Point ``i`` is ``mu.quantile(u)`` with ``u`` the first uniform of stream ``(seed, i)``."""
    u = np.array([rng.uniforms(seed, i, 1)[0] for i in range(count)])
    return mu.quantile(u)


# -- balls -----------------------------------------------------------------


def ball_mass(mu: InvariantMeasure, x, r):
    """``mu([max(x - r, 0), min(x + r, 1)])``."""
    scalar = np.ndim(x) == 0 and np.ndim(r) == 0
    x = np.asarray(x, dtype=float)
    r = np.asarray(r, dtype=float)
    m = mu.cdf(np.minimum(x + r, 1.0)) - mu.cdf(np.maximum(x - r, 0.0))
    m = np.clip(m, 0.0, 1.0)
    return float(m) if scalar else m


def _lebesgue_radius(x, m):
    edge = np.minimum(x, 1.0 - x)
    return np.where(m <= 2.0 * edge, 0.5 * m, m - edge)


def radius_for_mass(mu: InvariantMeasure, x, m):
    """Smallest ``r`` with ``ball_mass(mu, x, r) >= m``.

    Lebesgue measure is inverted in closed form; every other measure by
    bisection on ``r`` over ``[0, max(x, 1 - x)]``, stopping once the mass
    error is below ``1e-12`` or after 200 halvings.
    """
    scalar = np.ndim(x) == 0 and np.ndim(m) == 0
    x, m = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(m, dtype=float))
    if np.any(m <= 0.0) or np.any(m > 1.0):
        raise ValueError("ball mass must lie in (0, 1]")
    if isinstance(mu, LebesgueMeasure):
        r = _lebesgue_radius(x, m)
    else:
        r = bisect_radius(mu, x, m)
    return float(r) if scalar else r


def bisect_radius(mu: InvariantMeasure, x, m, tol: float = MASS_TOL) -> np.ndarray:
    """Vectorised bisection for ``ball_mass(mu, x, r) = m`` (upper bracket returned)."""
    x = np.asarray(x, dtype=float).ravel().copy()
    m = np.asarray(m, dtype=float)
    shape = m.shape
    m = m.ravel()
    x = np.broadcast_to(x, m.shape) if x.size == 1 else x
    lo = np.zeros_like(m)
    hi = np.maximum(x, 1.0 - x)
    active = np.arange(m.size)
    for _ in range(BISECTION_CAP):
        if active.size == 0:
            break
        xa, ma = x[active], m[active]
        mid = 0.5 * (lo[active] + hi[active])
        above = ball_mass(mu, xa, mid) >= ma
        hi[active] = np.where(above, mid, hi[active])
        lo[active] = np.where(above, lo[active], mid)
        err = ball_mass(mu, xa, hi[active]) - ma
        width = hi[active] - lo[active]
        done = (err <= 0.1 * tol) | (width <= 4e-16 * np.maximum(hi[active], 1e-300))
        active = active[~done]
    return hi.reshape(shape)


# -- Ulam's method ---------------------------------------------------------


def ulam_matrix(tmap: IntervalMap, bins: int) -> sp.csr_matrix:
    """Row-stochastic Ulam matrix ``P[i, j] = |bin_i ∩ T^-1 bin_j| / |bin_i|``.

    Entries come from the analytic branch inverses: on every branch the
    preimages of the target bin edges and the source bin edges are merged
    into one sorted list, and each resulting piece is credited to exactly one
    (source, target) pair.
    """
    if bins < 2:
        raise ValueError("Ulam's method needs at least 2 bins")
    if not tmap.is_expanding():
        raise ConfigurationError(f"{tmap.name} is not expanding")
    edges = np.linspace(0.0, 1.0, bins + 1)
    acc = np.zeros(bins * bins)
    if tmap.kind is MapKind.GAUSS:
        # branches n >= bins sit inside the first bin
        branches = tmap.branches(limit=bins - 1)
        acc[:bins] += tmap.gauss_tail_preimage(bins, edges)
    else:
        branches = tmap.branches()
    for br in branches:
        ylo = np.clip(edges, br.image_lo, br.image_hi)
        pre = br.inverse(ylo)
        if not br.increasing:
            pre = pre[::-1]
        pre = np.clip(pre, br.lo, br.hi)
        inner = edges[(edges > br.lo) & (edges < br.hi)]
        pts = np.union1d(pre, inner)
        lengths = np.diff(pts)
        keep = lengths > 0
        mid = 0.5 * (pts[:-1] + pts[1:])[keep]
        lengths = lengths[keep]
        src = np.clip((mid * bins).astype(np.int64), 0, bins - 1)
        t = np.clip(np.searchsorted(pre, mid, side="right") - 1, 0, bins - 1)
        dst = t if br.increasing else bins - 1 - t
        np.add.at(acc, src * bins + dst, lengths)
    acc *= bins
    return sp.csr_matrix(acc.reshape(bins, bins))


def stationary_density(P: sp.spmatrix, tol: float = 1e-12, max_steps: int = 100_000) -> np.ndarray:
    """Power iteration ``rho <- rho P`` from the uniform density.

    Stops when the L1 change of the density (as a function on [0, 1]) is at
    most ``tol``.
    """
    n = P.shape[0]
    PT = P.T.tocsr()
    rho = np.ones(n)
    for _ in range(max_steps):
        new = PT @ rho
        new *= n / new.sum()
        change = np.abs(new - rho).sum() / n
        rho = new
        if change <= tol:
            return rho
    raise ConvergenceError(f"power iteration did not converge in {max_steps} steps")


def ulam_measure(tmap: IntervalMap, bins: int) -> GridDensity:
    """Grid approximation of the absolutely continuous invariant measure."""
    return GridDensity(stationary_density(ulam_matrix(tmap, bins)))


def l1_distance(grid: GridDensity, density, nodes: int = 8) -> float:
    """``∫ |grid - density| dx`` by Gauss-Legendre quadrature on every bin."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    n = grid.bins
    left = np.arange(n)[:, None] / n
    x = left + (t[None, :] + 1.0) / (2.0 * n)
    diff = np.abs(grid.values[:, None] - density(x))
    return float((diff * w[None, :]).sum() / (2.0 * n))


# -- Frostman condition ----------------------------------------------------


@dataclass
class FrostmanCertificate:
    exponent: float
    constant: float
    radii: np.ndarray
    level_maxima: np.ndarray
    argmax: tuple[float, float]
    bounded: bool

    def report(self) -> dict:
        return {
            "exponent": self.exponent,
            "constant": self.constant,
            "argmax_x": self.argmax[0],
            "argmax_r": self.argmax[1],
            "bounded": self.bounded,
            "levels": [
                {"r": float(r), "max_ratio": float(v)}
                for r, v in zip(self.radii, self.level_maxima)
            ],
        }


def frostman_scan(
    mu: InvariantMeasure,
    s: float,
    x_points: int = 201,
    levels: int = 30,
    growth_tol: float = 0.01,
) -> FrostmanCertificate:
    """Largest ``mu(B(x, r)) / r**s`` over a uniform x-grid and dyadic radii.

    ``bounded`` is False when the per-level maximum still grows by more than
    ``growth_tol`` between the two finest levels, i.e. the ratio is not
    settling and no finite constant is supported by the scan.
    """
    if s <= 0:
        raise ValueError("exponent must be positive")
    xs = np.linspace(0.0, 1.0, x_points)
    radii = 2.0 ** -np.arange(1, levels + 1, dtype=float)
    ratio = ball_mass(mu, xs[None, :], radii[:, None]) / radii[:, None] ** s
    level_max = ratio.max(axis=1)
    i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
    bounded = bool(level_max[-1] <= (1.0 + growth_tol) * level_max[-2])
    return FrostmanCertificate(
        exponent=s,
        constant=float(ratio.max()),
        radii=radii,
        level_maxima=level_max,
        argmax=(float(xs[j]), float(radii[i])),
        bounded=bounded,
    )
