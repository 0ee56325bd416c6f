"""Recurrence counting, return times and pointwise dimensions.

Along the orbit of ``x`` the ball ``B_k(x)`` is centred at ``x`` itself and
has mass ``m_k``; step ``k`` is a recurrence when ``|T^k x - x| < r_k``.  The
counters tracked at every checkpoint ``n`` are

* ``R_n``, the number of recurrences up to ``n``;
* ``M_n``, the sum of the masses up to ``n``;
* ``S_n``, the recurrences weighted by ``1 / m_k`` (its expectation is ``n``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .maps import IntervalMap, Orbit, orbit_chunks, orbit_points
from .measure import InvariantMeasure, LebesgueMeasure, ball_mass, radius_for_mass
from .schedule import MassSchedule

DEFAULT_CHECKPOINTS = (10**3, 10**4, 10**5, 10**6)


@dataclass
class RecurrenceSeries:
    x0: float
    checkpoints: np.ndarray
    R: np.ndarray
    M: np.ndarray
    S: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        """``R_n / M_n``."""
        return self.R / self.M

    @property
    def weighted_ratio(self) -> np.ndarray:
        """``S_n / n``."""
        return self.S / self.checkpoints


def _checkpoints(n: int, checkpoints) -> np.ndarray:
    cps = DEFAULT_CHECKPOINTS if checkpoints is None else checkpoints
    cps = sorted({int(c) for c in cps if 1 <= int(c) <= n} | {n})
    return np.array(cps, dtype=np.int64)


def recurrence_radii(mu: InvariantMeasure, x0: float, masses: np.ndarray) -> np.ndarray:
    """``r_k`` with ``mu(B(x0, r_k)) = m_k``; whole-space balls get ``inf``."""
    r = np.full(masses.shape, np.inf)
    part = masses < 1.0
    if np.any(part):
        r[part] = radius_for_mass(mu, np.full(int(part.sum()), x0), masses[part])
    return r


def recurrence_hits(tmap: IntervalMap, mu: InvariantMeasure, schedule: MassSchedule, orbit: Orbit):
    """Indicator array of ``|T^k x - x| < r_k`` for ``k = 1..n`` and the masses."""
    x0 = orbit.start
    masses = schedule.masses(orbit.n)
    radii = recurrence_radii(mu, x0, masses)
    pts = orbit_points(tmap, orbit)
    return np.abs(pts - x0) < radii, masses


def run_recurrence(
    tmap: IntervalMap,
    mu: InvariantMeasure,
    schedule: MassSchedule,
    orbit: Orbit,
    checkpoints=None,
) -> RecurrenceSeries:
    """One pass over the orbit, snapshotting ``R_n``, ``M_n``, ``S_n`` at checkpoints."""
    cps = _checkpoints(orbit.n, checkpoints)
    hits, masses = recurrence_hits(tmap, mu, schedule, orbit)
    counts = np.cumsum(hits)[cps - 1]
    weights = np.where(hits, 1.0 / masses, 0.0)
    M = np.array([math.fsum(masses[:c]) for c in cps])
    S = np.array([math.fsum(weights[:c]) for c in cps])
    return RecurrenceSeries(orbit.start, cps, counts.astype(np.int64), M, S)


# -- return times ------------------------------------------------------------


@dataclass(frozen=True)
class ReturnTimeRecord:
    """First return of ``x`` to ``B(x, radius)``; ``censored`` when none by ``tau``."""

    radius: float
    mass: float
    tau: int
    censored: bool

    @property
    def ratio(self) -> float:
        """``log tau / -log mu(B)``, the quantity whose limit is 1."""
        if self.censored or not 0.0 < self.mass < 1.0:
            return math.nan
        return math.log(self.tau) / -math.log(self.mass)

    @property
    def radius_ratio(self) -> float:
        """``log tau / -log r``, to be compared with pointwise dimensions."""
        if self.censored or not 0.0 < self.radius < 1.0:
            return math.nan
        return math.log(self.tau) / -math.log(self.radius)


def first_returns(tmap: IntervalMap, orbit: Orbit, radii) -> np.ndarray:
    """First ``k <= n`` with ``|T^k x - x| < r`` for each radius, 0 if none."""
    radii = np.asarray(radii, dtype=float)
    x0 = orbit.start
    taus = np.zeros(radii.shape, dtype=np.int64)
    pending = np.arange(radii.size)
    offset = 0
    for block in orbit_chunks(tmap, orbit):
        if pending.size == 0:
            break
        # running minimum distance is non-increasing; count the prefix still >= r
        neg = -np.minimum.accumulate(np.abs(block - x0))
        count = np.searchsorted(neg, -radii[pending], side="right")
        hit = count < block.size
        taus[pending[hit]] = offset + count[hit] + 1
        pending = pending[~hit]
        offset += block.size
    return taus


def return_time(
    tmap: IntervalMap, orbit: Orbit, r: float, mu: InvariantMeasure | None = None
) -> ReturnTimeRecord:
    """Return time to ``B(x, r)`` searched up to ``orbit.n`` steps."""
    if r <= 0:
        raise ValueError("radius must be positive")
    mu = mu or LebesgueMeasure()
    tau = int(first_returns(tmap, orbit, [r])[0])
    mass = ball_mass(mu, orbit.start, r)
    if tau == 0:
        return ReturnTimeRecord(r, mass, orbit.n, True)
    return ReturnTimeRecord(r, mass, tau, False)


def exponent_curve(
    tmap: IntervalMap, mu: InvariantMeasure, orbit: Orbit, masses
) -> list[ReturnTimeRecord]:
    """Return-time records for balls of the given (decreasing) masses around ``x``."""
    masses = np.asarray(masses, dtype=float)
    if np.any(masses <= 0) or np.any(masses >= 1):
        raise ValueError("masses must lie in (0, 1)")
    if np.any(np.diff(masses) > 0):
        raise ValueError("masses must be decreasing")
    x0 = orbit.start
    radii = radius_for_mass(mu, np.full(masses.size, x0), masses)
    taus = first_returns(tmap, orbit, radii)
    out = []
    for r, t in zip(radii.tolist(), taus.tolist()):
        mass = ball_mass(mu, x0, r)
        out.append(ReturnTimeRecord(r, mass, t if t else orbit.n, t == 0))
    return out


def dyadic_masses(j_min: int, j_max: int) -> np.ndarray:
    return 2.0 ** -np.arange(j_min, j_max + 1, dtype=float)


# -- pointwise dimension -----------------------------------------------------


@dataclass(frozen=True)
class DimensionEstimate:
    lower: float
    upper: float
    values: tuple[float, ...]
    excluded: int


def pointwise_dimension(
    mu: InvariantMeasure, x: float, radii, method: str = "ratio"
) -> DimensionEstimate:
    """Finite-scale estimates of the lower and upper pointwise dimension at ``x``.

    ``"ratio"`` uses ``log mu(B(x, r)) / log r`` at every radius, which carries
    an ``O(1 / log r)`` bias from constant prefactors (``2 r`` for interior
    Lebesgue balls gives ``1 + log 2 / log r``).  ``"slope"`` uses the local
    log-log slopes between consecutive radii, which cancels that prefactor.
    Radii whose ball has zero mass are excluded and counted.
    """
    r = np.asarray(radii, dtype=float)
    if np.any(r <= 0) or np.any(r >= 1) or np.any(np.diff(r) >= 0):
        raise ValueError("radii must be decreasing inside (0, 1)")
    m = ball_mass(mu, np.full(r.size, x), r)
    ok = m > 0
    excluded = int((~ok).sum())
    r, m = r[ok], m[ok]
    if method == "ratio":
        vals = np.log(m) / np.log(r)
    elif method == "slope":
        vals = np.diff(np.log(m)) / np.diff(np.log(r))
    else:
        raise ValueError(f"unknown method {method!r}")
    if vals.size == 0:
        return DimensionEstimate(math.nan, math.nan, (), excluded)
    return DimensionEstimate(float(vals.min()), float(vals.max()), tuple(vals.tolist()), excluded)
