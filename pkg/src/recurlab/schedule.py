"""Mass schedules ``(m_k)``: the prescribed measures of the shrinking balls."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

DEFAULT_RHOS = (1.5, 1.2, 1.1, 1.05, 1.01)


@dataclass(frozen=True)
class MassSchedule:
    """Either ``m_k = min(1, a (log k)^p / k)`` or an explicit list.

    For the log-power family ``m_1`` is fixed to 1: the raw formula vanishes
    at ``k = 1`` and mass 1 is the whole-space ball.
    """

    kind: str = "log-power"
    p: float = 5.0
    a: float = 1.0
    clip: bool = True
    values: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in ("log-power", "custom"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "log-power" and not self.a > 0:
            raise ValueError("scale a must be positive")
        if self.kind == "custom":
            v = np.asarray(self.values, dtype=float)
            if v.size == 0 or np.any(~np.isfinite(v)) or np.any(v < 0):
                raise ValueError("custom masses must be finite and non-negative")
            if self.clip and np.any(v == 0):
                raise ValueError("custom masses must be positive")
            v.flags.writeable = False
            object.__setattr__(self, "_array", v)

    def spec(self) -> dict:
        if self.kind == "custom":
            return {"kind": "custom", "values": list(self.values), "clip": self.clip}
        return {"kind": self.kind, "p": self.p, "a": self.a, "clip": self.clip}

    def masses(self, n: int, start: int = 1) -> np.ndarray:
        """``m_k`` for ``k = start .. n``."""
        if start < 1:
            raise ValueError("indices start at 1")
        k = np.arange(start, n + 1)
        if self.kind == "custom":
            if n > len(self.values):
                raise ValueError(f"custom schedule has only {len(self.values)} terms")
            m = self._array[k - 1]
        else:
            kf = k.astype(float)
            m = self.a * np.log(kf) ** self.p / kf
            m[k == 1] = 1.0
        return np.minimum(m, 1.0) if self.clip else m

    def mass(self, k: int) -> float:
        return float(self.masses(k, start=k)[0])


def log_power_schedule(p: float = 5.0, a: float = 1.0, clip: bool = True) -> MassSchedule:
    return MassSchedule("log-power", p=float(p), a=float(a), clip=clip)


def custom_schedule(values, clip: bool = True) -> MassSchedule:
    return MassSchedule("custom", values=tuple(np.asarray(values, dtype=float).tolist()), clip=clip)


def schedule_from_spec(spec: dict) -> MassSchedule:
    kind = spec.get("kind", "log-power")
    if kind == "custom":
        return custom_schedule(spec["values"], clip=spec.get("clip", True))
    if kind == "constant":
        return custom_schedule([spec["m"]] * int(spec["n"]), clip=spec.get("clip", True))
    return log_power_schedule(spec.get("p", 5.0), spec.get("a", 1.0), spec.get("clip", True))


def partial_mass(schedule: MassSchedule, n: int) -> float:
    """``M_n = m_1 + ... + m_n``, correctly rounded."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.fsum(schedule.masses(n))


def partial_masses(schedule: MassSchedule, checkpoints) -> np.ndarray:
    """``M_n`` at every checkpoint (each one correctly rounded)."""
    checkpoints = sorted(int(c) for c in checkpoints)
    m = schedule.masses(checkpoints[-1])
    return np.array([math.fsum(m[:c]) for c in checkpoints])


def _floor_multiple(rho: float, k: np.ndarray) -> np.ndarray:
    # [rho k] in exact integer arithmetic, reading rho as the decimal it prints as
    frac = Fraction(str(rho))
    return (k * frac.numerator) // frac.denominator


def regularity_ratio(schedule: MassSchedule, rho: float, k_min: int, k_max: int) -> float:
    """``max m_k / m_[rho k]`` over ``k_min <= k <= k_max``."""
    if rho <= 1:
        raise ValueError("rho must exceed 1")
    if k_min < 1 or k_max < k_min:
        raise ValueError("empty k-range")
    k = np.arange(k_min, k_max + 1, dtype=np.int64)
    target = _floor_multiple(rho, k)
    m = schedule.masses(int(target.max()))
    return float(np.max(m[k - 1] / m[target - 1]))


def decreasing_from(schedule: MassSchedule, k_max: int) -> int:
    """Smallest ``k0`` with ``m_k`` non-increasing on ``[k0, k_max]``."""
    m = schedule.masses(k_max)
    rises = np.nonzero(np.diff(m) > 0)[0]
    return int(rises[-1]) + 2 if rises.size else 1


@dataclass
class HypothesisReport:
    epsilon: float
    k_range: tuple[int, int]
    lower_bound_margin: float
    regularity: dict[float, float]
    partial_masses: dict[int, float]
    decreasing_from: int
    compliant: bool

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "k_range": list(self.k_range),
            "lower_bound_margin": self.lower_bound_margin,
            "regularity": {str(r): v for r, v in self.regularity.items()},
            "partial_masses": {str(n): v for n, v in self.partial_masses.items()},
            "decreasing_from": self.decreasing_from,
            "compliant": self.compliant,
        }


def regularity_trend_ok(table: dict[float, float], tol: float = 1e-12) -> bool:
    """True when the scanned ratios shrink towards 1 as rho decreases.

    The ratio at the smallest rho must also stay within ``2 (rho - 1)`` of 1,
    which holds for every schedule with ``m_k/m_[rho k] -> rho^c`` and
    ``c <= 2``.
    """
    rhos = sorted(table, reverse=True)
    vals = [table[r] for r in rhos]
    shrinking = all(b <= a + tol for a, b in zip(vals, vals[1:]))
    return shrinking and vals[-1] - 1.0 <= 2.0 * (rhos[-1] - 1.0) + tol


def check_hypotheses(
    schedule: MassSchedule,
    epsilon: float = 0.5,
    k_range: tuple[int, int] = (1_000, 1_000_000),
    rhos=DEFAULT_RHOS,
    checkpoints=(10**3, 10**4, 10**5, 10**6),
) -> HypothesisReport:
    """Finite-range surrogates for the lower-bound, regularity and divergence conditions."""
    k_lo, k_hi = k_range
    k = np.arange(max(k_lo, 2), k_hi + 1, dtype=float)
    m = schedule.masses(k_hi)[k.astype(np.int64) - 1]
    margin = float(np.min(m * k / np.log(k) ** (4.0 + epsilon)))
    table = {float(r): regularity_ratio(schedule, r, k_lo, k_hi) for r in rhos}
    cps = [c for c in checkpoints if c <= k_hi] or [k_hi]
    sums = dict(zip(cps, partial_masses(schedule, cps).tolist()))
    p_ok = schedule.kind == "log-power" and schedule.p > 4
    compliant = (p_ok or margin >= 1.0) and regularity_trend_ok(table)
    return HypothesisReport(
        epsilon=epsilon,
        k_range=(k_lo, k_hi),
        lower_bound_margin=margin,
        regularity=table,
        partial_masses=sums,
        decreasing_from=decreasing_from(schedule, k_hi),
        compliant=bool(compliant),
    )
