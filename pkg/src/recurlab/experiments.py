"""Configured experiments: ensembles, persistence and threshold evaluation.

A run takes one JSON-serialisable :class:`ExperimentConfig`, fans the
independent pieces of work (one per ensemble point, or one per item for
non-ensemble kinds) out to a thread pool, and writes three files:

``points.csv``        one row per record, columns fixed per kind
``summary.json``      statistics recomputable from ``points.csv``
``config.echo.json``  the full config plus its hash

Records are collected in task order, so the bytes written do not depend on
the number of threads.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__, abel, rng, sprindzuk
from .maps import Engine, MapKind, Orbit, map_from_spec, random_bitstream
from .measure import GaussMeasure, GridDensity, LebesgueMeasure, l1_distance, measure_from_spec, sample_points, ulam_measure
from .recurrence import dyadic_masses, exponent_curve, pointwise_dimension, run_recurrence
from .schedule import check_hypotheses, schedule_from_spec

SCHEMA_VERSION = 1
KINDS = ("bc-ratio", "return-time", "correlation", "variance", "lemma-check", "ulam", "dimension")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    map: dict = field(default_factory=lambda: {"kind": "doubling"})
    measure: dict = field(default_factory=lambda: {"kind": "lebesgue"})
    schedule: dict = field(default_factory=lambda: {"kind": "log-power", "p": 5.0, "a": 1.0})
    engine: str = "exact-bitstream"
    points: int = 64
    n: int = 10**6
    checkpoints: list[int] | None = None
    params: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    threads: int = 1
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {', '.join(KINDS)}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "an integer in [0, 2**64) is required")
        for name in ("points", "n", "threads"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(name, "must be a positive integer")
        try:
            Engine(self.engine)
        except ValueError:
            raise ConfigError("engine", f"unknown engine {self.engine!r}") from None
        try:
            tmap = map_from_spec(self.map)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError("map", str(exc)) from None
        if self.measure.get("kind") not in ("lebesgue", "gauss", "ulam"):
            raise ConfigError("measure.kind", "must be lebesgue, gauss or ulam")
        try:
            schedule_from_spec(self.schedule)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError("schedule", str(exc)) from None
        if Engine(self.engine) is Engine.EXACT_BITSTREAM and self.kind in ("bc-ratio", "return-time", "variance"):
            if tmap.kind is not MapKind.DOUBLING:
                raise ConfigError("engine", "exact-bitstream requires the doubling map")
            if self.measure.get("kind") != "lebesgue":
                raise ConfigError("measure", "exact-bitstream orbits are Lebesgue distributed")
        if self.checkpoints is not None:
            if not all(isinstance(c, int) and c >= 1 for c in self.checkpoints):
                raise ConfigError("checkpoints", "must be positive integers")
        if not isinstance(self.params, dict):
            raise ConfigError("params", "must be an object")
        if not isinstance(self.thresholds, dict):
            raise ConfigError("thresholds", "must be an object")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        for required in ("kind", "seed"):
            if required not in data:
                raise ConfigError(required, "missing")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def digest(self) -> str:
        """sha256 of the canonical JSON, ignoring ``threads`` and ``out``.

        Neither field changes the results, so runs differing only there share
        a hash.
        """
        data = self.to_dict()
        data.pop("threads")
        data.pop("out")
        canon = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    columns: list[str]
    rows: list[list]
    summary: dict
    failures: list[dict]
    wall_time: float

    @property
    def passed(self) -> bool:
        return not self.failures and all(t["passed"] for t in self.summary.get("thresholds", {}).values())

    def points_csv(self) -> str:
        return format_csv(self.columns, self.rows)

    def summary_document(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "library_version": __version__,
            "kind": self.config.kind,
            "config_hash": self.config.digest(),
            "wall_time": self.wall_time,
            "failures": self.failures,
            "passed": self.passed,
            "summary": self.summary,
        }

    def write(self, out: str | Path) -> None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "points.csv").write_text(self.points_csv())
        (out / "summary.json").write_text(json.dumps(_jsonable(self.summary_document()), indent=2, sort_keys=True))
        echo = {"schema_version": SCHEMA_VERSION, "hash": self.config.digest(), "config": self.config.to_dict()}
        (out / "config.echo.json").write_text(json.dumps(echo, indent=2, sort_keys=True))


# -- CSV -----------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _parse_cell(s: str):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def parse_csv(text: str) -> tuple[list[str], list[list]]:
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    return columns, [[_parse_cell(c) for c in row] for row in reader]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# -- helpers -------------------------------------------------------------------


def sample_initial_points(mu, count: int, seed: int, engine: Engine | str = Engine.FLOAT64, n: int = 0):
    """Ensemble starting points; point ``i`` is driven by stream ``(seed, i)``.

    Float engines get ``count`` points drawn from ``mu`` by inverse CDF.  The
    exact bit-stream engine gets ``count`` orbits of length ``n`` whose start
    points are Lebesgue distributed.
    """
    if Engine(engine) is Engine.EXACT_BITSTREAM:
        return [Orbit(n, engine=Engine.EXACT_BITSTREAM, words=random_bitstream(seed, i, n)) for i in range(count)]
    return sample_points(mu, count, seed)


def _orbit(config: ExperimentConfig, x0s, i: int) -> Orbit:
    if Engine(config.engine) is Engine.EXACT_BITSTREAM:
        return Orbit(config.n, engine=Engine.EXACT_BITSTREAM, words=random_bitstream(config.seed, i, config.n))
    return Orbit(config.n, x0=float(x0s[i]))


def _stats(values) -> dict:
    v = np.asarray([x for x in values if isinstance(x, (int, float)) and math.isfinite(x)], dtype=float)
    if v.size == 0:
        return {"count": 0, "mean": math.nan, "median": math.nan, "stderr": math.nan}
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
    return {"count": int(v.size), "mean": math.fsum(v.tolist()) / v.size, "median": float(np.median(v)), "stderr": se}


def _threshold(value, passed: bool, limit) -> dict:
    return {"value": value, "limit": limit, "passed": bool(passed)}


def non_increasing_with_inversions(values, allowed: int = 1) -> bool:
    """True when at most ``allowed`` consecutive steps increase."""
    v = list(values)
    return sum(b > a for a, b in zip(v, v[1:])) <= allowed


@dataclass
class _Plan:
    columns: list[str]
    tasks: int
    work: Callable[[int], list[list]]
    summarize: Callable[[list[list]], dict]


# -- experiment kinds ----------------------------------------------------------


def _plan_bc_ratio(config: ExperimentConfig) -> _Plan:
    tmap = map_from_spec(config.map)
    mu = measure_from_spec(config.measure, tmap)
    sched = schedule_from_spec(config.schedule)
    x0s = None if Engine(config.engine) is Engine.EXACT_BITSTREAM else sample_points(mu, config.points, config.seed)
    columns = ["point", "seed", "x0", "n", "R_n", "M_n", "S_n", "ratio", "weighted_ratio"]

    def work(i):
        orbit = _orbit(config, x0s, i)
        s = run_recurrence(tmap, mu, sched, orbit, config.checkpoints)
        return [
            [i, config.seed, s.x0, int(n), int(R), M, S, R / M, S / n]
            for n, R, M, S in zip(s.checkpoints.tolist(), s.R.tolist(), s.M.tolist(), s.S.tolist())
        ]

    return _Plan(columns, config.points, work, lambda rows: summarize("bc-ratio", columns, rows, config))


def _plan_return_time(config: ExperimentConfig) -> _Plan:
    tmap = map_from_spec(config.map)
    mu = measure_from_spec(config.measure, tmap)
    js = list(range(int(config.params.get("j_min", 5)), int(config.params.get("j_max", 18)) + 1))
    masses = dyadic_masses(js[0], js[-1])
    x0s = None if Engine(config.engine) is Engine.EXACT_BITSTREAM else sample_points(mu, config.points, config.seed)
    columns = ["point", "seed", "x0", "j", "mass", "radius", "tau", "censored", "ratio"]

    def work(i):
        orbit = _orbit(config, x0s, i)
        recs = exponent_curve(tmap, mu, orbit, masses)
        return [[i, config.seed, orbit.start, j, r.mass, r.radius, r.tau, r.censored, r.ratio] for j, r in zip(js, recs)]

    return _Plan(columns, config.points, work, lambda rows: summarize("return-time", columns, rows, config))


def _plan_dimension(config: ExperimentConfig) -> _Plan:
    tmap = map_from_spec(config.map)
    mu = measure_from_spec(config.measure, tmap)
    p = config.params
    js = list(range(int(p.get("j_min", 5)), int(p.get("j_max", 18)) + 1))
    masses = dyadic_masses(js[0], js[-1])
    radii = np.logspace(-1, math.log10(float(p.get("r_min", 1e-6))), int(p.get("radii", 11)))
    method = p.get("method", "slope")
    x0s = None if Engine(config.engine) is Engine.EXACT_BITSTREAM else sample_points(mu, config.points, config.seed)
    columns = ["point", "seed", "x0", "dim_lower", "dim_upper", "dim_finest", "mass", "radius", "tau",
               "exponent", "radius_exponent"]

    def work(i):
        orbit = _orbit(config, x0s, i)
        x0 = orbit.start
        dim = pointwise_dimension(mu, x0, radii, method=method)
        recs = exponent_curve(tmap, mu, orbit, masses)
        finest = [r for r in recs if not r.censored]
        rec = finest[-1] if finest else recs[0]
        return [[i, config.seed, x0, dim.lower, dim.upper, dim.values[-1] if dim.values else math.nan,
                 rec.mass, rec.radius, rec.tau, rec.ratio, rec.radius_ratio]]

    return _Plan(columns, config.points, work, lambda rows: summarize("dimension", columns, rows, config))


def _plan_correlation(config: ExperimentConfig) -> _Plan:
    tmap = map_from_spec(config.map)
    mu = measure_from_spec(config.measure, tmap)
    p = config.params
    f = sprindzuk.observable_from_spec(p.get("f", "centered-identity"))
    g = sprindzuk.observable_from_spec(p.get("g", "centered-identity"))
    max_lag = int(p.get("max_lag", 10))
    samples = int(p.get("samples", 10**6))
    oracle = p.get("oracle")
    columns = ["n", "estimate", "stderr", "oracle"]

    def work(_):
        est = sprindzuk.correlation_decay(tmap, mu, f, g, max_lag, samples, config.seed)
        rows = []
        for n, e, se in zip(est.lags.tolist(), est.estimate.tolist(), est.stderr.tolist()):
            exact = 2.0**-n / 12.0 if oracle == "doubling-centered-identity" else math.nan
            rows.append([n, e, se, exact])
        return rows

    return _Plan(columns, 1, work, lambda rows: summarize("correlation", columns, rows, config))


def _plan_variance(config: ExperimentConfig) -> _Plan:
    tmap = map_from_spec(config.map)
    mu = measure_from_spec(config.measure, tmap)
    sched = schedule_from_spec(config.schedule)
    windows = [tuple(w) for w in config.params.get("windows", [[0, 500], [500, 1000], [1000, 2000]])]
    n = max(w[1] for w in windows)
    columns = ["seed", "window_lo", "window_hi", "lhs", "rhs", "ratio", "rejected"]

    def work(_):
        hits = sprindzuk.recurrence_indicators(tmap, mu, sched, n, config.points, config.seed, Engine(config.engine))
        out = []
        for w in windows:
            v = sprindzuk.variance_bound_check(hits, w)
            out.append([config.seed, w[0], w[1], v.lhs, v.rhs, v.ratio, v.rejected])
        return out

    return _Plan(columns, 1, work, lambda rows: summarize("variance", columns, rows, config))


def _plan_lemma_check(config: ExperimentConfig) -> _Plan:
    p = config.params
    pairs = p.get("pairs", [{"a": "power:1", "x": "alternating*power:1", "n": 10**6}])
    random_pairs = int(p.get("random_pairs", 1000))
    random_n = int(p.get("random_n", 20000))
    sequences = int(p.get("sequences", 200))
    columns = ["item", "check", "name", "passed", "value", "bound"]

    def work(i):
        if i == 0:
            reps = sprindzuk.machinery_suite(config.seed, sequences=sequences)
            return [[0, "machinery", r.name, r.passed, math.nan, math.nan] for r in reps]
        if i <= len(pairs):
            spec = pairs[i - 1]
            pair = abel.SequencePair.from_spec(spec["a"], spec["x"])
            rep = abel.lemma_transfer_check(pair, int(spec.get("n", 10**6)), spec.get("delta"))
            ok = rep.passed if rep.applicable and rep.premise_met else None
            return [[i, "transfer", pair.name, "n/a" if ok is None else ok, rep.sum_ratio, rep.bound]]
        g = rng.stream(config.seed, 2**32 + i)
        pair = abel.random_compliant_pair(g, random_n)
        rep = abel.lemma_transfer_check(pair, random_n)
        ok = rep.passed if rep.applicable and rep.premise_met else None
        return [[i, "envelope", pair.name, "n/a" if ok is None else ok, rep.sum_ratio, rep.bound]]

    tasks = 1 + len(pairs) + random_pairs
    return _Plan(columns, tasks, work, lambda rows: summarize("lemma-check", columns, rows, config))


def _plan_ulam(config: ExperimentConfig) -> _Plan:
    tmap = map_from_spec(config.map)
    bins = int(config.params.get("bins", 4096))
    columns = ["bin", "density"]

    def work(_):
        grid = ulam_measure(tmap, bins)
        return [[i, v] for i, v in enumerate(grid.values.tolist())]

    return _Plan(columns, 1, work, lambda rows: summarize("ulam", columns, rows, config))


_PLANS = {
    "bc-ratio": _plan_bc_ratio,
    "return-time": _plan_return_time,
    "dimension": _plan_dimension,
    "correlation": _plan_correlation,
    "variance": _plan_variance,
    "lemma-check": _plan_lemma_check,
    "ulam": _plan_ulam,
}

_ORACLES = {
    "gauss": GaussMeasure().density,
    "lebesgue": LebesgueMeasure().density,
}


# -- summaries -----------------------------------------------------------------


def summarize(kind: str, columns: list[str], rows: list[list], config: ExperimentConfig) -> dict:
    """Statistics and threshold verdicts computed from the per-record rows only."""
    col = {c: i for i, c in enumerate(columns)}

    def values(name, where=lambda r: True):
        return [r[col[name]] for r in rows if where(r)]

    th = config.thresholds
    out: dict[str, Any] = {}
    verdicts: dict[str, dict] = {}

    if kind == "bc-ratio":
        cps = sorted(set(values("n")))
        per = {}
        for n in cps:
            ratios = values("ratio", lambda r: r[col["n"]] == n)
            per[n] = {
                "ratio": _stats(ratios),
                "abs_error": _stats([abs(x - 1.0) for x in ratios]),
                "weighted_ratio": _stats(values("weighted_ratio", lambda r: r[col["n"]] == n)),
            }
        out["checkpoints"] = per
        final = per[cps[-1]] if cps else None
        if "ratio_band" in th and final:
            lo, hi = th["ratio_band"]
            m = final["ratio"]["mean"]
            verdicts["ratio_band"] = _threshold(m, lo <= m <= hi, [lo, hi])
        if "trend_reference" in th and final:
            ref = int(th["trend_reference"])
            a, b = final["abs_error"]["mean"], per.get(ref, {}).get("abs_error", {}).get("mean", math.nan)
            verdicts["trend"] = _threshold([b, a], a <= b, f"mean |R/M - 1| at n={cps[-1]} <= n={ref}")

    elif kind == "return-time":
        js = sorted(set(values("j")))
        per = {}
        for j in js:
            at = lambda r, j=j: r[col["j"]] == j
            cens = values("censored", at)
            ratios = [x for x, c in zip(values("ratio", at), cens) if not c]
            per[j] = {
                "median_ratio": float(np.median(ratios)) if ratios else math.nan,
                "median_distance": float(np.median([abs(x - 1.0) for x in ratios])) if ratios else math.nan,
                "censored_fraction": sum(bool(c) for c in cens) / len(cens),
                "ratio": _stats(ratios),
            }
        out["levels"] = per
        if js:
            last = per[js[-1]]
            if "median_band" in th:
                lo, hi = th["median_band"]
                verdicts["median_band"] = _threshold(last["median_ratio"], lo <= last["median_ratio"] <= hi, [lo, hi])
            if "censored_max" in th:
                c = last["censored_fraction"]
                verdicts["censored"] = _threshold(c, c < th["censored_max"], th["censored_max"])
            if "trend_from" in th:
                dist = [per[j]["median_distance"] for j in js if j >= int(th["trend_from"])]
                allowed = int(th.get("trend_inversions", 1))
                verdicts["trend"] = _threshold(
                    dist, non_increasing_with_inversions(dist, allowed), f"at most {allowed} inversion(s)"
                )

    elif kind == "dimension":
        lower, upper = values("dim_lower"), values("dim_upper")
        exps = values(config.params.get("exponent", "exponent"))
        slack = float(th.get("sandwich_slack", 0.25))
        inside = [lo - slack <= e <= hi + slack for lo, hi, e in zip(lower, upper, exps)]
        out["points"] = len(rows)
        out["inside_sandwich"] = sum(inside)
        out["exponent"] = _stats(exps)
        out["dim_lower"] = _stats(lower)
        out["dim_upper"] = _stats(upper)
        out["dim_finest"] = _stats(values("dim_finest"))
        if "sandwich_slack" in th:
            verdicts["sandwich"] = _threshold(sum(inside), all(inside), f"all {len(rows)} points")
        if "reference_dimension" in th:
            ref, tol = float(th["reference_dimension"]), float(th.get("dimension_tol", 0.02))
            finest = values("dim_finest")
            worst = max(abs(d - ref) for d in finest) if finest else math.nan
            verdicts["dimension"] = _threshold(worst, worst <= tol, tol)

    elif kind == "correlation":
        n = values("n")
        est, se, exact = values("estimate"), values("stderr"), values("oracle")
        use = [(k, e, s) for k, e, s in zip(n, est, se) if e > 3.0 * s]
        out["lags"] = len(n)
        if len(use) >= 2:
            k = np.array([u[0] for u in use], dtype=float)
            y = np.log([u[1] for u in use])
            w = (np.array([u[1] for u in use]) / np.array([u[2] for u in use])) ** 2
            A = np.column_stack([np.ones_like(k), k])
            cov = np.linalg.inv((A.T * w) @ A)
            beta = cov @ ((A.T * w) @ y)
            out["c"], out["tau"] = math.exp(beta[0]), -float(beta[1])
            out["tau_stderr"] = math.sqrt(cov[1, 1])
        else:
            out["c"] = out["tau"] = out["tau_stderr"] = math.nan
        if any(math.isfinite(x) for x in exact):
            z = [abs(e - x) / s for e, x, s in zip(est, exact, se)]
            out["max_z"] = max(z)
            if "oracle_se" in th:
                verdicts["oracle"] = _threshold(out["max_z"], out["max_z"] <= th["oracle_se"], th["oracle_se"])
        if "tau_band" in th:
            lo, hi = th["tau_band"]
            verdicts["tau"] = _threshold(out["tau"], lo <= out["tau"] <= hi, [lo, hi])

    elif kind == "variance":
        ratios = values("ratio")
        finite = [r for r in ratios if math.isfinite(r)]
        out["windows"] = [[r[col["window_lo"]], r[col["window_hi"]], r[col["ratio"]]] for r in rows]
        out["max_ratio"] = max(finite) if finite else math.nan
        if th.get("finite"):
            verdicts["finite"] = _threshold(out["max_ratio"], bool(finite) and len(finite) == len(ratios), "finite")

    elif kind == "lemma-check":
        status = values("passed")
        out["items"] = len(rows)
        out["passed"] = sum(s == 1 for s in status)
        out["failed"] = sum(s == 0 for s in status)
        out["not_applicable"] = sum(s == "n/a" for s in status)
        if th.get("all_pass", True):
            verdicts["all_pass"] = _threshold(out["failed"], out["failed"] == 0, 0)

    elif kind == "ulam":
        dens = np.array(values("density"), dtype=float)
        out["bins"] = int(dens.size)
        oracle = config.params.get("oracle")
        if oracle in _ORACLES and dens.size:
            out["l1_error"] = l1_distance(GridDensity(dens), _ORACLES[oracle])
            if "l1_max" in th:
                verdicts["l1"] = _threshold(out["l1_error"], out["l1_error"] <= th["l1_max"], th["l1_max"])

    out["thresholds"] = verdicts
    return out


# -- running -------------------------------------------------------------------


def run(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Execute ``config``; persist outputs under ``config.out`` when ``write``."""
    start = time.perf_counter()
    plan = _PLANS[config.kind](config)

    def guarded(i):
        try:
            return plan.work(i), None
        except Exception as exc:  # a failed point must not lose the others
            return [], {"task": i, "error": f"{type(exc).__name__}: {exc}"}

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        results = list(pool.map(guarded, range(plan.tasks)))
    rows = [row for chunk, _ in results for row in chunk]
    failures = [err for _, err in results if err]
    summary = plan.summarize(rows) if rows else {"thresholds": {}}
    if config.kind == "bc-ratio" and config.n > 1000:
        sched = schedule_from_spec(config.schedule)
        summary["hypotheses"] = check_hypotheses(sched, k_range=(1000, min(config.n, 10**6))).to_dict()
    result = ExperimentResult(config, plan.columns, rows, summary, failures, time.perf_counter() - start)
    if write and config.out:
        result.write(config.out)
    return result


def resummarize(config: ExperimentConfig, points_csv: str) -> dict:
    """Recompute the summary from a persisted ``points.csv``."""
    columns, rows = parse_csv(points_csv)
    return summarize(config.kind, columns, rows, config)
