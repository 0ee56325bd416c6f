"""Acceptance runs AC-1 to AC-9 at full size.

Each test prints one ``AC-n: PASS`` or ``AC-n: FAIL`` line with the measured
values; the lines are repeated in the pytest terminal summary.  Run them
alone with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from recurlab import rng
from recurlab.abel import SequencePair, cesaro_ratio, lemma_transfer_check, random_compliant_pair, sum_ratio
from recurlab.experiments import ExperimentConfig, run
from recurlab.maps import gauss, skewed
from recurlab.measure import l1_distance, ulam_measure
from recurlab.sprindzuk import machinery_suite

pytestmark = pytest.mark.slow

LINES: dict[str, str] = {}


def report(ac: str, ok: bool, detail: str) -> None:
    line = f"{ac}: {'PASS' if ok else 'FAIL'} {detail}"
    LINES[ac] = line
    print(line)
    assert ok, line


def verdicts(result) -> dict:
    return {k: v["passed"] for k, v in result.summary["thresholds"].items()}


def test_ac1_sprindzuk_machinery():
    t = time.perf_counter()
    reps = machinery_suite(seed=1, sequences=200, max_length=1 << 16)
    dt = time.perf_counter() - t
    bad = [f"{r.name} ({r.detail})" for r in reps if not r.passed]
    report("AC-1", not bad and dt < 10, f"checks={len(reps)} failed={bad or 0} time={dt:.1f}s")


def test_ac2_abel_oracle_and_envelope():
    t = time.perf_counter()
    pair = SequencePair.from_spec("power:1", "alternating*power:1")
    s, c = sum_ratio(pair, 10**6), cesaro_ratio(pair, 10**6)
    violations = skipped = 0
    for i in range(1000):
        rep = lemma_transfer_check(random_compliant_pair(rng.stream(2, i), 20000), 20000)
        if not (rep.applicable and rep.premise_met):
            skipped += 1
        elif not rep.passed:
            violations += 1
    dt = time.perf_counter() - t
    ok = abs(s - 0.95184) <= 1e-3 and abs(c - 1) <= 1e-6 and violations == 0 and skipped == 0 and dt < 30
    report("AC-2", ok, f"sum_ratio={s:.6f} cesaro={c:.9f} violations={violations} skipped={skipped} time={dt:.1f}s")


def test_ac3_strong_borel_cantelli_ratio():
    cfg = ExperimentConfig(kind="bc-ratio", seed=42, points=64, n=10**6, checkpoints=[10**4, 10**5],
                           thresholds={"ratio_band": [0.85, 1.15], "trend_reference": 10**4}, threads=4)
    res = run(cfg, write=False)
    cp = res.summary["checkpoints"]
    mean = cp[10**6]["ratio"]["mean"]
    err4, err6 = cp[10**4]["abs_error"]["mean"], cp[10**6]["abs_error"]["mean"]
    v = verdicts(res)
    ok = v["ratio_band"] and v["trend"] and not res.failures and res.wall_time < 300
    report("AC-3", ok, f"mean_ratio={mean:.5f} band={v['ratio_band']} |err| n=1e4:{err4:.3g} n=1e6:{err6:.3g} "
                       f"trend={v['trend']} time={res.wall_time:.1f}s")


def test_ac4_return_time_exponent():
    cfg = ExperimentConfig(kind="return-time", seed=42, points=64, n=10**6, params={"j_min": 5, "j_max": 18},
                           thresholds={"median_band": [0.8, 1.2], "censored_max": 0.2, "trend_from": 8,
                                       "trend_inversions": 1}, threads=4)
    res = run(cfg, write=False)
    top = res.summary["levels"][18]
    dist = [round(res.summary["levels"][j]["median_distance"], 4) for j in range(8, 19)]
    v = verdicts(res)
    ok = all(v.values()) and not res.failures and res.wall_time < 300
    report("AC-4", ok, f"median={top['median_ratio']:.4f} censored={top['censored_fraction']:.3f} "
                       f"distance j=8..18={dist} verdicts={v} time={res.wall_time:.1f}s")


def gauss_density(x):
    return 1.0 / ((1.0 + x) * math.log(2.0))


def test_ac5_ulam_oracle():
    # the Gauss oracle itself is checked as a transfer operator fixed point in test_measure.py
    t = time.perf_counter()
    e_gauss = l1_distance(ulam_measure(gauss(), 4096), gauss_density)
    e_skew = l1_distance(ulam_measure(skewed(1 / 3), 4096), lambda x: np.ones_like(x))
    dt = time.perf_counter() - t
    ok = e_gauss <= 1e-2 and e_skew <= 1e-3 and dt < 60
    report("AC-5", ok, f"L1 gauss={e_gauss:.3e} skewed={e_skew:.3e} time={dt:.1f}s")


def test_ac6_correlation_decay():
    cfg = ExperimentConfig(kind="correlation", seed=2024, engine="float64",
                           params={"samples": 10**7, "max_lag": 10, "oracle": "doubling-centered-identity"},
                           thresholds={"tau_band": [math.log(2) - 0.05, math.log(2) + 0.05], "oracle_se": 3})
    res = run(cfg, write=False)
    s = res.summary
    ok = all(verdicts(res).values()) and not res.failures and res.wall_time < 120
    report("AC-6", ok, f"max_z={s['max_z']:.2f} tau={s['tau']:.4f}+-{s['tau_stderr']:.4f} time={res.wall_time:.1f}s")


def test_ac7_variance_bound():
    t = time.perf_counter()
    maxima = []
    for seed in (11, 12):
        cfg = ExperimentConfig(kind="variance", seed=seed, points=10**4,
                               params={"windows": [[0, 500], [500, 1000], [1000, 2000]]}, thresholds={"finite": True})
        res = run(cfg, write=False)
        assert not res.failures
        maxima.append(res.summary["max_ratio"] if verdicts(res)["finite"] else math.nan)
    dt = time.perf_counter() - t
    finite = all(math.isfinite(m) and m > 0 for m in maxima)
    stable = finite and max(maxima) <= 2 * min(maxima)
    report("AC-7", finite and stable and dt < 180, f"max ratios={[f'{m:.4g}' for m in maxima]} time={dt:.1f}s")


def test_ac8_dimension_sandwich():
    t = time.perf_counter()
    parts = []
    ok = True
    for measure, tmap, engine in (("lebesgue", "doubling", "exact-bitstream"), ("gauss", "gauss", "float64")):
        thresholds = {"sandwich_slack": 0.25}
        if measure == "lebesgue":
            thresholds |= {"reference_dimension": 1.0, "dimension_tol": 0.02}
        cfg = ExperimentConfig(kind="dimension", seed=42, points=16, n=10**6, map={"kind": tmap},
                               measure={"kind": measure}, engine=engine,
                               params={"j_min": 5, "j_max": 18, "r_min": 1e-6}, thresholds=thresholds, threads=4)
        res = run(cfg, write=False)
        s = res.summary
        ok &= all(verdicts(res).values()) and not res.failures
        parts.append(f"{measure}: inside={s['inside_sandwich']}/16 dims=[{s['dim_lower']['mean']:.4f}, "
                     f"{s['dim_upper']['mean']:.4f}] exponent={s['exponent']['mean']:.3f}")
    dt = time.perf_counter() - t
    report("AC-8", ok and dt < 120, f"{'; '.join(parts)} time={dt:.1f}s")


def test_ac9_reproducibility(tmp_path):
    configs = [
        {"kind": "bc-ratio", "seed": 9, "points": 16, "n": 10**5, "checkpoints": [10**3, 10**4]},
        {"kind": "return-time", "seed": 9, "points": 16, "n": 10**5, "params": {"j_min": 5, "j_max": 14}},
        {"kind": "dimension", "seed": 9, "points": 8, "n": 10**5, "map": {"kind": "gauss"},
         "measure": {"kind": "gauss"}, "engine": "float64", "params": {"j_min": 5, "j_max": 14}},
    ]
    same = True
    for data in configs:
        blobs = []
        for tag, threads in (("a", 1), ("b", 1), ("c", 8)):
            out = tmp_path / f"{data['kind']}-{tag}"
            run(ExperimentConfig.from_dict({**data, "threads": threads, "out": str(out)}))
            blobs.append((out / "points.csv").read_bytes())
        same &= blobs[0] == blobs[1] == blobs[2]
    report("AC-9", same, f"points.csv identical across reruns and threads 1/8 for {len(configs)} kinds")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
