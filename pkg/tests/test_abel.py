import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recurlab import rng
from recurlab.abel import (
    SequencePair,
    cesaro_ratio,
    lemma_transfer_check,
    parse_sequence,
    random_compliant_pair,
    sum_ratio,
)

ALT = SequencePair.from_spec("power:1", "alternating*power:1")


def test_grammar():
    k = np.arange(1, 6, dtype=float)
    assert parse_sequence("power:1")(k).tolist() == pytest.approx((1 / k).tolist())
    assert parse_sequence("alternating")(k).tolist() == [0, 2, 0, 2, 0]
    assert parse_sequence("const:3*geometric:0.5")(k).tolist() == pytest.approx((3 * 0.5**k).tolist())
    assert parse_sequence("log:2*shift:1:1")(k)[1] == pytest.approx(math.log(2) ** 2 / 3)
    with pytest.raises(ValueError):
        parse_sequence("zeta:2")


def test_trivial_examples():
    same = SequencePair.from_spec("power:1", "power:1")
    zero = SequencePair.from_spec("power:1", "const:0")
    for n in (1, 10, 1000):
        assert cesaro_ratio(same, n) == 1.0
        assert sum_ratio(same, n) == 1.0
        assert cesaro_ratio(zero, n) == 0.0
    with pytest.raises(ValueError):
        cesaro_ratio(SequencePair.from_spec("const:0", "const:1"), 3)
    with pytest.raises(ValueError):
        sum_ratio(SequencePair.from_spec("const:0", "const:1"), 3)


def test_alternating_harmonic_oracle():
    n = 10**6
    k = np.arange(1, n + 1)
    # brute force with exact rationals would be slow; use the series identities instead
    harmonic = math.fsum((1.0 / k).tolist())
    alternating = math.fsum(((-1.0) ** k / k).tolist())
    assert alternating == pytest.approx(-math.log(2), abs=1e-6)
    expected = (harmonic + alternating) / harmonic
    assert sum_ratio(ALT, n) == pytest.approx(expected, abs=1e-14)
    assert sum_ratio(ALT, n) == pytest.approx(0.95184, abs=1e-3)
    assert cesaro_ratio(ALT, n) == pytest.approx(1.0, abs=1e-6)


def test_exact_small_case_against_fractions():
    n = 200
    a = [Fraction(1, k) for k in range(1, n + 1)]
    x = [(1 + (-1) ** k) * ak for k, ak in zip(range(1, n + 1), a)]
    assert sum_ratio(ALT, n) == pytest.approx(float(sum(x) / sum(a)), rel=1e-15)


def test_summable_geometric_counterexample():
    # x_k = (1 + (-1)^k) 2^-k keeps the even terms doubled: the ratio tends to 2/3, not 1
    pair = SequencePair.from_spec("geometric:0.5", "alternating*geometric:0.5")
    exact = sum(Fraction(2, 2**k) for k in range(2, 61, 2)) / sum(Fraction(1, 2**k) for k in range(1, 61))
    assert sum_ratio(pair, 60) == pytest.approx(float(exact), rel=1e-15)
    assert sum_ratio(pair, 60) == pytest.approx(2 / 3, abs=1e-15)
    assert cesaro_ratio(pair, 60) == 1.0
    rep = lemma_transfer_check(pair, 1000)
    assert not rep.applicable and "summable" in rep.reason


def test_reverse_order_agrees():
    for pair in (ALT, SequencePair.from_spec("shift:2:0.7", "alternating*shift:2:0.7")):
        a, x = pair.arrays(10**5)
        assert math.fsum((x / a)[::-1].tolist()) / 10**5 == pytest.approx(cesaro_ratio(pair, 10**5), abs=1e-12)
        assert math.fsum(x[::-1].tolist()) / math.fsum(a[::-1].tolist()) == pytest.approx(sum_ratio(pair, 10**5), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(1, 5000))
def test_scale_equivariance(c, n):
    pair = SequencePair.from_spec("power:0.8", f"const:{c!r}*power:0.8")
    assert cesaro_ratio(pair, n) == pytest.approx(c, rel=1e-15)
    assert sum_ratio(pair, n) == pytest.approx(c, rel=1e-15)


def test_transfer_trivial_pair_is_exact():
    rep = lemma_transfer_check(SequencePair.from_spec("power:1", "power:1"), 10**4, delta=0.0)
    assert rep.applicable and rep.premise_met and rep.passed
    assert rep.sum_ratio == 1.0
    # with eps = 0 only the monotonicity factor c_rho is left in the envelope
    assert rep.bound <= max(e.c_rho for e in rep.envelopes) - 1


def test_transfer_alternating_harmonic():
    rep = lemma_transfer_check(ALT, 10**6)
    assert rep.applicable and rep.premise_met and rep.passed
    by_rho = {e.rho: e for e in rep.envelopes}
    assert set(by_rho) == {1.01, 1.05, 1.1}
    assert by_rho[1.01].c_rho == pytest.approx(1.01, abs=1e-3)
    assert abs(rep.sum_ratio - 1) <= rep.bound
    assert rep.to_dict()["passed"] is True


def test_transfer_gates():
    rising = SequencePair.from_spec("power:-0.5", "power:-0.5")
    assert lemma_transfer_check(rising, 1000).reason == "a_k is not decreasing"
    rep = lemma_transfer_check(ALT, 10**4, delta=1e-9)
    assert rep.applicable and not rep.premise_met and rep.passed is None
    fast = SequencePair.from_spec("power:3", "power:3")
    assert not lemma_transfer_check(fast, 10**4).applicable
    negative = SequencePair.from_spec("power:1", "const:-1")
    assert not lemma_transfer_check(negative, 100).applicable


def test_transfer_detects_a_planted_violation():
    # an x whose tail mass is moved before n1 breaks the premise, so nothing is asserted
    n = 10**4
    a = 1 / np.arange(1, n + 1)
    x = a.copy()
    x[: n // 2] *= 1.5
    x[n // 2 :] *= 0.5
    rep = lemma_transfer_check(SequencePair.from_arrays(a, x), n, delta=0.01)
    assert not rep.premise_met


def test_envelope_soundness_property():
    failures = 0
    for i in range(200):
        pair = random_compliant_pair(rng.stream(77, i), 5000)
        rep = lemma_transfer_check(pair, 5000)
        assert rep.applicable, pair.name
        failures += not rep.passed
    assert failures == 0
