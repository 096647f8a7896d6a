import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidelink import (bound_consistency_report, entropy_bound_check, fano_lower_bound,
                      make_delta_noise, make_fano_tight, make_identity, make_independent_uniform,
                      one_way_lower_bound, orlitsky_zero_error_bound, two_way_lower_bound)
from sidelink.bounds import BoundReport, check_entropy_lemma
from sidelink.engine import ProtocolStats
from sidelink.errors import BadParam


def test_two_way_value():
    assert two_way_lower_bound(1024, 0.25, 1 / 64) == pytest.approx(4.670061, abs=1e-6)


def test_one_way_value():
    assert one_way_lower_bound(1024, 0.25, 1 / 64) == pytest.approx(
        (1 - 1 / 16) * math.log2(1025) - 2)


def test_fano_tight_value():
    # H(X|Y) = 1.25 + h(1/8); fano subtracts eps log2(2^10 + 1) + 1
    j = make_fano_tight(10, 0.125)
    assert j.conditional_entropy == pytest.approx(1.79357, abs=1e-5)
    assert fano_lower_bound(j, 0.125) == pytest.approx(
        j.conditional_entropy - 0.125 * math.log2(1025) - 1)


def test_vacuous_flag():
    r = BoundReport("fano", fano_lower_bound(make_identity(4), 0.1))
    assert r.vacuous


def test_orlitsky():
    assert orlitsky_zero_error_bound(make_independent_uniform(4, 3)).bound == pytest.approx(2)
    assert orlitsky_zero_error_bound(make_delta_noise(8, 0.25)).applicable
    assert orlitsky_zero_error_bound(make_identity(4)).applicable is False


def test_delta_checks():
    with pytest.raises(BadParam):
        two_way_lower_bound(10, 0.5, 0.1)
    with pytest.raises(BadParam):
        one_way_lower_bound(10, 0.0, 0.1)


def test_entropy_check_rejects_invalid():
    with pytest.raises(BadParam):
        entropy_bound_check([0.5, 0.5], [0.6, 0.1])
    with pytest.raises(BadParam):
        entropy_bound_check([0.5, 0.4], [0.1, 0.1])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=30), st.data())
def test_entropy_lemma_property(w, data):
    p = np.array(w) / sum(w)
    u = np.array(data.draw(st.lists(st.floats(1e-6, 1.0), min_size=len(p), max_size=len(p))))
    assert entropy_bound_check(p, u * p).holds


def test_randomized_lemma_small():
    assert check_entropy_lemma(300, seed=4, max_dim=200)[0] == 0


def _stats(error, ab, total, trials=1000):
    return ProtocolStats(trials=trials, mean_bits_a_to_b=ab, mean_bits_b_to_a=total - ab,
                         mean_total_bits=total, mean_rounds=2.0, error_rate=error,
                         std_total_bits=1.0, std_bits_a_to_b=1.0, max_total_bits=int(total) + 5,
                         max_bits_per_input={})


def test_consistency_report_precondition():
    j = make_delta_noise(64, 0.25)
    reps = bound_consistency_report(_stats(0.5, 5, 7), j, 0.125, "theorem1")
    assert len(reps) == 1 and reps[0].satisfied_by_measurement is False


def test_consistency_report_delta_noise():
    j = make_delta_noise(64, 0.25)
    reps = {r.bound_name: r for r in bound_consistency_report(_stats(0.05, 6, 8), j, 0.125, "x")}
    assert set(reps) == {"fano", "one_way", "two_way"}
    assert reps["fano"].satisfied_by_measurement
