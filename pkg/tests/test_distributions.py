import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sidelink import (Distribution, JointDistribution, conditional_entropy_averaged,
                      conditional_mutual_information, delta_noise_entropy, harmonic_conditional,
                      harmonic_sigma_entropy, make_delta_noise, make_fano_tight,
                      make_harmonic_permutation, make_identity, make_independent_uniform,
                      make_point_mass, renyi_entropy, shannon_entropy)
from sidelink.errors import BadParam, UnknownY


def test_shannon_and_renyi_uniform():
    d = Distribution.uniform(8)
    assert shannon_entropy(d) == pytest.approx(3.0)
    assert renyi_entropy(d) == pytest.approx(3.0)


def test_distribution_rejects_bad_mass():
    with pytest.raises(BadParam):
        Distribution.from_dense([0.5, 0.4])


def test_exact_distribution_keeps_fractions():
    d = Distribution.from_mapping({0: Fraction(1, 3), 2: Fraction(2, 3)})
    assert d.exact_prob(2) == Fraction(2, 3)
    assert 1 not in d and 2 in d


@pytest.mark.parametrize("n,delta", [(4, 0.1), (64, 0.25), (1024, 0.25), (300, 0.4)])
def test_delta_noise_closed_form(n, delta):
    j = make_delta_noise(n, delta)
    assert j.conditional_entropy == pytest.approx(delta_noise_entropy(n, delta), abs=1e-9)
    assert conditional_entropy_averaged(j) == pytest.approx(j.conditional_entropy, abs=1e-9)


def test_delta_noise_1024_value():
    assert make_delta_noise(1024, 0.25).conditional_entropy == pytest.approx(3.3112781, abs=1e-6)


def test_condition_on_unknown_y():
    j = make_identity(4)
    with pytest.raises(UnknownY):
        j.condition_on(9)


def test_harmonic_sigma_invariance():
    j = make_harmonic_permutation(5)
    hs = [shannon_entropy(j.condition_on(y).dist) for y in range(j.ny)]
    assert max(hs) - min(hs) < 1e-12
    assert hs[0] == pytest.approx(harmonic_sigma_entropy(5), abs=1e-9)
    assert sum(harmonic_conditional(5, exact=True).exact) == 1


def test_fano_tight_entropy():
    j = make_fano_tight(10, 0.125)
    want = 0.125 * 10 + (-(0.875) * math.log2(0.875) - 0.125 * math.log2(0.125))
    assert j.conditional_entropy == pytest.approx(want, abs=1e-12)


def test_degenerate_presets():
    assert make_point_mass().conditional_entropy == 0
    assert make_identity(16).conditional_entropy == 0
    assert make_independent_uniform(8, 4).conditional_entropy == pytest.approx(3.0)


def test_json_roundtrip(tmp_path):
    j = make_delta_noise(8, Fraction(1, 4))
    j.save(tmp_path / "d.json")
    back = JointDistribution.load(tmp_path / "d.json")
    assert back.is_exact
    assert back.conditional_entropy == pytest.approx(j.conditional_entropy, abs=1e-15)


def test_sampling_marginal():
    j = make_independent_uniform(4, 2)
    xs, ys = j.sample(np.random.default_rng(1), size=20000)
    assert np.bincount(xs, minlength=4) / 20000 == pytest.approx([0.25] * 4, abs=0.02)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_cmi_of_copy_is_conditional_entropy(nx, ny, seed):
    rng = np.random.default_rng(seed)
    p = rng.random((nx, ny)) + 0.01
    p /= p.sum()
    law = np.zeros((nx, ny, nx))
    law[np.arange(nx), :, np.arange(nx)] = p
    j = JointDistribution(p)
    assert conditional_mutual_information(law, [0], [2], [1]) == pytest.approx(
        j.conditional_entropy, abs=1e-9)
