from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from lsnlab.noise import (
    NoiseSpec,
    in_support,
    pmf,
    pmf_flagged,
    sample_error,
    sample_error_by_weight,
    support,
    tail_bound,
    truncation_norm,
    weight_pmf,
)
from lsnlab.pauli import PauliOperator

P = PauliOperator.from_string


def every_pauli(n):
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliOperator(n, x, z)


def test_zero_noise_is_identity():
    rng = np.random.default_rng(0)
    for kind in ("depolarizing", "bitflip"):
        spec = NoiseSpec(kind, 6, 0.0)
        assert all(sample_error(spec, rng).is_identity() for _ in range(50))


def test_single_qubit_depolarizing_frequencies():
    rng = np.random.default_rng(1)
    spec = NoiseSpec("depolarizing", 1, 0.3)
    counts = Counter(sample_error(spec, rng).letters() for _ in range(60000))
    for letter in "XYZ":
        assert counts[letter] / 60000 == pytest.approx(0.1, abs=0.005)


def test_weight_histogram_binomial():
    rng = np.random.default_rng(2)
    spec = NoiseSpec("depolarizing", 20, 0.1)
    draws = 100000
    weights = np.bincount([sample_error(spec, rng).weight() for _ in range(draws)], minlength=21)
    expected = stats.binom.pmf(np.arange(21), 20, 0.1) * draws
    # pool the sparse tail so every expected cell is at least 5
    cut = int(np.nonzero(expected >= 5)[0].max())
    obs = np.append(weights[:cut], weights[cut:].sum())
    exp = np.append(expected[:cut], expected[cut:].sum())
    exp *= obs.sum() / exp.sum()
    assert stats.chisquare(obs, exp).pvalue > 0.001


def test_pmf_examples():
    spec = NoiseSpec("depolarizing", 2, 0.3)
    assert pmf(spec, PauliOperator(2)) == pytest.approx(0.49)
    assert pmf(spec, P("XI")) == pytest.approx(0.07)
    assert truncation_norm(2, 0.3, 1) == pytest.approx(0.91)
    trunc = NoiseSpec("truncated_depolarizing", 2, 0.3, 1)
    assert pmf(trunc, P("XI")) == pytest.approx(0.07 / 0.91)


def test_pmf_outside_support_is_flagged():
    trunc = NoiseSpec("truncated_depolarizing", 3, 0.2, 1)
    assert pmf_flagged(trunc, P("XXI")) == (0.0, False)
    prob, inside = pmf_flagged(trunc, P("XII"))
    assert inside and prob > 0
    flip = NoiseSpec("bitflip", 2, 0.2)
    assert not in_support(flip, P("ZI"))
    assert pmf(flip, P("ZI")) == 0.0


def test_pmf_size_mismatch():
    with pytest.raises(ValueError):
        pmf(NoiseSpec("depolarizing", 2, 0.1), P("X"))


@pytest.mark.parametrize(
    "args",
    [("depolarizing", 3, 0.8, None), ("bitflip", 3, 1.0, None), ("truncated_depolarizing", 3, 0.1, None), ("dephasing", 2, 0.1, None)],
)
def test_invalid_specs(args):
    with pytest.raises(ValueError):
        NoiseSpec(*args)


def _exact_pmf(kind, n, p, w_cut, e):
    # rational oracle from the product form
    w = e.weight()
    if kind == "bitflip":
        return Fraction(0) if e.z else p**w * (1 - p) ** (n - w)
    prob = (p / 3) ** w * (1 - p) ** (n - w)
    if kind == "truncated_depolarizing":
        if w > w_cut:
            return Fraction(0)
        norm = sum(math.comb(n, v) * p**v * (1 - p) ** (n - v) for v in range(w_cut + 1))
        prob /= norm
    return prob


@pytest.mark.parametrize("kind,w_cut", [("depolarizing", None), ("bitflip", None), ("truncated_depolarizing", 2)])
@pytest.mark.parametrize("n", [1, 3, 6])
def test_pmf_sums_to_one(kind, w_cut, n):
    p = Fraction(1, 7)
    spec = NoiseSpec(kind, n, float(p), None if w_cut is None else min(w_cut, n))
    exact = [_exact_pmf(kind, n, p, spec.w_cut, e) for e in every_pauli(n)]
    assert sum(exact) == 1
    floats = [pmf(spec, e) for e in every_pauli(n)]
    assert np.allclose(floats, [float(v) for v in exact], rtol=1e-12, atol=0)
    assert math.fsum(pmf(spec, e) for e in support(spec)) == pytest.approx(1.0, abs=1e-12)


def test_truncated_support_weights():
    spec = NoiseSpec("truncated_depolarizing", 5, 0.2, 2)
    sup = list(support(spec))
    assert all(e.weight() <= 2 for e in sup)
    assert len(sup) == 1 + 5 * 3 + 10 * 9
    rng = np.random.default_rng(3)
    assert all(sample_error(spec, rng).weight() <= 2 for _ in range(2000))


def test_truncated_conditional_uniform():
    rng = np.random.default_rng(4)
    spec = NoiseSpec("truncated_depolarizing", 4, 0.3, 2)
    by_weight: dict[int, Counter] = {1: Counter(), 2: Counter()}
    for _ in range(40000):
        e = sample_error(spec, rng)
        if e.weight():
            by_weight[e.weight()][str(e)] += 1
    assert len(by_weight[1]) == 12 and len(by_weight[2]) == 54
    for counts in by_weight.values():
        assert stats.chisquare(list(counts.values())).pvalue > 0.001


def test_weight_first_sampler_agrees():
    spec = NoiseSpec("truncated_depolarizing", 6, 0.3, 2)
    rng = np.random.default_rng(5)
    a = np.bincount([sample_error(spec, rng).weight() for _ in range(20000)], minlength=3)
    b = np.bincount([sample_error_by_weight(spec, rng).weight() for _ in range(20000)], minlength=3)
    assert stats.chi2_contingency(np.vstack([a, b])).pvalue > 0.001
    assert np.allclose(weight_pmf(spec).sum(), 1.0)


def test_bitflip_only_x():
    rng = np.random.default_rng(6)
    spec = NoiseSpec("bitflip", 10, 0.4)
    for _ in range(2000):
        assert sample_error(spec, rng).z == 0
        assert sample_error_by_weight(spec, rng).z == 0


def test_tail_bound_examples():
    assert tail_bound(0, 0.3) == 1.0
    assert tail_bound(120, 0.1) == pytest.approx(math.exp(-1))


def test_tail_bound_holds_empirically():
    rng = np.random.default_rng(7)
    n, p, draws = 100, 0.1, 100000
    # weights are Binomial(n, p); the channel sampler is checked against that above
    weights = rng.binomial(n, p, size=draws)
    freq = np.mean(weights >= 1.5 * n * p)
    assert freq <= tail_bound(n, p)


def test_tail_bound_holds_with_channel_sampler():
    rng = np.random.default_rng(8)
    spec = NoiseSpec("depolarizing", 100, 0.1)
    hits = sum(sample_error(spec, rng).weight() >= 15 for _ in range(20000))
    assert hits / 20000 <= tail_bound(100, 0.1)


def test_spec_json_round_trip():
    spec = NoiseSpec("truncated_depolarizing", 7, 0.05, 2)
    assert NoiseSpec.from_json(spec.to_json(), 7) == spec
