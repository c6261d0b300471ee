from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from lsnlab.codes import five_qubit_code, gv_bound
from lsnlab.errors import ConfigError, GuardError
from lsnlab.harness import (
    CSV_COLUMNS,
    CSV_VERSION,
    ExperimentConfig,
    clopper_pearson,
    commitment_demo,
    gv_validate,
    lpn_full_rank_probability,
    pgm_threshold_expression,
    run_reduction,
    run_sweep,
    wilson_interval,
    worst_case_from_json,
    worst_case_to_json,
)
from lsnlab.pauli import PauliOperator
from lsnlab.reductions import AVERAGE_CASE_LABEL, WorstCaseInstance

PAIRS = [(0, 10), (1, 10), (5, 10), (10, 10), (0, 1), (1, 1), (3, 7), (17, 40), (50, 100), (99, 100),
         (1, 1000), (500, 1000), (999, 1000), (7, 20000), (9400, 20000), (3, 3), (2, 5), (120, 130), (33, 34), (400, 401)]


def _brute_cp(s, n, conf=0.95):
    # invert the binomial tails by bisection
    alpha = 1 - conf

    def bisect(f):
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = (lo + hi) / 2
            if f(mid):
                hi = mid
            else:
                lo = mid
        return (lo + hi) / 2

    lower = 0.0 if s == 0 else bisect(lambda q: stats.binom.sf(s - 1, n, q) >= alpha / 2)
    upper = 1.0 if s == n else bisect(lambda q: stats.binom.cdf(s, n, q) <= alpha / 2)
    return lower, upper


def _brute_wilson(s, n, conf=0.95):
    # score-test inversion on a fine grid, refined by bisection
    z = stats.norm.ppf(0.5 + conf / 2)
    phat = s / n

    def inside(q):
        return abs(phat - q) <= z * math.sqrt(q * (1 - q) / n)

    def edge(a, b):
        for _ in range(200):
            mid = (a + b) / 2
            if inside(mid) == inside(a):
                a = mid
            else:
                b = mid
        return (a + b) / 2

    lower = 0.0 if s == 0 else edge(0.0, phat)
    upper = 1.0 if s == n else edge(1.0, phat)
    return lower, upper


@pytest.mark.parametrize("s,n", PAIRS)
def test_intervals_cross_check(s, n):
    w = wilson_interval(s, n)
    cp = clopper_pearson(s, n)
    assert w == pytest.approx(_brute_wilson(s, n), abs=1e-9)
    assert cp == pytest.approx(_brute_cp(s, n), abs=1e-9)
    assert w[0] <= s / n <= w[1] and cp[0] <= s / n <= cp[1]
    # the exact interval is never much narrower than the score interval
    assert cp[1] - cp[0] >= (w[1] - w[0]) * 0.8


def test_zero_trial_interval():
    assert wilson_interval(0, 0) == (0.0, 1.0)


def _csv_rows(text):
    lines = text.splitlines()
    assert lines[0] == CSV_VERSION
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_zero_trial_config_gives_empty_report():
    cfg = ExperimentConfig.from_json({"trials": 0, "n": [5], "k": 1, "noise": {"kind": "depolarizing", "p": 0.1}})
    report = run_sweep(cfg)
    rows = _csv_rows(report.to_csv())
    assert rows[0]["trials"] == "0" and rows[0]["successes"] == "0"
    empty = run_sweep(ExperimentConfig.from_json({"trials": 10}))
    assert empty.rows == [] and _csv_rows(empty.to_csv()) == []


def test_csv_header_fixed():
    text = run_sweep(ExperimentConfig.from_json({"trials": 1, "n": [4], "k": 1})).to_csv()
    assert text.splitlines()[1].split(",") == CSV_COLUMNS


SWEEP = {
    "n": [8, 16, 24],
    "k": 1,
    "noise": {"kind": "depolarizing", "p": "1/n"},
    "decoder": "projection",
    "trials": 4000,
    "seed": 11,
}


@pytest.fixture(scope="module")
def projection_sweep():
    return run_sweep(ExperimentConfig.from_json(SWEEP))


def test_sweep_is_byte_stable(projection_sweep):
    small = {**SWEEP, "trials": 300}
    a = run_sweep(ExperimentConfig.from_json(small)).to_csv()
    b = run_sweep(ExperimentConfig.from_json(small)).to_csv()
    c = run_sweep(ExperimentConfig.from_json(small), threads=2).to_csv()
    assert a == b == c


def test_projection_sweep_bound(projection_sweep):
    for row in projection_sweep.rows:
        n, t = row.spec.n, row.trials
        q = (1 - 3 / (4 * n)) ** n
        assert row.rate >= q - 3 * math.sqrt(q * (1 - q) / t), (n, row.rate, q)


def test_projection_sweep_matches_exact_prediction(projection_sweep):
    rates = []
    for row in projection_sweep.rows:
        n, k, p, t = row.spec.n, row.spec.k, row.spec.noise.p, row.trials
        clean = (1 - p) ** n
        predicted = clean + (1 - clean) * (4**n // 2**k - 1) / (4**n - 1)
        assert abs(row.rate - predicted) <= 4 * math.sqrt(predicted * (1 - predicted) / t)
        rates.append(row.rate)
        lo, hi = row.interval
        assert lo <= row.rate <= hi and row.successes <= row.trials


def test_syndrome_ml_five_qubit_sweep():
    cfg = ExperimentConfig.from_json(
        {
            "code": "five-qubit",
            "noise": {"kind": "truncated_depolarizing", "p": 0.2, "w_cut": 1},
            "decoder": "syndrome-ml",
            "decoder_params": {"w_max": 1},
            "trials": 500,
        }
    )
    (row,) = run_sweep(cfg).rows
    assert row.rate == 1.0 and row.trials == 500


def test_multiblock_point():
    cfg = ExperimentConfig.from_json(
        {
            "points": [{"code": ["repetition", "five-qubit"], "n": 5, "noise": {"kind": "truncated_depolarizing", "p": 0.1, "w_cut": 1}}],
            "decoder": "pgm-multishot",
            "decoder_params": {"w_cut": 1},
            "trials": 20,
        }
    )
    (row,) = run_sweep(cfg).rows
    assert row.spec.m == 2 and row.rate == 1.0


def test_guarded_point_is_skipped():
    cfg = ExperimentConfig.from_json({"n": [12], "k": 1, "decoder": "pgm", "trials": 3, "noise": {"kind": "depolarizing", "p": 0.1}})
    (row,) = run_sweep(cfg).rows
    assert row.status.startswith("skipped") and row.trials == 0


@pytest.mark.parametrize(
    "data",
    [
        {"decoder": "magic"},
        {"trials": -1},
        {"n": [5], "k": 1, "noise": {"kind": "depolarizing", "p": "lots"}},
        {"n": [5], "k": 1, "noise": {"kind": "depolarizing", "p": 0.9}},
        {"points": {"n": 5}},
        {"points": [{"k": 1}]},
        {"points": [{"code": "steane"}]},
    ],
)
def test_bad_configs(data):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(data)


def test_gv_validate_examples():
    rng = np.random.default_rng(12)
    rep = gv_validate(12, 1, 2, 200, rng, p=0.05)
    assert rep["fraction"] >= max(0.0, gv_bound(12, 1, 2))
    assert rep["gv_bound_vacuous"]
    assert rep["pgm_threshold_expression"] == pytest.approx(pgm_threshold_expression(0.05, 1, 12))
    assert gv_validate(6, 1, 1, 50, rng)["fraction"] == 1.0


def test_threshold_expression_value():
    p, k, n = 0.05, 1, 10
    h = -(3 * p) * math.log2(3 * p) - (1 - 3 * p) * math.log2(1 - 3 * p)
    assert pgm_threshold_expression(p, k, n) == pytest.approx(h + 3 * math.log2(3) * p + k / n)


def test_commitment_demo():
    rng = np.random.default_rng(13)
    zero = commitment_demo(4, 1, 0.0, rng)
    assert zero["random"]["trace_distance"] == pytest.approx(0.0, abs=1e-12)
    rep = commitment_demo(4, 1, 0.1, rng, w_cut=1)
    cert = rep["certified"]
    assert cert["code"] == "five-qubit" and cert["distance"] == 3 and cert["w_cut"] == 1
    assert cert["trace_distance"] <= 1e-8
    for part in (rep["random"], cert):
        assert "bound_2exp(-np/48)" in part
    assert rep["random"]["bound_2exp(-np/48)"] == pytest.approx(2 * math.exp(-4 * 0.1 / 48))


def test_commitment_demo_guard():
    with pytest.raises(GuardError):
        commitment_demo(9, 1, 0.1, np.random.default_rng(0))


def test_worst_case_json_and_reduction():
    inst = WorstCaseInstance(five_qubit_code(), PauliOperator.from_string("IIXII"), 1, 1)
    back = worst_case_from_json(worst_case_to_json(inst))
    assert back.secret == 1 and back.error == inst.error and back.code.encoder == inst.code.encoder
    rep = run_reduction(back, "syndrome-ml", 200, 3, {"w_max": 1})
    assert rep["ensemble"] == AVERAGE_CASE_LABEL
    assert rep["rate"] == 1.0


def test_worst_case_json_errors():
    with pytest.raises(ConfigError):
        worst_case_from_json("{}")
    with pytest.raises(ConfigError):
        run_reduction(WorstCaseInstance(five_qubit_code(), PauliOperator(5), 0, 0), "guess", 1, 0)


def test_full_rank_formula():
    assert lpn_full_rank_probability(8, 2) == pytest.approx((1 - 2**-8) * (1 - 2**-7))


@pytest.mark.parametrize("name", ["projection_sweep", "five_qubit_syndrome_ml"])
def test_shipped_configs_reproduce_golden_csv(name):
    root = Path(__file__).resolve().parents[1]
    cfg = ExperimentConfig.from_json(json.loads((root / "configs" / f"{name}.json").read_text()))
    golden = (root / "tests" / "data" / f"golden_{name}.csv").read_text()
    assert run_sweep(cfg).to_csv() == golden
