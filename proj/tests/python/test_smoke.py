import csv
import math

import pytest

import cascade_bandits as cb

SMALL = """
[environment]
type = cascade
L = 8
K = 2
p = 0.2
delta = 0.15

[policy]
name = cascade-klucb

[experiment]
n_steps = 2000
n_runs = 3
log_every = 100
"""


def test_reward_and_clicks():
    assert cb.list_value([0, 1], [0.2, 0.2, 0.0]) == pytest.approx(0.36)
    assert cb.first_click([2, 0], [0, 0, 1]) == 1
    assert cb.first_click([0, 1], [0, 0, 0]) is None
    assert cb.observed_weights(2, 4) == [(1, 0), (2, 1)]
    assert cb.observed_weights(None, 2) == [(1, 0), (2, 0)]
    assert cb.optimal_list([0.2, 0.2, 0.05, 0.05], 2) == [0, 1]


def test_estimators():
    assert cb.bernoulli_kl(0.2, 0.5) == pytest.approx(0.192745, abs=1e-6)
    assert cb.klucb_upper(0.0, 1, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-9)
    assert cb.klucb_upper(1.0, 3, 2.0) == 1.0
    assert cb.klucb_threshold(1) == 0.0
    assert cb.ucb1_radius(1, 1) == 0.0


def test_bounds():
    means = cb.blb_means(16, 2, 0.2, 0.15)
    assert cb.ucb1_bound(means, 2, 100000) == pytest.approx(12947.114, abs=1e-3)
    assert cb.lower_bound_constant(16, 2, 0.2, 0.15) == pytest.approx(17.883, abs=1e-3)
    report = cb.bound_report(16, 2, 0.2, 0.15, 100000)
    assert report["klucb_upper_leading"] < report["ucb1_upper"]
    lhs, rhs = cb.lemma1_oracle([0, 1], [2, 1], [0.3, 0.5, 0.9])
    assert lhs == pytest.approx(rhs, abs=1e-12)
    assert cb.lemma3_check([0.6, 0.4], 0.1)[2]


def test_errors_map_to_value_error():
    with pytest.raises(ValueError):
        cb.list_value([0, 5], [0.1, 0.2])
    with pytest.raises(ValueError):
        cb.parse_config("[environment]\nK = 20\nL = 4\n")


def test_config_round_trip():
    canonical = cb.to_ini(SMALL)
    assert cb.to_ini(canonical) == canonical
    assert cb.fingerprint(SMALL) == cb.fingerprint(canonical)
    assert len(cb.fingerprint(SMALL)) == 16


def test_experiment_and_files(tmp_path):
    result = cb.run_experiment(SMALL)
    assert result["step"][-1] == 2000
    assert len(result["mean_cum_regret"]) == 20
    assert result == cb.run_experiment(SMALL, threads=2)
    trace = cb.run_single(SMALL, 0)
    assert trace[-1][0] == 2000

    out = tmp_path / "run.csv"
    cb.write_results(SMALL, out)
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["step", "mean_cum_regret", "stderr", "n_runs", "config_fingerprint"]
    assert len(rows) == 21
    assert rows[-1][4] == cb.fingerprint(SMALL)
    assert (tmp_path / "run.json").exists()


def test_short_reproduction():
    report = cb.reproduce("dbn", n_steps=500, n_runs=2)
    assert len(report["cells"]) == 4
    assert report["criteria"][0]["id"] == 4
    with pytest.raises(ValueError):
        cb.reproduce("nope", n_steps=10, n_runs=1)


def test_selfcheck():
    assert all(r["passed"] for r in cb.run_selfcheck())
