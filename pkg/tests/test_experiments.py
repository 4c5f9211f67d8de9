import json

import pytest

from hadq.analysis import EXPERIMENTS, resolve_params, run_experiment
from hadq.errors import InvalidParameters, UnknownExperiment

SMALL = {
    "burke": {"window": 5000.0, "warmup": 500.0, "replicas": 4},
    "invariance": {"samples": 60, "replicas": 2, "time": 2.0},
    "convergence": {"samples": 60, "replicas": 2, "time": 2.0},
    "multiclass-burke": {"samples": 60, "replicas": 2},
    "dual-points": {"replicas": 40, "time": 10.0},
    "regeneration": {"replicas": 30, "string_samples": 30},
    "coalescence": {"replicas": 5},
    "shock": {"replicas": 10},
}


def test_every_experiment_has_small_parameters():
    assert set(SMALL) == set(EXPERIMENTS)


@pytest.mark.parametrize("name", sorted(SMALL))
def test_rerun_is_byte_identical(name):
    a = run_experiment(name, SMALL[name], seed=7)
    b = run_experiment(name, SMALL[name], seed=7)
    assert a.to_json() == b.to_json()
    assert a.samples_csv() == b.samples_csv()
    doc = json.loads(a.to_json())
    assert {"experiment", "params", "seed", "tests", "verdicts"} <= doc.keys()
    assert "runtime_s" not in doc
    assert "runtime_s" in json.loads(a.to_json(timing=True))
    for v in doc["verdicts"].values():
        assert {"criterion", "threshold", "passed"} <= v.keys()


@pytest.mark.parametrize("name", ["burke", "dual-points", "coalescence"])
def test_jobs_do_not_change_report(name):
    a = run_experiment(name, SMALL[name], seed=3, jobs=1)
    b = run_experiment(name, SMALL[name], seed=3, jobs=2)
    assert a.to_json() == b.to_json()


def test_seed_changes_report():
    a = run_experiment("burke", SMALL["burke"], seed=1)
    b = run_experiment("burke", SMALL["burke"], seed=2)
    assert a.to_json() != b.to_json()


def test_burke_report_contents():
    r = run_experiment("burke", SMALL["burke"], seed=5)
    assert len(r.tests) == 4
    assert all(t.name.endswith("departure-gaps") for t in r.tests)
    assert r.verdicts["pass_rate"].threshold == 0.95


def test_parameter_validation():
    with pytest.raises(InvalidParameters):
        resolve_params("burke", {"lam": 1.0, "rho": 0.5})
    with pytest.raises(InvalidParameters):
        resolve_params("burke", {"bogus": 1})
    with pytest.raises(InvalidParameters):
        resolve_params("invariance", {"counts": (60, 30)})
    with pytest.raises(InvalidParameters):
        resolve_params("regeneration", {"rates": (1.0, 0.5)})
    with pytest.raises(InvalidParameters):
        resolve_params("regeneration", {"string": (4, 1, 2)})
    with pytest.raises(InvalidParameters):
        resolve_params("shock", {"lam": 0.5, "rho": 1.0})
    with pytest.raises(InvalidParameters):
        resolve_params("burke", {"replicas": 2.5})
    with pytest.raises(UnknownExperiment):
        run_experiment("nope")


def test_parameters_coerced_from_strings():
    p = resolve_params("invariance", {"counts": "10,20", "cycle": "50"})
    assert p["counts"] == (10, 20) and p["cycle"] == 50.0


def test_coalescence_records_absorption_times():
    r = run_experiment("coalescence", SMALL["coalescence"], seed=1)
    assert len(r.samples["absorption_time"]) == 5
    assert r.summary["median_absorption_time"] > 0
    assert r.passed


def test_shock_reports_both_readings():
    r = run_experiment("shock", SMALL["shock"], seed=1)
    assert {"reading_A", "reading_B"} <= r.summary.keys()
    assert r.summary["reading_A"]["mean_displacement"] < 0
