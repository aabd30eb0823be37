from __future__ import annotations

import csv
import io
import json

import pytest

from treeuniv.errors import InputError
from treeuniv.experiment import (
    COLUMNS,
    TIMING_COLUMN,
    ExperimentConfig,
    _pruefer_of_index,
    rows_to_csv,
    run_experiment,
    workers_from_env,
)
from treeuniv.trees import all_pruefer_sequences


def cfg(**kw):
    base = {"name": "t", "gen": {"kind": "complete", "n": 6}, "d": 1, "tree_source": {"kind": "enumerate"}, "seed": 3}
    base.update(kw)
    return ExperimentConfig.from_json(base)


def test_pruefer_index_matches_enumeration_order():
    assert [tuple(_pruefer_of_index(5, i)) for i in range(125)] == list(all_pruefer_sequences(5))


def test_enumerate_into_complete_graph():
    rows, summary = run_experiment(cfg(), workers=1)
    assert len(rows) == 6**4 == summary["rows"]
    assert summary["successes"] == len(rows) and all(r["valid"] for r in rows)
    assert len({r["pruefer"] for r in rows}) == 6**4
    assert summary["config"]["seed"] == 3 and summary["columns"] == list(COLUMNS)


def test_sampled_trees_on_random_host():
    c = cfg(
        gen={"kind": "gnp", "n": 40, "p": 0.5},
        d=8,
        delta=4,
        tree_source={"kind": "sample", "count": 12, "delta": 4},
        thresholds={"tau_path": 8, "tau_leaves": 6},
        trials=2,
    )
    rows, summary = run_experiment(c, workers=1)
    assert [(r["trial"], r["tree_index"]) for r in rows] == [(t, i) for t in range(2) for i in range(12)]
    assert len({r["host_seed"] for r in rows}) == 2
    assert all(r["max_degree"] <= 4 for r in rows)
    assert all(r["valid"] == r["success"] for r in rows)
    assert summary["thresholds"]["tau_path"] == 8 and summary["thresholds"]["path_multiplier"] < 1


def test_trees_above_delta_are_reported_not_embedded():
    c = cfg(gen={"kind": "complete", "n": 5}, delta=2)
    rows, _ = run_experiment(c, workers=1)
    bad = [r for r in rows if r["max_degree"] > 2]
    assert bad and all(r["failure_stage"] == "max_degree" and not r["success"] for r in bad)


def test_csv_is_reproducible_and_carries_config():
    c = cfg(gen={"kind": "gnp", "n": 20, "p": 0.6}, d=3, tree_source={"kind": "almost-all", "count": 5})
    a = rows_to_csv(*_rows_and_config(c))
    assert a == rows_to_csv(*_rows_and_config(c))
    header, body = a.split("\n", 1)
    assert json.loads(header[2:])["seed"] == 3
    table = list(csv.DictReader(io.StringIO(body)))
    assert len(table) == 5 and list(table[0]) == list(COLUMNS)


def _rows_and_config(c):
    rows, summary = run_experiment(c, workers=1)
    return rows, summary["config"]


def test_timing_column_only_on_request():
    rows, summary = run_experiment(cfg(gen={"kind": "complete", "n": 4}), workers=1, timing=True)
    assert TIMING_COLUMN in rows[0] and summary["columns"][-1] == TIMING_COLUMN
    assert TIMING_COLUMN in rows_to_csv(rows, summary["config"], timing=True).splitlines()[1]


def test_worker_count_does_not_change_rows():
    c = cfg(gen={"kind": "gnp", "n": 7, "p": 0.7}, trials=3)
    assert run_experiment(c, workers=1) == run_experiment(c, workers=2)


@pytest.mark.parametrize(
    "bad",
    [
        {"seed": None},
        {"trials": 0},
        {"tree_source": {"kind": "enumerate"}, "gen": {"kind": "complete", "n": 10}},
        {"tree_source": {"kind": "sample"}},
        {"tree_source": {"kind": "bfs"}},
        {"thresholds": {"tau": 3}},
        {"gen": {"kind": "gnp", "n": 5}},
        {"gen": {"kind": "doubled", "n": 4, "base": "/nonexistent/graph.txt"}},
        {"colour": "red"},
    ],
)
def test_config_validation(bad):
    with pytest.raises(InputError):
        cfg(**bad)


def test_load_rejects_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        ExperimentConfig.load(p)


def test_workers_env(monkeypatch):
    monkeypatch.setenv("TREEUNIV_WORKERS", "3")
    assert workers_from_env() == 3
    monkeypatch.setenv("TREEUNIV_WORKERS", "lots")
    with pytest.raises(InputError):
        workers_from_env()
