"""Seeded embedding experiments: one host per trial, one CSV row per tree.

A config is a JSON object::

    {
      "name": "k8-all",
      "gen": {"kind": "complete", "n": 8},
      "d": 1, "delta": 7,
      "tree_source": {"kind": "enumerate"},
      "thresholds": {"tau_path": 24},
      "budget": {"max_restarts": 3},
      "trials": 1,
      "seed": 7,
      "output": "k8.csv"
    }

``tree_source.kind`` is ``enumerate`` (every labelled tree, n <= 9),
``sample`` (``count`` uniform trees with maximum degree <= ``delta``) or
``almost-all`` (``count`` trees capped at ``2 log n / log log n``). Host
seeds and tree seeds are split from ``seed``, so the rows do not depend on
the worker count (``TREEUNIV_WORKERS``).
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

from .embed import CaseThresholds, EmbedBudget, EmbedReport, embed_spanning_tree
from .errors import InputError
from .generators import GenSpec
from .formats import read_graph
from .expansion import m_param
from .rng import check_seed, split_seeds
from .graph import validate_embedding
from .trees import Tree, almost_all_max_degree, default_thresholds, pruefer_from_tree, random_bounded_degree_tree, tree_from_pruefer

SCHEMA_VERSION = 1
WORKERS_ENV = "TREEUNIV_WORKERS"
COLUMNS = (
    "trial",
    "host_seed",
    "tree_index",
    "pruefer",
    "max_degree",
    "case",
    "fallback",
    "stages",
    "failure_stage",
    "success",
    "valid",
)
TIMING_COLUMN = "wall_ms"
ENUMERATE_LIMIT = 9
CHUNK = 2048


@dataclass
class ExperimentConfig:
    name: str
    gen: dict
    d: float
    delta: float | None = None
    tree_source: dict = field(default_factory=lambda: {"kind": "sample", "count": 10})
    thresholds: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)
    b: int | None = None
    trials: int = 1
    seed: int | None = None
    output: str | None = None

    def __post_init__(self):
        if self.seed is None:
            raise InputError("experiment config needs a seed")
        check_seed(self.seed)
        if self.trials < 1:
            raise InputError("trials must be positive")
        spec = GenSpec.from_json(dict(self.gen, seed=self.gen.get("seed", 0)))
        if spec.kind == "doubled" and not Path(spec.base or "").exists():
            raise InputError(f"base graph {spec.base!r} does not exist")
        kind = self.tree_source.get("kind")
        if kind == "enumerate":
            if spec.n > ENUMERATE_LIMIT:
                raise InputError(f"enumerate is limited to n <= {ENUMERATE_LIMIT}")
        elif kind in ("sample", "almost-all"):
            if int(self.tree_source.get("count", 0)) < 1:
                raise InputError("tree_source needs a positive count")
        else:
            raise InputError(f"unknown tree_source kind {kind!r}")
        unknown = set(self.thresholds) - set(CaseThresholds.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown threshold keys {sorted(unknown)}")

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json(obj)

    @property
    def n(self) -> int:
        return int(self.gen["n"])

    def tree_delta(self) -> float:
        src = self.tree_source
        if src["kind"] == "almost-all":
            return almost_all_max_degree(self.n)
        if src["kind"] == "sample":
            return float(src.get("delta", self.delta if self.delta is not None else self.n - 1))
        return float(self.n - 1)

    def tree_count(self) -> int:
        if self.tree_source["kind"] == "enumerate":
            return self.n ** (self.n - 2) if self.n >= 2 else 1
        return int(self.tree_source["count"])

    def resolved(self) -> dict:
        out = asdict(self)
        out["tree_delta"] = self.tree_delta()
        out["embed_delta"] = self.delta if self.delta is not None else self.tree_delta()
        return out


def _pruefer_of_index(n: int, i: int) -> list[int]:
    seq = []
    for _ in range(n - 2):
        i, r = divmod(i, n)
        seq.append(r)
    return seq[::-1]


@lru_cache(maxsize=8)
def _host(gen_json: str, seed: int):
    obj = json.loads(gen_json)
    spec = GenSpec.from_json(dict(obj, seed=obj.get("seed", seed)))
    base = read_graph(spec.base)[0] if spec.kind == "doubled" else None
    return spec.build(base)


def _tree(cfg: ExperimentConfig, tree_seeds, i: int):
    if cfg.tree_source["kind"] == "enumerate":
        if cfg.n == 1:
            return Tree(1, [])
        return tree_from_pruefer(_pruefer_of_index(cfg.n, i))
    return random_bounded_degree_tree(cfg.n, cfg.tree_delta(), tree_seeds[i])


def _run_chunk(args) -> list[dict]:
    cfg_json, trial, host_seed, tree_root, embed_root, start, stop, timing = args
    cfg = ExperimentConfig.from_json(json.loads(cfg_json))
    G = _host(json.dumps(cfg.gen, sort_keys=True), host_seed)
    count = cfg.tree_count()
    sampled = cfg.tree_source["kind"] != "enumerate"
    tree_seeds = split_seeds(tree_root, count) if sampled else None
    # enumerations can have millions of trees, so their seeds are offsets
    embed_seeds = split_seeds(embed_root, count) if sampled else None
    thresholds = CaseThresholds(**cfg.thresholds)
    delta = cfg.resolved()["embed_delta"]
    rows = []
    for i in range(start, stop):
        T = _tree(cfg, tree_seeds, i)
        seed = embed_seeds[i] if embed_seeds else (embed_root + i) % 2**64
        budget = EmbedBudget(**dict(cfg.budget, seed=seed))
        t0 = time.perf_counter()
        if T.n != G.n:
            raise InputError(f"host has {G.n} vertices, trees have {T.n}")
        if T.max_degree() > delta:
            rep = EmbedReport(False, None, None, {}, failure_stage="max_degree")
        else:
            rep = embed_spanning_tree(G, T, delta, cfg.d, thresholds, budget)
        valid = rep.embedding is not None and validate_embedding(rep.embedding, T, G)
        row = {
            "trial": trial,
            "host_seed": host_seed,
            "tree_index": i,
            "pruefer": "-".join(map(str, pruefer_from_tree(T))) if T.n > 2 else "",
            "max_degree": T.max_degree(),
            "case": rep.case or "",
            "fallback": rep.fallback_used or "",
            "stages": ";".join(f"{s['stage']}:{'ok' if s['ok'] else 'fail'}" for s in rep.stages),
            "failure_stage": rep.failure_stage or "",
            "success": int(rep.success),
            "valid": int(valid),
        }
        if timing:
            row[TIMING_COLUMN] = f"{(time.perf_counter() - t0) * 1000:.3f}"
        rows.append(row)
    return rows


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        k = int(raw)
    except ValueError as exc:
        raise InputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, k)


def run_experiment(cfg: ExperimentConfig, *, workers: int | None = None, timing: bool = False) -> tuple[list[dict], dict]:
    """Rows (ordered by trial, then tree) and a summary."""
    workers = workers or workers_from_env()
    cfg_json = json.dumps(asdict(cfg), sort_keys=True)
    count = cfg.tree_count()
    jobs = []
    for trial, s in enumerate(split_seeds(cfg.seed, cfg.trials)):
        host_seed, tree_root, embed_root = split_seeds(s, 3)
        for start in range(0, count, CHUNK):
            jobs.append((cfg_json, trial, host_seed, tree_root, embed_root, start, min(count, start + CHUNK), timing))
    if workers == 1:
        chunks = map(_run_chunk, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        chunks = pool.map(_run_chunk, jobs)
    rows = [row for chunk in chunks for row in chunk]
    if workers != 1:
        pool.shutdown()
    by_case: dict[str, int] = {}
    for r in rows:
        key = r["case"] or ("fallback-" + r["fallback"] if r["fallback"] else "none")
        by_case[key] = by_case.get(key, 0) + 1
    successes = sum(r["success"] for r in rows)
    resolved = cfg.resolved()
    m = m_param(cfg.n, cfg.d)
    dp, dl = default_thresholds(resolved["embed_delta"], m)
    tau_path = cfg.thresholds.get("tau_path") or dp
    tau_leaves = cfg.thresholds.get("tau_leaves") or dl
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": resolved,
        "thresholds": {
            "m": m,
            "tau_path": tau_path,
            "tau_leaves": tau_leaves,
            "path_multiplier": tau_path / dp,
            "leaves_multiplier": tau_leaves / dl,
        },
        "columns": list(COLUMNS) + ([TIMING_COLUMN] if timing else []),
        "rows": len(rows),
        "successes": successes,
        "success_rate": successes / len(rows) if rows else 0.0,
        "routes": dict(sorted(by_case.items())),
    }
    return rows, summary


def rows_to_csv(rows: list[dict], config: dict, timing: bool = False) -> str:
    """CSV text; the first line is ``# `` followed by the resolved config as JSON."""
    buf = io.StringIO()
    buf.write("# " + json.dumps(config, sort_keys=True, separators=(",", ":")) + "\n")
    cols = list(COLUMNS) + ([TIMING_COLUMN] if timing else [])
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
