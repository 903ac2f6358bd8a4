"""Experiment orchestration: training sets, per-graph training, reduced-parameter
evaluation, paired baselines, and the comparison report.

Every random choice flows from a master seed through stable_hash, so any stage
rerun with the same configuration reproduces its artifacts byte for byte.
Long stages checkpoint per graph into an append-only JSONL file keyed by the
configuration hash, and can be cut off and resumed.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import ParameterVector, approximation_ratio, objective
from .graphs import (
    Graph,
    WeightedGraph,
    assign_random_weights,
    canonical_key,
    enumerate_connected_nonisomorphic,
    sample_connected_nonisomorphic,
    unit_weights,
)
from .maxcut import brute_force_cmin, cost_diagonal
from .optimizer import OptimizerConfig, TQAConfig, minimize, train_graph
from .pca import CoefficientVector, ParameterMatrix, PCAModel, expand, sample_coefficients
from .records import METHOD_PCA, ComparisonRow, RunRecord
from .stats import PairedSample, median, rank_biserial, wilcoxon_signed_rank

TRAINING_SETS = ("unweighted", "weighted")
BASELINE_KINDS = ("same_layers", "same_params")
CHECKPOINT_FLUSH_EVERY = 50

# every (training set, layers, retained components) cell of the report
REPORT_CONFIGURATIONS = tuple(
    (ts, p, k)
    for ts in TRAINING_SETS
    for (p, k) in ((2, 2), (4, 2), (4, 4), (8, 2), (8, 4), (8, 8))
)


def stable_hash(*parts) -> int:
    """64-bit integer digest of the stringified parts; stable across runs and platforms."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


def config_hash(cfg) -> str:
    """Short hex fingerprint of a config's repr, for provenance and checkpoint keying."""
    return hashlib.sha256(repr(cfg).encode("utf-8")).hexdigest()[:12]


def graph_id(g: Graph) -> str:
    return canonical_key(g).id_string()


@dataclass(frozen=True)
class TrainingConfig:
    training_set: str = "unweighted"
    p: int = 2
    vertex_range: tuple[int, int] = (5, 7)
    seed: int = 0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    tqa: TQAConfig = field(default_factory=TQAConfig)

    def __post_init__(self):
        if self.training_set not in TRAINING_SETS:
            raise ValueError(f"training_set must be one of {TRAINING_SETS}, got {self.training_set!r}")
        if self.p not in (1, 2, 4, 8):
            raise ValueError(f"p must be one of 1, 2, 4, 8, got {self.p}")
        lo, hi = self.vertex_range
        if not (2 <= lo <= hi <= 7):
            raise ValueError(f"vertex_range must satisfy 2 <= lo <= hi <= 7, got {self.vertex_range}")


@dataclass(frozen=True)
class EvalConfig:
    p: int
    k_components: int
    n_eval: int = 8
    count: int = 1000
    restarts: int = 5
    seed: int = 0
    model_ref: str = ""
    require_reduction: bool = True

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be at least 1, got {self.p}")
        k_cap = self.p if self.require_reduction else 2 * self.p
        if not (1 <= self.k_components <= k_cap):
            raise ValueError(
                f"k_components must be in 1..{k_cap} for p={self.p}"
                f"{' (at most half the 2p parameters)' if self.require_reduction else ''},"
                f" got {self.k_components}"
            )
        if self.k_components % 2 != 0:
            raise ValueError(f"k_components must be even, got {self.k_components}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.count < 1:
            raise ValueError(f"count must be at least 1, got {self.count}")
        if not (2 <= self.n_eval <= 10):
            raise ValueError(f"n_eval must be in 2..10, got {self.n_eval}")


class Checkpoint:
    """Append-only JSONL of finished per-graph records, keyed by config hash.

    Lines from other configurations are preserved and ignored; a truncated
    final line (cut-off run) is skipped on load.
    """

    def __init__(self, path, config_key: str):
        self.path = Path(path)
        self.config_key = config_key
        self.done: dict[str, RunRecord] = {}
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError:
                        continue
                    if obj.get("config") != config_key:
                        continue
                    rec = RunRecord(
                        graph_id=obj["graph_id"],
                        method=obj["method"],
                        layers=obj["layers"],
                        param_count=obj["param_count"],
                        evals=obj["evals"],
                        approx_ratio=obj["approx_ratio"],
                        best_params=tuple(obj["best_params"]),
                    )
                    self.done[rec.graph_id] = rec
        self._fh = None
        self._pending = 0

    def add(self, rec: RunRecord) -> None:
        if self._fh is None:
            self._fh = open(self.path, "a", encoding="utf-8")
        payload = {
            "config": self.config_key,
            "graph_id": rec.graph_id,
            "method": rec.method,
            "layers": rec.layers,
            "param_count": rec.param_count,
            "evals": rec.evals,
            "approx_ratio": rec.approx_ratio,
            "best_params": list(rec.best_params),
        }
        self._fh.write(json.dumps(payload) + "\n")
        self._pending += 1
        if self._pending >= CHECKPOINT_FLUSH_EVERY:
            self._fh.flush()
            self._pending = 0
        self.done[rec.graph_id] = rec

    def close(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            self._fh.close()
            self._fh = None


def _attach_weights(graphs: list[Graph], weighted: bool, seed: int) -> list[WeightedGraph]:
    if not weighted:
        return [unit_weights(g) for g in graphs]
    return [assign_random_weights(g, stable_hash(seed, "weights", graph_id(g))) for g in graphs]


def build_graph_set(v_lo: int, v_hi: int, weighted: bool, seed: int) -> list[WeightedGraph]:
    """All connected non-isomorphic graphs on v_lo..v_hi vertices, ascending."""
    graphs = []
    for n in range(v_lo, v_hi + 1):
        graphs.extend(enumerate_connected_nonisomorphic(n))
    return _attach_weights(graphs, weighted, seed)


def build_eval_set(n: int, count: int, seed: int, weighted: bool = True) -> list[WeightedGraph]:
    """`count` sampled non-isomorphic n-vertex instances with persistent weights."""
    graphs = sample_connected_nonisomorphic(n, count, stable_hash(seed, "eval-sample", n))
    return _attach_weights(graphs, weighted, seed)


def build_training_set(cfg: TrainingConfig) -> list[WeightedGraph]:
    lo, hi = cfg.vertex_range
    return build_graph_set(lo, hi, cfg.training_set == "weighted", cfg.seed)


def _train_task(args) -> RunRecord:
    wg, p, tqa, opt = args
    _, rec = train_graph(wg, p, tqa, opt)
    return rec


def _pca_task(args) -> RunRecord:
    wg, model, training_rows, k, restarts, seed, opt = args
    training_X = ParameterMatrix(training_rows)
    gid = graph_id(wg.graph)
    diag = cost_diagonal(wg)
    cmin, _ = brute_force_cmin(wg)

    def f(c):
        return objective(diag, expand(model, CoefficientVector(tuple(float(v) for v in c))))

    best_ratio = -np.inf
    best_res = None
    for r in range(restarts):
        c0 = sample_coefficients(model, k, training_X, stable_hash(seed, "pca-init", gid, r))
        res = minimize(f, np.asarray(c0.coeffs), opt)
        ratio = approximation_ratio(res.best_value, cmin)
        if ratio > best_ratio:
            best_ratio = ratio
            best_res = res
    theta = expand(model, CoefficientVector(best_res.best_params))
    return RunRecord(
        graph_id=gid,
        method=METHOD_PCA,
        layers=model.p,
        param_count=k,
        evals=best_res.evals,
        approx_ratio=best_ratio,
        best_params=tuple(float(v) for v in theta.as_array()),
    )


def _map_tasks(fn, tasks, workers: int):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            yield from ex.map(fn, tasks, chunksize=max(1, len(tasks) // (8 * workers)))
    else:
        for t in tasks:
            yield fn(t)


def _run_stage(tasks_by_id: dict, task_fn, checkpoint: Checkpoint | None, workers: int) -> dict[str, RunRecord]:
    """Run the not-yet-done tasks, feeding the checkpoint as results arrive."""
    done = dict(checkpoint.done) if checkpoint else {}
    pending = [(gid, t) for gid, t in tasks_by_id.items() if gid not in done]
    try:
        for (gid, _), rec in zip(pending, _map_tasks(task_fn, [t for _, t in pending], workers)):
            if rec.graph_id != gid:
                raise RuntimeError(f"task for {gid} produced record for {rec.graph_id}")
            done[gid] = rec
            if checkpoint:
                checkpoint.add(rec)
    finally:
        if checkpoint:
            checkpoint.close()
    return done


def run_training(
    cfg: TrainingConfig,
    graphs: list[WeightedGraph] | None = None,
    checkpoint_path=None,
    workers: int = 1,
) -> tuple[list[str], ParameterMatrix, list[RunRecord]]:
    """Train every graph at depth cfg.p; rows keep the graph-set order."""
    if graphs is None:
        graphs = build_training_set(cfg)
    ids = [graph_id(wg.graph) for wg in graphs]
    if len(set(ids)) != len(ids):
        dupes = sorted({g for g in ids if ids.count(g) > 1})
        raise ValueError(f"training set contains duplicate graphs: {', '.join(dupes)}")
    tasks = {gid: (wg, cfg.p, cfg.tqa, cfg.optimizer) for gid, wg in zip(ids, graphs)}
    ckpt = Checkpoint(checkpoint_path, config_hash(cfg)) if checkpoint_path else None
    done = _run_stage(tasks, _train_task, ckpt, workers)
    records = [done[gid] for gid in ids]
    rows = np.array([rec.best_params for rec in records], dtype=np.float64)
    return ids, ParameterMatrix(rows), records


def evaluate_standard(
    p: int,
    eval_set: list[WeightedGraph],
    tqa: TQAConfig = TQAConfig(),
    optimizer_cfg: OptimizerConfig = OptimizerConfig(),
    checkpoint_path=None,
    workers: int = 1,
) -> list[RunRecord]:
    """Full-parameter runs on each evaluation graph, sorted by graph id."""
    tasks = {graph_id(wg.graph): (wg, p, tqa, optimizer_cfg) for wg in eval_set}
    key = config_hash(("standard", p, tqa, optimizer_cfg))
    ckpt = Checkpoint(checkpoint_path, key) if checkpoint_path else None
    done = _run_stage(tasks, _train_task, ckpt, workers)
    return [done[gid] for gid in sorted(tasks)]


def evaluate_pca(
    cfg: EvalConfig,
    model: PCAModel,
    eval_set: list[WeightedGraph],
    training_X: ParameterMatrix,
    optimizer_cfg: OptimizerConfig = OptimizerConfig(),
    checkpoint_path=None,
    workers: int = 1,
) -> list[RunRecord]:
    """Reduced runs over cfg.k_components coefficients, sorted by graph id.

    Each graph gets cfg.restarts starts drawn from the training projection
    ranges; the best-ratio restart wins and its evaluation count is recorded.
    """
    if cfg.p != model.p:
        raise ValueError(f"config p={cfg.p} but the model was fit at p={model.p}")
    if cfg.k_components > model.n_components:
        raise ValueError(
            f"k_components={cfg.k_components} exceeds the model's {model.n_components} components"
        )
    if training_X.p != model.p:
        raise ValueError(f"training matrix p={training_X.p} does not match model p={model.p}")
    tasks = {
        graph_id(wg.graph): (
            wg,
            model,
            training_X.rows,
            cfg.k_components,
            cfg.restarts,
            cfg.seed,
            optimizer_cfg,
        )
        for wg in eval_set
    }
    ckpt = Checkpoint(checkpoint_path, config_hash((cfg, optimizer_cfg))) if checkpoint_path else None
    done = _run_stage(tasks, _pca_task, ckpt, workers)
    return [done[gid] for gid in sorted(tasks)]


def compare(
    pca_records: list[RunRecord],
    baseline_records: list[RunRecord],
    baseline_kind: str,
    training_set: str = "",
) -> ComparisonRow:
    """Paired signed-rank comparison on evaluation counts and approximation ratios."""
    if baseline_kind not in BASELINE_KINDS:
        raise ValueError(f"baseline_kind must be one of {BASELINE_KINDS}, got {baseline_kind!r}")
    if not pca_records:
        raise ValueError("empty record lists")
    a_ids = [r.graph_id for r in pca_records]
    b_ids = [r.graph_id for r in baseline_records]
    if a_ids != b_ids:
        offending = sorted(set(a_ids).symmetric_difference(b_ids)) or [
            f"{x} vs {y}" for x, y in zip(a_ids, b_ids) if x != y
        ]
        raise ValueError(f"record lists not aligned by graph_id: {', '.join(offending[:20])}")
    evals = PairedSample(
        tuple(float(r.evals) for r in pca_records),
        tuple(float(r.evals) for r in baseline_records),
    )
    ratio = PairedSample(
        tuple(r.approx_ratio for r in pca_records),
        tuple(r.approx_ratio for r in baseline_records),
    )
    test_evals = wilcoxon_signed_rank(evals)
    test_ratio = wilcoxon_signed_rank(ratio)
    return ComparisonRow(
        training_set=training_set,
        layers=pca_records[0].layers,
        param_count=pca_records[0].param_count,
        baseline_kind=baseline_kind,
        n_pairs=len(pca_records),
        median_evals=median([r.evals for r in pca_records]),
        median_evals_baseline=median([r.evals for r in baseline_records]),
        p_value_evals=test_evals.p_value,
        rbc_evals=test_evals.rbc,
        median_ratio=median([r.approx_ratio for r in pca_records]),
        median_ratio_baseline=median([r.approx_ratio for r in baseline_records]),
        p_value_ratio=test_ratio.p_value,
        rbc_ratio=test_ratio.rbc,
    )


def report_configurations() -> tuple[tuple[str, int, int], ...]:
    return REPORT_CONFIGURATIONS


def pca_records_filename(training_set: str, p: int, k: int) -> str:
    return f"pca_{training_set}_p{p}_k{k}.csv"


def standard_records_filename(p: int) -> str:
    return f"standard_p{p}.csv"


def scatter_filename(training_set: str, p: int, k: int) -> str:
    return f"scatter_{training_set}_p{p}_k{k}.csv"


REPORT_COLUMNS = [
    "Training Set",
    "# Layers",
    "# Param.",
    "Iter. Med.",
    "Iter. Med. (Same # Layers)",
    "Iter. P-Val. (Same # Layers)",
    "Iter. RBC (Same # Layers)",
    "Iter. Med. (Same # Param.)",
    "Iter. P-Val. (Same # Param.)",
    "Iter. RBC (Same # Param.)",
    "Ratio Med.",
    "Ratio Med. (Same # Layers)",
    "Ratio P-Val. (Same # Layers)",
    "Ratio RBC (Same # Layers)",
    "Ratio Med. (Same # Param.)",
    "Ratio P-Val. (Same # Param.)",
    "Ratio RBC (Same # Param.)",
]


def render_report(rows: list[tuple[ComparisonRow, ComparisonRow]], timestamp: str | None = None) -> str:
    """Markdown comparison table: one line per configuration, both baselines."""

    def num(x: float) -> str:
        return format(x, ".4g")

    lines = ["# Reduced-parameter QAOA comparison", ""]
    if timestamp:
        lines += [f"Generated {timestamp}", ""]
    lines.append("| " + " | ".join(REPORT_COLUMNS) + " |")
    lines.append("|" + "|".join([" --- "] * len(REPORT_COLUMNS)) + "|")
    for same_layers, same_params in rows:
        if (
            same_layers.training_set != same_params.training_set
            or same_layers.layers != same_params.layers
            or same_layers.param_count != same_params.param_count
        ):
            raise ValueError("baseline rows of one configuration disagree on identity fields")
        cells = [
            same_layers.training_set,
            str(same_layers.layers),
            str(same_layers.param_count),
            num(same_layers.median_evals),
            num(same_layers.median_evals_baseline),
            num(same_layers.p_value_evals),
            num(same_layers.rbc_evals),
            num(same_params.median_evals_baseline),
            num(same_params.p_value_evals),
            num(same_params.rbc_evals),
            num(same_layers.median_ratio),
            num(same_layers.median_ratio_baseline),
            num(same_layers.p_value_ratio),
            num(same_layers.rbc_ratio),
            num(same_params.median_ratio_baseline),
            num(same_params.p_value_ratio),
            num(same_params.rbc_ratio),
        ]
        lines.append("| " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)


def scatter_rows(
    pca_records: list[RunRecord],
    same_layers_records: list[RunRecord],
    same_params_records: list[RunRecord],
) -> list[tuple[int, float, str]]:
    """(evals, approx_ratio, method) points for one configuration's scatter file."""
    out = []
    for rec in pca_records:
        out.append((rec.evals, rec.approx_ratio, "pca"))
    for rec in same_layers_records:
        out.append((rec.evals, rec.approx_ratio, "same_layers"))
    for rec in same_params_records:
        out.append((rec.evals, rec.approx_ratio, "same_params"))
    return out
