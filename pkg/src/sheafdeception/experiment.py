"""Monte-Carlo tau sweep: opinions, stratified relation labels, sheaf centralities, aggregation."""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .centrality import (
    DEFAULT_DFF_TIME,
    CentralityKind,
    CentralityVector,
    Source,
    degree_distribution,
    dff_centrality,
    laplacian_centrality,
    laplacian_centrality_rebuild,
    rank_vertices,
    uniform_distribution,
)
from .deception import DeceptionAssignment, RelationType, assign_relations_stratified, sample_opinions
from .errors import SheafDeceptionError
from .graph import Graph, erdos_renyi, graph_laplacian, load_edge_list
from .sheaf import build_coboundary, sheaf_laplacian
from .spectral import eigh

log = logging.getLogger(__name__)

WORKERS_ENV = "SHEAFDEC_WORKERS"
MASK64 = (1 << 64) - 1
RELATIONS = tuple(RelationType)

# Stream ids for the per-run generators; fixed so that selecting fewer
# centralities does not shift anyone else's random numbers.
_OPINION_STREAM = 0
_RELATION_STREAM = {CentralityKind.LAPLACIAN: 1, CentralityKind.DFF: 2}


def default_tau_grid(parts: int = 40) -> tuple[float, ...]:
    return tuple(k / parts for k in range(parts + 1))


def mix_seed(master_seed: int, index: int) -> int:
    """SplitMix64 finaliser applied to ``master_seed + (index + 1) * golden_gamma``."""
    z = (master_seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RunFailedError(SheafDeceptionError):
    def __init__(self, run: int, seed: int, cause: Exception):
        self.run, self.seed, self.cause = run, seed, cause
        super().__init__(f"run {run} (seed {seed}) failed: {cause}")


@dataclass
class ExperimentConfig:
    graph_path: str | None = None
    er_n: int | None = None
    er_p: float | None = None
    er_seed: int = 0
    centralities: tuple[CentralityKind, ...] = (CentralityKind.LAPLACIAN,)
    tau_grid: tuple[float, ...] = field(default_factory=default_tau_grid)
    runs: int = 100
    master_seed: int = 0
    dff_time: float = DEFAULT_DFF_TIME
    dff_distribution: str = "uniform"
    deletion: str = "frozen"

    def __post_init__(self):
        self.centralities = tuple(CentralityKind(c) for c in self.centralities)
        self.tau_grid = tuple(float(t) for t in self.tau_grid)
        self.validate()

    def validate(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.tau_grid:
            raise ValueError("tau grid must not be empty")
        if any(not 0.0 <= t <= 1.0 for t in self.tau_grid):
            raise ValueError("every tau must lie in [0, 1]")
        if list(self.tau_grid) != sorted(self.tau_grid):
            raise ValueError("tau grid must be sorted")
        if not self.centralities:
            raise ValueError("at least one centrality kind is required")
        if self.dff_time <= 0:
            raise ValueError("dff time must be positive")
        if self.dff_distribution not in ("uniform", "degree"):
            raise ValueError(f"unknown dff distribution {self.dff_distribution!r}")
        if self.deletion not in ("frozen", "rebuild"):
            raise ValueError(f"unknown deletion semantics {self.deletion!r}")

    def load_graph(self) -> Graph:
        if self.graph_path is not None:
            with open(self.graph_path, encoding="utf-8") as fh:
                return load_edge_list(fh, source=self.graph_path)
        if self.er_n is None or self.er_p is None:
            raise ValueError("config needs either graph_path or er_n and er_p")
        return erdos_renyi(self.er_n, self.er_p, self.er_seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["centralities"] = [c.value for c in self.centralities]
        d["tau_grid"] = list(self.tau_grid)
        return d


@dataclass
class RunRecord:
    """Everything one Monte-Carlo run produced.

    ``scores[kind]`` has shape ``(len(tau_grid), n)``; relation labels are
    per kind because each kind stratifies on its own baseline ranking.
    """

    run: int
    seed: int
    opinions: np.ndarray
    baseline: dict[CentralityKind, np.ndarray]
    relations: dict[CentralityKind, np.ndarray]
    scores: dict[CentralityKind, np.ndarray]


def _distribution(g: Graph, cfg: ExperimentConfig) -> np.ndarray:
    return degree_distribution(g) if cfg.dff_distribution == "degree" else uniform_distribution(g.n)


def baseline_scores(g: Graph, kind: CentralityKind, cfg: ExperimentConfig) -> np.ndarray:
    """Deception-free centrality on the graph Laplacian."""
    if kind is CentralityKind.LAPLACIAN:
        return laplacian_centrality(g).scores
    return dff_centrality(eigh(graph_laplacian(g)), _distribution(g, cfg), cfg.dff_time, Source.GRAPH).scores


def sheaf_scores(g: Graph, a: DeceptionAssignment, kind: CentralityKind, cfg: ExperimentConfig) -> np.ndarray:
    delta = build_coboundary(g, a)
    if kind is CentralityKind.LAPLACIAN:
        if cfg.deletion == "rebuild":
            return laplacian_centrality_rebuild(g, a, delta).scores
        return laplacian_centrality(g, delta).scores
    lap = sheaf_laplacian(delta).matrix
    return dff_centrality(eigh(lap), _distribution(g, cfg), cfg.dff_time).scores


def run_single(g: Graph, cfg: ExperimentConfig, run_seed: int, run: int = 0) -> RunRecord:
    if g.n < 3 or g.m < 1:
        raise ValueError("a sweep needs at least 3 vertices and one edge")
    x = sample_opinions(g.n, np.random.default_rng([run_seed, _OPINION_STREAM]))
    baseline, relations, scores = {}, {}, {}
    for kind in cfg.centralities:
        base = baseline_scores(g, kind, cfg)
        rng = np.random.default_rng([run_seed, _RELATION_STREAM[kind]])
        rel = assign_relations_stratified(base, rng, kind.higher_is_more_influential)
        grid = np.empty((len(cfg.tau_grid), g.n))
        for k, tau in enumerate(cfg.tau_grid):
            grid[k] = sheaf_scores(g, DeceptionAssignment(x, rel, tau), kind, cfg)
        baseline[kind], relations[kind], scores[kind] = base, rel, grid
    return RunRecord(run, run_seed, x, baseline, relations, scores)


def _run_chunk(args) -> list[RunRecord]:
    g, cfg, items = args
    out = []
    for run, seed in items:
        try:
            out.append(run_single(g, cfg, seed, run))
        except Exception as exc:  # reported with the failing seed
            raise RunFailedError(run, seed, exc) from exc
    return out


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def influence_score(records: list[RunRecord], relation: RelationType, kind: CentralityKind,
                    tau_index: int | None = None) -> float:
    """``S_R = (1/|V|) * sum over runs and vertices labelled R of their score``.

    With ``tau_index=None`` each vertex score is first averaged over the tau grid.
    """
    if not records:
        raise ValueError("no records")
    total = 0.0
    n = records[0].opinions.size
    for rec in records:
        s = rec.scores[kind]
        c = s.mean(axis=0) if tau_index is None else s[tau_index]
        total += float(np.sum(c[rec.relations[kind] == relation]))
    return total / n


def rank_positions(scores: np.ndarray, kind: CentralityKind) -> np.ndarray:
    """1-based influence rank of every vertex, per row of ``scores``."""
    scores = np.atleast_2d(scores)
    out = np.empty_like(scores)
    for k, row in enumerate(scores):
        order = rank_vertices(CentralityVector(row, kind, Source.SHEAF))
        out[k, order] = np.arange(1, row.size + 1)
    return out


@dataclass
class SweepRow:
    tau: float
    relation: RelationType
    centrality: CentralityKind
    mean: float
    std: float
    runs: int


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    n: int
    m: int
    seeds: list[int]
    rows: list[SweepRow]
    s_r: dict[CentralityKind, dict[RelationType, float]]
    s_r_by_tau: dict[CentralityKind, dict[RelationType, list[float]]]
    s_r_rank: dict[CentralityKind, dict[RelationType, float]]
    records: list[RunRecord]
    elapsed: float = 0.0

    def mean(self, kind: CentralityKind, relation: RelationType) -> np.ndarray:
        """Mean score curve over the tau grid."""
        return np.array([r.mean for r in self.rows if r.centrality is kind and r.relation is relation])


def aggregate(g: Graph, cfg: ExperimentConfig, records: list[RunRecord]) -> ExperimentReport:
    rows = []
    s_r, s_r_by_tau, s_r_rank = {}, {}, {}
    for kind in cfg.centralities:
        stack = np.stack([rec.scores[kind] for rec in records])  # runs x tau x n
        labels = np.stack([rec.relations[kind] for rec in records])  # runs x n
        ranks = np.stack([rank_positions(rec.scores[kind], kind) for rec in records])
        s_r[kind], s_r_by_tau[kind], s_r_rank[kind] = {}, {}, {}
        for k, tau in enumerate(cfg.tau_grid):
            for rel in RELATIONS:
                vals = stack[:, k, :][labels == rel]
                std = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
                rows.append(SweepRow(tau, rel, kind, float(np.mean(vals)), std, len(records)))
        for rel in RELATIONS:
            s_r_by_tau[kind][rel] = [influence_score(records, rel, kind, k) for k in range(len(cfg.tau_grid))]
            s_r[kind][rel] = influence_score(records, rel, kind)
            mask = labels == rel
            s_r_rank[kind][rel] = float(sum(ranks[i].mean(axis=0)[mask[i]].sum() for i in range(len(records)))) / g.n
    return ExperimentReport(cfg, g.n, g.m, [r.seed for r in records], rows, s_r, s_r_by_tau, s_r_rank, records)


def tau_sweep(g: Graph, cfg: ExperimentConfig, workers: int | None = None) -> ExperimentReport:
    """Run ``cfg.runs`` independent runs and aggregate them.

    Run ``i`` uses seed ``mix_seed(master_seed, i)`` no matter which worker
    executes it, and results are reassembled in run order, so the report does
    not depend on the worker count.
    """
    cfg.validate()
    start = time.perf_counter()
    items = [(i, mix_seed(cfg.master_seed, i)) for i in range(cfg.runs)]
    workers = min(resolve_workers(workers), cfg.runs)
    if workers == 1:
        records = _run_chunk((g, cfg, items))
    else:
        chunks = [items[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [(g, cfg, c) for c in chunks]))
        records = sorted((rec for part in parts for rec in part), key=lambda r: r.run)
    report = aggregate(g, cfg, records)
    report.elapsed = time.perf_counter() - start
    log.info("sweep of %d runs finished in %.2fs", cfg.runs, report.elapsed)
    return report
