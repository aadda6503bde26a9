import numpy as np
import pytest

from sheafdeception.centrality import CentralityKind
from sheafdeception.deception import RelationType
from sheafdeception.experiment import (
    RELATIONS,
    ExperimentConfig,
    RunFailedError,
    RunRecord,
    aggregate,
    baseline_scores,
    default_tau_grid,
    influence_score,
    mix_seed,
    run_single,
    tau_sweep,
)
from sheafdeception.graph import Graph, erdos_renyi

from conftest import path

LAP, DFF = CentralityKind.LAPLACIAN, CentralityKind.DFF
BOTH = (LAP, DFF)


def fake_record(run, scores, relations, kind=LAP):
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    n = scores.shape[1]
    return RunRecord(run, run, np.full(n, 0.5), {kind: np.zeros(n)},
                     {kind: np.asarray(relations, dtype=np.int8)}, {kind: scores})


def test_default_grid_has_41_points():
    grid = default_tau_grid()
    assert len(grid) == 41 and grid[0] == 0.0 and grid[-1] == 1.0 and grid[20] == 0.5


def test_mix_seed_is_splitmix64():
    # first SplitMix64 output from state 0
    assert mix_seed(0, 0) == 0xE220A8397B1DCDAF
    assert len({mix_seed(7, i) for i in range(1000)}) == 1000


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(runs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(tau_grid=(0.5, 0.2))
    with pytest.raises(ValueError):
        ExperimentConfig(tau_grid=(1.2,))
    with pytest.raises(ValueError):
        ExperimentConfig(tau_grid=())
    with pytest.raises(ValueError):
        ExperimentConfig(deletion="sometimes")


@pytest.mark.parametrize("kind", BOTH)
def test_tau_one_reproduces_baseline(kind):
    g = erdos_renyi(40, 0.15, 3)
    cfg = ExperimentConfig(centralities=(kind,), tau_grid=(1.0,), runs=1)
    rec = run_single(g, cfg, 12345)
    np.testing.assert_allclose(rec.scores[kind][0], baseline_scores(g, kind, cfg), rtol=0, atol=1e-10)


def test_run_single_is_deterministic():
    g = erdos_renyi(30, 0.2, 1)
    cfg = ExperimentConfig(centralities=BOTH, tau_grid=(0.0, 0.5, 1.0), runs=1)
    a, b = run_single(g, cfg, 99), run_single(g, cfg, 99)
    for kind in BOTH:
        assert np.array_equal(a.scores[kind], b.scores[kind])
        assert np.array_equal(a.relations[kind], b.relations[kind])
    assert np.array_equal(a.opinions, b.opinions)


def test_run_single_path_relation_counts():
    cfg = ExperimentConfig(centralities=BOTH, tau_grid=(0.3,), runs=1)
    rec = run_single(path(30), cfg, 4)
    for kind in BOTH:
        assert np.bincount(rec.relations[kind], minlength=3).tolist() == [10, 10, 10]


def test_opinions_independent_of_selected_kinds():
    g = erdos_renyi(20, 0.3, 0)
    a = run_single(g, ExperimentConfig(centralities=(DFF,), tau_grid=(0.5,)), 5)
    b = run_single(g, ExperimentConfig(centralities=BOTH, tau_grid=(0.5,)), 5)
    assert np.array_equal(a.opinions, b.opinions)
    assert np.array_equal(a.scores[DFF], b.scores[DFF])


def test_run_single_rejects_tiny_graphs():
    with pytest.raises(ValueError):
        run_single(Graph(2, ((0, 1),)), ExperimentConfig(tau_grid=(0.5,)), 1)


def test_influence_score_constant_field():
    rel = np.repeat([0, 1, 2], 10)
    recs = [fake_record(0, np.ones(30), rel)]
    for r in RELATIONS:
        assert influence_score(recs, r, LAP) == pytest.approx(1 / 3)
    doubled = recs + [fake_record(1, np.ones(30), rel)]
    assert influence_score(doubled, RelationType.HONEST, LAP) == pytest.approx(2 / 3)


def test_influence_score_hand_example():
    # run 0: honest get 0.1 and 0.4; run 1: honest gets 0.3 (vertex 2)
    recs = [fake_record(0, [0.1, 0.2, 0.4, 0.8], [0, 1, 2, 0]),
            fake_record(1, [0.5, 0.7, 0.3, 0.6], [1, 2, 0, 1])]
    assert influence_score(recs, RelationType.HONEST, LAP) == pytest.approx((0.1 + 0.8 + 0.3) / 4)
    assert influence_score(recs, RelationType.PROSOCIAL, LAP) == pytest.approx((0.2 + 0.5 + 0.6) / 4)
    assert influence_score(recs, RelationType.ANTISOCIAL, LAP) == pytest.approx((0.4 + 0.7) / 4)


def test_influence_score_per_tau_and_grid_mean():
    recs = [fake_record(0, [[1.0, 2.0, 3.0], [3.0, 4.0, 5.0]], [0, 1, 2])]
    assert influence_score(recs, RelationType.HONEST, LAP, 0) == pytest.approx(1 / 3)
    assert influence_score(recs, RelationType.HONEST, LAP, 1) == pytest.approx(1.0)
    assert influence_score(recs, RelationType.HONEST, LAP) == pytest.approx(2 / 3)


@pytest.fixture(scope="module")
def small_sweep():
    g = erdos_renyi(30, 0.2, 11)
    cfg = ExperimentConfig(centralities=BOTH, tau_grid=(0.0, 0.25, 1.0), runs=6, master_seed=3)
    return g, cfg, tau_sweep(g, cfg, workers=1)


def test_single_run_sweep_matches_run_single():
    g = erdos_renyi(30, 0.2, 11)
    cfg = ExperimentConfig(centralities=(LAP,), tau_grid=(0.0, 1.0), runs=1, master_seed=8)
    report = tau_sweep(g, cfg)
    rec = run_single(g, cfg, mix_seed(8, 0))
    assert np.array_equal(report.records[0].scores[LAP], rec.scores[LAP])
    for row in report.rows:
        k = cfg.tau_grid.index(row.tau)
        assert row.mean == pytest.approx(rec.scores[LAP][k][rec.relations[LAP] == row.relation].mean(), abs=1e-15)


def test_worker_count_does_not_change_results(small_sweep):
    g, cfg, serial = small_sweep
    parallel = tau_sweep(g, cfg, workers=3)
    assert serial.seeds == parallel.seeds
    for a, b in zip(serial.rows, parallel.rows):
        assert (a.mean, a.std) == (b.mean, b.std)
    assert serial.s_r == parallel.s_r


def test_partition_completeness(small_sweep):
    g, cfg, report = small_sweep
    for kind in BOTH:
        total = sum(rec.scores[kind].mean(axis=0).sum() for rec in report.records) / g.n
        assert abs(sum(report.s_r[kind].values()) - total) <= 1e-10
        for k in range(len(cfg.tau_grid)):
            per_tau = sum(rec.scores[kind][k].sum() for rec in report.records) / g.n
            assert abs(sum(v[k] for v in report.s_r_by_tau[kind].values()) - per_tau) <= 1e-10


def test_report_means_reproduce_from_records(small_sweep):
    g, cfg, report = small_sweep
    for row in report.rows:
        k = cfg.tau_grid.index(row.tau)
        vals = np.concatenate([rec.scores[row.centrality][k][rec.relations[row.centrality] == row.relation]
                               for rec in report.records])
        assert abs(row.mean - vals.mean()) <= 1e-12
        assert row.runs == cfg.runs
    assert len(report.rows) == len(cfg.tau_grid) * 3 * 2


def test_tau_one_vertex_scores_equal_baseline(small_sweep):
    g, cfg, report = small_sweep
    k = cfg.tau_grid.index(1.0)
    for rec in report.records:
        for kind in BOTH:
            assert np.max(np.abs(rec.scores[kind][k] - rec.baseline[kind])) <= 1e-10


def test_tau_one_group_means_within_noise(small_sweep):
    g, cfg, report = small_sweep
    for kind in BOTH:
        rows = [r for r in report.rows if r.tau == 1.0 and r.centrality is kind]
        means = [r.mean for r in rows]
        spread = max(r.std for r in rows)
        assert max(means) - min(means) < 3 * spread


def test_rank_aggregation_total(small_sweep):
    g, cfg, report = small_sweep
    for kind in BOTH:
        assert sum(report.s_r_rank[kind].values()) == pytest.approx(cfg.runs * (g.n + 1) / 2)


def test_rebuild_semantics_runs():
    g = erdos_renyi(20, 0.3, 2)
    cfg = ExperimentConfig(tau_grid=(0.2, 1.0), runs=2, deletion="rebuild")
    report = tau_sweep(g, cfg)
    frozen = tau_sweep(g, ExperimentConfig(tau_grid=(0.2, 1.0), runs=2))
    np.testing.assert_allclose(report.records[0].scores[LAP][1], frozen.records[0].scores[LAP][1], atol=1e-12)
    assert not np.allclose(report.records[0].scores[LAP][0], frozen.records[0].scores[LAP][0])


def test_failed_run_reports_seed():
    cfg = ExperimentConfig(tau_grid=(0.5,), runs=2, master_seed=1)
    with pytest.raises(RunFailedError) as info:
        tau_sweep(Graph(3), cfg)
    assert info.value.seed == mix_seed(1, 0)


def test_aggregate_is_order_independent(small_sweep):
    g, cfg, report = small_sweep
    again = aggregate(g, cfg, list(report.records))
    assert [r.mean for r in again.rows] == [r.mean for r in report.rows]
