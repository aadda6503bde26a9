"""Command line interface: ``gen-er``, ``centrality`` and ``sweep``.

Exit codes: 0 success, 1 usage error, 2 input or parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from typing import Sequence

import numpy as np

from .centrality import (
    DEFAULT_DFF_TIME,
    CentralityKind,
    Source,
    degree_distribution,
    dff_centrality,
    laplacian_centrality,
    laplacian_centrality_rebuild,
    rank_vertices,
    uniform_distribution,
)
from .deception import DeceptionAssignment, RelationType, assign_relations_stratified, public_opinions, sample_opinions
from .errors import DegenerateEnergyError, NumericError, ParseError, SingularOpinionError
from .experiment import RELATIONS, ExperimentConfig, ExperimentReport, RunFailedError, baseline_scores, tau_sweep
from .graph import Graph, LoadStats, erdos_renyi, load_edge_list, serialize
from .sheaf import build_coboundary, sheaf_laplacian
from .spectral import eigh

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

CONFIG_KEYS = {
    "graph", "er_n", "er_p", "er_seed", "kind", "runs", "seed", "tau_points", "tau_grid",
    "t", "distribution", "deletion", "workers", "out_dir", "prefix", "raw",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_graph(path: str) -> Graph:
    stats = LoadStats()
    with open(path, encoding="utf-8") as fh:
        g = load_edge_list(fh, source=path, stats=stats)
    if stats.duplicates or stats.self_loops:
        print(f"{path}: dropped {stats.duplicates} duplicate edges, {stats.self_loops} self-loops", file=sys.stderr)
    return g


def read_values(path: str, n: int, convert) -> list:
    """One value per line in vertex order; ``#`` comments and blank lines skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(convert(line))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, path) from None
    if len(values) != n:
        raise ParseError(f"expected {n} values, found {len(values)}", None, path)
    return values


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file with ``#`` comments."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected 'key = value', got {line!r}", lineno, path)
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in CONFIG_KEYS:
                raise ParseError(f"unknown config key {key!r}", lineno, path)
            out[key] = value
    return out


def cmd_gen_er(args) -> int:
    if not 0.0 <= args.p <= 1.0:
        raise UsageError(f"--p must lie in [0, 1], got {args.p}")
    if args.n < 0:
        raise UsageError(f"--n must be >= 0, got {args.n}")
    g = erdos_renyi(args.n, args.p, args.seed)
    text = serialize(g, header=f"erdos_renyi n={g.n} p={args.p} seed={args.seed} m={g.m}")
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"n={g.n} m={g.m}")
    return EXIT_OK


def _dff_distribution(g: Graph, name: str) -> np.ndarray:
    return degree_distribution(g) if name == "degree" else uniform_distribution(g.n)


def cmd_centrality(args) -> int:
    g = read_graph(args.graph)
    kind = CentralityKind(args.kind)
    cfg = ExperimentConfig(graph_path=args.graph, centralities=(kind,), tau_grid=(args.tau,), runs=1,
                           master_seed=args.seed, dff_time=args.t, dff_distribution=args.distribution,
                           deletion=args.deletion)
    rng = np.random.default_rng(args.seed)
    if args.opinions:
        x = np.array(read_values(args.opinions, g.n, float))
    else:
        x = sample_opinions(g.n, rng)
    if args.relations:
        rel = np.array(read_values(args.relations, g.n, RelationType.parse), dtype=np.int8)
    else:
        rel = assign_relations_stratified(baseline_scores(g, kind, cfg), rng, kind.higher_is_more_influential)

    a = DeceptionAssignment(x, rel, args.tau)
    delta = build_coboundary(g, a)
    if kind is CentralityKind.LAPLACIAN:
        if args.deletion == "rebuild":
            c = laplacian_centrality_rebuild(g, a, delta)
        else:
            c = laplacian_centrality(g, delta, method=args.method)
    else:
        c = dff_centrality(eigh(sheaf_laplacian(delta).matrix), _dff_distribution(g, args.distribution), args.t)

    y = public_opinions(g, a)
    order = rank_vertices(c)
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(1, g.n + 1)
    labels = g.labels or tuple(str(i) for i in range(g.n))
    header = ["vertex", "label", "relation", "opinion", "public_opinion", "score", "rank"]
    rows = [[str(v), labels[v], RelationType(int(rel[v])).label, fmt(x[v]), fmt(y[v]), fmt(c.scores[v]), str(rank[v])]
            for v in range(g.n)]
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
        print("  ".join(h.ljust(wd) for h, wd in zip(header, widths)))
        for r in rows:
            print("  ".join(val.ljust(wd) for val, wd in zip(r, widths)))
    return EXIT_OK


def _merge_sweep_settings(args) -> dict:
    settings = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            settings[key] = val
    return settings


def config_from_settings(s: dict) -> tuple[ExperimentConfig, dict]:
    def get(key, conv, default=None):
        if key not in s:
            return default
        try:
            return conv(s[key])
        except ValueError:
            raise UsageError(f"invalid value for {key}: {s[key]!r}") from None

    if "tau_grid" in s:
        grid = s["tau_grid"]
        grid = grid if isinstance(grid, (list, tuple)) else [float(t) for t in str(grid).replace(",", " ").split()]
    else:
        parts = get("tau_points", int, 40)
        if parts < 1:
            raise UsageError("tau_points must be >= 1")
        grid = [k / parts for k in range(parts + 1)]
    kinds = s.get("kind", "laplacian")
    if isinstance(kinds, str):
        kinds = [k for k in kinds.replace(",", " ").split() if k]
    try:
        kinds = [CentralityKind(k) for k in kinds]
        cfg = ExperimentConfig(
            graph_path=s.get("graph"),
            er_n=get("er_n", int),
            er_p=get("er_p", float),
            er_seed=get("er_seed", int, 0),
            centralities=tuple(kinds),
            tau_grid=tuple(grid),
            runs=get("runs", int, 100),
            master_seed=get("seed", int, 0),
            dff_time=get("t", float, DEFAULT_DFF_TIME),
            dff_distribution=s.get("distribution", "uniform"),
            deletion=s.get("deletion", "frozen"),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if cfg.graph_path is None and (cfg.er_n is None or cfg.er_p is None):
        raise UsageError("sweep needs --graph or both --er-n and --er-p")
    raw = s.get("raw", False)
    if isinstance(raw, str):
        raw = raw.strip().lower() in ("1", "true", "yes", "on")
    out = {
        "out_dir": s.get("out_dir", "."),
        "prefix": s.get("prefix", "sweep"),
        "raw": bool(raw),
        "workers": get("workers", int),
    }
    return cfg, out


def sweep_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "relation", "centrality", "mean", "std", "runs"])
    for row in report.rows:
        w.writerow([fmt(row.tau), row.relation.label, row.centrality.value, fmt(row.mean), fmt(row.std), row.runs])
    return buf.getvalue()


def raw_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run", "seed", "centrality", "tau", "vertex", "relation", "opinion", "score"])
    taus = [fmt(t) for t in report.config.tau_grid]
    for rec in report.records:
        for kind in report.config.centralities:
            rel = rec.relations[kind]
            labels = [RelationType(int(r)).label for r in rel]
            for k, tau in enumerate(taus):
                s = rec.scores[kind][k]
                for v in range(s.size):
                    w.writerow([rec.run, rec.seed, kind.value, tau, v, labels[v], fmt(rec.opinions[v]), fmt(s[v])])
    return buf.getvalue()


def summary_json(report: ExperimentReport) -> dict:
    per_kind = lambda table: {k.value: {r.label: v for r, v in table[k].items()} for k in table}  # noqa: E731
    return {
        "graph": {"n": report.n, "m": report.m},
        "config": report.config.to_dict(),
        "master_seed": report.config.master_seed,
        "run_seeds": report.seeds,
        "S_R": per_kind(report.s_r),
        "S_R_by_tau": per_kind(report.s_r_by_tau),
        "S_R_rank": per_kind(report.s_r_rank),
        "relations": [r.label for r in RELATIONS],
        "elapsed_seconds": report.elapsed,
    }


def cmd_sweep(args) -> int:
    cfg, out = config_from_settings(_merge_sweep_settings(args))
    g = cfg.load_graph()
    report = tau_sweep(g, cfg, workers=out["workers"])
    os.makedirs(out["out_dir"], exist_ok=True)
    base = os.path.join(out["out_dir"], out["prefix"])
    with open(base + ".csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(sweep_csv(report))
    with open(base + ".json", "w", encoding="utf-8") as fh:
        json.dump(summary_json(report), fh, indent=2)
        fh.write("\n")
    if out["raw"]:
        with open(base + "_raw.csv", "w", encoding="utf-8", newline="") as fh:
            fh.write(raw_csv(report))
    for kind in cfg.centralities:
        vals = "  ".join(f"{r.label}={report.s_r[kind][r]:.6f}" for r in RELATIONS)
        print(f"{kind.value}: S_R {vals}")
    print(f"wrote {base}.csv and {base}.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sheafdeception", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen-er", help="write an Erdos-Renyi graph as an edge list")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path; stdout when omitted")
    g.set_defaults(func=cmd_gen_er)

    c = sub.add_parser("centrality", help="per-vertex sheaf centrality for one tau")
    c.add_argument("--graph", required=True)
    c.add_argument("--kind", choices=[k.value for k in CentralityKind], default="laplacian")
    c.add_argument("--tau", type=float, default=1.0)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--relations", help="file with one relation type per line")
    c.add_argument("--opinions", help="file with one opinion per line")
    c.add_argument("--t", type=float, default=DEFAULT_DFF_TIME, help="DFF diffusion time")
    c.add_argument("--distribution", choices=["uniform", "degree"], default="uniform")
    c.add_argument("--deletion", choices=["frozen", "rebuild"], default="frozen")
    c.add_argument("--method", choices=["incremental", "full"], default="incremental")
    c.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    c.set_defaults(func=cmd_centrality)

    s = sub.add_parser("sweep", help="Monte-Carlo tau sweep")
    s.add_argument("--config", help="key = value config file; flags override it")
    s.add_argument("--graph")
    s.add_argument("--er-n", dest="er_n", type=int)
    s.add_argument("--er-p", dest="er_p", type=float)
    s.add_argument("--er-seed", dest="er_seed", type=int)
    s.add_argument("--kind", help="comma separated centrality kinds")
    s.add_argument("--runs", type=int)
    s.add_argument("--seed", type=int, help="master seed")
    s.add_argument("--tau-points", dest="tau_points", type=int, help="split [0, 1] into this many parts")
    s.add_argument("--tau-grid", dest="tau_grid", help="explicit comma separated tau values")
    s.add_argument("--t", type=float)
    s.add_argument("--distribution", choices=["uniform", "degree"])
    s.add_argument("--deletion", choices=["frozen", "rebuild"])
    s.add_argument("--workers", type=int, help="worker processes (default $SHEAFDEC_WORKERS or 1)")
    s.add_argument("--out-dir", dest="out_dir")
    s.add_argument("--prefix")
    s.add_argument("--raw", action="store_true", default=None, help="also write per-run raw CSV")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RunFailedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        numeric = isinstance(exc.cause, (SingularOpinionError, DegenerateEnergyError, NumericError))
        return EXIT_NUMERIC if numeric else EXIT_INPUT
    except (SingularOpinionError, DegenerateEnergyError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
