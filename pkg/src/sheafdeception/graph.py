"""Simple undirected graphs: ingestion, random generation and graph Laplacians."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ParseError

log = logging.getLogger(__name__)

# Directive written by `serialize` so isolated vertices and index order survive a round trip.
VERTICES_DIRECTIVE = "# vertices:"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on dense vertex ids ``0..n-1``.

    ``edges`` keeps one fixed orientation ``(u, v)`` per undirected edge; the
    orientation only decides the sign pattern of coboundary rows.
    ``labels[i]`` is the original label of vertex ``i`` when the graph was
    read from a file.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    labels: tuple[str, ...] | None = None
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"vertex count must be >= 0, got {self.n}")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        seen = set()
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {{{u}, {v}}}")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must have one entry per vertex")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", tuple(tuple(a) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def label_index(self) -> dict[str, int]:
        """Original label -> dense index."""
        if self.labels is None:
            return {str(i): i for i in range(self.n)}
        return {lab: i for i, lab in enumerate(self.labels)}

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj], dtype=np.int64)

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` integer array in stored orientation."""
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        e = self.edge_array()
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = 1
        return a

    def reoriented(self, flip: Sequence[bool]) -> Graph:
        """Same graph with the orientation of every edge where ``flip`` is true reversed."""
        if len(flip) != self.m:
            raise ValueError("flip mask must have one entry per edge")
        edges = tuple((v, u) if f else (u, v) for (u, v), f in zip(self.edges, flip))
        return Graph(self.n, edges, self.labels)


def canonical_edges(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    return tuple((u, v) if u < v else (v, u) for u, v in pairs)


@dataclass
class LoadStats:
    duplicates: int = 0
    self_loops: int = 0


def load_edge_list(text: str | TextIO, source: str | None = None, stats: LoadStats | None = None) -> Graph:
    """Parse an edge-list text into a :class:`Graph`.

    Each non-blank line holds two whitespace separated labels and an optional
    numeric weight, which is ignored. ``#`` starts a comment. Labels get dense
    indices in first-seen order; self-loops and repeated undirected edges are
    dropped and counted in ``stats``.
    """
    if stats is None:
        stats = LoadStats()
    stream = io.StringIO(text) if isinstance(text, str) else text
    index: dict[str, int] = {}
    labels: list[str] = []
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []

    def intern(label: str) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    for lineno, raw in enumerate(stream, start=1):
        if raw.startswith(VERTICES_DIRECTIVE):
            for label in raw[len(VERTICES_DIRECTIVE):].split():
                intern(label)
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ParseError(f"expected two vertex labels, got {line!r}", lineno, source)
        if len(tokens) > 3:
            raise ParseError(f"too many fields in {line!r}", lineno, source)
        if len(tokens) == 3:
            try:
                float(tokens[2])
            except ValueError:
                raise ParseError(f"edge weight {tokens[2]!r} is not numeric", lineno, source) from None
        u, v = intern(tokens[0]), intern(tokens[1])
        if u == v:
            stats.self_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            stats.duplicates += 1
            continue
        seen.add(key)
        edges.append(key)

    if stats.duplicates or stats.self_loops:
        log.info("dropped %d duplicate edges and %d self-loops", stats.duplicates, stats.self_loops)
    return Graph(len(labels), tuple(edges), tuple(labels))


def serialize(g: Graph, header: str | None = None) -> str:
    """Write ``g`` in the edge-list format read by :func:`load_edge_list`."""
    labels = g.labels if g.labels is not None else tuple(str(i) for i in range(g.n))
    out = []
    if header:
        out.extend(f"# {line}" for line in header.splitlines())
    out.append(f"{VERTICES_DIRECTIVE} {' '.join(labels)}".rstrip())
    out.extend(f"{labels[u]} {labels[v]}" for u, v in g.edges)
    return "\n".join(out) + "\n"


def erdos_renyi(n: int, p: float, seed: int | np.random.Generator | None = None) -> Graph:
    """G(n, p): every unordered pair becomes an edge independently with probability ``p``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    edges = tuple(zip(iu[keep].tolist(), ju[keep].tolist()))
    return Graph(n, edges)


def graph_laplacian(g: Graph) -> np.ndarray:
    """``D - A`` with unit edge weights, as a float array with exact integer entries."""
    a = g.adjacency_matrix()
    lap = np.diag(a.sum(axis=1)) - a
    return lap.astype(np.float64)


def delete_vertex(g: Graph, v: int) -> Graph:
    """Remove ``v`` and its incident edges; higher indices shift down by one."""
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range for graph with {g.n} vertices")

    def shift(i: int) -> int:
        return i - 1 if i > v else i

    edges = tuple((shift(a), shift(b)) for a, b in g.edges if a != v and b != v)
    labels = None if g.labels is None else g.labels[:v] + g.labels[v + 1:]
    return Graph(g.n - 1, edges, labels)
