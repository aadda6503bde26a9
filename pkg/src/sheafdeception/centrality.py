"""Laplacian-energy and diffusion Frechet centralities on graph or sheaf Laplacians."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .deception import DeceptionAssignment
from .errors import DegenerateEnergyError
from .graph import Graph, delete_vertex, graph_laplacian
from .sheaf import CoboundaryMatrix, rebuild_without_vertex, restrict_to_subgraph, sheaf_laplacian
from .spectral import Spectrum, diffusion_distance_matrix, eigh, laplacian_energy

DEFAULT_DFF_TIME = 0.5
DISTRIBUTION_TOL = 1e-10


class CentralityKind(str, enum.Enum):
    LAPLACIAN = "laplacian"
    DFF = "dff"

    @property
    def higher_is_more_influential(self) -> bool:
        return self is CentralityKind.LAPLACIAN


class Source(str, enum.Enum):
    GRAPH = "graph"
    SHEAF = "sheaf"


@dataclass(frozen=True)
class CentralityVector:
    scores: np.ndarray
    kind: CentralityKind
    source: Source

    def __len__(self) -> int:
        return self.scores.size


def _normalised_drop(total: float, remaining: np.ndarray) -> np.ndarray:
    if total <= 0.0:
        raise DegenerateEnergyError("Laplacian energy is zero; the graph needs at least one edge")
    return (total - remaining) / total


def deletion_energies_full(delta: CoboundaryMatrix) -> np.ndarray:
    """Energy of the frozen sheaf after deleting each vertex, recomputed from scratch."""
    return np.array([
        laplacian_energy(sheaf_laplacian(restrict_to_subgraph(delta, v)).matrix)
        for v in range(delta.n_vertices)
    ])


def deletion_energies_incremental(delta: CoboundaryMatrix, lap: np.ndarray | None = None) -> np.ndarray:
    """Frozen-sheaf deletion energies by updating the full Frobenius norm.

    Deleting ``v`` removes its row and column block from ``L``; each edge ``e``
    to a neighbour ``w`` also loses its term ``F_we^T F_we`` from w's diagonal
    block. Nothing else in the survivors' Laplacian changes.
    """
    if lap is None:
        lap = sheaf_laplacian(delta).matrix
    total = float(np.sum(lap * lap))
    ev = delta.edge_vertices
    pairs = np.sort(ev, axis=1)
    simple = np.unique(pairs, axis=0).shape[0] == pairs.shape[0]
    if delta.scalar_stalks and simple:
        return _scalar_deletion_energies(delta, lap, total)

    out = np.empty(delta.n_vertices)
    for v in range(delta.n_vertices):
        sv = delta.vertex_block(v)
        rows = lap[sv, :]
        energy = total - 2.0 * float(np.sum(rows * rows)) + float(np.sum(lap[sv, sv] ** 2))
        diag_blocks: dict[int, np.ndarray] = {}
        for e in np.flatnonzero((ev[:, 0] == v) | (ev[:, 1] == v)):
            w = int(ev[e, 1] if ev[e, 0] == v else ev[e, 0])
            sw = delta.vertex_block(w)
            b = delta.matrix[delta.edge_block(e), sw]
            cur = diag_blocks.get(w)
            if cur is None:
                cur = lap[sw, sw]
            new = cur - b.T @ b
            energy += float(np.sum(new * new) - np.sum(cur * cur))
            diag_blocks[w] = new
        out[v] = energy
    return out


def _scalar_deletion_energies(delta: CoboundaryMatrix, lap: np.ndarray, total: float) -> np.ndarray:
    n = delta.n_vertices
    diag = np.diag(lap)
    own = 2.0 * np.sum(lap * lap, axis=1) - diag * diag
    ev = delta.edge_vertices
    rows = np.arange(ev.shape[0])
    u, w = ev[:, 0], ev[:, 1]
    au2 = delta.matrix[rows, u] ** 2
    aw2 = delta.matrix[rows, w] ** 2
    # deleting u shrinks w's diagonal by aw2, and vice versa
    owner = np.concatenate([u, w])
    change = np.concatenate([(diag[w] - aw2) ** 2 - diag[w] ** 2, (diag[u] - au2) ** 2 - diag[u] ** 2])
    # accumulate per vertex in edge order so flipping an edge cannot reorder the sum
    order = np.lexsort((np.concatenate([rows, rows]), owner))
    corr = np.zeros(n)
    np.add.at(corr, owner[order], change[order])
    return total - own + corr


def laplacian_centrality(
    g: Graph,
    delta: CoboundaryMatrix | None = None,
    method: str = "incremental",
) -> CentralityVector:
    """Relative Laplacian-energy drop when each vertex and its edges are deleted.

    With ``delta=None`` this is the classical graph centrality computed from
    ``graph_laplacian(delete_vertex(g, v))``. Otherwise the sheaf built on
    ``delta`` is used with frozen restriction maps; ``method`` picks the
    incremental update or a full recomputation per vertex.
    """
    if delta is None:
        total = laplacian_energy(graph_laplacian(g))
        if total <= 0.0:
            raise DegenerateEnergyError("Laplacian energy is zero; the graph needs at least one edge")
        remaining = np.array([laplacian_energy(graph_laplacian(delete_vertex(g, v))) for v in range(g.n)])
        return CentralityVector(_normalised_drop(total, remaining), CentralityKind.LAPLACIAN, Source.GRAPH)

    lap = sheaf_laplacian(delta).matrix
    total = laplacian_energy(lap)
    if method == "incremental":
        remaining = deletion_energies_incremental(delta, lap)
    elif method == "full":
        remaining = deletion_energies_full(delta)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CentralityVector(_normalised_drop(total, remaining), CentralityKind.LAPLACIAN, Source.SHEAF)


def laplacian_centrality_rebuild(g: Graph, a: DeceptionAssignment, delta: CoboundaryMatrix) -> CentralityVector:
    """Sheaf Laplacian centrality where each deleted graph gets freshly computed public opinions."""
    total = laplacian_energy(sheaf_laplacian(delta).matrix)
    remaining = np.array([
        laplacian_energy(sheaf_laplacian(rebuild_without_vertex(g, a, v)).matrix) for v in range(g.n)
    ])
    return CentralityVector(_normalised_drop(total, remaining), CentralityKind.LAPLACIAN, Source.SHEAF)


def uniform_distribution(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n) if n else np.zeros(0)


def degree_distribution(g: Graph) -> np.ndarray:
    deg = g.degrees().astype(np.float64)
    if deg.sum() == 0:
        return uniform_distribution(g.n)
    return deg / deg.sum()


def dff_centrality(
    spectrum: Spectrum,
    distribution: np.ndarray | None = None,
    t: float = DEFAULT_DFF_TIME,
    source: Source = Source.SHEAF,
) -> CentralityVector:
    """Diffusion Frechet function ``F(i) = sum_j d_t^2(i, j) E_j``; smaller is more central."""
    n = spectrum.size
    if distribution is None:
        distribution = uniform_distribution(n)
    p = np.asarray(distribution, dtype=np.float64)
    if p.shape != (n,):
        raise ValueError(f"distribution must have length {n}")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > DISTRIBUTION_TOL:
        raise ValueError("distribution must be nonnegative and sum to 1")
    if t <= 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    scores = diffusion_distance_matrix(spectrum, t) @ p
    return CentralityVector(scores, CentralityKind.DFF, source)


def dff_of_matrix(lap: np.ndarray, distribution=None, t: float = DEFAULT_DFF_TIME,
                  source: Source = Source.SHEAF) -> CentralityVector:
    return dff_centrality(eigh(lap), distribution, t, source)


def rank_vertices(c: CentralityVector) -> np.ndarray:
    """Vertex order from most to least influential, ties broken by index."""
    idx = np.arange(len(c))
    key = -c.scores if c.kind.higher_is_more_influential else c.scores
    return np.lexsort((idx, key))
