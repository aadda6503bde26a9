"""Coboundary assembly and sheaf Laplacians.

Two assembly routes produce the same :class:`CoboundaryMatrix`:
``build_coboundary`` for the scalar deception sheaf of a graph, and
``assemble_from_blocks`` for arbitrary stalk dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .deception import DeceptionAssignment, public_opinions, restriction_scalars
from .errors import ParseError
from .graph import Graph, delete_vertex


@dataclass(frozen=True)
class CoboundaryMatrix:
    """Dense coboundary with its block layout.

    ``vertex_offsets[k]:vertex_offsets[k+1]`` is the column block of vertex
    ``k`` and ``edge_offsets[e]:edge_offsets[e+1]`` the row block of edge
    ``e``, whose two endpoints are ``edge_vertices[e]``.
    """

    matrix: np.ndarray
    vertex_offsets: np.ndarray
    edge_offsets: np.ndarray
    edge_vertices: np.ndarray

    @property
    def n_vertices(self) -> int:
        return self.vertex_offsets.size - 1

    @property
    def n_edges(self) -> int:
        return self.edge_offsets.size - 1

    @property
    def scalar_stalks(self) -> bool:
        return self.matrix.shape == (self.n_edges, self.n_vertices)

    def vertex_block(self, v: int) -> slice:
        return slice(int(self.vertex_offsets[v]), int(self.vertex_offsets[v + 1]))

    def edge_block(self, e: int) -> slice:
        return slice(int(self.edge_offsets[e]), int(self.edge_offsets[e + 1]))


@dataclass(frozen=True)
class SheafLaplacian:
    matrix: np.ndarray
    vertex_offsets: np.ndarray


def _offsets(dims: Sequence[int]) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(np.asarray(dims, dtype=np.int64))]).astype(np.int64)


def build_coboundary(g: Graph, a: DeceptionAssignment) -> CoboundaryMatrix:
    """Scalar coboundary of the deception sheaf.

    Row ``e`` of edge ``(u, v)`` holds ``d_u`` at column ``u`` and ``-d_v`` at
    column ``v``, where ``d_u`` is u's restriction scalar towards v's public
    opinion.
    """
    a.check(g)
    y = public_opinions(g, a)
    e = g.edge_array()
    u, v = e[:, 0], e[:, 1]
    x, r = a.opinions, a.relations
    d_u = restriction_scalars(x[u], y[v], r[u], a.tau)
    d_v = restriction_scalars(x[v], y[u], r[v], a.tau)
    delta = np.zeros((g.m, g.n))
    rows = np.arange(g.m)
    delta[rows, u] = d_u
    delta[rows, v] = -d_v
    return CoboundaryMatrix(
        matrix=delta,
        vertex_offsets=np.arange(g.n + 1, dtype=np.int64),
        edge_offsets=np.arange(g.m + 1, dtype=np.int64),
        edge_vertices=e.copy(),
    )


def sheaf_laplacian(delta: CoboundaryMatrix | np.ndarray) -> SheafLaplacian:
    """``delta.T @ delta`` with the lower triangle mirrored from the upper one."""
    if isinstance(delta, CoboundaryMatrix):
        b, offsets = delta.matrix, delta.vertex_offsets
    else:
        b = np.asarray(delta)
        offsets = np.arange(b.shape[1] + 1, dtype=np.int64)
    prod = b.T @ b
    upper = np.triu(prod)
    lap = upper + np.triu(prod, 1).T
    return SheafLaplacian(lap, offsets)


def assemble_from_blocks(
    vertex_dims: Sequence[int],
    edge_dims: Sequence[int],
    incidences: Iterable[tuple[int, int, np.ndarray, int]],
) -> CoboundaryMatrix:
    """Place signed restriction blocks ``(edge, vertex, F_{v->e}, sign)`` into a coboundary.

    Every edge needs exactly two incidences on distinct vertices with opposite signs.
    """
    vo, eo = _offsets(vertex_dims), _offsets(edge_dims)
    nv, ne = len(vertex_dims), len(edge_dims)
    delta = np.zeros((int(eo[-1]), int(vo[-1])))
    seen: dict[int, list[tuple[int, int]]] = {e: [] for e in range(ne)}
    for e, v, block, sign in incidences:
        if not 0 <= e < ne:
            raise ValueError(f"edge {e} out of range")
        if not 0 <= v < nv:
            raise ValueError(f"vertex {v} out of range")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        block = np.atleast_2d(np.asarray(block, dtype=np.float64))
        want = (edge_dims[e], vertex_dims[v])
        if block.shape != want:
            raise ValueError(f"restriction block for edge {e}, vertex {v} has shape {block.shape}, expected {want}")
        delta[eo[e]:eo[e + 1], vo[v]:vo[v + 1]] = sign * block
        seen[e].append((v, sign))

    edge_vertices = np.zeros((ne, 2), dtype=np.int64)
    for e, inc in seen.items():
        if len(inc) != 2:
            raise ValueError(f"edge {e} has {len(inc)} incidences, expected 2")
        (v0, s0), (v1, s1) = inc
        if v0 == v1 or s0 == s1:
            raise ValueError(f"edge {e} needs two distinct vertices with opposite signs")
        edge_vertices[e] = (v0, v1) if s0 > 0 else (v1, v0)
    return CoboundaryMatrix(delta, vo, eo, edge_vertices)


def incident_edges(delta: CoboundaryMatrix, v: int) -> np.ndarray:
    ev = delta.edge_vertices
    return np.flatnonzero((ev[:, 0] == v) | (ev[:, 1] == v))


def restrict_to_subgraph(delta: CoboundaryMatrix, v: int) -> CoboundaryMatrix:
    """Drop vertex ``v``'s column block and the row blocks of its edges.

    Surviving restriction entries are kept as they are, so the result is the
    frozen sheaf on the vertex-deleted graph.
    """
    nv = delta.n_vertices
    if not 0 <= v < nv:
        raise IndexError(f"vertex {v} out of range for {nv} vertices")
    ev = delta.edge_vertices
    keep_e = np.flatnonzero((ev[:, 0] != v) & (ev[:, 1] != v))
    keep_v = np.array([k for k in range(nv) if k != v], dtype=np.int64)

    vdims = np.diff(delta.vertex_offsets)
    edims = np.diff(delta.edge_offsets)
    cols = np.concatenate([np.arange(delta.vertex_offsets[k], delta.vertex_offsets[k + 1]) for k in keep_v]
                          or [np.zeros(0, dtype=np.int64)])
    rows = np.concatenate([np.arange(delta.edge_offsets[e], delta.edge_offsets[e + 1]) for e in keep_e]
                          or [np.zeros(0, dtype=np.int64)])
    sub = delta.matrix[np.ix_(rows, cols)]
    new_ev = ev[keep_e].copy()
    new_ev[new_ev > v] -= 1
    return CoboundaryMatrix(sub, _offsets(vdims[keep_v]), _offsets(edims[keep_e]), new_ev)


def rebuild_without_vertex(g: Graph, a: DeceptionAssignment, v: int) -> CoboundaryMatrix:
    """Coboundary of ``g`` minus ``v`` with public opinions recomputed on the smaller graph."""
    sub = delete_vertex(g, v)
    keep = np.arange(g.n) != v
    return build_coboundary(sub, DeceptionAssignment(a.opinions[keep], a.relations[keep], a.tau))


def write_matrix(m: np.ndarray, stream: TextIO) -> None:
    """One row per line, space separated, 17 significant digits."""
    for row in np.atleast_2d(m):
        stream.write(" ".join(format(float(val), ".17g") for val in row) + "\n")


def read_matrix(stream: TextIO) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if len(rows[-1]) != len(rows[0]):
            raise ParseError("ragged matrix row", lineno)
    return np.array(rows, dtype=np.float64).reshape(len(rows), -1 if rows else 0)
