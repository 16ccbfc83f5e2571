"""Chimera graph construction: plain, enhanced, and vertex-broken variants.

A chimera graph is an M x N grid of unit cells, each cell a complete
bipartite block K_{L,L} on 2L vertices.  Vertices on the left half of a
cell (mu <= L) link vertically to the corresponding vertex in the cells
above and below; right-half vertices (mu > L) link horizontally.  Both
periodic (torus) and reflecting boundaries are supported.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import (
    InvalidDimensionError,
    InvalidVariantError,
    SamplingError,
    VertexRangeError,
)

__all__ = [
    "VertexCoord",
    "ChimeraGraph",
    "RowColConstraint",
    "build_chimera",
    "enhance",
    "diminish",
    "isolate_vertices",
    "graph_to_json",
    "graph_from_json",
]

BOUNDARIES = ("periodic", "reflecting")
VARIANTS = ("plain", "enhanced", "diminished")

# edge kinds; enhancement edges sit inside a cell but are tracked separately
INTRA = "intra"
INTER = "inter"
ENHANCE = "enhance"

_CONSTRAINT_RETRIES = 10_000


class VertexCoord(NamedTuple):
    """Cell coordinates (m, n) plus intracell index mu, all 1-based.

    mu in [1, L] is the left half of the cell, mu in [L+1, 2L] the right.
    """

    m: int
    n: int
    mu: int


@dataclass(frozen=True)
class ChimeraGraph:
    """Immutable chimera graph with canonical vertex indexing.

    Edges are stored as a mapping from index pairs (u, v), u < v, to a
    (kind, weight) tuple.  Broken vertices stay in the vertex set but
    carry no incident edges, so the state space is always 2*M*N*L.
    """

    M: int
    N: int
    L: int
    boundary: str
    variant: str = "plain"
    edges: dict[tuple[int, int], tuple[str, float]] = field(default_factory=dict)
    broken: frozenset[int] = frozenset()

    @property
    def num_vertices(self) -> int:
        return 2 * self.M * self.N * self.L

    def coords_to_index(self, v: VertexCoord) -> int:
        m, n, mu = v
        if not (1 <= m <= self.M and 1 <= n <= self.N and 1 <= mu <= 2 * self.L):
            raise VertexRangeError(f"coordinate {tuple(v)} out of range for "
                                   f"({self.M},{self.N},{self.L})")
        return ((m - 1) * self.N + (n - 1)) * 2 * self.L + (mu - 1)

    def index_to_coords(self, i: int) -> VertexCoord:
        if not 0 <= i < self.num_vertices:
            raise VertexRangeError(f"index {i} out of range [0, {self.num_vertices})")
        cell, mu = divmod(i, 2 * self.L)
        m, n = divmod(cell, self.N)
        return VertexCoord(m + 1, n + 1, mu + 1)

    def vertices(self) -> Iterable[VertexCoord]:
        for i in range(self.num_vertices):
            yield self.index_to_coords(i)

    def is_left(self, v: VertexCoord) -> bool:
        return v.mu <= self.L

    def degree(self, v: VertexCoord | int) -> float:
        i = v if isinstance(v, int) else self.coords_to_index(v)
        return sum(w for (a, b), (_, w) in self.edges.items() if i in (a, b))

    def edge_count(self, kind: str | None = None) -> int:
        if kind is None:
            return len(self.edges)
        return sum(1 for k, _ in self.edges.values() if k == kind)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric weighted adjacency matrix."""
        n = self.num_vertices
        a = np.zeros((n, n))
        for (u, v), (_, w) in self.edges.items():
            a[u, v] = w
            a[v, u] = w
        return a

    def weighted_degrees(self) -> np.ndarray:
        d = np.zeros(self.num_vertices)
        for (u, v), (_, w) in self.edges.items():
            d[u] += w
            d[v] += w
        return d


@dataclass(frozen=True)
class RowColConstraint:
    """Constraint on broken-vertex samples relative to a cell row/column.

    mode "avoid": no broken vertex may share the given m or n.
    mode "require": at least one broken vertex must share m or n.
    """

    mode: str
    m: int
    n: int

    def satisfied(self, coords: Iterable[VertexCoord]) -> bool:
        hit = any(c.m == self.m or c.n == self.n for c in coords)
        if self.mode == "avoid":
            return not hit
        if self.mode == "require":
            return hit
        raise ValueError(f"unknown constraint mode {self.mode!r}")


def _add_edge(edges, u: int, v: int, kind: str, w: float = 1.0) -> None:
    # canonical ordering collapses the duplicate pair produced by a
    # periodic wrap when M (or N) equals 2
    if u == v:
        return
    key = (u, v) if u < v else (v, u)
    if key not in edges:
        edges[key] = (kind, w)


def build_chimera(M: int, N: int, L: int, boundary: str = "reflecting") -> ChimeraGraph:
    """Construct the plain chimera graph on an M x N grid of K_{L,L} cells.

    Parameters
    ----------
    M, N : int
        Number of cell rows / columns (>= 1).
    L : int
        Half the cell size; each cell holds 2L vertices.
    boundary : str
        "reflecting" drops out-of-range neighbours, "periodic" wraps.

    Returns
    -------
    ChimeraGraph
        Plain variant, all edge weights 1.
    """
    if M < 1 or N < 1 or L < 1:
        raise InvalidDimensionError(f"dimensions must be positive, got ({M},{N},{L})")
    if boundary not in BOUNDARIES:
        raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")

    g = ChimeraGraph(M, N, L, boundary)
    edges: dict[tuple[int, int], tuple[str, float]] = {}
    for m in range(1, M + 1):
        for n in range(1, N + 1):
            # intracell: complete bipartite left <-> right
            for mu in range(1, L + 1):
                u = g.coords_to_index(VertexCoord(m, n, mu))
                for nu in range(L + 1, 2 * L + 1):
                    _add_edge(edges, u, g.coords_to_index(VertexCoord(m, n, nu)), INTRA)
            # intercell: left vertices run vertically, right horizontally
            for mu in range(1, L + 1):
                u = g.coords_to_index(VertexCoord(m, n, mu))
                m_up = m + 1
                if m_up > M:
                    if boundary == "periodic" and M > 1:
                        m_up = 1
                    else:
                        m_up = None
                if m_up is not None:
                    _add_edge(edges, u, g.coords_to_index(VertexCoord(m_up, n, mu)), INTER)
            for mu in range(L + 1, 2 * L + 1):
                u = g.coords_to_index(VertexCoord(m, n, mu))
                n_rt = n + 1
                if n_rt > N:
                    if boundary == "periodic" and N > 1:
                        n_rt = 1
                    else:
                        n_rt = None
                if n_rt is not None:
                    _add_edge(edges, u, g.coords_to_index(VertexCoord(m, n_rt, mu)), INTER)
    return ChimeraGraph(M, N, L, boundary, "plain", edges)


def _enhancement_pairs(L: int) -> list[tuple[int, int]]:
    """Vertical intracell links added on one side, in 1-based side-local indices."""
    if L == 2:
        return [(1, 2)]
    if L == 3:
        return [(1, 2), (3, 2)]
    # L >= 4: top pair and bottom pair
    return [(1, 2), (L, L - 1)]


def enhance(g: ChimeraGraph) -> ChimeraGraph:
    """Add vertical intracell connections to a plain chimera graph.

    Per cell and per side: for L=2 the top and bottom vertices are joined;
    for L=3 both are joined to the middle vertex; for L>=4 the top joins
    the second-from-top and the bottom the second-from-bottom.
    """
    if g.variant != "plain":
        raise InvalidVariantError(f"enhance requires a plain graph, got {g.variant!r}")
    if g.L == 1:
        raise InvalidVariantError("L=1 cells admit no enhancement edges")

    edges = dict(g.edges)
    for m in range(1, g.M + 1):
        for n in range(1, g.N + 1):
            for offset in (0, g.L):  # left side then right side
                for a, b in _enhancement_pairs(g.L):
                    u = g.coords_to_index(VertexCoord(m, n, a + offset))
                    v = g.coords_to_index(VertexCoord(m, n, b + offset))
                    _add_edge(edges, u, v, ENHANCE)
    return ChimeraGraph(g.M, g.N, g.L, g.boundary, "enhanced", edges, g.broken)


def isolate_vertices(g: ChimeraGraph, coords: Iterable[VertexCoord]) -> ChimeraGraph:
    """Break the given vertices: remove their incident edges, keep the vertex.

    The state space stays 2MNL; broken vertices get all-zero Hamiltonian
    rows, which is what produces the exactly localized zero mode.
    """
    broken_idx = {g.coords_to_index(VertexCoord(*c)) for c in coords}
    edges = {
        (u, v): kw
        for (u, v), kw in g.edges.items()
        if u not in broken_idx and v not in broken_idx
    }
    return ChimeraGraph(
        g.M, g.N, g.L, g.boundary, "diminished", edges,
        g.broken | frozenset(broken_idx),
    )


def diminish(
    g: ChimeraGraph,
    fraction: float,
    seed: int,
    constraint: RowColConstraint | None = None,
) -> ChimeraGraph:
    """Randomly isolate floor(fraction * 2MNL) vertices.

    The sample is drawn uniformly without replacement from a generator
    seeded with `seed`.  If a constraint is given, whole samples are
    rejected and redrawn until it is satisfied (bounded retries).
    """
    if not 0 <= fraction < 1:
        raise ValueError(f"fraction must lie in [0, 1), got {fraction}")
    count = int(fraction * g.num_vertices)
    rng = np.random.default_rng(seed)
    if count == 0:
        return g

    for _ in range(_CONSTRAINT_RETRIES):
        picks = rng.choice(g.num_vertices, size=count, replace=False)
        coords = [g.index_to_coords(int(i)) for i in picks]
        if constraint is None or constraint.satisfied(coords):
            return isolate_vertices(g, coords)
    raise SamplingError(
        f"no sample of {count} vertices satisfied the constraint "
        f"within {_CONSTRAINT_RETRIES} draws"
    )


# ---------------------------------------------------------------------------
# serialization (stable key names; see README)
# ---------------------------------------------------------------------------

def graph_to_json(g: ChimeraGraph) -> str:
    payload = {
        "M": g.M,
        "N": g.N,
        "L": g.L,
        "boundary": g.boundary,
        "variant": g.variant,
        "broken": sorted(list(g.index_to_coords(i)) for i in g.broken),
        "edges": [
            [u, v, kind, w] for (u, v), (kind, w) in sorted(g.edges.items())
        ],
    }
    return json.dumps(payload, indent=1)


def graph_from_json(text: str) -> ChimeraGraph:
    d = json.loads(text)
    edges = {(int(u), int(v)): (str(kind), float(w)) for u, v, kind, w in d["edges"]}
    g = ChimeraGraph(int(d["M"]), int(d["N"]), int(d["L"]), d["boundary"],
                     d["variant"], edges)
    broken = frozenset(g.coords_to_index(VertexCoord(*c)) for c in d["broken"])
    return ChimeraGraph(g.M, g.N, g.L, g.boundary, g.variant, edges, broken)
