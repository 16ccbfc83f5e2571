"""Walk Hamiltonian and the symmetry operators that commute with it.

The Hamiltonian follows the Laplacian convention: off-diagonal entries
are -j (intracell) or -k (intercell) times the edge weight, and the
diagonal holds the weighted degree, so every row and column sums to zero.

Symmetry operators come from three sources: graph-automorphism vertex
permutations (0/1 matrices), their symmetrized halves (S + S^T)/2 for the
cyclic ones, and path-Hamiltonian tensor factors that replace the
translation symmetries when the boundary reflects.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSymmetryError, InvalidVariantError, UnsupportedVariantError
from .graphs import ENHANCE, INTER, INTRA, ChimeraGraph, VertexCoord

__all__ = [
    "WalkHamiltonian",
    "SymmetryOperator",
    "hamiltonian",
    "permutation_operator",
    "line_operator",
    "intercell_operators",
    "pi_operators",
    "symmetry_set",
    "commutator_maxnorm",
    "operator_to_json",
    "PERMUTATION_NAMES",
]

PERMUTATION_NAMES = ("s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8")

# operators with a cyclic (non-involutive) permutation get symmetrized
_CYCLIC = {"s1", "s3", "s5", "s7"}


@dataclass
class WalkHamiltonian:
    """Real symmetric walk generator with a lazy eigendecomposition cache."""

    graph: ChimeraGraph
    j: float
    k: float
    matrix: np.ndarray
    _eig: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_abs(self) -> float:
        return float(np.abs(self.matrix).max())

    def eigendecomposition(self) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigenvalues and orthonormal eigenvectors, cached.

        Eigenvector signs are fixed so the first component above threshold
        is positive, keeping repeated runs diffable.
        """
        if self._eig is None:
            w, v = np.linalg.eigh(self.matrix)
            self._eig = (w, fix_gauge(v))
        return self._eig


def fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector signs so the first non-negligible entry is positive."""
    v = vectors.copy()
    for col in range(v.shape[1]):
        x = v[:, col]
        nz = np.nonzero(np.abs(x) > 1e-8 * np.abs(x).max())[0]
        if nz.size and x[nz[0]] < 0:
            v[:, col] = -x
    return v


def hamiltonian(g: ChimeraGraph, j: float = 1.0, k: float = 1.0) -> WalkHamiltonian:
    """Assemble the walk Hamiltonian for a chimera graph.

    Intracell edges (including enhancement edges) carry rate j, intercell
    edges rate k.  Broken vertices give all-zero rows and columns.
    """
    if j <= 0 or k <= 0:
        raise ValueError(f"transition rates must be positive, got j={j}, k={k}")
    n = g.num_vertices
    h = np.zeros((n, n))
    for (u, v), (kind, w) in g.edges.items():
        rate = k * w if kind == INTER else j * w
        h[u, v] -= rate
        h[v, u] -= rate
        h[u, u] += rate
        h[v, v] += rate
    return WalkHamiltonian(g, j, k, h)


@dataclass
class SymmetryOperator:
    """Symmetric operator commuting with the walk Hamiltonian of its variant.

    source is one of "permutation" (symmetric 0/1 permutation matrix),
    "hermitized_permutation" ((S + S^T)/2 of a cyclic permutation), or
    "line_hamiltonian_tensor" (path Hamiltonian acting on one cell axis).
    Structure is kept so application costs O(size) per column instead of
    a dense matrix product.
    """

    name: str
    source: str
    size: int
    perm: np.ndarray | None = None          # perm[v'] = image index of v'
    axis_matrix: np.ndarray | None = None   # path Hamiltonian factor
    axis: int | None = None                 # 0: cell rows, 1: cell columns
    dims: tuple[int, int, int] | None = None  # (M, N, 2L)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Return S @ x for a vector or matrix of column vectors."""
        if self.source == "permutation":
            out = np.empty_like(x)
            out[self.perm] = x
            return out
        if self.source == "hermitized_permutation":
            out = np.empty_like(x)
            out[self.perm] = x
            return 0.5 * (out + x[self.perm])
        m, n, c = self.dims
        a = self.axis_matrix
        tail = x.shape[1:] if x.ndim > 1 else ()
        if self.axis == 0:
            xr = x.reshape(m, -1)
            return (a @ xr).reshape(x.shape)
        xr = x.reshape(m, n, -1)
        out = np.einsum("jk,mkl->mjl", a, xr)
        return out.reshape(x.shape)

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        """Return S^T @ x (gather for permutations; symmetric otherwise)."""
        if self.source == "permutation":
            return x[self.perm]
        return self.apply(x)

    def dense(self) -> np.ndarray:
        eye = np.eye(self.size)
        return self.apply(eye)

    def permutation_matrix(self) -> np.ndarray:
        """The raw 0/1 matrix before symmetrization (permutation sources only)."""
        if self.perm is None:
            raise InvalidSymmetryError(f"{self.name} has no permutation source")
        s = np.zeros((self.size, self.size))
        s[self.perm, np.arange(self.size)] = 1.0
        return s

    def expectation(self, vec: np.ndarray) -> float:
        return float(np.real(np.vdot(vec, self.apply(vec))))


def _perm_from_coord_map(g: ChimeraGraph, coord_map) -> np.ndarray:
    n = g.num_vertices
    perm = np.empty(n, dtype=np.intp)
    for i in range(n):
        perm[i] = g.coords_to_index(VertexCoord(*coord_map(g.index_to_coords(i))))
    if len(set(perm.tolist())) != n:
        raise InvalidSymmetryError("coordinate map is not a permutation")
    return perm


def _sigma_coord_map(name: str, M: int, N: int, L: int):
    if name == "s1":
        return lambda c: (c.m, c.n, c.mu % L + 1) if c.mu <= L else c
    if name == "s2":
        return lambda c: (c.m, c.n, L + 1 - c.mu) if c.mu <= L else c
    if name == "s3":
        return lambda c: (c.m, c.n, (c.mu - L) % L + L + 1) if c.mu > L else c
    if name == "s4":
        return lambda c: (c.m, c.n, 3 * L + 1 - c.mu) if c.mu > L else c
    if name == "s5":
        return lambda c: (c.m % M + 1, c.n, c.mu)
    if name == "s6":
        return lambda c: (M + 1 - c.m, c.n, c.mu)
    if name == "s7":
        return lambda c: (c.m, c.n % N + 1, c.mu)
    if name == "s8":
        return lambda c: (c.m, N + 1 - c.n, c.mu)
    raise InvalidSymmetryError(f"unknown permutation name {name!r}")


def permutation_operator(g: ChimeraGraph, name: str) -> SymmetryOperator:
    """Build one of the eight automorphism operators s1..s8.

    s1/s3 cycle the left/right intracell indices, s2/s4 mirror them,
    s5/s7 translate whole cell rows/columns (periodic boundary only),
    s6/s8 mirror the cell grid.  Cyclic ones are symmetrized.
    """
    if name not in PERMUTATION_NAMES:
        raise InvalidSymmetryError(f"unknown permutation name {name!r}")
    if g.variant != "plain":
        raise InvalidSymmetryError(
            f"{name} is an automorphism of the plain graph, not {g.variant!r}")
    if name in ("s5", "s7") and g.boundary != "periodic":
        raise InvalidSymmetryError(f"{name} requires a periodic boundary")

    perm = _perm_from_coord_map(g, _sigma_coord_map(name, g.M, g.N, g.L))
    source = "hermitized_permutation" if name in _CYCLIC else "permutation"
    return SymmetryOperator(name, source, g.num_vertices, perm=perm)


def line_operator(m: int) -> np.ndarray:
    """Walk Hamiltonian of the open line with m vertices.

    Off-diagonal -1 between neighbours; diagonal 2, or 1 at the endpoints,
    keeping rows summing to zero (the m=1 case degenerates to [[0]]).
    """
    if m < 1:
        raise ValueError(f"line needs at least one vertex, got {m}")
    if m == 1:
        return np.zeros((1, 1))
    a = 2.0 * np.eye(m)
    a[0, 0] = a[-1, -1] = 1.0
    idx = np.arange(m - 1)
    a[idx, idx + 1] = -1.0
    a[idx + 1, idx] = -1.0
    return a


def intercell_operators(g: ChimeraGraph) -> tuple[SymmetryOperator, SymmetryOperator]:
    """Intercell symmetry pair for reflecting boundaries.

    Returns (sp5, sp6): the row-axis and column-axis path Hamiltonians
    acting as A_M (x) 1_N (x) 1_2L and 1_M (x) A_N (x) 1_2L under the
    canonical vertex ordering.
    """
    if g.boundary != "reflecting":
        raise InvalidSymmetryError(
            "path-tensor operators need a reflecting boundary; "
            "use the translation operators s5/s7 on the torus")
    if g.variant == "diminished":
        raise InvalidSymmetryError("broken vertices destroy the intercell symmetry")
    dims = (g.M, g.N, 2 * g.L)
    sp5 = SymmetryOperator("sp5", "line_hamiltonian_tensor", g.num_vertices,
                           axis_matrix=line_operator(g.M), axis=0, dims=dims)
    sp6 = SymmetryOperator("sp6", "line_hamiltonian_tensor", g.num_vertices,
                           axis_matrix=line_operator(g.N), axis=1, dims=dims)
    return sp5, sp6


_PI_SWAPS = {
    # side-local 1-based index pairs swapped simultaneously
    "p1": ("left", ((1, 2), (3, 4))),
    "p2": ("left", ((1, 3), (2, 4))),
    "p3": ("right", ((1, 2), (3, 4))),
    "p4": ("right", ((1, 3), (2, 4))),
}


def pi_operators(g: ChimeraGraph) -> tuple[SymmetryOperator, ...]:
    """Intracell pair-swap operators p1..p4 of the enhanced graph (L=4 only).

    p1 swaps intracell vertices 1,2 and 3,4 on the left side of every
    cell; p2 swaps 1,3 and 2,4; p3/p4 act the same way on the right side
    (vertices 5..8).  All four are involutions, hence already symmetric.
    """
    if g.variant != "enhanced":
        raise InvalidVariantError("pair-swap operators belong to the enhanced graph")
    if g.L != 4:
        raise UnsupportedVariantError(
            f"pair-swap operators are defined for L=4 cells, got L={g.L}")

    ops = []
    for name, (side, swaps) in _PI_SWAPS.items():
        offset = 0 if side == "left" else g.L
        table = {a + offset: b + offset for a, b in swaps}
        table.update({b: a for a, b in table.items()})

        def cmap(c, table=table):
            return (c.m, c.n, table.get(c.mu, c.mu))

        perm = _perm_from_coord_map(g, cmap)
        ops.append(SymmetryOperator(name, "permutation", g.num_vertices, perm=perm))
    return tuple(ops)


def symmetry_set(g: ChimeraGraph) -> list[SymmetryOperator]:
    """The complete commuting labeling set declared for the graph's variant."""
    if g.variant == "plain" and g.boundary == "periodic":
        return [permutation_operator(g, name) for name in PERMUTATION_NAMES]
    if g.variant == "plain" and g.boundary == "reflecting":
        sigma = [permutation_operator(g, n) for n in ("s1", "s2", "s3", "s4")]
        return sigma + list(intercell_operators(g))
    if g.variant == "enhanced" and g.boundary == "reflecting":
        return list(pi_operators(g)) + list(intercell_operators(g))
    raise UnsupportedVariantError(
        f"no symmetry set for variant={g.variant!r}, boundary={g.boundary!r}")


def operator_to_json(op: SymmetryOperator) -> str:
    """Dense export in the same structured-text style as graph serialization."""
    payload = {
        "name": op.name,
        "source": op.source,
        "size": op.size,
        "matrix": op.dense().tolist(),
    }
    return json.dumps(payload)


def commutator_maxnorm(s, h) -> float:
    """max |(SH - HS)_ij| for a symmetry operator (or matrix) against H."""
    hm = h.matrix if isinstance(h, WalkHamiltonian) else np.asarray(h)
    if isinstance(s, SymmetryOperator):
        if s.size != hm.shape[0]:
            raise ValueError(f"dimension mismatch: {s.size} vs {hm.shape[0]}")
        sh = s.apply(hm)
        hs = s.apply_transpose(hm.T).T
        return float(np.abs(sh - hs).max())
    sm = np.asarray(s)
    if sm.shape != hm.shape:
        raise ValueError(f"dimension mismatch: {sm.shape} vs {hm.shape}")
    return float(np.abs(sm @ hm - hm @ sm).max())
