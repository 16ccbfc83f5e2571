"""Walker evolution: quantum and classical propagation, limiting behaviour.

All propagators are computed through the cached eigendecomposition of the
walk Hamiltonian, so long times are exact up to floating point and the
limiting distribution is the exact time average (sum of squared
eigenprojector elements over degenerate groups).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import ChimeraGraph, VertexCoord
from .operators import WalkHamiltonian
from .spectral import FAMILY_BOTH, FAMILY_LEFT, FAMILY_RIGHT, LabeledSystem, eigensolve

__all__ = [
    "WalkerState",
    "ProbabilityField",
    "evolve",
    "transition_probability",
    "limiting_distribution",
    "classical_ctrw",
    "subspace_weights",
    "project_family",
    "fourier2d",
]


@dataclass
class WalkerState:
    """Complex amplitudes of the walker at a given time."""

    amplitudes: np.ndarray
    time: float
    origin: VertexCoord

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class ProbabilityField:
    """Per-vertex probabilities; kind is instantaneous, limiting or classical."""

    values: np.ndarray
    kind: str

    @property
    def total(self) -> float:
        return float(self.values.sum())


def _vertex_index(g: ChimeraGraph, v0) -> int:
    if isinstance(v0, (int, np.integer)):
        if not 0 <= v0 < g.num_vertices:
            raise IndexError(f"vertex index {v0} out of range")
        return int(v0)
    return g.coords_to_index(VertexCoord(*v0))


def _amplitudes(state) -> np.ndarray:
    return state.amplitudes if isinstance(state, WalkerState) else np.asarray(state)


def evolve(h: WalkHamiltonian, v0, t: float) -> WalkerState:
    """Unitary evolution of a vertex-localized walker for time t >= 0."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    g = h.graph
    i0 = _vertex_index(g, v0)
    w, v = h.eigendecomposition()
    psi = v @ (np.exp(-1j * w * t) * v[i0])
    return WalkerState(psi, t, g.index_to_coords(i0))


def transition_probability(h: WalkHamiltonian, v0, t: float) -> ProbabilityField:
    """|amplitude|^2 field of the evolved walker; sums to one."""
    psi = evolve(h, v0, t).amplitudes
    return ProbabilityField(np.abs(psi) ** 2, "instantaneous")


def limiting_distribution(h: WalkHamiltonian, v0) -> ProbabilityField:
    """Exact long-time average of the transition probability.

    Equals the sum over distinct eigenvalues E of (<v'| P_E |v0>)^2 with
    P_E the eigenprojector, using the shared degeneracy grouping.
    """
    g = h.graph
    i0 = _vertex_index(g, v0)
    eig = eigensolve(h)
    weighted = eig.eigenvectors * eig.eigenvectors[i0]
    starts = [int(gr[0]) for gr in eig.groups]
    per_group = np.add.reduceat(weighted, starts, axis=1)
    return ProbabilityField(np.sum(per_group ** 2, axis=1), "limiting")


def classical_ctrw(h: WalkHamiltonian, v0, t: float) -> ProbabilityField:
    """Continuous-time classical random walk driven by the same generator.

    The walk Hamiltonian has zero row sums, so exp(-Ht) is a stochastic
    map; tiny negative round-off is clipped.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    g = h.graph
    i0 = _vertex_index(g, v0)
    w, v = h.eigendecomposition()
    p = v @ (np.exp(-w * t) * v[i0])
    if p.min() < -1e-9:
        raise ValueError(f"classical field lost positivity: min={p.min()}")
    return ProbabilityField(np.clip(p, 0.0, None), "classical")


def subspace_weights(labeled: LabeledSystem, state) -> dict[str, float]:
    """Weights of a state on the three mode families; they sum to one."""
    psi = _amplitudes(state)
    overlaps = np.abs(labeled.eigenvectors.T @ psi) ** 2
    return {
        family: float(overlaps[labeled.family_indices(family)].sum())
        for family in (FAMILY_LEFT, FAMILY_BOTH, FAMILY_RIGHT)
    }


def project_family(labeled: LabeledSystem, state, family: str) -> np.ndarray:
    """Component of a state inside one mode family's subspace."""
    psi = _amplitudes(state)
    basis = labeled.eigenvectors[:, labeled.family_indices(family)]
    return basis @ (basis.T @ psi)


def fourier2d(state, g: ChimeraGraph, side: str = "left",
              reduction: str = "sum") -> np.ndarray:
    """Cell-level momentum distribution of a walker state, M x N, sum 1.

    Amplitudes of the chosen cell side are reduced per cell and Fourier
    transformed over the (m, n) grid with 1/sqrt(MN) normalization.
    reduction "sum" adds the side's amplitudes coherently before the
    transform; "norm" transforms each intracell layer separately and adds
    the squared magnitudes, which preserves components whose intracell
    profile sums to zero.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    psi = _amplitudes(state).reshape(g.M, g.N, 2 * g.L)
    block = psi[:, :, :g.L] if side == "left" else psi[:, :, g.L:]

    if reduction == "sum":
        grid = np.abs(np.fft.fft2(block.sum(axis=2), norm="ortho")) ** 2
    elif reduction == "norm":
        grid = np.sum(
            np.abs(np.fft.fft2(block, axes=(0, 1), norm="ortho")) ** 2, axis=2)
    else:
        raise ValueError(f"reduction must be 'sum' or 'norm', got {reduction!r}")

    total = grid.sum()
    scale = float(np.abs(psi).max()) ** 2
    if total <= 1e-20 * max(scale, 1e-300):
        raise ValueError("momentum grid has no weight: the chosen side carries "
                         "no signal under this reduction")
    return grid / total
