"""Eigenanalysis: numerical spectra, closed-form enumeration, state labeling.

The closed-form spectra cover three variant/boundary combinations:
plain periodic, plain reflecting, and enhanced reflecting with L=4.
Labels live on three disjoint families of unit lattices: modes supported
on the left halves of cells only, on the right halves only, or on both.
Within each energy level the commuting symmetry set is diagonalized
block by block until every joint eigenspace is one-dimensional.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyNotLiftedError, UnsupportedVariantError
from .graphs import ChimeraGraph
from .operators import SymmetryOperator, WalkHamiltonian, fix_gauge

__all__ = [
    "EigenSystem",
    "SpectralLabel",
    "LabeledSystem",
    "SpectrumReport",
    "SpectralDiff",
    "FAMILY_LEFT",
    "FAMILY_RIGHT",
    "FAMILY_BOTH",
    "eigensolve",
    "enumerate_labels",
    "verify_spectrum",
    "label_eigenstates",
    "spectral_diff",
    "eigenstate_field",
    "inverse_participation_ratio",
    "localized_state",
]

# shared degeneracy grouping tolerance, relative to the spectral range
DEGENERACY_GROUP_RTOL = 1e-8
# tolerance for splitting symmetry eigenvalues inside a degenerate block;
# legitimate distinct values are separated by >= 1 - cos(2*pi/M) scale
SYMMETRY_SPLIT_TOL = 1e-6

FAMILY_LEFT = "left"    # modes supported on left cell halves only
FAMILY_RIGHT = "right"  # modes supported on right cell halves only
FAMILY_BOTH = "both"    # modes with support on both halves


@dataclass
class EigenSystem:
    """Full symmetric eigendecomposition plus degeneracy grouping."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: list[np.ndarray]

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def group_of(self, index: int) -> int:
        for gi, idx in enumerate(self.groups):
            if idx[0] <= index <= idx[-1]:
                return gi
        raise IndexError(index)


def _group_runs(w: np.ndarray, tol: float) -> list[np.ndarray]:
    """Partition sorted eigenvalues into runs separated by gaps > tol."""
    if w.size == 0:
        return []
    breaks = np.nonzero(np.diff(w) > tol)[0] + 1
    return np.split(np.arange(w.size), breaks)


def grouping_tolerance(w: np.ndarray) -> float:
    spread = float(w[-1] - w[0]) if w.size else 0.0
    return DEGENERACY_GROUP_RTOL * max(spread, 1.0)


def eigensolve(h: WalkHamiltonian | np.ndarray) -> EigenSystem:
    """Dense symmetric eigendecomposition with degeneracy groups attached."""
    if isinstance(h, WalkHamiltonian):
        w, v = h.eigendecomposition()
    else:
        hm = np.asarray(h, dtype=float)
        if hm.ndim != 2 or hm.shape[0] != hm.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {hm.shape}")
        if not np.allclose(hm, hm.T, atol=1e-12 * max(1.0, np.abs(hm).max())):
            raise ValueError("matrix is not symmetric")
        w, v = np.linalg.eigh(hm)
        v = fix_gauge(v)
    return EigenSystem(w, v, _group_runs(w, grouping_tolerance(w)))


@dataclass(frozen=True)
class SpectralLabel:
    """Closed-form mode label: family, lattice point, symmetry values, energy.

    branch is +-1 for the two roots of the both-sides family and 0
    otherwise.
    """

    family: str
    lattice: tuple[int, ...]
    s: tuple[float, ...]
    energy: float
    branch: int = 0


def _sign_label(i: int, period: int) -> float:
    return 1.0 if 2 * i < period else -1.0


def _mixed_roots(l_: int, a: float, b: float) -> tuple[float, float]:
    # eigenvalues of [[l+a, -l], [-l, l+b]]: the two-component cell modes
    center = l_ + 0.5 * (a + b)
    off = math.sqrt(l_ * l_ + 0.25 * (a - b) ** 2)
    return center - off, center + off


def _labels_periodic(M: int, N: int, L: int) -> list[SpectralLabel]:
    if M == 2 or N == 2:
        raise UnsupportedVariantError(
            "periodic closed forms need M, N != 2: the wrapped edge collapses "
            "with its partner and the graph equals the reflecting one")
    labels = []

    def svec(i, i2, j, j2):
        return (
            math.cos(2 * math.pi * i / L), _sign_label(i, L),
            math.cos(2 * math.pi * i2 / L), _sign_label(i2, L),
            math.cos(2 * math.pi * j / M), _sign_label(j, M),
            math.cos(2 * math.pi * j2 / N), _sign_label(j2, N),
        )

    for j in range(M):
        for j2 in range(N):
            s5 = math.cos(2 * math.pi * j / M)
            s7 = math.cos(2 * math.pi * j2 / N)
            for i in range(1, L):
                labels.append(SpectralLabel(
                    FAMILY_LEFT, (i, 0, j, j2), svec(i, 0, j, j2),
                    L + 2 - 2 * s5))
            for i2 in range(1, L):
                labels.append(SpectralLabel(
                    FAMILY_RIGHT, (0, i2, j, j2), svec(0, i2, j, j2),
                    L + 2 - 2 * s7))
            lo, hi = _mixed_roots(L, 2 - 2 * s5, 2 - 2 * s7)
            s = svec(0, 0, j, j2)
            labels.append(SpectralLabel(FAMILY_BOTH, (0, 0, j, j2), s, lo, -1))
            labels.append(SpectralLabel(FAMILY_BOTH, (0, 0, j, j2), s, hi, +1))
    return labels


def _labels_reflecting(M: int, N: int, L: int) -> list[SpectralLabel]:
    labels = []

    def svec(i, i2, j, j2):
        return (
            math.cos(2 * math.pi * i / L), _sign_label(i, L),
            math.cos(2 * math.pi * i2 / L), _sign_label(i2, L),
            2 + 2 * math.cos(math.pi * j / M),
            2 + 2 * math.cos(math.pi * j2 / N),
        )

    for j in range(1, M + 1):
        for j2 in range(1, N + 1):
            sp5 = 2 + 2 * math.cos(math.pi * j / M)
            sp6 = 2 + 2 * math.cos(math.pi * j2 / N)
            for i in range(1, L):
                labels.append(SpectralLabel(
                    FAMILY_LEFT, (i, 0, j, j2), svec(i, 0, j, j2), L + sp5))
            for i2 in range(1, L):
                labels.append(SpectralLabel(
                    FAMILY_RIGHT, (0, i2, j, j2), svec(0, i2, j, j2), L + sp6))
            lo, hi = _mixed_roots(L, sp5, sp6)
            s = svec(0, 0, j, j2)
            labels.append(SpectralLabel(FAMILY_BOTH, (0, 0, j, j2), s, lo, -1))
            labels.append(SpectralLabel(FAMILY_BOTH, (0, 0, j, j2), s, hi, +1))
    return labels


def _labels_enhanced(M: int, N: int, L: int) -> list[SpectralLabel]:
    if L != 4:
        raise UnsupportedVariantError(
            f"enhanced closed forms are available for L=4 cells, got L={L}")
    labels = []
    # pair-swap eigenvalue patterns of the nontrivial left (right) modes,
    # with the energy offset the enhancement edges add inside the cell
    nontrivial = [((1, -1), 0.0), ((-1, 1), 2.0), ((-1, -1), 2.0)]

    for j in range(1, M + 1):
        for j2 in range(1, N + 1):
            sp5 = 2 + 2 * math.cos(math.pi * j / M)
            sp6 = 2 + 2 * math.cos(math.pi * j2 / N)
            for (p1, p2), shift in nontrivial:
                labels.append(SpectralLabel(
                    FAMILY_LEFT, (p1, p2, 1, 1, j, j2),
                    (float(p1), float(p2), 1.0, 1.0, sp5, sp6),
                    L + shift + sp5))
            for (p3, p4), shift in nontrivial:
                labels.append(SpectralLabel(
                    FAMILY_RIGHT, (1, 1, p3, p4, j, j2),
                    (1.0, 1.0, float(p3), float(p4), sp5, sp6),
                    L + shift + sp6))
            lo, hi = _mixed_roots(L, sp5, sp6)
            s = (1.0, 1.0, 1.0, 1.0, sp5, sp6)
            labels.append(SpectralLabel(
                FAMILY_BOTH, (1, 1, 1, 1, j, j2), s, lo, -1))
            labels.append(SpectralLabel(
                FAMILY_BOTH, (1, 1, 1, 1, j, j2), s, hi, +1))
    return labels


def enumerate_labels(variant: str, boundary: str, M: int, N: int, L: int
                     ) -> list[SpectralLabel]:
    """Enumerate the closed-form spectrum of a supported variant.

    Families have cardinalities MN(L-1), MN(L-1) and 2MN, totalling the
    full state count 2MNL.
    """
    if variant == "plain" and boundary == "periodic":
        return _labels_periodic(M, N, L)
    if variant == "plain" and boundary == "reflecting":
        return _labels_reflecting(M, N, L)
    if variant == "enhanced" and boundary == "reflecting":
        return _labels_enhanced(M, N, L)
    raise UnsupportedVariantError(
        f"no closed-form spectrum for variant={variant!r}, boundary={boundary!r}")


@dataclass
class SpectrumReport:
    """Multiset comparison of enumerated energies against a numerical spectrum."""

    n_labels: int
    n_eigenvalues: int
    max_deviation: float

    @property
    def count_match(self) -> bool:
        return self.n_labels == self.n_eigenvalues

    def within(self, tol: float) -> bool:
        return self.count_match and self.max_deviation <= tol


def verify_spectrum(labels: list[SpectralLabel], eig: EigenSystem) -> SpectrumReport:
    """Compare enumerated energies with numerical eigenvalues after sorting."""
    predicted = np.sort(np.array([lab.energy for lab in labels]))
    actual = eig.eigenvalues
    if predicted.size != actual.size:
        return SpectrumReport(predicted.size, actual.size, math.inf)
    dev = float(np.abs(predicted - actual).max()) if predicted.size else 0.0
    return SpectrumReport(predicted.size, actual.size, dev)


# ---------------------------------------------------------------------------
# joint diagonalization and labeling
# ---------------------------------------------------------------------------

@dataclass
class LabeledSystem:
    """Joint eigenbasis of H and its symmetry set, with one label per state."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: list[np.ndarray]
    operator_names: list[str]
    s_values: np.ndarray          # shape (n_states, n_operators)
    labels: list[SpectralLabel]

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def family_indices(self, family: str) -> np.ndarray:
        return np.array([i for i, lab in enumerate(self.labels)
                         if lab.family == family], dtype=np.intp)


def _refine_groups(eig: EigenSystem, ops: list[SymmetryOperator]
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize each operator inside every degenerate block.

    Returns the rotated eigenvector matrix and the per-state symmetry
    eigenvalues.  Raises if some block keeps dimension > 1 at the end.
    """
    v = eig.eigenvectors.copy()
    n = eig.dim
    svals = np.zeros((n, len(ops)))

    for group in eig.groups:
        blocks = [np.asarray(group)]
        for oi, op in enumerate(ops):
            next_blocks = []
            for blk in blocks:
                b = v[:, blk]
                sub = b.T @ op.apply(b)
                sub = 0.5 * (sub + sub.T)
                if blk.size == 1:
                    svals[blk[0], oi] = sub[0, 0]
                    next_blocks.append(blk)
                    continue
                w, u = np.linalg.eigh(sub)
                v[:, blk] = fix_gauge(b @ u)
                svals[blk, oi] = w
                next_blocks.extend(blk[piece]
                                   for piece in _group_runs(w, SYMMETRY_SPLIT_TOL))
            blocks = next_blocks
        for blk in blocks:
            if blk.size > 1:
                raise DegeneracyNotLiftedError(
                    float(eig.eigenvalues[blk[0]]), int(blk.size))
    return v, svals


def _is_one(x: float) -> bool:
    return abs(x - 1.0) < SYMMETRY_SPLIT_TOL


def _invert_cosine(value: float, period: int, sign: float, what: str) -> int:
    """Recover the lattice index i from cos(2*pi*i/period) and its mirror sign."""
    theta = math.acos(min(1.0, max(-1.0, value)))
    i0 = round(period * theta / (2 * math.pi))
    i = i0 if sign > 0 else period - i0
    if not (0 <= i < period and
            abs(math.cos(2 * math.pi * i / period) - value) < 1e-6 and
            _sign_label(i, period) == (1.0 if sign > 0 else -1.0)):
        raise ValueError(f"inconsistent {what} labels: value={value}, sign={sign}")
    return i


def _invert_path(value: float, period: int, what: str) -> int:
    """Recover j from 2 + 2*cos(pi*j/period), j in [1, period]."""
    theta = math.acos(min(1.0, max(-1.0, (value - 2.0) / 2.0)))
    j = round(period * theta / math.pi)
    if not (1 <= j <= period and
            abs(2 + 2 * math.cos(math.pi * j / period) - value) < 1e-6):
        raise ValueError(f"inconsistent {what} label: value={value}")
    return j


def _label_from_svec(names: list[str], s: np.ndarray, energy: float,
                     g: ChimeraGraph) -> SpectralLabel:
    M, N, L = g.M, g.N, g.L
    sv = tuple(float(x) for x in s)

    if names[:4] == ["p1", "p2", "p3", "p4"]:
        p = tuple(1 if x > 0 else -1 for x in s[:4])
        j = _invert_path(s[4], M, "row axis")
        j2 = _invert_path(s[5], N, "column axis")
        left_triv = p[0] == 1 and p[1] == 1
        right_triv = p[2] == 1 and p[3] == 1
        lattice = (*p, j, j2)
    else:
        i = _invert_cosine(s[0], L, s[1], "left intracell")
        i2 = _invert_cosine(s[2], L, s[3], "right intracell")
        if len(names) == 8:
            j = _invert_cosine(s[4], M, s[5], "row axis")
            j2 = _invert_cosine(s[6], N, s[7], "column axis")
        else:
            j = _invert_path(s[4], M, "row axis")
            j2 = _invert_path(s[5], N, "column axis")
        left_triv = i == 0
        right_triv = i2 == 0
        lattice = (i, i2, j, j2)

    if left_triv and right_triv:
        family, branch = FAMILY_BOTH, 0  # branch filled from the energy below
    elif right_triv:
        family, branch = FAMILY_LEFT, 0
    elif left_triv:
        family, branch = FAMILY_RIGHT, 0
    else:
        raise ValueError(
            f"state with nontrivial labels on both cell halves at E={energy}")

    if family == FAMILY_BOTH:
        if names[:4] == ["p1", "p2", "p3", "p4"] or len(names) == 6:
            center = L + 0.5 * (s[4] + s[5])
        else:
            center = (L + 2) - (s[4] + s[6])
        branch = 1 if energy >= center else -1
    return SpectralLabel(family, lattice, sv, float(energy), branch)


def label_eigenstates(eig: EigenSystem, ops: list[SymmetryOperator],
                      g: ChimeraGraph) -> LabeledSystem:
    """Lift all degeneracies with the symmetry set and label every state.

    Within each degenerate group the operators are applied in their given
    order, refining the partition until every block is one-dimensional.
    The resulting (energy, symmetry-value) pairs are checked for
    uniqueness.
    """
    v, svals = _refine_groups(eig, ops)
    names = [op.name for op in ops]
    labels = [
        _label_from_svec(names, svals[idx], float(eig.eigenvalues[idx]), g)
        for idx in range(eig.dim)
    ]

    seen = {}
    for idx in range(eig.dim):
        gi = eig.group_of(idx)
        key = (gi, tuple(np.round(svals[idx] / SYMMETRY_SPLIT_TOL).astype(int)))
        if key in seen:
            raise DegeneracyNotLiftedError(float(eig.eigenvalues[idx]), 2)
        seen[key] = idx

    return LabeledSystem(eig.eigenvalues.copy(), v, [np.asarray(gr) for gr in eig.groups],
                         names, svals, labels)


# ---------------------------------------------------------------------------
# spectral comparison and localization
# ---------------------------------------------------------------------------

def inverse_participation_ratio(vec: np.ndarray) -> float:
    """1 / sum |psi|^4 for a normalized state; 1.0 means a single vertex."""
    p = np.abs(vec) ** 2
    p = p / p.sum()
    return float(1.0 / np.sum(p * p))


def localized_state(eig: EigenSystem, group: np.ndarray
                    ) -> tuple[np.ndarray, int, float]:
    """Most localizable state in a degenerate group's eigenspace.

    Rotates the group basis toward the vertex with the largest projector
    weight; returns (state, vertex index, projector weight at it).  A
    weight of 1 means the indicator of that vertex is itself an
    eigenvector.
    """
    b = eig.eigenvectors[:, group]
    weight = np.sum(b * b, axis=1)
    vertex = int(np.argmax(weight))
    peak = float(weight[vertex])
    state = b @ b[vertex]
    norm = np.linalg.norm(state)
    if norm > 0:
        state = state / norm
    return state, vertex, peak


@dataclass
class SpectralDiff:
    """Index-aligned comparison of two equal-size spectra."""

    shifts: np.ndarray                 # eigenvalue differences, index-aligned
    groups_a: list[tuple[float, int]]  # (value, multiplicity) per group
    groups_b: list[tuple[float, int]]
    changed_groups_a: list[int]        # groups of A whose index run changed
    changed_groups_b: list[int]
    localization: list[tuple[float, int, float, float]] = field(default_factory=list)
    # (energy, vertex, projector weight, ipr) per changed group of B

    @property
    def max_shift(self) -> float:
        return float(np.abs(self.shifts).max()) if self.shifts.size else 0.0

    @property
    def changed_group_fraction(self) -> float:
        return len(self.changed_groups_a) / max(1, len(self.groups_a))

    @property
    def is_empty(self) -> bool:
        return self.max_shift == 0.0 and not self.changed_groups_a


def spectral_diff(eig_a: EigenSystem, eig_b: EigenSystem) -> SpectralDiff:
    """Compare two spectra: shifts, degeneracy changes, localization scores.

    Degeneracy structure is compared as the partition of the sorted index
    range into equal-value runs; a group counts as changed when its index
    run is not present verbatim in the other partition.
    """
    if eig_a.dim != eig_b.dim:
        raise ValueError(f"dimension mismatch: {eig_a.dim} vs {eig_b.dim}")
    shifts = eig_b.eigenvalues - eig_a.eigenvalues

    runs_a = {(int(gr[0]), int(gr[-1])) for gr in eig_a.groups}
    runs_b = {(int(gr[0]), int(gr[-1])) for gr in eig_b.groups}
    changed_a = [gi for gi, gr in enumerate(eig_a.groups)
                 if (int(gr[0]), int(gr[-1])) not in runs_b]
    changed_b = [gi for gi, gr in enumerate(eig_b.groups)
                 if (int(gr[0]), int(gr[-1])) not in runs_a]

    localization = []
    for gi in changed_b:
        group = eig_b.groups[gi]
        state, vertex, peak = localized_state(eig_b, group)
        localization.append((float(eig_b.eigenvalues[group[0]]), vertex, peak,
                             inverse_participation_ratio(state)))

    def summarize(eig):
        return [(float(eig.eigenvalues[gr[0]]), int(gr.size)) for gr in eig.groups]

    return SpectralDiff(shifts, summarize(eig_a), summarize(eig_b),
                        changed_a, changed_b, localization)


def eigenstate_field(eig: EigenSystem, index: int) -> np.ndarray:
    """Per-vertex components of one eigenvector (copy, keyed by linear index)."""
    if not 0 <= index < eig.dim:
        raise IndexError(f"eigenstate index {index} out of range [0, {eig.dim})")
    return eig.eigenvectors[:, index].copy()
