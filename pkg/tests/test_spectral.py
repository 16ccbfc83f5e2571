import numpy as np
import pytest

from chimera_walk import (
    FAMILY_BOTH,
    FAMILY_LEFT,
    FAMILY_RIGHT,
    VertexCoord,
    build_chimera,
    eigensolve,
    eigenstate_field,
    enhance,
    enumerate_labels,
    hamiltonian,
    inverse_participation_ratio,
    isolate_vertices,
    label_eigenstates,
    localized_state,
    spectral_diff,
    symmetry_set,
    verify_spectrum,
)
from chimera_walk.errors import DegeneracyNotLiftedError, UnsupportedVariantError
from chimera_walk.spectral import DEGENERACY_GROUP_RTOL


def variant_graph(variant, boundary, M, N, L):
    g = build_chimera(M, N, L, boundary)
    return enhance(g) if variant == "enhanced" else g


def test_eigensolve_two_vertex():
    eig = eigensolve(hamiltonian(build_chimera(1, 1, 1, "reflecting")))
    assert np.allclose(eig.eigenvalues, [0.0, 2.0])
    assert len(eig.groups) == 2


def test_eigensolve_kernel_is_uniform():
    for g in (build_chimera(2, 3, 2, "reflecting"),
              enhance(build_chimera(2, 2, 2, "reflecting"))):
        eig = eigensolve(hamiltonian(g))
        assert abs(eig.eigenvalues[0]) < 1e-12
        v0 = eig.eigenvectors[:, 0]
        assert np.allclose(v0, v0[0], atol=1e-10)
        assert v0[0] > 0  # sign convention: first entry positive


def test_eigensolve_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        eigensolve(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_orthonormality_and_residual():
    h = hamiltonian(build_chimera(2, 2, 3, "periodic"))
    eig = eigensolve(h)
    v = eig.eigenvectors
    assert np.abs(v.T @ v - np.eye(eig.dim)).max() < 1e-10
    residual = np.abs(h.matrix @ v - v * eig.eigenvalues).max()
    assert residual < 1e-9 * h.max_abs


@pytest.mark.parametrize("variant,boundary,M,N,L", [
    ("plain", "periodic", 3, 3, 2), ("plain", "periodic", 4, 4, 4),
    ("plain", "reflecting", 2, 2, 2), ("plain", "reflecting", 3, 5, 4),
    ("enhanced", "reflecting", 4, 4, 4), ("enhanced", "reflecting", 3, 5, 4),
])
def test_label_cardinalities(variant, boundary, M, N, L):
    labels = enumerate_labels(variant, boundary, M, N, L)
    assert len(labels) == 2 * M * N * L
    counts = {FAMILY_LEFT: 0, FAMILY_RIGHT: 0, FAMILY_BOTH: 0}
    for lab in labels:
        counts[lab.family] += 1
    assert counts[FAMILY_LEFT] == M * N * (L - 1)
    assert counts[FAMILY_RIGHT] == M * N * (L - 1)
    assert counts[FAMILY_BOTH] == 2 * M * N


def test_periodic_mixed_branch_contains_kernel():
    labels = enumerate_labels("plain", "periodic", 3, 3, 4)
    zero_modes = [lab for lab in labels if abs(lab.energy) < 1e-12]
    assert len(zero_modes) == 1
    lab = zero_modes[0]
    assert lab.family == FAMILY_BOTH and lab.lattice == (0, 0, 0, 0)
    twin = [l for l in labels if l.lattice == (0, 0, 0, 0) and l is not lab]
    assert len(twin) == 1 and abs(twin[0].energy - 2 * 4) < 1e-12


def test_reflecting_left_branch_energy():
    M = N = 4
    labels = enumerate_labels("plain", "reflecting", M, N, 4)
    for lab in labels:
        if lab.family == FAMILY_LEFT:
            j = lab.lattice[2]
            assert abs(lab.energy - (4 + 2 + 2 * np.cos(np.pi * j / M))) < 1e-12


@pytest.mark.parametrize("variant,boundary", [
    ("plain", "periodic"), ("plain", "reflecting"), ("enhanced", "reflecting"),
])
@pytest.mark.parametrize("M,N,L", [(2, 2, 2), (4, 4, 4), (3, 5, 4)])
def test_spectrum_oracle(variant, boundary, M, N, L):
    if variant == "enhanced" and L != 4:
        with pytest.raises(UnsupportedVariantError):
            enumerate_labels(variant, boundary, M, N, L)
        return
    if boundary == "periodic" and (M == 2 or N == 2):
        # wrapped edges collapse, the graph equals its reflecting twin and
        # the torus closed forms do not apply
        with pytest.raises(UnsupportedVariantError):
            enumerate_labels(variant, boundary, M, N, L)
        gp = variant_graph(variant, "periodic", M, N, L)
        gr = variant_graph(variant, "reflecting", M, N, L)
        assert set(gp.edges) == set(gr.edges)
        labels = enumerate_labels(variant, "reflecting", M, N, L)
        eig = eigensolve(hamiltonian(gp))
    else:
        labels = enumerate_labels(variant, boundary, M, N, L)
        eig = eigensolve(hamiltonian(variant_graph(variant, boundary, M, N, L)))
    report = verify_spectrum(labels, eig)
    assert report.count_match
    assert report.max_deviation <= 1e-9 * max(np.abs(eig.eigenvalues))


def test_spectrum_oracle_detects_wrong_size():
    labels = enumerate_labels("plain", "reflecting", 2, 2, 3)
    eig = eigensolve(hamiltonian(build_chimera(2, 2, 2, "reflecting")))
    report = verify_spectrum(labels, eig)
    assert not report.count_match


@pytest.mark.parametrize("variant,boundary,M,N,L", [
    ("plain", "periodic", 2, 2, 2), ("plain", "periodic", 4, 4, 4),
    ("plain", "reflecting", 2, 2, 2), ("plain", "reflecting", 4, 4, 4),
    ("enhanced", "reflecting", 4, 4, 4),
])
def test_labeling_complete_and_consistent(variant, boundary, M, N, L):
    g = variant_graph(variant, boundary, M, N, L)
    h = hamiltonian(g)
    eig = eigensolve(h)
    ops = symmetry_set(g)
    labeled = label_eigenstates(eig, ops, g)
    assert labeled.dim == 2 * M * N * L

    # joint eigenvalues equal Rayleigh quotients of the refined vectors
    for oi, op in enumerate(ops):
        applied = op.apply(labeled.eigenvectors)
        rayleigh = np.einsum("vk,vk->k", labeled.eigenvectors, applied)
        assert np.abs(rayleigh - labeled.s_values[:, oi]).max() < 1e-9
        # and the vectors are true eigenvectors of every operator
        residual = np.abs(applied - labeled.eigenvectors * rayleigh).max()
        assert residual < 1e-8

    keys = {(round(lab.energy, 8), tuple(np.round(lab.s, 6)))
            for lab in labeled.labels}
    assert len(keys) == labeled.dim


def test_family_support_patterns():
    g = build_chimera(3, 3, 4, "periodic")
    labeled = label_eigenstates(eigensolve(hamiltonian(g)), symmetry_set(g), g)
    right = np.array([g.index_to_coords(i).mu > g.L
                      for i in range(g.num_vertices)])
    for idx, lab in enumerate(labeled.labels):
        vec = labeled.eigenvectors[:, idx]
        if lab.family == FAMILY_LEFT:
            assert np.abs(vec[right]).max() < 1e-10
        elif lab.family == FAMILY_RIGHT:
            assert np.abs(vec[~right]).max() < 1e-10
        else:
            assert np.abs(vec[right]).max() > 1e-3
            assert np.abs(vec[~right]).max() > 1e-3


def test_labeling_incomplete_operator_set_raises():
    g = build_chimera(2, 2, 4, "reflecting")
    ops = symmetry_set(g)[:2]  # drop the rest: degeneracies survive
    with pytest.raises(DegeneracyNotLiftedError):
        label_eigenstates(eigensolve(hamiltonian(g)), ops, g)


def test_spectral_diff_self_is_empty():
    eig = eigensolve(hamiltonian(build_chimera(2, 2, 2, "reflecting")))
    diff = spectral_diff(eig, eig)
    assert diff.is_empty
    assert diff.max_shift == 0.0


def test_spectral_diff_dimension_mismatch():
    small = eigensolve(hamiltonian(build_chimera(1, 1, 1, "reflecting")))
    big = eigensolve(hamiltonian(build_chimera(2, 2, 2, "reflecting")))
    with pytest.raises(ValueError):
        spectral_diff(small, big)


def test_broken_vertex_zero_mode_is_indicator():
    g = build_chimera(4, 4, 4, "reflecting")
    gb = isolate_vertices(g, [VertexCoord(1, 1, 1)])
    eig = eigensolve(hamiltonian(gb))
    zero_groups = [gr for gr in eig.groups
                   if abs(eig.eigenvalues[gr[0]]) < 1e-10]
    assert len(zero_groups) == 1 and zero_groups[0].size == 2
    state, vertex, peak = localized_state(eig, zero_groups[0])
    assert vertex == 0
    assert abs(peak - 1.0) < 1e-10
    assert abs(inverse_participation_ratio(state) - 1.0) < 1e-9
    assert abs(abs(state[0]) - 1.0) < 1e-9


def test_broken_vertex_difference_field_spikes_at_defect():
    # same mechanism as the full-size comparison: states with energy away
    # from zero must vanish exactly on the isolated vertex, so the matched
    # difference against the unbroken eigenstate peaks there
    g = build_chimera(6, 6, 4, "reflecting")
    h = hamiltonian(g)
    eig = eigensolve(h)
    gb = isolate_vertices(g, [VertexCoord(1, 1, 1)])
    eigb = eigensolve(hamiltonian(gb))

    pairs = [gr for gr in eig.groups
             if gr.size == 2 and eig.eigenvalues[gr[0]] > 0.5]
    weights = [np.sum(eig.eigenvectors[0, gr] ** 2) for gr in pairs]
    group = pairs[int(np.argmax(weights))]
    target = eig.eigenvalues[group[0]]

    candidates = np.nonzero(np.abs(eigb.eigenvalues - target) < 0.05)[0]
    scores = np.abs(eig.eigenvectors[:, group].T @ eigb.eigenvectors[:, candidates])
    which = candidates[int(np.argmax(scores.max(axis=0)))]
    vec_b = eigb.eigenvectors[:, which]
    assert abs(vec_b[0]) < 1e-10  # exact zero on the isolated vertex

    proj = eig.eigenvectors[:, group] @ (eig.eigenvectors[:, group].T @ vec_b)
    proj /= np.linalg.norm(proj)
    diff = proj - vec_b
    assert int(np.argmax(np.abs(diff))) == 0


@pytest.mark.xfail(
    strict=True,
    reason="refuted numerically: one broken vertex shifts every mixed-family "
           "level by ~1e-3, so far more than 5% of degeneracy groups change "
           "at the shared grouping tolerance")
def test_breaking_one_vertex_changes_few_groups(chi_r_16, chi_r_16_broken):
    _, _, eig = chi_r_16
    _, _, eigb = chi_r_16_broken
    tol = DEGENERACY_GROUP_RTOL * float(
        eig.eigenvalues[-1] - eig.eigenvalues[0])
    changed = 0
    for gr in eig.groups:
        value = eig.eigenvalues[gr[0]]
        if int(np.sum(np.abs(eigb.eigenvalues - value) <= tol)) != gr.size:
            changed += 1
    assert changed <= 0.05 * len(eig.groups)


def test_exact_survivors_after_breaking(chi_r_16, chi_r_16_broken):
    # eigenvectors vanishing on the defect and its whole neighbourhood stay
    # exact: each of the 16 left/right 96-fold levels keeps a 92-dim block
    # (the defect row kills one left-family and three right-family dims)
    _, _, eig = chi_r_16
    _, _, eigb = chi_r_16_broken
    survivors = 0
    for gr in eig.groups:
        value = eig.eigenvalues[gr[0]]
        survivors += int(np.sum(np.abs(eigb.eigenvalues - value) <= 1e-11))
    assert survivors >= 92 * 16


def test_eigenstate_field_access():
    g = build_chimera(2, 2, 2, "reflecting")
    eig = eigensolve(hamiltonian(g))
    field = eigenstate_field(eig, 0)
    assert field.shape == (g.num_vertices,)
    assert np.allclose(field, field[0], atol=1e-10)  # kernel is constant
    with pytest.raises(IndexError):
        eigenstate_field(eig, 16)
