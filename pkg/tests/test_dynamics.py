import numpy as np
import pytest

from chimera_walk import (
    FAMILY_BOTH,
    FAMILY_LEFT,
    FAMILY_RIGHT,
    VertexCoord,
    build_chimera,
    classical_ctrw,
    eigensolve,
    evolve,
    fourier2d,
    hamiltonian,
    label_eigenstates,
    limiting_distribution,
    permutation_operator,
    project_family,
    subspace_weights,
    symmetry_set,
    transition_probability,
)


def structural_weights(g, psi):
    """Independent family-weight oracle from per-cell sums alone.

    The both-sides family is spanned by states that are constant on each
    cell half; the left/right families are the orthogonal complements on
    their respective halves.
    """
    grid = np.asarray(psi).reshape(g.M, g.N, 2 * g.L)
    left, right = grid[:, :, :g.L], grid[:, :, g.L:]
    both = (np.abs(left.sum(axis=2)) ** 2 / g.L
            + np.abs(right.sum(axis=2)) ** 2 / g.L).sum()
    w_left = (np.abs(left) ** 2).sum() - (np.abs(left.sum(axis=2)) ** 2 / g.L).sum()
    w_right = (np.abs(right) ** 2).sum() - (np.abs(right.sum(axis=2)) ** 2 / g.L).sum()
    return {FAMILY_LEFT: w_left, FAMILY_BOTH: both, FAMILY_RIGHT: w_right}


@pytest.fixture(scope="module")
def labeled_p334():
    g = build_chimera(3, 3, 4, "periodic")
    h = hamiltonian(g)
    labeled = label_eigenstates(eigensolve(h), symmetry_set(g), g)
    return g, h, labeled


def test_evolve_time_zero_is_delta():
    h = hamiltonian(build_chimera(2, 2, 2, "reflecting"))
    state = evolve(h, VertexCoord(1, 2, 3), 0.0)
    i0 = h.graph.coords_to_index(VertexCoord(1, 2, 3))
    expected = np.zeros(16)
    expected[i0] = 1.0
    assert np.allclose(state.amplitudes, expected, atol=1e-12)


def test_evolve_rejects_negative_time():
    h = hamiltonian(build_chimera(1, 1, 1, "reflecting"))
    with pytest.raises(ValueError):
        evolve(h, 0, -1.0)


def test_two_vertex_transfer_is_sine_squared():
    h = hamiltonian(build_chimera(1, 1, 1, "reflecting"))
    for t in (0.0, 0.3, 1.0, np.pi / 2, 2.5):
        p = transition_probability(h, 0, t).values
        assert abs(p[1] - np.sin(t) ** 2) < 1e-12
    assert abs(transition_probability(h, 0, np.pi / 2).values[1] - 1.0) < 1e-12


def test_unitarity():
    h = hamiltonian(build_chimera(2, 3, 2, "reflecting"))
    for t in (0.1, 1.0, 7.7, 53.0):
        state = evolve(h, 0, t)
        assert abs(state.norm - 1.0) < 1e-10
        field = transition_probability(h, 0, t)
        assert abs(field.total - 1.0) < 1e-10


def test_mirror_symmetric_starts_give_mirrored_fields():
    g = build_chimera(4, 4, 2, "periodic")
    h = hamiltonian(g)
    mirror = permutation_operator(g, "s6")
    v0 = VertexCoord(1, 2, 1)
    image = VertexCoord(g.M, 2, 1)
    p_a = transition_probability(h, v0, 5.0).values
    p_b = transition_probability(h, image, 5.0).values
    assert np.abs(p_a[mirror.perm] - p_b).max() < 1e-10


def test_right_start_localizes_along_its_row():
    # horizontal twin of the column confinement: right-side starts keep
    # (L-1)/L of the limiting mass on the initial row's right half
    g = build_chimera(8, 8, 4, "reflecting")
    h = hamiltonian(g)
    v0 = VertexCoord(4, 4, 8)
    lim = limiting_distribution(h, v0)
    row_right = np.zeros(g.num_vertices, dtype=bool)
    for n in range(1, g.N + 1):
        for mu in range(g.L + 1, 2 * g.L + 1):
            row_right[g.coords_to_index(VertexCoord(4, n, mu))] = True
    assert lim.values[~row_right].sum() <= 1 / g.L + 0.02


def test_limiting_two_vertex_is_half_half():
    h = hamiltonian(build_chimera(1, 1, 1, "reflecting"))
    lim = limiting_distribution(h, 0)
    assert np.allclose(lim.values, [0.5, 0.5], atol=1e-12)


def test_limiting_sums_to_one():
    h = hamiltonian(build_chimera(3, 2, 2, "periodic"))
    lim = limiting_distribution(h, VertexCoord(2, 1, 3))
    assert abs(lim.total - 1.0) < 1e-10
    assert lim.values.min() >= 0.0


def test_limiting_matches_time_average_small():
    h = hamiltonian(build_chimera(2, 2, 2, "reflecting"))
    lim = limiting_distribution(h, 0).values
    grid = (np.arange(800) + 0.5) * (200.0 / 800)
    acc = np.zeros(16)
    for t in grid:
        acc += transition_probability(h, 0, t).values
    acc /= grid.size
    assert np.abs(acc - lim).sum() < 2e-2


def test_classical_delta_and_positivity():
    h = hamiltonian(build_chimera(2, 2, 2, "reflecting"))
    assert np.allclose(classical_ctrw(h, 0, 0.0).values,
                       np.eye(16)[0], atol=1e-12)
    for t in (0.5, 3.0, 40.0):
        p = classical_ctrw(h, 0, t)
        assert p.values.min() >= 0.0
        assert abs(p.total - 1.0) < 1e-10


def test_classical_limit_is_uniform_on_regular_graph():
    g = build_chimera(3, 3, 2, "periodic")
    h = hamiltonian(g)
    p = classical_ctrw(h, 0, 500.0)
    assert np.abs(p.values - 1.0 / g.num_vertices).max() < 1e-9


def test_classical_spreads_in_both_directions_quantum_does_not():
    g = build_chimera(8, 8, 4, "reflecting")
    h = hamiltonian(g)
    v0 = VertexCoord(4, 4, 4)
    t = 6.0
    quantum = transition_probability(h, v0, t).values.reshape(8, 8, 8)
    classical = classical_ctrw(h, v0, t).values.reshape(8, 8, 8)
    off_column_q = quantum.sum() - quantum[:, 3].sum()
    off_column_c = classical.sum() - classical[:, 3].sum()
    assert off_column_q < 0.5 * off_column_c


def test_subspace_weights_left_start(labeled_p334):
    g, h, labeled = labeled_p334
    psi = evolve(h, VertexCoord(2, 2, 1), 0.0)
    w = subspace_weights(labeled, psi)
    assert abs(w[FAMILY_LEFT] - 3 / 4) < 1e-9
    assert abs(w[FAMILY_BOTH] - 1 / 4) < 1e-9
    assert abs(w[FAMILY_RIGHT]) < 1e-9


def test_subspace_weights_right_start_mirrors(labeled_p334):
    g, h, labeled = labeled_p334
    psi = evolve(h, VertexCoord(2, 2, g.L + 1), 0.0)
    w = subspace_weights(labeled, psi)
    assert abs(w[FAMILY_RIGHT] - 3 / 4) < 1e-9
    assert abs(w[FAMILY_BOTH] - 1 / 4) < 1e-9
    assert abs(w[FAMILY_LEFT]) < 1e-9


def test_subspace_weights_constant_in_time(labeled_p334):
    g, h, labeled = labeled_p334
    reference = None
    for t in (0.0, 2.7, 9.3):
        psi = evolve(h, VertexCoord(1, 3, 2), t)
        w = subspace_weights(labeled, psi)
        assert abs(sum(w.values()) - 1.0) < 1e-9
        if reference is None:
            reference = w
        else:
            for fam in w:
                assert abs(w[fam] - reference[fam]) < 1e-9


def test_subspace_weights_match_structural_oracle(labeled_p334):
    g, h, labeled = labeled_p334
    rng = np.random.default_rng(7)
    for _ in range(3):
        psi = rng.standard_normal(g.num_vertices) \
            + 1j * rng.standard_normal(g.num_vertices)
        psi /= np.linalg.norm(psi)
        got = subspace_weights(labeled, psi)
        want = structural_weights(g, psi)
        for fam in got:
            assert abs(got[fam] - want[fam]) < 1e-9


def test_project_family_components(labeled_p334):
    g, h, labeled = labeled_p334
    psi = evolve(h, VertexCoord(1, 1, 1), 4.2).amplitudes
    parts = {fam: project_family(labeled, psi, fam)
             for fam in (FAMILY_LEFT, FAMILY_BOTH, FAMILY_RIGHT)}
    recomposed = sum(parts.values())
    assert np.abs(recomposed - psi).max() < 1e-9
    assert abs(np.vdot(parts[FAMILY_LEFT], parts[FAMILY_BOTH])) < 1e-9
    w = subspace_weights(labeled, psi)
    for fam, part in parts.items():
        assert abs(np.linalg.norm(part) ** 2 - w[fam]) < 1e-9


def test_fourier_uniform_cells_concentrate_at_zero_momentum():
    g = build_chimera(4, 4, 2, "periodic")
    psi = np.ones(g.num_vertices) / np.sqrt(g.num_vertices)
    grid = fourier2d(psi, g, "left", "sum")
    assert abs(grid[0, 0] - 1.0) < 1e-12
    assert abs(grid.sum() - 1.0) < 1e-12


def test_fourier_single_cell_impulse_is_flat():
    g = build_chimera(4, 4, 2, "periodic")
    psi = np.zeros(g.num_vertices)
    psi[g.coords_to_index(VertexCoord(2, 3, 1))] = 1.0
    for reduction in ("sum", "norm"):
        grid = fourier2d(psi, g, "left", reduction)
        assert np.abs(grid - 1.0 / 16).max() < 1e-12


def test_fourier_rejects_empty_side():
    g = build_chimera(2, 2, 2, "reflecting")
    psi = np.zeros(g.num_vertices)
    psi[g.coords_to_index(VertexCoord(1, 1, 1))] = 1.0
    with pytest.raises(ValueError):
        fourier2d(psi, g, "right", "sum")
    with pytest.raises(ValueError):
        fourier2d(psi, g, "left", "middle")


def test_rescaled_weights_leave_limiting_distribution_invariant():
    g = build_chimera(2, 2, 2, "reflecting")
    v0 = VertexCoord(1, 1, 1)
    base = limiting_distribution(hamiltonian(g, 1.0, 1.0), v0)
    scaled = limiting_distribution(hamiltonian(g, 3.0, 3.0), v0)
    assert np.abs(base.values - scaled.values).max() < 1e-12
