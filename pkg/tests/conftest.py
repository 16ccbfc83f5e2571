import pytest

from chimera_walk import (
    VertexCoord,
    build_chimera,
    eigensolve,
    hamiltonian,
    isolate_vertices,
    label_eigenstates,
    symmetry_set,
)


@pytest.fixture(scope="session")
def chi_r_16():
    """Reflecting 16x16x4 graph with its Hamiltonian and eigensystem."""
    g = build_chimera(16, 16, 4, "reflecting")
    h = hamiltonian(g)
    return g, h, eigensolve(h)


@pytest.fixture(scope="session")
def chi_r_16_broken(chi_r_16):
    """Same graph with the (1,1,1) vertex isolated."""
    g, _, _ = chi_r_16
    gb = isolate_vertices(g, [VertexCoord(1, 1, 1)])
    hb = hamiltonian(gb)
    return gb, hb, eigensolve(hb)


@pytest.fixture(scope="session")
def chi_p_16_labeled():
    """Periodic 16x16x4 graph with a fully labeled eigensystem."""
    g = build_chimera(16, 16, 4, "periodic")
    h = hamiltonian(g)
    eig = eigensolve(h)
    labeled = label_eigenstates(eig, symmetry_set(g), g)
    return g, h, eig, labeled
