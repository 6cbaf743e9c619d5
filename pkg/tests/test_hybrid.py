import numpy as np
import pytest
import scipy.sparse as sp

import wgfem


T1 = wgfem.SpaceConfig("type1")
T2 = wgfem.SpaceConfig("type2")


def _pair(mesh, config, a=None):
    dm = wgfem.build_dofmap(mesh, config)
    if a is None:
        a = wgfem.CoefficientField.identity(mesh)
    system = wgfem.assemble_system(mesh, dm, config, a)
    hybrid = wgfem.assemble_hybrid(mesh, dm, config, a)
    return system, hybrid


@pytest.mark.parametrize("config", [T1, T2], ids=["type1", "type2"])
def test_schur_matches_primal(config, two_triangle):
    system, hybrid = _pair(two_triangle, config)
    scale = np.abs(system.a.data).max()
    assert wgfem.schur_check(hybrid, system) <= 1e-12 * scale


def test_schur_matches_primal_weighted(two_triangle):
    a = wgfem.CoefficientField.constant(two_triangle, 3.0, 0.0, 0.5)
    system, hybrid = _pair(two_triangle, T2, a)
    scale = np.abs(system.a.data).max()
    assert wgfem.schur_check(hybrid, system) <= 1e-12 * scale


def test_schur_on_refined_mesh(hierarchy6):
    mesh = hierarchy6[1]
    for config in (T1, T2):
        system, hybrid = _pair(mesh, config)
        scale = np.abs(system.a.data).max()
        assert wgfem.schur_check(hybrid, system) <= 1e-12 * scale


def test_saddle_structure(two_triangle):
    _, hybrid = _pair(two_triangle, T2)
    saddle = hybrid.saddle_matrix()
    n = hybrid.num_flux + hybrid.num_interior + hybrid.num_face
    assert saddle.shape == (n, n)
    dev = saddle - saddle.T
    assert not dev.nnz or np.abs(dev.data).max() <= 1e-13

    # flux block SPD, full matrix indefinite
    w = hybrid.w_block.toarray()
    np.linalg.cholesky(w)
    eigs = np.linalg.eigvalsh(saddle.toarray())
    assert eigs.min() < 0 < eigs.max()


def test_flux_block_is_blockdiagonal(two_triangle):
    _, hybrid = _pair(two_triangle, T2)
    w = hybrid.w_block.toarray()
    d = T2.dim_gradient
    mask = np.ones_like(w, dtype=bool)
    for c in range(2):
        mask[c * d:(c + 1) * d, c * d:(c + 1) * d] = False
    assert np.all(w[mask] == 0)
    # w_inv really inverts each diagonal block
    prod = hybrid.w_inv @ hybrid.w_block
    np.testing.assert_allclose(prod.toarray(), np.eye(2 * d), atol=1e-12)


def test_schur_complement_shape(two_triangle):
    system, hybrid = _pair(two_triangle, T1)
    s = hybrid.schur_complement()
    assert s.shape == system.a.shape
