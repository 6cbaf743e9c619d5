import numpy as np
import pytest
import scipy.sparse as sp

import wgfem
from wgfem.assemble import assemble_face_seminorm, read_matrix_market, \
    write_matrix_market
from wgfem.weakgrad import boundary_mass_matrix


T1 = wgfem.SpaceConfig("type1")
T2 = wgfem.SpaceConfig("type2")


def _system(mesh, config, a=None):
    dm = wgfem.build_dofmap(mesh, config)
    if a is None:
        a = wgfem.CoefficientField.identity(mesh)
    return dm, wgfem.assemble_system(mesh, dm, config, a)


GOLDEN_T2 = np.array([
    [24.0, 0.0, -6.0, -6.0],
    [0.0, 24.0, -6.0, -6.0],
    [-6.0, -6.0, 22.0 / 3.0, 14.0 / 3.0],
    [-6.0, -6.0, 14.0 / 3.0, 22.0 / 3.0],
])

GOLDEN_T1 = np.array([
    [18.0, 0.0, -6.0],
    [0.0, 18.0, -6.0],
    [-6.0, -6.0, 12.0],
])


def test_golden_two_triangle_type2(two_triangle):
    _, system = _system(two_triangle, T2)
    np.testing.assert_allclose(system.a.toarray(), GOLDEN_T2, atol=1e-13)


def test_golden_two_triangle_type1(two_triangle):
    _, system = _system(two_triangle, T1)
    np.testing.assert_allclose(system.a.toarray(), GOLDEN_T1, atol=1e-13)


def test_bilinearity_in_coefficient(two_triangle):
    a = wgfem.CoefficientField.identity(two_triangle)
    _, sys1 = _system(two_triangle, T2, a)
    _, sys7 = _system(two_triangle, T2, a.scaled(7.0))
    np.testing.assert_allclose(sys7.a.toarray(), 7.0 * sys1.a.toarray(),
                               rtol=1e-14)


def test_symmetry_and_spd(hierarchy6):
    mesh = hierarchy6[1]
    for config in (T1, T2):
        _, system = _system(mesh, config)
        a = system.a
        dev = (a - a.T)
        scale = np.abs(a.data).max()
        assert np.abs(dev.data).max() <= 1e-12 * scale if dev.nnz else True
        # positive definite: dense Cholesky succeeds on this small level
        np.linalg.cholesky(a.toarray())


def test_block_shapes(two_triangle):
    dm, system = _system(two_triangle, T2)
    assert (system.num_interior, system.num_face) == (2, 2)
    c, b, d = system.blocks()
    assert c.shape == (2, 2) and b.shape == (2, 2) and d.shape == (2, 2)
    full = sp.bmat([[c, b], [b.T, d]]).toarray()
    np.testing.assert_allclose(full, system.a.toarray(), atol=0)


def test_gram_entries(two_triangle):
    dm, system = _system(two_triangle, T2)
    g = system.gram.toarray()
    np.testing.assert_allclose(np.diag(g)[:2], [0.5, 0.5], rtol=1e-15)
    # face block: (h_T1 + h_T2) * |F| * nodal edge mass on the diagonal edge
    length = np.sqrt(2.0)
    h = np.sqrt(2.0)
    gram = length * np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]])
    np.testing.assert_allclose(g[2:, 2:], 2.0 * h * gram, rtol=1e-14)


def test_gram_matches_direct_quadrature(hierarchy6):
    """x^T G x equals the defining sum of cell and scaled-edge integrals."""
    rng = np.random.default_rng(23)
    mesh = hierarchy6[1]
    for config in (T1, T2):
        dm, system = _system(mesh, config)
        x = rng.standard_normal(dm.num_total)
        direct = 0.0
        for cell in range(mesh.num_cells):
            geom = wgfem.cell_geometry(mesh, cell)
            dofs = dm.cell_dofs(mesh, cell)
            direct += geom.area * x[dofs[0]] ** 2
            mu = np.where(dofs[1:] >= 0, x[dofs[1:]], 0.0)
            mb = boundary_mass_matrix(mesh, cell, config)
            direct += geom.h * (mu @ mb @ mu)
        quad = x @ system.gram @ x
        assert quad == pytest.approx(direct, rel=1e-12)


def test_load_vector(reference_triangle, two_triangle):
    dm = wgfem.build_dofmap(reference_triangle, T2)
    b0 = wgfem.assemble_load(reference_triangle, dm, T2, 0.0)
    np.testing.assert_array_equal(b0, np.zeros(dm.num_total))

    b1 = wgfem.assemble_load(reference_triangle, dm, T2, 1.0)
    np.testing.assert_allclose(b1[:1], [0.5], rtol=1e-14)

    bx = wgfem.assemble_load(reference_triangle, dm, T2,
                             lambda x, y: x, f_degree=1)
    assert bx[0] == pytest.approx(1 / 6, rel=1e-13)

    dm2 = wgfem.build_dofmap(two_triangle, T2)
    b = wgfem.assemble_load(two_triangle, dm2, T2, 1.0)
    np.testing.assert_allclose(b[:2], [0.5, 0.5], rtol=1e-14)
    np.testing.assert_array_equal(b[2:], 0.0)

    with pytest.raises(wgfem.UnsupportedDegreeError):
        wgfem.assemble_load(reference_triangle, dm, T2, 1.0, f_degree=9)


def test_energy_localizes_to_boundary_cells(hierarchy6):
    """With all unknowns equal to one, only cells touching the boundary
    contribute energy: interior cells see the constant pair (1, 1)."""
    mesh = hierarchy6[2]
    dm, system = _system(mesh, T2)
    ones = np.ones(dm.num_total)
    total = ones @ system.a @ ones

    direct = 0.0
    touched = 0
    for cell in range(mesh.num_cells):
        dofs = dm.cell_dofs(mesh, cell)
        if np.all(dofs >= 0):
            continue
        touched += 1
        k = wgfem.weakgrad.local_stiffness(mesh, cell, T2)
        loc = np.where(dofs >= 0, 1.0, 0.0)
        direct += loc @ k @ loc
    assert 0 < touched < mesh.num_cells
    assert total == pytest.approx(direct, rel=1e-12)


def test_coefficient_mesh_mismatch(two_triangle, crisscross1):
    dm = wgfem.build_dofmap(two_triangle, T2)
    wrong = wgfem.CoefficientField.identity(crisscross1)
    with pytest.raises(wgfem.InvalidInputError):
        wgfem.assemble_system(two_triangle, dm, T2, wrong)


def test_dofmap_config_mismatch(two_triangle):
    dm = wgfem.build_dofmap(two_triangle, T1)
    with pytest.raises(wgfem.UnsupportedConfigError):
        wgfem.assemble_system(two_triangle, dm, T2,
                              wgfem.CoefficientField.identity(two_triangle))


def test_face_seminorm_psd(hierarchy6):
    mesh = hierarchy6[1]
    dm = wgfem.build_dofmap(mesh, T2)
    s = assemble_face_seminorm(mesh, dm, T2)
    assert s.shape == (dm.num_face, dm.num_face)
    w = np.linalg.eigvalsh(s.toarray())
    assert w.min() >= -1e-12 * max(w.max(), 1.0)


def test_matrix_market_roundtrip(tmp_path, hierarchy6):
    mesh = hierarchy6[1]
    _, system = _system(mesh, T2)
    path = tmp_path / "a.mtx"
    write_matrix_market(str(path), system.a)
    back = read_matrix_market(str(path))
    # the reader mirrors the stored lower triangle, so compare against the
    # symmetrized original
    sym = 0.5 * (system.a + system.a.T)
    dev = back - sym
    assert not dev.nnz or np.abs(dev.data).max() <= 1e-15 * np.abs(sym.data).max()

    first = path.read_text().splitlines()[0]
    assert first == "%%MatrixMarket matrix coordinate real symmetric"
    # a second write is byte-identical
    path2 = tmp_path / "b.mtx"
    write_matrix_market(str(path2), system.a)
    assert path.read_bytes() == path2.read_bytes()


def test_matrix_market_rejects_asymmetric(tmp_path):
    a = sp.csr_matrix(np.array([[1.0, 2.0], [0.5, 1.0]]))
    with pytest.raises(wgfem.InvalidMatrixError):
        write_matrix_market(str(tmp_path / "x.mtx"), a)


def test_matrix_market_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%NotMatrixMarket nope\n1 1 1\n1 1 2.0\n")
    with pytest.raises(wgfem.InvalidInputError):
        read_matrix_market(str(bad))


def test_matrix_market_general_format(tmp_path):
    a = sp.csr_matrix(np.array([[2.0, 1.0], [0.0, 3.0]]))
    path = tmp_path / "g.mtx"
    path.write_text("%%MatrixMarket matrix coordinate real general\n"
                    "2 2 3\n1 1 2.0\n1 2 1.0\n2 2 3.0\n")
    back = read_matrix_market(str(path))
    np.testing.assert_allclose(back.toarray(), a.toarray())
