import numpy as np
import pytest
import scipy.linalg as la

import wgfem
from wgfem.weakgrad import (boundary_mass_matrix, local_equivalence_forms,
                            local_stiffness, seminorm_matrix, w_basis_values,
                            w_mass_matrix)


T2 = wgfem.SpaceConfig("type2")
T1 = wgfem.SpaceConfig("type1")


def _gradient_field(mesh, cell, config, v, mu, points):
    """Evaluate the weak-gradient field at physical points."""
    lwg = wgfem.local_weak_gradient(mesh, cell, config)
    coeff = lwg.g_interior[:, 0] * float(v) + lwg.g_boundary @ mu
    geom = wgfem.cell_geometry(mesh, cell)
    vals = w_basis_values(config, geom, points)
    return np.einsum("i,ipc->pc", coeff, vals)


def test_constant_pairs_annihilate(hierarchy6):
    """The weak gradient of (c, c) vanishes on every cell."""
    rng = np.random.default_rng(7)
    mesh = hierarchy6[3]
    for config in (T1, T2):
        cells = rng.integers(0, mesh.num_cells, size=12)
        for cell in cells:
            c = float(rng.uniform(-10, 10))
            mu = np.full(3 * config.dim_face, c)
            n = wgfem.local_norms(mesh, int(cell), config, c, mu)
            assert n.weak_gradient_l2 <= 1e-13
            assert n.mu_seminorm <= 1e-13


def test_edge_indicator_weak_gradient(reference_triangle):
    """mu = indicator of the bottom edge, v = 0, on the unit right triangle.

    The type2 weak gradient is the field (0, -6 + 12 y): checked pointwise
    and through its exact squared norm 6.
    """
    mu = np.zeros(6)
    mu[0:2] = 1.0          # both nodal dofs of local edge (v0, v1)
    pts = np.array([[0.2, 0.1], [0.1, 0.6], [0.3, 0.3], [1 / 3, 1 / 3]])
    field = _gradient_field(reference_triangle, 0, T2, 0.0, mu, pts)
    expected = np.column_stack([np.zeros(4), -6.0 + 12.0 * pts[:, 1]])
    np.testing.assert_allclose(field, expected, atol=1e-12)
    n = wgfem.local_norms(reference_triangle, 0, T2, 0.0, mu)
    assert n.weak_gradient_l2**2 == pytest.approx(6.0, rel=1e-13)


def test_shift_invariance(hierarchy6):
    """Shifting (v, mu) by a constant pair leaves the weak gradient alone."""
    rng = np.random.default_rng(3)
    mesh = hierarchy6[1]
    for config in (T1, T2):
        lwg = wgfem.local_weak_gradient(mesh, 5, config)
        v = rng.standard_normal()
        mu = rng.standard_normal(3 * config.dim_face)
        g0 = lwg.g_interior[:, 0] * v + lwg.g_boundary @ mu
        g1 = lwg.g_interior[:, 0] * (v - 4.2) + lwg.g_boundary @ (mu - 4.2)
        np.testing.assert_allclose(g0, g1, atol=1e-11 * max(1, abs(v)))


@pytest.mark.parametrize("config", [T1, T2], ids=["type1", "type2"])
def test_linear_exactness(config, hierarchy6):
    """For traces of an affine function the weak gradient is its gradient."""
    mesh = hierarchy6[1]
    grad = np.array([2.0, -3.0])

    def f(p):
        return grad @ p + 1.0

    for cell in (0, 7, 19):
        geom = wgfem.cell_geometry(mesh, cell)
        v = f(geom.centroid)       # cell average of an affine function
        mu = []
        for l in range(3):
            edge = mesh.cell_edges[cell, l]
            a, b = mesh.vertices[mesh.edges[edge]]
            if config.dim_face == 1:
                mu.append(0.5 * (f(a) + f(b)))   # edge mean
            else:
                mu.extend([f(a), f(b)])          # endpoint values
        mu = np.array(mu)
        pts = geom.centroid[None, :] + np.array([[0.0, 0.0], [0.01, -0.02]])
        field = _gradient_field(mesh, cell, config, v, mu, pts)
        np.testing.assert_allclose(field, np.broadcast_to(grad, field.shape),
                                   atol=1e-12)


def test_cell_mean_examples(reference_triangle):
    # a constant trace has itself as mean
    assert wgfem.cell_mean(reference_triangle, 0, T1,
                           np.array([5.0, 5.0, 5.0])) == pytest.approx(5.0)
    # edge means 1, 2, 3 average to 2
    mu = np.array([1.0, 1.0, 2.0, 2.0, 3.0, 3.0])
    assert wgfem.cell_mean(reference_triangle, 0, T2, mu) == pytest.approx(2.0)
    # trace of x on the unit right triangle: edge means 1/2, 1/2, 0
    mu_x = np.array([0.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    assert wgfem.cell_mean(reference_triangle, 0, T2, mu_x) == \
        pytest.approx(1 / 3, rel=1e-14)


def test_local_norms_reference(reference_triangle):
    n = wgfem.local_norms(reference_triangle, 0, T2, 0.0, np.ones(6))
    # h = sqrt(2), perimeter = 2 + sqrt(2)
    expected = np.sqrt(np.sqrt(2.0) * (2.0 + np.sqrt(2.0)))
    assert n.mu_scaled == pytest.approx(expected, rel=1e-14)
    assert n.mu_seminorm <= 1e-14
    assert n.v_l2 == 0.0
    zero = wgfem.local_norms(reference_triangle, 0, T2, 0.0, np.zeros(6))
    assert (zero.mu_scaled, zero.mu_seminorm, zero.v_l2,
            zero.weak_gradient_l2) == (0.0, 0.0, 0.0, 0.0)
    vonly = wgfem.local_norms(reference_triangle, 0, T2, 3.0, np.zeros(6))
    assert vonly.v_l2 == pytest.approx(3.0 * np.sqrt(0.5), rel=1e-14)


def test_norms_match_quadrature(hierarchy6):
    """Matrix-based norms agree with direct quadrature of the fields."""
    rng = np.random.default_rng(11)
    mesh = hierarchy6[1]
    for config in (T1, T2):
        for cell in (2, 13):
            geom = wgfem.cell_geometry(mesh, cell)
            v = rng.standard_normal()
            mu = rng.standard_normal(3 * config.dim_face)
            n = wgfem.local_norms(mesh, cell, config, v, mu)

            rule = wgfem.triangle_rule(2)
            a, b = geom.amap
            pts = rule.points @ a.T + b
            w = rule.weights * 2.0 * geom.area
            field = _gradient_field(mesh, cell, config, v, mu, pts)
            direct = np.sum(w * np.sum(field**2, axis=1))
            assert n.weak_gradient_l2**2 == pytest.approx(direct, rel=1e-12)

            mb = boundary_mass_matrix(mesh, cell, config)
            assert n.mu_scaled**2 == pytest.approx(geom.h * mu @ mb @ mu,
                                                   rel=1e-12)


def test_boundary_mass_constant(reference_triangle):
    mb = boundary_mass_matrix(reference_triangle, 0, T2)
    ones = np.ones(6)
    assert ones @ mb @ ones == pytest.approx(2.0 + np.sqrt(2.0), rel=1e-14)
    mb1 = boundary_mass_matrix(reference_triangle, 0, T1)
    np.testing.assert_allclose(np.diag(mb1), [1.0, np.sqrt(2.0), 1.0],
                               rtol=1e-14)


def test_seminorm_kernel(reference_triangle):
    s = seminorm_matrix(reference_triangle, 0, T2)
    np.testing.assert_allclose(s @ np.ones(6), 0.0, atol=1e-14)
    w = la.eigvalsh(s)
    assert w.min() >= -1e-14


def test_scaling_bands(hierarchy6):
    """Scale-invariant ratios of the local quantities stay in a tight band
    across refinement levels (the cells are geometrically similar)."""
    rng = np.random.default_rng(5)
    for config in (T1, T2):
        v = rng.standard_normal()
        mu = rng.standard_normal(3 * config.dim_face)
        ratios_b, ratios_i = [], []
        cell = 0
        for mesh in hierarchy6[:5]:
            geom = wgfem.cell_geometry(mesh, cell)
            n = wgfem.local_norms(mesh, cell, config, v, mu)
            ratios_b.append(n.weak_gradient_l2 * geom.h / max(n.mu_scaled,
                                                              1e-300))
            ratios_i.append(n.weak_gradient_l2 * geom.h /
                            max(abs(v) * np.sqrt(geom.area), 1e-300))
            cell = 4 * cell     # corner child keeps the parent's shape
        for seq in (ratios_b, ratios_i):
            seq = np.array(seq)
            assert seq.max() / seq.min() < 1.05


def test_local_stiffness_symmetry(hierarchy6):
    mesh = hierarchy6[0]
    for config in (T1, T2):
        k = local_stiffness(mesh, 3, config)
        np.testing.assert_allclose(k, k.T, atol=1e-14 * np.abs(k).max())
        w = la.eigvalsh(k)
        assert w.min() >= -1e-12 * w.max()


def test_w_mass_weighted(reference_triangle):
    """Anisotropic weighting enters the W-space Gram matrix linearly."""
    geom = wgfem.cell_geometry(reference_triangle, 0)
    m_id = w_mass_matrix(T2, geom)
    a = np.array([[3.0, 0.0], [0.0, 0.5]])
    m_a = w_mass_matrix(T2, geom, a)
    # the (x-block, y-block) structure scales by 3 and 1/2 respectively
    np.testing.assert_allclose(m_a[:3, :3], 3.0 * m_id[:3, :3], rtol=1e-14)
    np.testing.assert_allclose(m_a[3:, 3:], 0.5 * m_id[3:, 3:], rtol=1e-14)


def test_equivalence_forms_share_kernel(hierarchy6):
    mesh = hierarchy6[1]
    for config in (T1, T2):
        q1, q2 = local_equivalence_forms(mesh, 9, config)
        ones = np.ones(q1.shape[0])
        np.testing.assert_allclose(q1 @ ones, 0.0, atol=1e-12)
        np.testing.assert_allclose(q2 @ ones, 0.0, atol=1e-12)
        # deflate the shared kernel; the reduced pencil is positive definite
        basis = la.null_space(ones[None, :])
        r1 = basis.T @ q1 @ basis
        r2 = basis.T @ q2 @ basis
        w = la.eigvalsh(r1, r2)
        assert w.min() > 0


def test_equivalence_band_constant_on_similar_cells(hierarchy6):
    """Similar cells produce identical generalized eigenvalue intervals."""
    lo, hi = [], []
    for mesh in hierarchy6[1:4]:
        q1, q2 = local_equivalence_forms(mesh, 0, T2)
        basis = la.null_space(np.ones((1, q1.shape[0])))
        w = la.eigvalsh(basis.T @ q1 @ basis, basis.T @ q2 @ basis)
        lo.append(w.min())
        hi.append(w.max())
    np.testing.assert_allclose(lo, lo[0], rtol=1e-9)
    np.testing.assert_allclose(hi, hi[0], rtol=1e-9)
