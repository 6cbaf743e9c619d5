import numpy as np
import pytest
import scipy.sparse as sp

import wgfem
import wgfem.spectral


def test_diagonal_matrix():
    a = sp.diags([1.0, 4.0, 2.5]).tocsr()
    report = wgfem.extreme_eigs(a)
    assert report.method == "dense"
    assert report.lam_min == pytest.approx(1.0)
    assert report.lam_max == pytest.approx(4.0)
    assert report.kappa == pytest.approx(4.0)


def test_identity_pencil(stack_type2):
    a = stack_type2.systems[0].a
    report = wgfem.extreme_eigs(a, a)
    assert report.lam_min == pytest.approx(1.0, rel=1e-10)
    assert report.lam_max == pytest.approx(1.0, rel=1e-10)
    assert report.kappa == pytest.approx(1.0, rel=1e-9)


def test_indefinite_rejected():
    a = sp.diags([-1.0, 2.0, 3.0]).tocsr()
    with pytest.raises(wgfem.InvalidInputError):
        wgfem.extreme_eigs(a)


def test_mismatched_pencil_rejected(stack_type2):
    a = stack_type2.systems[0].a
    g = stack_type2.systems[1].gram
    with pytest.raises(wgfem.InvalidInputError):
        wgfem.extreme_eigs(a, g)


def test_rayleigh_sandwich(stack_type2):
    """Random Rayleigh quotients lie inside the reported extremes."""
    system = stack_type2.systems[1]
    report = wgfem.extreme_eigs(system.a, system.gram)
    rng = np.random.default_rng(14)
    for _ in range(50):
        x = rng.standard_normal(system.a.shape[0])
        q = (x @ system.a @ x) / (x @ system.gram @ x)
        assert report.lam_min * (1 - 1e-10) <= q <= \
            report.lam_max * (1 + 1e-10)


def test_iterative_path_matches_dense(stack_type2, monkeypatch):
    """Force the Lanczos path on a small system and compare with dense."""
    system = stack_type2.systems[1]
    dense = wgfem.extreme_eigs(system.a, system.gram, seed=3)
    std_dense = wgfem.extreme_eigs(system.a, seed=3)
    assert dense.method == "dense"

    monkeypatch.setattr(wgfem.spectral, "DENSE_LIMIT", 10)
    iterative = wgfem.extreme_eigs(system.a, system.gram, seed=3)
    assert iterative.method == "iterative"
    assert iterative.lam_min == pytest.approx(dense.lam_min, rel=1e-6)
    assert iterative.lam_max == pytest.approx(dense.lam_max, rel=1e-6)

    std_iter = wgfem.extreme_eigs(system.a, seed=3)
    assert std_iter.method == "iterative"
    assert std_iter.lam_min == pytest.approx(std_dense.lam_min, rel=1e-6)
    assert std_iter.lam_max == pytest.approx(std_dense.lam_max, rel=1e-6)


def test_residual_postcondition(stack_type2):
    system = stack_type2.systems[1]
    report = wgfem.extreme_eigs(system.a, system.gram)
    assert report.residual_min <= 1e-8 * report.lam_max
    assert report.residual_max <= 1e-8 * report.lam_max


def test_condition_study_rows(hierarchy6, stack_type2):
    rows = wgfem.condition_study(hierarchy6[:3], stack_type2.systems[:3],
                                 check=False)
    assert [r["level"] for r in rows] == [0, 1, 2]
    assert rows[0]["kappa_ratio"] == 0.0
    for prev, cur in zip(rows, rows[1:]):
        assert cur["kappa_ratio"] == pytest.approx(cur["kappa"] /
                                                   prev["kappa"])
        assert cur["kappa"] > prev["kappa"]
        assert cur["h"] == 0.5 * prev["h"]
    for r in rows:
        assert r["pencil_lam_min"] > 0
        assert set(wgfem.spectral.CONDITION_COLS) <= set(r)


def test_condition_study_flags_drift(hierarchy6, stack_type2):
    """A fabricated Gram distortion on the last level trips the check."""
    systems = list(stack_type2.systems[:4])
    bad = wgfem.BlockSystem(
        a=systems[3].a, num_interior=systems[3].num_interior,
        num_face=systems[3].num_face, gram=systems[3].gram * 5.0,
        coefficient=systems[3].coefficient)
    with pytest.raises(wgfem.InternalConsistencyError):
        wgfem.condition_study(hierarchy6[:4], systems[:3] + [bad])


def test_condition_csv_deterministic(tmp_path, hierarchy6, stack_type2):
    rows = wgfem.condition_study(hierarchy6[:2], stack_type2.systems[:2],
                                 check=False)
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    wgfem.spectral.write_condition_csv(str(p1), rows)
    wgfem.spectral.write_condition_csv(str(p2), rows)
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header == ",".join(wgfem.spectral.CONDITION_COLS)
