"""Shared fixtures: the default refinement hierarchy and assembled stacks.

The expensive objects (six-level hierarchy, per-level systems) are session
scoped so the acceptance suite and the unit tests share one build.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pytest

import wgfem


@dataclass
class LevelStack:
    """Everything the solver tests need, per level of one family."""

    meshes: list
    config: object
    dofmaps: list
    systems: list
    prols: list
    coarse_mats: list
    transfers: list


def _build_stack(meshes, family: str) -> LevelStack:
    config = wgfem.SpaceConfig(family)
    dofmaps, systems, prols, coarse_mats, transfers = [], [], [], [], []
    for mesh in meshes:
        dm = wgfem.build_dofmap(mesh, config)
        system = wgfem.assemble_system(mesh, dm, config,
                                       wgfem.CoefficientField.identity(mesh))
        prol = wgfem.build_prolongation(mesh, dm, config)
        dofmaps.append(dm)
        systems.append(system)
        prols.append(prol)
        coarse_mats.append(wgfem.galerkin_coarse(system.a, prol))
        if mesh.level > 0:
            transfers.append(wgfem.build_p1_interlevel(mesh))
    return LevelStack(meshes=list(meshes), config=config, dofmaps=dofmaps,
                      systems=systems, prols=prols, coarse_mats=coarse_mats,
                      transfers=transfers)


@pytest.fixture(scope="session")
def hierarchy6():
    """criss-cross n=2 refined five times (the default study hierarchy)."""
    return wgfem.build_hierarchy("criss-cross", 2, 5)


@pytest.fixture(scope="session")
def stack_type2(hierarchy6) -> LevelStack:
    return _build_stack(hierarchy6, "type2")


@pytest.fixture(scope="session")
def stack_type1_small(hierarchy6) -> LevelStack:
    """Levels 0-3 only; enough for the identity suites."""
    return _build_stack(hierarchy6[:4], "type1")


@pytest.fixture()
def two_triangle():
    return wgfem.build_initial_mesh("two-triangle")


@pytest.fixture()
def crisscross1():
    return wgfem.build_initial_mesh("criss-cross", 1)


@pytest.fixture()
def reference_triangle():
    """Single-cell mesh: the unit right triangle."""
    from wgfem.mesh import _finish_mesh
    return _finish_mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                        np.array([[0, 1, 2]]))


@pytest.fixture(scope="session")
def shared_tmp(tmp_path_factory):
    return tmp_path_factory.mktemp("wgfem")
