"""Command-line front end.

Subcommands
-----------
mesh-info      sizes and mesh widths of the refinement hierarchy
condition      extreme-eigenvalue / condition-number study per level
two-level      stationary iteration with the exact coarse solve
multi-level    stationary iteration with the V-cycle coarse solve
verify         exact-identity and equivalence property suites
export-matrix  write the assembled system in MatrixMarket format

Exit codes: 0 on success, 1 when a numerical assertion fails, 2 on usage
errors.  Configuration may come from flags or a key=value file
(--config); flags win.  Identical configurations and seeds produce
byte-identical CSV output.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import coarse as coarse_mod
from .assemble import (assemble_hybrid, assemble_system, schur_check,
                       write_matrix_market)
from .errors import WgfemError
from .fespace import SpaceConfig, build_dofmap
from .mesh import CoefficientField, build_hierarchy
from .solve import (CoarseSolver, CoarseSolverSpec, PreparedSmoother,
                    SmootherSpec, TwoLevelPreconditioner,
                    estimate_contraction, stationary_solve, write_report_csv)
from .spectral import condition_study, write_condition_csv
from .weakgrad import local_norms

COMMANDS = ("mesh-info", "condition", "two-level", "multi-level", "verify",
            "export-matrix")


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; defaults reproduce the reference
    experiment setup (type2 family, identity coefficient, b = 0 with
    all-ones start, 1e-8 energy reduction)."""

    pattern: str = "criss-cross"
    n: int = 2
    levels: int = 5
    family: str = "type2"
    m: int = 1
    smoother: str = "sgs"
    coarse: str = "exact"
    tol: float = 1e-8
    seed: int = 0
    out: str | None = None


_FAMILY_BY_DEGREE = {0: "type1", 1: "type2"}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgfem", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--pattern", choices=("two-triangle", "criss-cross"))
        p.add_argument("--n", type=int)
        p.add_argument("--levels", type=int)
        p.add_argument("--family", choices=("type1", "type2"))
        p.add_argument("--degree", type=int, choices=(0, 1))
        p.add_argument("--m", type=int)
        p.add_argument("--smoother", choices=("sgs", "richardson"))
        p.add_argument("--coarse", choices=("exact", "vcycle"))
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--config")
    return parser


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    file_values = _read_config_file(args.config) if args.config else {}
    casts = {f.name: f.type for f in fields(RunConfig)}
    updates = {}
    for key, raw in file_values.items():
        if key == "degree":
            updates["family"] = _FAMILY_BY_DEGREE[int(raw)]
            continue
        if key not in casts:
            raise ValueError(f"unknown config key {key!r}")
        cast = {"n": int, "levels": int, "m": int, "seed": int,
                "tol": float}.get(key, str)
        updates[key] = cast(raw)
    for key in ("pattern", "n", "levels", "family", "m", "smoother",
                "coarse", "tol", "seed", "out"):
        val = getattr(args, key)
        if val is not None:
            updates[key] = val
    if args.degree is not None:
        implied = _FAMILY_BY_DEGREE[args.degree]
        if args.family is not None and args.family != implied:
            raise ValueError(
                f"--degree {args.degree} conflicts with --family "
                f"{args.family}")
        updates["family"] = implied
    cfg = replace(cfg, **updates)
    if cfg.n < 1 or cfg.levels < 0 or cfg.m < 1 or cfg.tol <= 0:
        raise ValueError("n >= 1, levels >= 0, m >= 1, tol > 0 required")
    return cfg


def _check_thread_cap() -> int | None:
    raw = os.environ.get("WG_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"WG_THREADS must be a positive integer, "
                         f"got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"WG_THREADS must be a positive integer, got {cap}")
    # all element loops here are single-threaded; the cap is forwarded to
    # the numeric libraries' pools
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(cap))
    return cap


def _print_table(rows: list[dict], cols: tuple[str, ...]) -> None:
    cells = [[str(c) for c in cols]]
    for row in rows:
        cells.append([
            f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c])
            for c in cols])
    widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
    for r in cells:
        print("  ".join(s.rjust(w) for s, w in zip(r, widths)))


def _hierarchy_and_systems(cfg: RunConfig):
    meshes = build_hierarchy(cfg.pattern, cfg.n, cfg.levels)
    config = SpaceConfig(cfg.family)
    systems = []
    for mesh in meshes:
        dofmap = build_dofmap(mesh, config)
        systems.append(assemble_system(mesh, dofmap, config,
                                       CoefficientField.identity(mesh)))
    return meshes, config, systems


def _cmd_mesh_info(cfg: RunConfig) -> int:
    meshes = build_hierarchy(cfg.pattern, cfg.n, cfg.levels)
    config = SpaceConfig(cfg.family)
    rows = []
    for mesh in meshes:
        dofmap = build_dofmap(mesh, config)
        rows.append({
            "level": mesh.level,
            "vertices": mesh.num_vertices,
            "edges": mesh.num_edges,
            "cells": mesh.num_cells,
            "boundary_edges": int(mesh.edge_is_boundary.sum()),
            "h": mesh.mesh_size(),
            "unknowns": dofmap.num_total,
        })
    cols = ("level", "vertices", "edges", "cells", "boundary_edges", "h",
            "unknowns")
    if cfg.out:
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(
                repr(float(row[c])) if isinstance(row[c], float)
                else str(row[c]) for c in cols))
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        _print_table(rows, cols)
    return 0


def _cmd_condition(cfg: RunConfig) -> int:
    from .errors import InternalConsistencyError
    meshes, _, systems = _hierarchy_and_systems(cfg)
    code = 0
    try:
        rows = condition_study(meshes, systems, check=True, seed=cfg.seed)
    except InternalConsistencyError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        rows = condition_study(meshes, systems, check=False, seed=cfg.seed)
        code = 1
    if cfg.out:
        write_condition_csv(cfg.out, rows)
    else:
        from .spectral import CONDITION_COLS
        _print_table(rows, CONDITION_COLS)
    return code


def _solver_rows(cfg: RunConfig) -> list[dict]:
    meshes, config, systems = _hierarchy_and_systems(cfg)
    rows = []
    hierarchy, transfers = [], []
    for mesh, system in zip(meshes, systems):
        dofmap = build_dofmap(mesh, config)
        prol = coarse_mod.build_prolongation(mesh, dofmap, config)
        a_coarse = coarse_mod.galerkin_coarse(system.a, prol)
        hierarchy.append(a_coarse)
        if mesh.level > 0:
            transfers.append(coarse_mod.build_p1_interlevel(mesh))
        cspec = CoarseSolverSpec(kind=cfg.coarse, sweeps=cfg.m)
        if cfg.coarse == "exact":
            solver = CoarseSolver(cspec, a_coarse)
        else:
            solver = CoarseSolver(cspec, a_coarse, list(hierarchy),
                                  list(transfers))
        smoother = PreparedSmoother(
            SmootherSpec(kind=cfg.smoother, sweeps=cfg.m, seed=cfg.seed),
            system.a)
        precond = TwoLevelPreconditioner(system.a, prol.matrix, solver,
                                         smoother)
        x0 = np.ones(system.num_total)
        _, report = stationary_solve(system.a, np.zeros(system.num_total),
                                     precond, x0, tol=cfg.tol)
        rho = estimate_contraction(system.a, precond, probes=2, iters=100,
                                   tol=1e-8, seed=cfg.seed)
        rows.append({
            "level": mesh.level,
            "m": cfg.m,
            "smoother": cfg.smoother,
            "coarse": cfg.coarse,
            "iterations": report.iterations,
            "avg_rate": report.avg_rate,
            "rho_hat": rho,
        })
    return rows


def _cmd_two_level(cfg: RunConfig) -> int:
    if cfg.coarse != "exact":
        cfg = replace(cfg, coarse="exact")
    return _emit_solver_rows(cfg)


def _cmd_multi_level(cfg: RunConfig) -> int:
    if cfg.coarse != "vcycle":
        cfg = replace(cfg, coarse="vcycle")
    return _emit_solver_rows(cfg)


def _emit_solver_rows(cfg: RunConfig) -> int:
    rows = _solver_rows(cfg)
    if cfg.out:
        write_report_csv(cfg.out, rows)
    else:
        _print_table(rows, ("level", "m", "smoother", "coarse", "iterations",
                            "avg_rate", "rho_hat"))
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    meshes = build_hierarchy(cfg.pattern, cfg.n, min(cfg.levels, 3))
    rng = np.random.default_rng(cfg.seed)
    failures = 0

    def report(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
        if not ok:
            failures += 1

    for family in ("type1", "type2"):
        config = SpaceConfig(family)
        for mesh in meshes:
            dofmap = build_dofmap(mesh, config)
            for label, coeff in (
                    ("a=I", CoefficientField.identity(mesh)),
                    ("a=aniso", CoefficientField.constant(mesh, 3.0, 0.5,
                                                          1.5))):
                system = assemble_system(mesh, dofmap, config, coeff)
                prol = coarse_mod.build_prolongation(mesh, dofmap, config)
                pap = coarse_mod.galerkin_coarse(system.a, prol)
                direct = coarse_mod.assemble_p1_stiffness(mesh, coeff)
                diff = pap - direct
                err = np.abs(diff.data).max() if diff.nnz else 0.0
                scale = np.abs(direct.data).max()
                report(f"galerkin-coarse {family} L{mesh.level} {label}",
                       err <= 1e-12 * scale, f"maxerr={err:.3e}")
            coeff = CoefficientField.identity(mesh)
            system = assemble_system(mesh, dofmap, config, coeff)
            hybrid = assemble_hybrid(mesh, dofmap, config, coeff)
            dev = schur_check(hybrid, system)
            scale = np.abs(system.a.data).max()
            report(f"hybrid-schur {family} L{mesh.level}",
                   dev <= 1e-12 * scale, f"maxdev={dev:.3e}")
        mesh = meshes[-1]
        worst = 0.0
        for _ in range(25):
            cell = int(rng.integers(mesh.num_cells))
            c = float(rng.uniform(-10, 10))
            norms = local_norms(mesh, cell, config, c,
                                np.full(3 * config.dim_face, c))
            worst = max(worst, norms.weak_gradient_l2)
        report(f"constant-annihilation {family}", worst <= 1e-13,
               f"max|grad_w(c,c)|={worst:.3e}")
    return 1 if failures else 0


def _cmd_export_matrix(cfg: RunConfig) -> int:
    if not cfg.out:
        raise ValueError("export-matrix requires --out")
    meshes = build_hierarchy(cfg.pattern, cfg.n, cfg.levels)
    config = SpaceConfig(cfg.family)
    mesh = meshes[-1]
    dofmap = build_dofmap(mesh, config)
    system = assemble_system(mesh, dofmap, config,
                             CoefficientField.identity(mesh))
    write_matrix_market(cfg.out, system.a)
    print(f"wrote {system.num_total}x{system.num_total} matrix to {cfg.out}")
    return 0


_HANDLERS = {
    "mesh-info": _cmd_mesh_info,
    "condition": _cmd_condition,
    "two-level": _cmd_two_level,
    "multi-level": _cmd_multi_level,
    "verify": _cmd_verify,
    "export-matrix": _cmd_export_matrix,
}


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        _check_thread_cap()
        cfg = _merge_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WgfemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
