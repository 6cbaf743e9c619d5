"""Extreme eigenvalues and condition numbers, standard and generalized.

Small problems (n <= 2000) get a dense full eigendecomposition; larger
ones use Lanczos for the top of the spectrum and shift-invert iteration
(one sparse factorization at sigma = 0) for the bottom, where the
clustered small eigenvalues of the refined systems would stall a plain
Lanczos run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from .errors import InternalConsistencyError, InvalidInputError

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class SpectrumReport:
    lam_min: float
    lam_max: float
    method: str          # "dense" or "iterative"
    residual_min: float  # ||A v - lam (M) v|| / ||v|| at the bottom pair
    residual_max: float  # same at the top pair

    @property
    def kappa(self) -> float:
        return self.lam_max / self.lam_min


def _residual(a, m, lam: float, v: np.ndarray) -> float:
    r = a @ v - lam * (m @ v if m is not None else v)
    return float(np.linalg.norm(r) / np.linalg.norm(v))


def extreme_eigs(a: sp.spmatrix, m: Optional[sp.spmatrix] = None,
                 seed: int = 0) -> SpectrumReport:
    """Extremes of A x = lambda x, or of the pencil A x = lambda M x.

    Both inputs must be SPD.  The achieved eigenpair residuals are
    reported and are required to be below 1e-8 * lam_max.
    """
    a = sp.csr_matrix(a)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix is not square: {a.shape}")
    if m is not None:
        m = sp.csr_matrix(m)
        if m.shape != a.shape:
            raise InvalidInputError("pencil shapes differ")
    if n <= DENSE_LIMIT:
        ad = a.toarray()
        md = m.toarray() if m is not None else None
        try:
            w, vecs = la.eigh(ad, md)
        except la.LinAlgError as exc:
            raise InvalidInputError(f"dense eigensolve failed: {exc}") from exc
        lam_min, lam_max = float(w[0]), float(w[-1])
        v_min, v_max = vecs[:, 0], vecs[:, -1]
        method = "dense"
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(n)
        try:
            wmax, vmax = eigsh(a, k=1, M=m, which="LA", v0=v0,
                               ncv=min(n - 1, 40))
            wmin, vmin = eigsh(a, k=1, M=m, sigma=0.0, which="LM", v0=v0,
                               ncv=min(n - 1, 40))
        except (ArpackError, ArpackNoConvergence) as exc:
            raise InternalConsistencyError(
                f"Lanczos iteration failed: {exc}") from exc
        except RuntimeError as exc:
            raise InvalidInputError(
                f"sparse factorization failed (matrix not SPD?): "
                f"{exc}") from exc
        lam_min, lam_max = float(wmin[0]), float(wmax[0])
        v_min, v_max = vmin[:, 0], vmax[:, 0]
        method = "iterative"
    if lam_min <= 0:
        raise InvalidInputError(
            f"matrix (pencil) is not positive definite: "
            f"lambda_min = {lam_min:g}")
    res_min = _residual(a, m, lam_min, v_min)
    res_max = _residual(a, m, lam_max, v_max)
    if max(res_min, res_max) > 1e-8 * lam_max:
        raise InternalConsistencyError(
            f"eigenpair residual {max(res_min, res_max):.3e} above "
            f"1e-8 * lambda_max = {1e-8 * lam_max:.3e}")
    return SpectrumReport(lam_min=lam_min, lam_max=lam_max, method=method,
                          residual_min=res_min, residual_max=res_max)


def condition_study(meshes, systems, check: bool = True,
                    seed: int = 0) -> list[dict]:
    """Per-level extreme-eigenvalue table for A and the (A, Gram) pencil.

    One row per level with the condition number of A, its ratio to the
    previous level, and the pencil extremes (lam_max scaled by h^2, which
    the theory says is level-independent).  With `check`, consecutive
    levels from level 2 on must keep the pencil quantities within 10%,
    else an internal-consistency error is raised after the table is built.
    """
    rows = []
    for mesh, system in zip(meshes, systems):
        h = mesh.mesh_size()
        std = extreme_eigs(system.a, seed=seed)
        pencil = extreme_eigs(system.a, system.gram, seed=seed)
        rows.append({
            "level": mesh.level,
            "unknowns": system.num_total,
            "h": h,
            "lam_min": std.lam_min,
            "lam_max": std.lam_max,
            "kappa": std.kappa,
            "kappa_ratio": (std.kappa / rows[-1]["kappa"]) if rows else 0.0,
            "pencil_lam_min": pencil.lam_min,
            "pencil_lam_max_h2": pencil.lam_max * h * h,
        })
    if check:
        _check_bands(rows)
    return rows


def _check_bands(rows: list[dict]) -> None:
    for prev, cur in zip(rows, rows[1:]):
        if prev["level"] < 2:
            continue
        for key in ("pencil_lam_min", "pencil_lam_max_h2"):
            drift = abs(cur[key] / prev[key] - 1.0)
            if drift >= 0.10:
                raise InternalConsistencyError(
                    f"{key} drifted {drift:.1%} between levels "
                    f"{prev['level']} and {cur['level']}")


CONDITION_COLS = ("level", "unknowns", "h", "lam_min", "lam_max", "kappa",
                  "kappa_ratio", "pencil_lam_min", "pencil_lam_max_h2")


def write_condition_csv(path: str, rows: list[dict]) -> None:
    lines = [",".join(CONDITION_COLS)]
    for row in rows:
        cells = []
        for c in CONDITION_COLS:
            v = row[c]
            cells.append(repr(float(v)) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
