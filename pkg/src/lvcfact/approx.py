"""
Approximate reference Hamiltonians and eigenfunction overlap matrices.

References
----------
* diabatic with the inter-state coupling switched off,
* adiabatic: uncoupled nuclear motion on the adiabatic surfaces,
* Born-Huang: adiabatic plus the diagonal correction.

Both adiabatic surfaces are solved and their levels merged in energy order.
Adiabatic eigenfunctions are carried to the diabatic basis by the
adiabatic-to-diabatic rotation so all families can be compared there.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from .eigen import DEGENERACY_TOL, degeneracy_clusters
from .factorize import factorize_fields
from .grid import ProductGrid, normalize
from .hamiltonian import SINGLE_SURFACE_DENSE_CUTOFF, solve_vibronic, single_surface_matrix, single_surface_operator, solve_operator, vectors_to_fields
from .model import ModelParams, adiabatic_on_grid, diagonal_correction, mixing_angle_derivatives

LOWER, UPPER = 0, 1


class ReferenceKind(enum.Enum):
    DIABATIC_LAMBDA_ZERO = "lambda0"
    ADIABATIC = "adiabatic"
    BORN_HUANG = "born_huang"


@dataclass(frozen=True, eq=False)
class ReferenceProblem:
    """Potentials defining a reference Hamiltonian on a grid."""

    kind: ReferenceKind
    params: ModelParams
    grid: ProductGrid
    surfaces: tuple[np.ndarray, ...]  # one potential per adiabatic surface; empty for the diabatic kind
    mixing_angle: np.ndarray | None

    def operators(self):
        return [single_surface_operator(self.grid, v, f"{self.kind.value}[{i}]") for i, v in enumerate(self.surfaces)]


def build_reference(kind: ReferenceKind, params: ModelParams, grid: ProductGrid, *, correction_cap: float = 50.0) -> ReferenceProblem:
    """
    Set up a reference Hamiltonian.

    For the adiabatic kinds ``surfaces`` holds the lower and the upper
    potential; Born-Huang adds the same diagonal correction to both.
    """
    if kind is ReferenceKind.DIABATIC_LAMBDA_ZERO:
        return ReferenceProblem(kind, params.with_lambda(0.0), grid, (), None)
    ad = adiabatic_on_grid(params, grid)
    lower, upper = ad.lower, ad.upper
    if kind is ReferenceKind.BORN_HUANG:
        corr = diagonal_correction(params, grid, ad.mixing_angle, cap=correction_cap)
        lower, upper = lower + corr, upper + corr
    return ReferenceProblem(kind, params, grid, (lower, upper), ad.mixing_angle)


@dataclass(frozen=True, eq=False)
class ReferenceSpectrum:
    kind: ReferenceKind
    values: np.ndarray
    surface: np.ndarray  # LOWER or UPPER per level; all LOWER for the diabatic kind
    fields: np.ndarray  # (k, *shape) single-surface eigenfunctions, or (k, 2, *shape) diabatic
    diabatic: np.ndarray  # (k, 2, *shape) in the diabatic basis
    converged: bool

    @property
    def k(self) -> int:
        return len(self.values)


def _solve_surface(grid, potential, k, dense_cutoff, tol, seed, lanczos):
    res = solve_operator(
        grid, k,
        matrix=lambda: single_surface_matrix(grid, potential),
        operator=single_surface_operator(grid, potential),
        dense_cutoff=dense_cutoff, tol=tol, seed=seed, **lanczos,
    )
    return res, vectors_to_fields(res.vectors, grid, 1)


def solve_reference(
    problem: ReferenceProblem,
    k: int,
    *,
    dense_cutoff: int = SINGLE_SURFACE_DENSE_CUTOFF,
    tol: float = 1e-9,
    seed: int = 0,
    **lanczos,
) -> ReferenceSpectrum:
    """Lowest ``k`` levels of a reference Hamiltonian."""
    grid = problem.grid
    if problem.kind is ReferenceKind.DIABATIC_LAMBDA_ZERO:
        states, res = solve_vibronic(problem.params, grid, k, dense_cutoff=dense_cutoff, tol=tol, seed=seed, **lanczos)
        chi = np.array([s.chi for s in states])
        return ReferenceSpectrum(problem.kind, res.values.copy(), np.zeros(k, dtype=int), chi, chi, res.converged)

    lower_res, lower_f = _solve_surface(grid, problem.surfaces[LOWER], k, dense_cutoff, tol, seed, lanczos)
    # the upper surface usually contributes few levels; grow its count until
    # its highest computed level clears the k-th merged level
    n_up = min(k, 8, grid.total_size - 1)
    while True:
        upper_res, upper_f = _solve_surface(grid, problem.surfaces[UPPER], n_up, dense_cutoff, tol, seed, lanczos)
        merged = np.sort(np.concatenate([lower_res.values, upper_res.values]))[k - 1]
        if upper_res.values[-1] >= merged or n_up >= k:
            break
        n_up = min(k, 2 * n_up)

    values = np.concatenate([lower_res.values, upper_res.values])
    surface = np.concatenate([np.full(lower_res.k, LOWER), np.full(upper_res.k, UPPER)])
    fields = np.concatenate([lower_f, upper_f])
    order = np.argsort(values, kind="stable")[:k]
    values, surface, fields = values[order], surface[order], fields[order]
    dia = np.array([to_diabatic_components(f, problem.mixing_angle, s) for f, s in zip(fields, surface)])
    return ReferenceSpectrum(problem.kind, values, surface, fields, dia, lower_res.converged and upper_res.converged)


def to_diabatic_components(values: np.ndarray, gamma: np.ndarray, surface: int = LOWER) -> np.ndarray:
    """
    Rotate a single-surface function into the diabatic basis.

    The lower surface maps to ``(cos g, sin g) * chi`` and the upper one to
    ``(-sin g, cos g) * chi``. Points with an undefined angle get zeros.
    """
    ok = np.isfinite(gamma)
    g = np.where(ok, gamma, 0.0)
    c, s = np.cos(g), np.sin(g)
    if surface == LOWER:
        out = np.stack([c * values, s * values])
    elif surface == UPPER:
        out = np.stack([-s * values, c * values])
    else:
        raise ValueError(f"unknown surface {surface}")
    return np.where(ok, out, 0.0)


def modulus_family(fields: np.ndarray, grid: ProductGrid) -> np.ndarray:
    """Pointwise modulus of each function (two-component fields use the vector norm), renormalized."""
    fields = np.asarray(fields)
    if fields.ndim == grid.ndim + 2:
        mod = np.sqrt(np.sum(fields**2, axis=1))
    elif fields.ndim == grid.ndim + 1:
        mod = np.abs(fields)
    else:
        raise ValueError(f"fields of shape {fields.shape} do not live on grid {grid.shape}")
    return np.array([normalize(m, grid) for m in mod])


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    """
    Inner products between two eigenfunction families.

    ``entries[m, n] = <row_m | col_n>``. Clusters group near-degenerate levels
    of each family.
    """

    row_label: str
    col_label: str
    entries: np.ndarray
    row_energies: np.ndarray
    col_energies: np.ndarray
    row_clusters: list[list[int]] = field(default_factory=list)
    col_clusters: list[list[int]] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries).copy()

    def argmax_per_row(self) -> np.ndarray:
        return np.argmax(np.abs(self.entries), axis=1)

    def cluster_projection(self) -> np.ndarray:
        """
        Norm of each row vector projected onto each column cluster.

        Shape ``(rows, len(col_clusters))``. Invariant under rotations inside
        a degenerate column cluster.
        """
        return np.stack([np.sqrt(np.sum(self.entries[:, c] ** 2, axis=1)) for c in self.col_clusters], axis=1)

    def best_cluster(self) -> tuple[np.ndarray, np.ndarray]:
        """(index of the best column cluster, its projection norm) per row."""
        proj = self.cluster_projection()
        best = np.argmax(proj, axis=1)
        return best, proj[np.arange(len(best)), best]

    def on_diagonal(self) -> np.ndarray:
        """
        Per row, whether the best column cluster and the row's own cluster share an index.

        For non-degenerate levels this is ``argmax == row index``.
        """
        best, _ = self.best_cluster()
        row_of = {i: set(c) for c in self.row_clusters for i in c}
        return np.array([bool(row_of[m] & set(self.col_clusters[b])) for m, b in enumerate(best)])

    def summary(self) -> list[dict]:
        """Per-row argmax summary with cluster-level matching."""
        best, norm = self.best_cluster()
        arg = self.argmax_per_row()
        diag = self.on_diagonal()
        return [
            {
                "row": m,
                "argmax": int(arg[m]),
                "max_abs": float(abs(self.entries[m, arg[m]])),
                "best_cluster": [int(i) for i in self.col_clusters[best[m]]],
                "cluster_overlap": float(norm[m]),
                "on_diagonal": bool(diag[m]),
            }
            for m in range(self.shape[0])
        ]

    def to_csv(self) -> str:
        lines = ["m,n,value"]
        for m in range(self.shape[0]):
            for n in range(self.shape[1]):
                lines.append(f"{m},{n},{self.entries[m, n]!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "rows": {"label": self.row_label, "count": self.shape[0], "energies": self.row_energies.tolist(),
                         "clusters": self.row_clusters},
                "cols": {"label": self.col_label, "count": self.shape[1], "energies": self.col_energies.tolist(),
                         "clusters": self.col_clusters},
                "entries": self.entries.tolist(),
                "summary": self.summary(),
            },
            indent=1,
        )


def overlap_matrix(
    rows: np.ndarray,
    cols: np.ndarray,
    grid: ProductGrid,
    *,
    row_energies,
    col_energies,
    row_label: str = "a",
    col_label: str = "b",
    cluster_tol: float = DEGENERACY_TOL,
) -> OverlapMatrix:
    """
    Overlap matrix of two families in the same representation.

    Both families are stacks of fields of identical per-item shape: either
    scalar fields ``grid.shape`` or two-component fields ``(2, *grid.shape)``.
    """
    rows = np.asarray(rows, dtype=float)
    cols = np.asarray(cols, dtype=float)
    if rows.shape[1:] != cols.shape[1:]:
        raise ValueError(f"representation mismatch: {rows.shape[1:]} vs {cols.shape[1:]}")
    if rows.shape[1:] not in (grid.shape, (2, *grid.shape)):
        raise ValueError(f"fields of shape {rows.shape[1:]} do not live on grid {grid.shape}")
    entries = rows.reshape(len(rows), -1) @ cols.reshape(len(cols), -1).T * grid.cell
    row_energies = np.asarray(row_energies, dtype=float)
    col_energies = np.asarray(col_energies, dtype=float)
    return OverlapMatrix(
        row_label, col_label, entries, row_energies, col_energies,
        degeneracy_clusters(row_energies, cluster_tol), degeneracy_clusters(col_energies, cluster_tol),
    )


@dataclass(frozen=True)
class IdentityCheck:
    max_deviation: float  # closed-form angle derivatives, eV
    fd_deviation: float  # same comparison with the finite-difference correction, eV
    excluded: int  # grid points left out next to the intersection


def born_huang_identity_check(params: ModelParams, grid: ProductGrid, *, fd_cap: float = 50.0) -> IdentityCheck:
    """
    Factorized potential of the lower adiabatic state vs. the Born-Huang surface.

    The electronic coefficients (cos g, sin g) are run through the same
    factorization code as vibronic states, with closed-form derivatives,
    and compared pointwise with lower surface + sum (omega/2)(d g)^2. Points
    where the angle is undefined and their neighbours are excluded.
    """
    ad = adiabatic_on_grid(params, grid)
    gamma = ad.mixing_angle
    bad = ~np.isfinite(gamma)
    excluded = bad.copy()
    for axis in range(grid.ndim):
        excluded |= np.roll(bad, 1, axis=axis) | np.roll(bad, -1, axis=axis)
    g = np.where(bad, 0.0, gamma)
    c1, c2 = np.cos(g), np.sin(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        first, _ = mixing_angle_derivatives(params, grid.mesh)
    first = [np.where(excluded, 0.0, np.broadcast_to(d, grid.shape)) for d in first]
    d1 = [-c2 * d for d in first]
    d2 = [c1 * d for d in first]
    fs = factorize_fields(c1, c2, 0.0, params, grid, derivatives=(d1, d2), floor=0.0, cap=np.inf)

    analytic = ad.lower + sum(0.5 * w * d**2 for w, d in zip(params.omegas, first))
    fd = ad.lower + diagonal_correction(params, grid, gamma, cap=fd_cap)
    keep = ~excluded
    return IdentityCheck(
        max_deviation=float(np.max(np.abs(fs.exact_potential - analytic)[keep])),
        fd_deviation=float(np.max(np.abs(fs.exact_potential - fd)[keep])),
        excluded=int(excluded.sum()),
    )

