"""
Grid representations of the vibronic and single-surface Hamiltonians.

Vectors handed to the eigensolvers are DVR coefficients: field values times
``sqrt(grid.cell)``. Two-component vectors stack the chi_1 block before the
chi_2 block, each block in row-major grid order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import EigenResult, LinearOperatorHandle, solve_dense, solve_lowest
from .grid import ProductGrid, inner_product
from .model import DiabaticMatrix, ModelParams, diabatic_on_grid

# Single-surface problems of the 2D grid (101 x 101) go iterative; a dense
# solve there costs minutes and close to a gigabyte. 1D grids up to 6400
# points stay dense.
SINGLE_SURFACE_DENSE_CUTOFF = 8000


@dataclass(frozen=True, eq=False)
class VibronicState:
    """One vibronic eigenpair; ``chi`` has shape ``(2, *grid.shape)`` and unit norm."""

    index: int
    energy: float
    chi: np.ndarray
    grid: ProductGrid

    @property
    def chi1(self) -> np.ndarray:
        return self.chi[0]

    @property
    def chi2(self) -> np.ndarray:
        return self.chi[1]


def _as_blocks(vec: np.ndarray, grid: ProductGrid) -> np.ndarray:
    n = grid.total_size
    if vec.shape[0] != 2 * n:
        raise ValueError(f"expected {2 * n} rows (two stacked grid blocks), got {vec.shape[0]}")
    return vec.reshape(2, *grid.shape, -1)


def apply_vibronic_hamiltonian(
    params: ModelParams, grid: ProductGrid, vec: np.ndarray, potential: DiabaticMatrix | None = None
) -> np.ndarray:
    """
    Action of the two-state Hamiltonian on stacked vectors.

    ``vec`` has shape ``(2N,)`` or ``(2N, b)``. The kinetic part is applied
    axis by axis as tensor contractions; the full matrix is never built.
    """
    single = vec.ndim == 1
    v = potential if potential is not None else diabatic_on_grid(params, grid)
    x = _as_blocks(vec[:, None] if single else vec, grid)
    out = np.empty_like(x)
    v11 = np.asarray(v.v11)[..., None]
    v12 = np.broadcast_to(v.v12, grid.shape)[..., None]
    v22 = np.asarray(v.v22)[..., None]
    out[0] = grid.apply_kinetic(x[0]) + v11 * x[0] + v12 * x[1]
    out[1] = grid.apply_kinetic(x[1]) + v12 * x[0] + v22 * x[1]
    out = out.reshape(2 * grid.total_size, -1)
    return out[:, 0] if single else out


def vibronic_operator(params: ModelParams, grid: ProductGrid, potential: DiabaticMatrix | None = None) -> LinearOperatorHandle:
    v = potential if potential is not None else diabatic_on_grid(params, grid)
    return LinearOperatorHandle(
        2 * grid.total_size,
        lambda x: apply_vibronic_hamiltonian(params, grid, x, v),
        "H",
    )


def vibronic_matrix(params: ModelParams, grid: ProductGrid, potential: DiabaticMatrix | None = None) -> np.ndarray:
    """Dense two-state Hamiltonian matrix (small grids only)."""
    v = potential if potential is not None else diabatic_on_grid(params, grid)
    T = grid.kinetic_matrix()
    n = grid.total_size
    v11, v12, v22 = (np.broadcast_to(a, grid.shape).ravel() for a in (v.v11, v.v12, v.v22))
    H = np.zeros((2 * n, 2 * n))
    H[:n, :n] = T + np.diag(v11)
    H[n:, n:] = T + np.diag(v22)
    H[:n, n:] = np.diag(v12)
    H[n:, :n] = np.diag(v12)
    return H


def single_surface_operator(grid: ProductGrid, potential: np.ndarray, label: str = "") -> LinearOperatorHandle:
    """T_N + V(Q) acting on single-component coefficient vectors."""
    pot = np.asarray(potential, dtype=float)
    if pot.shape != grid.shape:
        raise ValueError(f"potential shape {pot.shape} does not match grid {grid.shape}")

    def apply(x):
        f = x.reshape(*grid.shape, -1)
        return (grid.apply_kinetic(f) + pot[..., None] * f).reshape(grid.total_size, -1)

    return LinearOperatorHandle(grid.total_size, apply, label)


def single_surface_matrix(grid: ProductGrid, potential: np.ndarray) -> np.ndarray:
    return grid.kinetic_matrix() + np.diag(np.asarray(potential, dtype=float).ravel())


def solve_operator(
    grid: ProductGrid,
    k: int,
    *,
    matrix=None,
    operator: LinearOperatorHandle | None = None,
    dense_cutoff: int,
    tol: float,
    seed: int,
    **lanczos,
) -> EigenResult:
    """Dense path for small problems (``matrix`` callable builds the matrix), Lanczos otherwise."""
    if matrix is not None and operator.dimension <= dense_cutoff:
        return solve_dense(matrix(), k, cutoff=dense_cutoff)
    return solve_lowest(operator, k, tol, seed=seed, **lanczos)


def vectors_to_fields(vectors: np.ndarray, grid: ProductGrid, components: int) -> np.ndarray:
    """Eigenvector columns -> array of fields, shape ``(k, [2,] *grid.shape)``."""
    fields = vectors.T / np.sqrt(grid.cell)
    if components == 2:
        return fields.reshape(-1, 2, *grid.shape)
    return fields.reshape(-1, *grid.shape)


def solve_vibronic(
    params: ModelParams,
    grid: ProductGrid,
    k: int,
    *,
    dense_cutoff: int = 12000,
    tol: float = 1e-9,
    seed: int = 0,
    potential: DiabaticMatrix | None = None,
    **lanczos,
) -> tuple[list[VibronicState], EigenResult]:
    """Lowest ``k`` vibronic eigenstates of the two-state Hamiltonian."""
    op = vibronic_operator(params, grid, potential)
    res = solve_operator(
        grid, k, matrix=lambda: vibronic_matrix(params, grid, potential), operator=op,
        dense_cutoff=dense_cutoff, tol=tol, seed=seed, **lanczos,
    )
    fields = vectors_to_fields(res.vectors, grid, 2)
    states = [VibronicState(i, float(e), f, grid) for i, (e, f) in enumerate(zip(res.values, fields))]
    return states, res


def rayleigh_quotient(params: ModelParams, grid: ProductGrid, chi: np.ndarray) -> float:
    vec = chi.reshape(-1) * np.sqrt(grid.cell)
    hv = apply_vibronic_hamiltonian(params, grid, vec)
    return float(vec @ hv / (vec @ vec))


def field_norm(values: np.ndarray, grid: ProductGrid) -> float:
    return float(np.sqrt(inner_product(values, values, grid)))
