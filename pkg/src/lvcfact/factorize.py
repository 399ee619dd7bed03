"""
Exact single-product factorization of vibronic eigenstates.

A state (chi_1, chi_2) is written as (cos theta, sin theta) * chi_bar with
chi_bar >= 0. The factorized potential is the expectation value of
T_N + V_dia in the electronic factor:

    E_el = (omega/2) |grad theta|^2 + (chi_1^2 v11 + 2 chi_1 chi_2 v12 + chi_2^2 v22) / rho

with rho = chi_1^2 + chi_2^2 and grad theta = (chi_1 grad chi_2 - chi_2 grad chi_1) / rho.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .eigen import EigenResult, LinearOperatorHandle, fix_signs
from .grid import ProductGrid, gradient, inner_product, sine_interpolate
from .hamiltonian import (
    SINGLE_SURFACE_DENSE_CUTOFF,
    VibronicState,
    single_surface_matrix,
    solve_operator,
    vectors_to_fields,
)
from .model import ModelParams, diabatic_on_grid

AMPLITUDE_FLOOR = 1e-12
POTENTIAL_CAP = 1e6


@dataclass(frozen=True, eq=False)
class FactorizedState:
    grid: ProductGrid
    energy: float
    theta: np.ndarray  # in [0, 2 pi); NaN where undefined
    amplitude: np.ndarray  # chi_bar, unit norm, >= 0
    c1: np.ndarray
    c2: np.ndarray
    exact_potential: np.ndarray
    spike_part: np.ndarray
    potential_part: np.ndarray
    defined_mask: np.ndarray
    scale: float  # chi_i = scale * c_i * amplitude on defined points
    index: int | None = None

    def reconstruct(self) -> np.ndarray:
        """(chi_1, chi_2) rebuilt from the factors; zero on masked points."""
        amp = self.scale * self.amplitude
        return np.stack([np.where(self.defined_mask, self.c1 * amp, 0.0),
                         np.where(self.defined_mask, self.c2 * amp, 0.0)])


def theta_gradient(chi1, chi2, dchi1, dchi2, rho, mask):
    """Quotient-rule derivative of theta = atan2(chi_2, chi_1); 0 on masked points."""
    safe = np.where(mask, rho, 1.0)
    return np.where(mask, (chi1 * dchi2 - chi2 * dchi1) / safe, 0.0)


def factorize_fields(
    chi1: np.ndarray,
    chi2: np.ndarray,
    energy: float,
    params: ModelParams,
    grid: ProductGrid,
    *,
    derivatives: tuple[list[np.ndarray], list[np.ndarray]] | None = None,
    fd_order: int = 4,
    floor: float = AMPLITUDE_FLOOR,
    cap: float = POTENTIAL_CAP,
    index: int | None = None,
) -> FactorizedState:
    """
    Factorize a two-component field.

    ``derivatives`` optionally supplies ``([d chi_1/dQ_a], [d chi_2/dQ_a])``;
    otherwise finite differences of order ``fd_order`` are used.
    """
    chi1 = np.asarray(chi1, dtype=float)
    chi2 = np.asarray(chi2, dtype=float)
    rho = chi1**2 + chi2**2
    mask = rho > floor * rho.max()

    amplitude = np.where(mask, np.sqrt(rho), 0.0)
    scale = float(np.sqrt(inner_product(amplitude, amplitude, grid)))
    amplitude = amplitude / scale

    theta = np.where(mask, np.mod(np.arctan2(chi2, chi1), 2.0 * np.pi), np.nan)
    c1 = np.cos(theta)
    c2 = np.sin(theta)

    if derivatives is None:
        d1 = [gradient(chi1, grid, a, fd_order) for a in range(grid.ndim)]
        d2 = [gradient(chi2, grid, a, fd_order) for a in range(grid.ndim)]
    else:
        d1, d2 = derivatives
    spike = np.zeros(grid.shape)
    for a, omega in enumerate(params.omegas):
        spike += 0.5 * omega * theta_gradient(chi1, chi2, d1[a], d2[a], rho, mask) ** 2

    v = diabatic_on_grid(params, grid)
    safe = np.where(mask, rho, 1.0)
    pot = np.where(mask, (chi1**2 * v.v11 + 2.0 * chi1 * chi2 * v.v12 + chi2**2 * v.v22) / safe, cap)
    spike = np.where(mask, spike, 0.0)
    exact = np.minimum(pot + spike, cap)
    spike = np.where(mask, exact - pot, 0.0)
    return FactorizedState(grid, float(energy), theta, amplitude, c1, c2, exact, spike, pot, mask, scale, index)


def factorize_state(state: VibronicState, params: ModelParams, **kw) -> FactorizedState:
    """Factorize one vibronic eigenstate on its own grid."""
    return factorize_fields(state.chi1, state.chi2, state.energy, params, state.grid, index=state.index, **kw)


@dataclass(frozen=True, eq=False)
class VerificationResult:
    e0: float
    chi0: np.ndarray
    energy_gap: float  # e0 - E_n
    amplitude_overlap: float
    excitation_gap: float  # e1 - e0 of the single-surface problem
    factorized: FactorizedState  # factorization on the verification grid


def _single_surface_solve(grid, potential, active, k, dense_cutoff, tol, seed):
    """
    Lowest ``k`` pairs of T_N + potential restricted to the ``active`` points.

    Masked points act as hard walls (the infinite-cap limit), which keeps the
    operator norm at the scale of the physical potential. Vectors are
    returned on the full grid with zeros on masked points.
    """
    idx = np.flatnonzero(active.ravel())
    pot = potential.ravel()[idx]
    n = grid.total_size

    def matrix():
        return single_surface_matrix(grid, potential)[np.ix_(idx, idx)]

    def apply(x):
        full = np.zeros((n, x.shape[1]))
        full[idx] = x
        f = full.reshape(*grid.shape, -1)
        return grid.apply_kinetic(f).reshape(n, -1)[idx] + pot[:, None] * x

    op = LinearOperatorHandle(len(idx), apply, "single-surface")
    res = solve_operator(grid, k, matrix=matrix, operator=op, dense_cutoff=dense_cutoff, tol=tol, seed=seed)
    vectors = np.zeros((n, res.k))
    vectors[idx] = res.vectors
    return replace(res, vectors=vectors)


def refine_1d(fs: FactorizedState, params: ModelParams, fine: ProductGrid, **kw) -> FactorizedState:
    """
    Re-factorize a 1D state on a finer grid inside its box.

    The components are carried over by sine-series interpolation, which is
    exact for a sine-DVR representation. A narrower verification box cuts
    off only the far tails.
    """
    if fs.grid.ndim != 1 or fine.ndim != 1:
        raise ValueError("grid refinement is implemented for 1D states only")
    chi = fs.reconstruct()
    src, dst = fs.grid.axes[0], fine.axes[0]
    chi1, _ = sine_interpolate(chi[0], src, dst)
    chi2, _ = sine_interpolate(chi[1], src, dst)
    return factorize_fields(chi1, chi2, fs.energy, params, fine, index=fs.index, **kw)


def verify_single_surface(
    fs: FactorizedState,
    params: ModelParams,
    fine: ProductGrid | None = None,
    *,
    dense_cutoff: int = SINGLE_SURFACE_DENSE_CUTOFF,
    tol: float = 1e-9,
    seed: int = 0,
    **factorize_kw,
) -> VerificationResult:
    """
    Solve (T_N + E_el) chi = e chi for the ground pair and compare with the factorization.

    With ``fine`` given (1D only) the state is first refined onto that grid.
    """
    target = refine_1d(fs, params, fine, **factorize_kw) if fine is not None else fs
    grid = target.grid
    res = _single_surface_solve(grid, target.exact_potential, target.defined_mask, 2, dense_cutoff, tol, seed)
    chi0 = vectors_to_fields(res.vectors[:, :1], grid, 1)[0]
    # ground state of a local operator is nodeless; choose it positive
    if np.sum(chi0) < 0:
        chi0 = -chi0
    overlap = inner_product(chi0, target.amplitude, grid)
    return VerificationResult(
        e0=float(res.values[0]),
        chi0=chi0,
        energy_gap=float(res.values[0] - fs.energy),
        amplitude_overlap=float(overlap),
        excitation_gap=float(res.values[1] - res.values[0]),
        factorized=target,
    )


def single_surface_spectrum(
    fs: FactorizedState, k: int, *, dense_cutoff: int = SINGLE_SURFACE_DENSE_CUTOFF, tol: float = 1e-9, seed: int = 0
) -> tuple[EigenResult, np.ndarray]:
    """Lowest ``k`` eigenpairs of T_N + E_el of ``fs``; also returns the eigenfunctions as fields."""
    res = _single_surface_solve(fs.grid, fs.exact_potential, fs.defined_mask, k, dense_cutoff, tol, seed)
    return res, vectors_to_fields(res.vectors, fs.grid, 1)


def cross_section(values: np.ndarray, grid: ProductGrid, axis: int, fixed_value: float) -> tuple[np.ndarray, np.ndarray]:
    """
    1D cut through a 2D field.

    ``axis`` is the axis held fixed at the grid line nearest ``fixed_value``;
    returns ``(coordinates along the other axis, values)``.
    """
    if grid.ndim != 2:
        raise ValueError("cross sections need a 2D field")
    i = grid.nearest_index(axis, fixed_value)
    other = 1 - axis
    cut = np.take(values, i, axis=axis)
    return grid.axes[other].points.copy(), np.array(cut)


def rayleigh_energy(fs: FactorizedState) -> float:
    """<chi_bar | T_N + E_el | chi_bar> on the factorization grid."""
    amp = fs.amplitude
    h = fs.grid.apply_kinetic(amp) + fs.exact_potential * amp
    return inner_product(amp, h, fs.grid)


def clipped(values: np.ndarray, ceiling: float = 12.0) -> np.ndarray:
    """Copy of a potential clipped for plotting."""
    return np.minimum(values, ceiling)


def sign_fixed(values: np.ndarray) -> np.ndarray:
    return fix_signs(values.ravel()).reshape(values.shape)
