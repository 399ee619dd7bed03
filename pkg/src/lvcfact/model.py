"""
Two-state linear vibronic coupling (LVC) model.

Energies are in eV and the normal coordinates Q_x (tuning) and Q_y
(coupling) are dimensionless.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .grid import ProductGrid, angle_gradient


class CouplingKind(enum.Enum):
    CONSTANT_LAMBDA = "constant"  # one mode, off-diagonal element = lambda
    LINEAR_IN_QY = "linear"  # two modes, off-diagonal element = lambda * Q_y


@dataclass(frozen=True)
class ModelParams:
    e1: float
    e2: float
    omega_x: float
    omega_y: float
    kappa1: float
    kappa2: float
    lam: float
    coupling: CouplingKind = CouplingKind.LINEAR_IN_QY

    def __post_init__(self):
        if self.omega_x <= 0:
            raise ValueError("omega_x must be positive")
        if self.coupling is CouplingKind.LINEAR_IN_QY and self.omega_y <= 0:
            raise ValueError("omega_y must be positive when the coupling mode is active")

    @property
    def ndim(self) -> int:
        return 2 if self.coupling is CouplingKind.LINEAR_IN_QY else 1

    @property
    def omegas(self) -> tuple[float, ...]:
        return (self.omega_x, self.omega_y)[: self.ndim]

    def with_lambda(self, lam: float) -> "ModelParams":
        return replace(self, lam=lam)


# effective two-mode butatriene model
BUTATRIENE = ModelParams(
    e1=9.45, e2=9.85, omega_x=0.2578, omega_y=0.0913,
    kappa1=-0.2121, kappa2=0.2546, lam=-0.3182,
)


def butatriene_1d(lam: float = 0.05) -> ModelParams:
    """Tuning mode only, with a constant diabatic coupling ``lam``."""
    return replace(BUTATRIENE, lam=lam, coupling=CouplingKind.CONSTANT_LAMBDA)


@dataclass(frozen=True)
class DiabaticMatrix:
    """Symmetric 2x2 diabatic potential, entries are scalars or grid-shaped arrays."""

    v11: np.ndarray
    v12: np.ndarray
    v22: np.ndarray

    def as_array(self) -> np.ndarray:
        """Stack into shape ``(2, 2, ...)``."""
        v11, v12, v22 = np.broadcast_arrays(self.v11, self.v12, self.v22)
        return np.array([[v11, v12], [v12, v22]])


def _split_point(params: ModelParams, q):
    q = [np.asarray(c, dtype=float) for c in (q if isinstance(q, (tuple, list)) else (q,))]
    qx = q[0]
    qy = q[1] if len(q) > 1 else np.zeros_like(qx)
    return qx, qy


def eval_diabatic(params: ModelParams, q) -> DiabaticMatrix:
    """
    Diabatic potential matrix at nuclear point(s) ``q``.

    ``q`` is ``Q_x`` (1D model) or a pair ``(Q_x, Q_y)``; array inputs are
    evaluated elementwise.
    """
    qx, qy = _split_point(params, q)
    v0 = 0.5 * params.omega_x * qx**2
    if params.coupling is CouplingKind.LINEAR_IN_QY:
        v0 = v0 + 0.5 * params.omega_y * qy**2
        v12 = params.lam * qy
    else:
        v12 = np.full_like(qx, params.lam)
    return DiabaticMatrix(
        v11=v0 + params.e1 + params.kappa1 * qx,
        v12=v12,
        v22=v0 + params.e2 + params.kappa2 * qx,
    )


@dataclass(frozen=True)
class AdiabaticSurfaces:
    lower: np.ndarray
    upper: np.ndarray
    mixing_angle: np.ndarray  # NaN where the two surfaces touch
    degenerate: np.ndarray  # True at exact degeneracies


def mixing_angle(v: DiabaticMatrix) -> np.ndarray:
    """
    Adiabatic-to-diabatic angle gamma in [0, pi).

    The first column (cos g, sin g) of S is the lower adiabatic state. The
    branch cut (where S flips sign) lies on v12 = 0 with v11 < v22.
    Undefined (NaN) where v11 == v22 and v12 == 0.
    """
    # + 0.0 turns -0.0 into +0.0 so points exactly on the cut land on one side
    y = -2.0 * np.asarray(v.v12, dtype=float) + 0.0
    x = np.asarray(v.v22 - v.v11, dtype=float) + 0.0
    phase = np.mod(np.arctan2(y, x), 2.0 * np.pi)
    # mod of a tiny negative angle rounds up to exactly 2 pi
    phase = np.where(phase >= 2.0 * np.pi, 0.0, phase)
    gamma = 0.5 * phase
    return np.where((x == 0.0) & (y == 0.0), np.nan, gamma)


def eval_adiabatic(params: ModelParams, q) -> AdiabaticSurfaces:
    v = eval_diabatic(params, q)
    mean = 0.5 * (v.v11 + v.v22)
    half_gap = np.hypot(0.5 * (v.v11 - v.v22), v.v12)
    gamma = mixing_angle(v)
    return AdiabaticSurfaces(
        lower=mean - half_gap,
        upper=mean + half_gap,
        mixing_angle=gamma,
        degenerate=np.isnan(gamma),
    )


def adt_matrix(gamma) -> np.ndarray:
    """S = [[cos g, -sin g], [sin g, cos g]], shape ``(2, 2, ...)``; columns are lower, upper."""
    c, s = np.cos(gamma), np.sin(gamma)
    return np.array([[c, -s], [s, c]])


def locate_conical_intersection(params: ModelParams):
    """
    Point and energy where the two adiabatic surfaces touch.

    Returns ``((Q_x, Q_y), energy)``, or ``None`` when kappa1 == kappa2
    (the diabatic surfaces are parallel in Q_x and never cross).
    """
    if params.coupling is not CouplingKind.LINEAR_IN_QY:
        raise ValueError("a conical intersection needs the Q_y coupling mode")
    dk = params.kappa2 - params.kappa1
    if dk == 0.0:
        return None
    qx = (params.e1 - params.e2) / dk
    energy = 0.5 * params.omega_x * qx**2 + params.e1 + params.kappa1 * qx
    return (qx, 0.0), energy


def mixing_angle_derivatives(params: ModelParams, q) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """
    Closed-form first and pure second derivatives of the mixing angle.

    With x = v22 - v11 and y = -2 v12 (both affine in Q), gamma = atan2(y, x)/2,
    so d gamma = (x dy - y dx) / (2 r^2) and d^2 gamma = -(x dy - y dx)(x dx + y dy) / r^4.
    """
    v = eval_diabatic(params, q)
    x = np.asarray(v.v22 - v.v11, dtype=float)
    y = -2.0 * np.asarray(v.v12, dtype=float)
    r2 = x**2 + y**2
    dx = [params.kappa2 - params.kappa1]
    dy = [0.0]
    if params.coupling is CouplingKind.LINEAR_IN_QY:
        dx.append(0.0)
        dy.append(-2.0 * params.lam)
    first, second = [], []
    with np.errstate(divide="ignore", invalid="ignore"):
        for ax_, ay_ in zip(dx, dy):
            cross = x * ay_ - y * ax_
            first.append(cross / (2.0 * r2))
            second.append(-cross * (x * ax_ + y * ay_) / r2**2)
    return first, second


def diagonal_correction(
    params: ModelParams, grid: ProductGrid, gamma: np.ndarray, cap: float = 50.0
) -> np.ndarray:
    """
    Born-Huang diagonal correction sum_a (omega_a/2)(d gamma/dQ_a)^2 on the grid.

    Derivatives are finite differences of the angle unwrapped (period pi)
    along each axis. Undefined or diverging values are capped at ``cap``.
    """
    if grid.ndim != params.ndim:
        raise ValueError(f"{params.ndim}D model on a {grid.ndim}D grid")
    corr = np.zeros(grid.shape)
    for axis, omega in enumerate(params.omegas):
        corr += 0.5 * omega * angle_gradient(gamma, grid, axis) ** 2
    return np.where(np.isfinite(corr), np.minimum(corr, cap), cap)


def diabatic_on_grid(params: ModelParams, grid: ProductGrid) -> DiabaticMatrix:
    if grid.ndim != params.ndim:
        raise ValueError(f"{params.ndim}D model on a {grid.ndim}D grid")
    return eval_diabatic(params, grid.mesh)


def adiabatic_on_grid(params: ModelParams, grid: ProductGrid) -> AdiabaticSurfaces:
    if grid.ndim != params.ndim:
        raise ValueError(f"{params.ndim}D model on a {grid.ndim}D grid")
    return eval_adiabatic(params, grid.mesh)
