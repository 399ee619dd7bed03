"""
Sine-DVR axes, product grids and finite-difference helpers.

Fields live on the grid as plain function values (not DVR coefficients);
the DVR coefficient of a field is its value times ``sqrt(cell)``, where
``cell`` is the product of the axis spacings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """
    Definition of one sine-DVR axis.

    Parameters
    ----------
    q_min, q_max : float
        Box walls. The DVR points are strictly inside the box.
    n_points : int
        Number of DVR points.
    omega : float
        Vibrational quantum (eV) of the mode; sets the kinetic prefactor
        ``-(omega/2) d^2/dQ^2``.
    """

    q_min: float
    q_max: float
    n_points: int
    omega: float

    def __post_init__(self):
        if not self.q_min < self.q_max:
            raise ValueError(f"q_min ({self.q_min}) must be smaller than q_max ({self.q_max})")
        if self.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {self.n_points}")
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def length(self) -> float:
        return self.q_max - self.q_min

    @property
    def spacing(self) -> float:
        return self.length / (self.n_points + 1)

    def scaled(self, factor: float) -> "GridSpec":
        """Same spacing, extent and point count multiplied by ``factor`` (about the box centre)."""
        centre = 0.5 * (self.q_min + self.q_max)
        half = 0.5 * self.length * factor
        n = int(round((self.n_points + 1) * factor)) - 1
        return GridSpec(centre - half, centre + half, n, self.omega)


def sine_dvr_points(spec: GridSpec) -> np.ndarray:
    # symmetric construction so that a symmetric box has an exact 0.0 point
    # (odd n) and exactly mirrored points
    centre = 0.5 * (spec.q_min + spec.q_max)
    k = np.arange(1, spec.n_points + 1) - 0.5 * (spec.n_points + 1)
    return centre + spec.spacing * k


def sine_dvr_kinetic(n: int, length: float, prefactor: float) -> np.ndarray:
    """
    Analytic sine-DVR matrix of ``-prefactor * d^2/dQ^2`` on a box of given length.

    Uses the closed form of the particle-in-a-box DVR (Colbert & Miller,
    finite-interval version).
    """
    i = np.arange(1, n + 1)
    I, J = np.meshgrid(i, i, indexing="ij")
    m = n + 1
    off = I != J
    T = np.empty((n, n))
    with np.errstate(divide="ignore", invalid="ignore"):
        T[off] = (-1.0) ** (I[off] - J[off]) * (
            1.0 / np.sin(np.pi * (I[off] - J[off]) / (2 * m)) ** 2
            - 1.0 / np.sin(np.pi * (I[off] + J[off]) / (2 * m)) ** 2
        )
    T[~off] = (2 * m**2 + 1) / 3.0 - 1.0 / np.sin(np.pi * i / m) ** 2
    T *= prefactor * np.pi**2 / (2.0 * length**2)
    return T


@dataclass(frozen=True, eq=False)
class Axis:
    """One sine-DVR axis: points, quadrature weights and kinetic matrix."""

    spec: GridSpec
    points: np.ndarray
    weights: np.ndarray
    kinetic: np.ndarray

    @property
    def spacing(self) -> float:
        return self.spec.spacing

    @property
    def size(self) -> int:
        return self.spec.n_points

    @property
    def omega(self) -> float:
        return self.spec.omega

    def box_eigenvalues(self) -> np.ndarray:
        """Analytic spectrum (omega/2)(k pi/L)^2, k = 1..n, of the kinetic matrix."""
        k = np.arange(1, self.size + 1)
        return 0.5 * self.omega * (k * np.pi / self.spec.length) ** 2

    def sine_basis(self, q: np.ndarray, derivative: bool = False) -> np.ndarray:
        """
        Particle-in-a-box functions (or their first derivatives) at ``q``.

        Returns an array of shape ``(len(q), n)``.
        """
        L = self.spec.length
        k = np.arange(1, self.size + 1)
        arg = np.outer(np.asarray(q) - self.spec.q_min, k) * np.pi / L
        if derivative:
            return np.sqrt(2.0 / L) * np.cos(arg) * (k * np.pi / L)
        return np.sqrt(2.0 / L) * np.sin(arg)

    def to_box_coefficients(self, values: np.ndarray) -> np.ndarray:
        """Expansion coefficients in the box basis of a field sampled on this axis."""
        n = self.size
        k = np.arange(1, n + 1)
        U = np.sqrt(2.0 / (n + 1)) * np.sin(np.outer(k, k) * np.pi / (n + 1))
        return np.tensordot(U.T, values, axes=(1, 0)) * np.sqrt(self.spacing)


def build_axis(spec: GridSpec) -> Axis:
    points = sine_dvr_points(spec)
    weights = np.full(spec.n_points, spec.spacing)
    kinetic = sine_dvr_kinetic(spec.n_points, spec.length, 0.5 * spec.omega)
    return Axis(spec, points, weights, kinetic)


@dataclass(frozen=True, eq=False)
class ProductGrid:
    """Direct product of one or two axes; Q_x is the slow (first) index."""

    axes: tuple[Axis, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("only 1D and 2D grids are supported")

    @classmethod
    def from_specs(cls, *specs: GridSpec) -> "ProductGrid":
        return cls(tuple(build_axis(s) for s in specs))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    @property
    def total_size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell(self) -> float:
        """Quadrature weight of one grid point (uniform on a sine-DVR grid)."""
        return float(np.prod([a.spacing for a in self.axes]))

    @cached_property
    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*(a.points for a in self.axes), indexing="ij"))

    def coordinates(self) -> np.ndarray:
        """All grid points, shape ``(total_size, ndim)``, in row-major order."""
        return np.stack([m.ravel() for m in self.mesh], axis=1)

    def apply_kinetic(self, values: np.ndarray) -> np.ndarray:
        """
        Apply T_N = sum_a -(omega_a/2) d^2/dQ_a^2 to a field of shape ``shape``
        (or a stack of fields with extra trailing axes).
        """
        out = np.tensordot(self.axes[0].kinetic, values, axes=(1, 0))
        if self.ndim == 2:
            out += np.moveaxis(np.tensordot(self.axes[1].kinetic, values, axes=(1, 1)), 0, 1)
        return out

    def kinetic_matrix(self) -> np.ndarray:
        """Dense kinetic matrix over the flattened grid; only sensible for small grids."""
        if self.ndim == 1:
            return self.axes[0].kinetic.copy()
        nx, ny = self.shape
        return np.kron(self.axes[0].kinetic, np.eye(ny)) + np.kron(np.eye(nx), self.axes[1].kinetic)

    def nearest_index(self, axis: int, value: float) -> int:
        ax = self.axes[axis]
        if not ax.spec.q_min <= value <= ax.spec.q_max:
            raise ValueError(
                f"value {value} outside axis {axis} extent [{ax.spec.q_min}, {ax.spec.q_max}]"
            )
        return int(np.argmin(np.abs(ax.points - value)))


def gradient(values: np.ndarray, grid: ProductGrid, axis: int, order: int = 2) -> np.ndarray:
    """
    Finite-difference derivative of a field along one grid axis.

    Central differences in the interior, one-sided stencils of the same
    order at the edges. ``order`` is 2 or 4.
    """
    h = grid.axes[axis].spacing
    f = np.asarray(values, dtype=float)
    if order == 2:
        return np.gradient(f, h, axis=axis, edge_order=2)
    if order != 4:
        raise ValueError(f"unsupported finite-difference order {order}")
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    if n < 5:
        raise ValueError("fourth-order differences need at least 5 points")
    g = np.empty_like(f)
    g[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    # one-sided fourth-order stencils at the two points next to each wall
    g[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12.0 * h)
    g[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12.0 * h)
    g[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12.0 * h)
    g[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12.0 * h)
    return np.moveaxis(g, 0, axis)


def angle_gradient(angle: np.ndarray, grid: ProductGrid, axis: int, period: float = np.pi) -> np.ndarray:
    """
    Derivative of an angle field defined modulo ``period``.

    The field is unwrapped along ``axis`` before differencing, so branch
    jumps by multiples of ``period`` do not show up in the derivative.
    Non-finite entries (undefined angles) propagate as NaN.
    """
    a = np.asarray(angle, dtype=float)
    bad = ~np.isfinite(a)
    filled = np.where(bad, 0.0, a)
    scale = 2.0 * np.pi / period
    unwrapped = np.unwrap(filled * scale, axis=axis) / scale
    g = gradient(unwrapped, grid, axis)
    if bad.any():
        # a stencil touching an undefined point is undefined too
        touched = bad.copy()
        touched |= np.roll(bad, 1, axis=axis) | np.roll(bad, -1, axis=axis)
        g = np.where(touched, np.nan, g)
    return g


def inner_product(a: np.ndarray, b: np.ndarray, grid: ProductGrid) -> float:
    """
    Quadrature inner product of two fields.

    Single fields have shape ``grid.shape``; two-component fields have a
    leading axis of length 2 and are summed over both components.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.shape != grid.shape and a.shape != (2, *grid.shape):
        raise ValueError(f"field shape {a.shape} does not live on grid {grid.shape}")
    return float(np.sum(a * b) * grid.cell)


def normalize(values: np.ndarray, grid: ProductGrid) -> np.ndarray:
    norm = np.sqrt(inner_product(values, values, grid))
    if norm == 0.0:
        raise ValueError("cannot normalize a zero field")
    return values / norm


def sine_interpolate(values: np.ndarray, source: Axis, target: Axis) -> tuple[np.ndarray, np.ndarray]:
    """
    Evaluate a 1D field and its exact derivative on the points of another axis.

    The field is expanded in the box basis of ``source`` (exact for a
    sine-DVR representation) and the series is summed at the target points,
    which must lie inside the source box.
    """
    lo, hi = source.spec.q_min, source.spec.q_max
    if target.points[0] < lo or target.points[-1] > hi:
        raise ValueError("sine interpolation target points lie outside the source box")
    coeffs = source.to_box_coefficients(values)
    vals = source.sine_basis(target.points) @ coeffs
    ders = source.sine_basis(target.points, derivative=True) @ coeffs
    return vals, ders
