"""
Symmetric eigensolvers: dense LAPACK for small problems and a matrix-free
block Lanczos (full reorthogonalization, thick restart) for the lowest
eigenpairs of large ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

DENSE_CUTOFF = 12000
DEGENERACY_TOL = 1e-6


class NotConvergedError(RuntimeError):
    """Raised when the iterative solver runs out of iterations; carries the partial result."""

    def __init__(self, message: str, result: "EigenResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class LinearOperatorHandle:
    """A symmetric linear map given only by its action on blocks of vectors."""

    dimension: int
    apply: Callable[[np.ndarray], np.ndarray]  # (dimension, b) -> (dimension, b)
    label: str = ""

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, label: str = "") -> "LinearOperatorHandle":
        matrix = np.asarray(matrix)
        return cls(matrix.shape[0], lambda x: matrix @ x, label)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.dimension:
            raise ValueError(f"operator of dimension {self.dimension} applied to shape {x.shape}")
        if x.ndim == 1:
            return self.apply(x[:, None])[:, 0]
        return self.apply(x)

    def to_dense(self) -> np.ndarray:
        return self(np.eye(self.dimension))

    def symmetry_defect(self, n_probes: int = 3, seed: int = 0) -> float:
        """max |<x, Ay> - <Ax, y>| over random unit probe pairs."""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((self.dimension, n_probes))
        y = rng.standard_normal((self.dimension, n_probes))
        x /= np.linalg.norm(x, axis=0)
        y /= np.linalg.norm(y, axis=0)
        return float(np.max(np.abs(np.sum(x * self(y), axis=0) - np.sum(self(x) * y, axis=0))))


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray  # orthonormal columns
    residuals: np.ndarray
    converged: bool = True
    iterations: int = 0
    matvecs: int = 0
    info: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.values)

    def clusters(self, tol: float = DEGENERACY_TOL) -> list[list[int]]:
        return degeneracy_clusters(self.values, tol)


def degeneracy_clusters(values, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Group indices of sorted eigenvalues whose neighbours lie within ``tol``."""
    values = np.asarray(values)
    if len(values) == 0:
        return []
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude component is positive."""
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.ndim == 1:
        return vectors if vectors[np.argmax(np.abs(vectors))] >= 0 else -vectors
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _residual_norms(A_vecs, vecs, values):
    return np.linalg.norm(A_vecs - vecs * values, axis=0)


def solve_dense(matrix: np.ndarray, k: int | None = None, cutoff: int = DENSE_CUTOFF) -> EigenResult:
    """
    Full (or lowest-``k``) spectrum of a dense symmetric matrix.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    if n > cutoff:
        raise ValueError(f"dimension {n} exceeds the dense cutoff {cutoff}; use solve_lowest")
    sym = 0.5 * (matrix + matrix.T)
    if k is None or k >= n:
        values, vectors = np.linalg.eigh(sym)
    else:
        import scipy.linalg

        values, vectors = scipy.linalg.eigh(sym, subset_by_index=[0, k - 1])
    vectors = fix_signs(vectors)
    res = _residual_norms(sym @ vectors, vectors, values)
    return EigenResult(values, vectors, res)


def _orthonormalize_against(block, basis, rng):
    """Two-pass Gram-Schmidt of ``block`` against ``basis`` followed by QR.

    Columns that vanish (invariant subspace found) are replaced by fresh
    random directions.
    """
    for _ in range(2):
        if basis.shape[1]:
            block = block - basis @ (basis.T @ block)
    q, r = np.linalg.qr(block)
    scale = np.abs(np.diag(r))
    ref = max(np.max(np.linalg.norm(block, axis=0)), 1.0)
    weak = scale < 1e-10 * ref
    if np.any(weak):
        fresh = rng.standard_normal((block.shape[0], int(weak.sum())))
        for _ in range(2):
            fresh = fresh - basis @ (basis.T @ fresh)
            good = q[:, ~weak]
            fresh = fresh - good @ (good.T @ fresh)
        q = np.concatenate([q[:, ~weak], np.linalg.qr(fresh)[0]], axis=1)
    return q


def solve_lowest(
    op: LinearOperatorHandle,
    k: int,
    tol: float = 1e-9,
    *,
    block_size: int = 4,
    max_basis: int | None = None,
    max_restarts: int = 200,
    seed: int = 0,
    raise_on_failure: bool = True,
) -> EigenResult:
    """
    Lowest ``k`` eigenpairs of a symmetric operator by block Lanczos.

    Every new block is reorthogonalized against the whole basis (two
    passes), so no ghost copies appear and (near-)degenerate pairs up to
    the block size are resolved. When the basis is full the ``k`` plus a
    few extra lowest Ritz vectors are kept and the expansion continues
    from the residual block (thick restart).

    Parameters
    ----------
    op : LinearOperatorHandle
    k : int
        Number of eigenpairs, ``k < op.dimension``.
    tol : float
        Residual bound ||A v - theta v|| for unit v.
    block_size : int
    max_basis : int, optional
        Basis size that triggers a restart. Default ``max(2k, k + 80)``.
    max_restarts : int
    seed : int
        Seed of the random starting block.
    """
    n = op.dimension
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < dimension, got k={k}, dimension={n}")
    b = max(1, min(block_size, n - k))
    m_max = max_basis or max(2 * k, k + 80)
    m_max = min(n, max(m_max, k + 3 * b))
    m_max -= (m_max - k) % b
    keep_n = min(k + max(b, k // 4), m_max - b)

    rng = np.random.default_rng(seed)
    V = np.empty((n, m_max))
    AV = np.empty((n, m_max))
    block = _orthonormalize_against(rng.standard_normal((n, b)), V[:, :0], rng)
    j = 0
    matvecs = 0
    values = vectors = res = None

    for restart in range(max_restarts + 1):
        while j + b <= m_max:
            V[:, j : j + b] = block
            AV[:, j : j + b] = op.apply(block)
            matvecs += b
            j += b
            block = _orthonormalize_against(AV[:, j - b : j], V[:, :j], rng)

        H = V[:, :j].T @ AV[:, :j]
        H = 0.5 * (H + H.T)
        theta, s = np.linalg.eigh(H)
        keep = min(keep_n, j)
        vectors = V[:, :j] @ s[:, :keep]
        a_vectors = AV[:, :j] @ s[:, :keep]
        values = theta[:keep]
        res = _residual_norms(a_vectors, vectors, values)
        log.debug("restart %d: basis %d, max residual %.3e", restart, j, res[:k].max())
        if np.all(res[:k] <= tol):
            vec = fix_signs(vectors[:, :k])
            return EigenResult(
                values[:k].copy(), vec, res[:k].copy(), True, restart + 1, matvecs,
                {"basis": m_max, "block_size": b},
            )
        # thick restart: Ritz vectors span the kept space, the pending block
        # already holds the residual directions
        V[:, :keep] = vectors
        AV[:, :keep] = a_vectors
        j = keep
        block = _orthonormalize_against(block, V[:, :j], rng)

    result = EigenResult(
        values[:k].copy(), fix_signs(vectors[:, :k]), res[:k].copy(), False,
        max_restarts + 1, matvecs, {"basis": m_max, "block_size": b},
    )
    msg = f"Lanczos: {int(np.sum(res[:k] > tol))} of {k} pairs not converged (max residual {res[:k].max():.2e})"
    if raise_on_failure:
        raise NotConvergedError(msg, result)
    log.warning(msg)
    return result


def solve(op_or_matrix, k: int, tol: float = 1e-9, *, dense_cutoff: int = DENSE_CUTOFF, seed: int = 0, **kw) -> EigenResult:
    """Dense path when a matrix is given and small enough, Lanczos otherwise."""
    if isinstance(op_or_matrix, np.ndarray):
        if op_or_matrix.shape[0] <= dense_cutoff:
            return solve_dense(op_or_matrix, k, cutoff=dense_cutoff)
        op_or_matrix = LinearOperatorHandle.from_matrix(op_or_matrix)
    return solve_lowest(op_or_matrix, k, tol, seed=seed, **kw)
