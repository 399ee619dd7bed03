import numpy as np
import pytest

from lvcfact.eigen import (
    EigenResult,
    LinearOperatorHandle,
    NotConvergedError,
    degeneracy_clusters,
    fix_signs,
    solve,
    solve_dense,
    solve_lowest,
)
from lvcfact.grid import GridSpec, ProductGrid
from lvcfact.hamiltonian import (
    apply_vibronic_hamiltonian,
    rayleigh_quotient,
    single_surface_matrix,
    solve_vibronic,
    vibronic_matrix,
    vibronic_operator,
)
from lvcfact.model import BUTATRIENE, butatriene_1d

import oracles as O


def random_symmetric(n, rng):
    a = rng.standard_normal((n, n))
    return 0.5 * (a + a.T)


def test_dense_two_by_two():
    r = solve_dense(np.diag([9.45, 9.85]))
    np.testing.assert_allclose(r.values, [9.45, 9.85])


def test_dense_harmonic_oscillator():
    g = ProductGrid.from_specs(GridSpec(-9.0, 9.0, 401, O.OMEGA_X))
    q = g.axes[0].points
    r = solve_dense(single_surface_matrix(g, O.E1 + 0.5 * O.OMEGA_X * q**2), 6)
    ref = [O.oscillator_level(v, offset=O.E1) for v in range(6)]
    np.testing.assert_allclose(r.values, ref, atol=1e-8)


def test_dense_shifted_oscillator():
    g = ProductGrid.from_specs(GridSpec(-9.0, 9.0, 401, O.OMEGA_X))
    q = g.axes[0].points
    r = solve_dense(single_surface_matrix(g, O.E1 + O.KAPPA1 * q + 0.5 * O.OMEGA_X * q**2), 1)
    assert abs(r.values[0] - O.SHIFTED_GROUND_1D) < 1e-8
    assert abs(r.values[0] - 9.4916) < 1e-4


def test_dense_contracts(rng):
    A = random_symmetric(40, rng)
    r = solve_dense(A)
    assert np.all(np.diff(r.values) >= 0)
    assert np.max(np.abs(r.vectors.T @ r.vectors - np.eye(40))) < 1e-10
    assert r.residuals.max() < 1e-10
    idx = np.argmax(np.abs(r.vectors), axis=0)
    assert np.all(r.vectors[idx, np.arange(40)] > 0)


def test_dense_cutoff_and_shape_errors():
    with pytest.raises(ValueError):
        solve_dense(np.eye(5), cutoff=4)
    with pytest.raises(ValueError):
        solve_dense(np.ones((3, 4)))


def test_lanczos_matches_dense(rng):
    A = random_symmetric(300, rng)
    d = solve_dense(A, 12)
    lz = solve_lowest(LinearOperatorHandle.from_matrix(A), 12, 1e-10)
    np.testing.assert_allclose(lz.values, d.values, atol=1e-8)
    assert lz.converged and lz.residuals.max() <= 1e-10
    assert np.max(np.abs(lz.vectors.T @ lz.vectors - np.eye(12))) < 1e-8
    # same sign convention as the dense path, so vectors agree one to one
    assert np.max(np.abs(np.abs(np.sum(lz.vectors * d.vectors, axis=0)) - 1)) < 1e-8


def test_lanczos_identity_operator():
    op = LinearOperatorHandle(50, lambda x: x.copy(), "identity")
    r = solve_lowest(op, 5, 1e-10)
    np.testing.assert_allclose(r.values, 1.0, atol=1e-12)
    assert np.max(np.abs(r.vectors.T @ r.vectors - np.eye(5))) < 1e-10


def test_lanczos_resolves_degenerate_pairs(rng):
    q, _ = np.linalg.qr(rng.standard_normal((200, 200)))
    w = np.concatenate([[1.0, 1.0, 2.0, 2.0, 2.0], np.linspace(3, 10, 195)])
    A = (q * w) @ q.T
    r = solve_lowest(LinearOperatorHandle.from_matrix(A), 5, 1e-10)
    np.testing.assert_allclose(r.values, w[:5], atol=1e-9)
    assert r.clusters() == [[0, 1], [2, 3, 4]]


def test_lanczos_2d_butatriene_lowest_eight():
    g = ProductGrid.from_specs(GridSpec(-9, 9, 101, O.OMEGA_X), GridSpec(-9, 9, 101, O.OMEGA_Y))
    states, r = solve_vibronic(BUTATRIENE, g, 8)
    np.testing.assert_allclose(r.values, O.H_2D, atol=O.TOL_ENERGY)
    assert r.residuals.max() <= 1e-9
    # near-degenerate pairs both found
    assert r.values[1] - r.values[0] < 1e-4 and r.values[7] - r.values[6] < 1e-3


def test_lanczos_not_converged_reports_partial(rng):
    A = random_symmetric(400, rng)
    with pytest.raises(NotConvergedError) as err:
        solve_lowest(LinearOperatorHandle.from_matrix(A), 10, 1e-14, max_restarts=1, max_basis=30)
    res = err.value.result
    assert isinstance(res, EigenResult) and not res.converged and len(res.values) == 10
    res = solve_lowest(LinearOperatorHandle.from_matrix(A), 10, 1e-14, max_restarts=1, max_basis=30,
                       raise_on_failure=False)
    assert not res.converged


def test_lanczos_precondition():
    with pytest.raises(ValueError):
        solve_lowest(LinearOperatorHandle.from_matrix(np.eye(4)), 4)


def test_operator_symmetry_and_layout(rng):
    A = random_symmetric(30, rng)
    op = LinearOperatorHandle.from_matrix(A)
    assert op.symmetry_defect() < 1e-10
    np.testing.assert_allclose(op.to_dense(), A)
    with pytest.raises(ValueError):
        op(np.ones(29))


def test_solve_dispatch(rng):
    A = random_symmetric(60, rng)
    np.testing.assert_allclose(solve(A, 4).values, solve(A, 4, dense_cutoff=10).values, atol=1e-8)


def test_clusters_and_signs():
    assert degeneracy_clusters([1.0, 1.0 + 1e-8, 2.0, 3.0, 3.0]) == [[0, 1], [2], [3, 4]]
    assert degeneracy_clusters([]) == []
    v = fix_signs(np.array([[0.1, -0.2], [-0.9, 0.3]]))
    assert v[1, 0] > 0 and v[1, 1] > 0


def test_vibronic_operator_matches_matrix(rng):
    g = ProductGrid.from_specs(GridSpec(-3, 3, 7, O.OMEGA_X), GridSpec(-3, 3, 6, O.OMEGA_Y))
    H = vibronic_matrix(BUTATRIENE, g)
    x = rng.standard_normal((2 * g.total_size, 3))
    np.testing.assert_allclose(apply_vibronic_hamiltonian(BUTATRIENE, g, x), H @ x, atol=1e-12)
    np.testing.assert_allclose(apply_vibronic_hamiltonian(BUTATRIENE, g, x[:, 0]), H @ x[:, 0], atol=1e-12)
    assert vibronic_operator(BUTATRIENE, g).symmetry_defect() < 1e-10
    with pytest.raises(ValueError):
        apply_vibronic_hamiltonian(BUTATRIENE, g, np.ones(g.total_size))


def test_vibronic_1d_spectrum_and_rayleigh(states_1d, params_1d, grid_1d):
    states, r = states_1d
    np.testing.assert_allclose(r.values, O.H_1D, atol=O.TOL_ENERGY)
    for s in states[:3]:
        assert abs(rayleigh_quotient(params_1d, grid_1d, s.chi) - s.energy) < 1e-10


def test_uncoupled_vibronic_is_two_oscillator_ladders():
    p = butatriene_1d(0.0)
    g = ProductGrid.from_specs(GridSpec(-9, 9, 301, p.omega_x))
    _, r = solve_vibronic(p, g, 6)
    ladders = sorted(
        [O.oscillator_level(v, offset=p.e1 - p.kappa1**2 / (2 * p.omega_x)) for v in range(6)]
        + [O.oscillator_level(v, offset=p.e2 - p.kappa2**2 / (2 * p.omega_x)) for v in range(6)]
    )[:6]
    np.testing.assert_allclose(r.values, ladders, atol=1e-8)
