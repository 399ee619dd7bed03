import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lvcfact.grid import GridSpec, ProductGrid
from lvcfact.model import (
    BUTATRIENE,
    CouplingKind,
    DiabaticMatrix,
    ModelParams,
    adiabatic_on_grid,
    adt_matrix,
    butatriene_1d,
    diagonal_correction,
    eval_adiabatic,
    eval_diabatic,
    locate_conical_intersection,
    mixing_angle,
    mixing_angle_derivatives,
)

import oracles as O

coords = st.floats(-8, 8, allow_nan=False)


def test_parameters_match_oracles():
    p = BUTATRIENE
    assert (p.e1, p.e2, p.omega_x, p.omega_y) == (O.E1, O.E2, O.OMEGA_X, O.OMEGA_Y)
    assert (p.kappa1, p.kappa2, p.lam) == (O.KAPPA1, O.KAPPA2, O.LAMBDA_2D)


def test_invalid_frequencies():
    with pytest.raises(ValueError):
        dataclasses.replace(BUTATRIENE, omega_x=0.0)
    with pytest.raises(ValueError):
        dataclasses.replace(BUTATRIENE, omega_y=-1.0)
    # the coupling-mode frequency is irrelevant in the one-mode model
    dataclasses.replace(butatriene_1d(), omega_y=0.0)


def test_diabatic_at_origin():
    v = eval_diabatic(BUTATRIENE, (0.0, 0.0))
    assert (float(v.v11), float(v.v22), float(v.v12)) == (9.45, 9.85, 0.0)


def test_diabatic_at_crossing():
    v = eval_diabatic(BUTATRIENE, (-0.8571, 0.0))
    assert abs(v.v11 - 9.7265) < 1e-3 and abs(v.v22 - 9.7265) < 1e-3 and v.v12 == 0.0


def test_constant_coupling():
    v = eval_diabatic(butatriene_1d(), 2.0)
    assert float(v.v12) == 0.05
    v = eval_diabatic(butatriene_1d(), np.linspace(-3, 3, 7))
    assert np.all(v.v12 == 0.05)


def test_adiabatic_at_intersection():
    q, e = locate_conical_intersection(BUTATRIENE)
    ad = eval_adiabatic(BUTATRIENE, q)
    assert abs(ad.lower - ad.upper) < 1e-12 and abs(ad.lower - 9.7265) < 1e-3
    assert bool(ad.degenerate) and np.isnan(ad.mixing_angle)


def test_diagonal_matrix_gives_zero_angle():
    v = DiabaticMatrix(np.array(1.0), np.array(0.0), np.array(2.0))
    assert mixing_angle(v) == 0.0


def test_adiabatic_against_dense_diagonalization():
    ad = eval_adiabatic(BUTATRIENE, (0.0, 1.0))
    v = eval_diabatic(BUTATRIENE, (0.0, 1.0))
    w = np.linalg.eigvalsh(v.as_array())
    assert abs(ad.lower - w[0]) < 1e-12 and abs(ad.upper - w[1]) < 1e-12


def test_intersection_location():
    q, e = locate_conical_intersection(BUTATRIENE)
    assert abs(q[0] - O.CI_Q[0]) < 1e-3 and q[1] == 0.0
    assert abs(e - O.CI_ENERGY) < 1e-3
    v = eval_diabatic(BUTATRIENE, q)
    assert abs(v.v11 - v.v22) < 1e-12 and v.v12 == 0.0


def test_intersection_symmetric_case():
    p = dataclasses.replace(BUTATRIENE, e2=BUTATRIENE.e1)
    q, e = locate_conical_intersection(p)
    assert q[0] == 0.0 and e == p.e1


def test_intersection_sign_flip():
    p = BUTATRIENE
    flipped = dataclasses.replace(p, kappa1=p.kappa2, kappa2=p.kappa1)
    assert locate_conical_intersection(flipped)[0][0] == pytest.approx(-locate_conical_intersection(p)[0][0])


def test_intersection_absent_or_invalid():
    assert locate_conical_intersection(dataclasses.replace(BUTATRIENE, kappa2=BUTATRIENE.kappa1)) is None
    with pytest.raises(ValueError):
        locate_conical_intersection(butatriene_1d())


@settings(max_examples=200, deadline=None)
@given(coords, coords)
def test_adiabatic_invariants(qx, qy):
    v = eval_diabatic(BUTATRIENE, (qx, qy))
    ad = eval_adiabatic(BUTATRIENE, (qx, qy))
    assert ad.lower <= ad.upper
    assert abs(ad.lower + ad.upper - v.v11 - v.v22) < 1e-10
    assert abs(ad.lower * ad.upper - (v.v11 * v.v22 - v.v12**2)) < 1e-9
    if not ad.degenerate:
        S = adt_matrix(ad.mixing_angle)
        assert np.max(np.abs(S.T @ S - np.eye(2))) < 1e-12
        D = S.T @ v.as_array() @ S
        assert np.max(np.abs(D - np.diag([ad.lower, ad.upper]))) < 1e-10
        assert 0.0 <= ad.mixing_angle < np.pi


def test_angle_continuous_away_from_cut():
    # the angle only jumps on the half line q_y = 0, v11 < v22
    qy = np.linspace(-3, 3, 601)
    for qx in (-3.0, -2.0):  # path crossing q_y = 0 where v11 > v22
        g = eval_adiabatic(BUTATRIENE, (np.full_like(qy, qx), qy)).mixing_angle
        assert np.max(np.abs(np.diff(g))) < 0.05


def test_angle_derivatives_match_finite_differences():
    h = 1e-5
    for q in [(0.3, 0.7), (-2.0, -1.5), (1.5, 2.0)]:
        first, second = mixing_angle_derivatives(BUTATRIENE, q)
        for a in range(2):
            e = np.zeros(2)
            e[a] = h
            gp = eval_adiabatic(BUTATRIENE, tuple(np.add(q, e))).mixing_angle
            g0 = eval_adiabatic(BUTATRIENE, q).mixing_angle
            gm = eval_adiabatic(BUTATRIENE, tuple(np.subtract(q, e))).mixing_angle
            assert abs((gp - gm) / (2 * h) - first[a]) < 1e-7
            assert abs((gp - 2 * g0 + gm) / h**2 - second[a]) < 1e-3


def test_diagonal_correction_zero_without_coupling():
    p = BUTATRIENE.with_lambda(0.0)
    g = ProductGrid.from_specs(GridSpec(-5, 5, 31, p.omega_x), GridSpec(-5, 5, 31, p.omega_y))
    ad = adiabatic_on_grid(p, g)
    # with no coupling the angle is 0 or pi/2 (undefined on the crossing seam)
    corr = diagonal_correction(p, g, np.where(np.isnan(ad.mixing_angle), 0.0, ad.mixing_angle))
    q = g.mesh[0]
    assert np.all(corr[np.abs(q + 0.8571) > 1.0] == 0.0)


def test_diagonal_correction_decays_far_from_crossing():
    p = butatriene_1d()
    g = ProductGrid.from_specs(GridSpec(-9, 9, 401, p.omega_x))
    ad = adiabatic_on_grid(p, g)
    corr = diagonal_correction(p, g, ad.mixing_angle)
    q = g.axes[0].points
    assert np.all(corr >= 0)
    assert corr[np.abs(q) > 7].max() < 1e-4
    assert corr.max() > 100 * corr[np.abs(q) > 7].max()


def test_diagonal_correction_capped_near_intersection():
    (qx, _), _ = locate_conical_intersection(BUTATRIENE)
    g = ProductGrid.from_specs(GridSpec(qx - 0.2, qx + 0.2, 3, BUTATRIENE.omega_x), GridSpec(-0.2, 0.2, 3, BUTATRIENE.omega_y))
    ad = adiabatic_on_grid(BUTATRIENE, g)
    corr = diagonal_correction(BUTATRIENE, g, ad.mixing_angle, cap=5.0)
    assert np.all(corr <= 5.0) and corr[1, 1] == 5.0


def test_grid_dimension_mismatch():
    g = ProductGrid.from_specs(GridSpec(-1, 1, 5, 1.0))
    with pytest.raises(ValueError):
        adiabatic_on_grid(BUTATRIENE, g)


def test_coupling_kind_dimensions():
    assert butatriene_1d().coupling is CouplingKind.CONSTANT_LAMBDA and butatriene_1d().ndim == 1
    assert BUTATRIENE.ndim == 2 and BUTATRIENE.omegas == (O.OMEGA_X, O.OMEGA_Y)
    assert isinstance(BUTATRIENE, ModelParams)
