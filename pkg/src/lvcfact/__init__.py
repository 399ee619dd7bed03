"""
Linear vibronic coupling models on sine-DVR grids and the exact factorization
of their eigenstates into a nodeless nuclear amplitude and a state-specific
potential.
"""

from .approx import (
    OverlapMatrix,
    ReferenceKind,
    born_huang_identity_check,
    build_reference,
    modulus_family,
    overlap_matrix,
    solve_reference,
    to_diabatic_components,
)
from .config import RunConfig, load_config, parse_config
from .eigen import EigenResult, LinearOperatorHandle, NotConvergedError, solve_dense, solve_lowest
from .factorize import (
    FactorizedState,
    cross_section,
    factorize_state,
    single_surface_spectrum,
    verify_single_surface,
)
from .grid import Axis, GridSpec, ProductGrid, build_axis, gradient, inner_product
from .hamiltonian import VibronicState, apply_vibronic_hamiltonian, solve_vibronic
from .model import (
    BUTATRIENE,
    CouplingKind,
    DiabaticMatrix,
    ModelParams,
    butatriene_1d,
    diagonal_correction,
    eval_adiabatic,
    eval_diabatic,
    locate_conical_intersection,
)
from .pipeline import Session, run_pipeline
from .report import RunReport, export_field, read_field

__version__ = "0.1.0"
