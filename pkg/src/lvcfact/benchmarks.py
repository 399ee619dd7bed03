"""
Benchmark values for the two bundled butatriene studies (energies in eV).

Used by the ``check`` subcommand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# one mode, constant coupling 0.05 eV, n = 0..9
ONE_MODE_ENERGIES = {
    "H": [9.4878, 9.7404, 9.8561, 10.0087, 10.1088, 10.2656, 10.3693, 10.5205, 10.6290, 10.7781],
    "Hbar_n": [9.4878, 9.7404, 9.8561, 10.0087, 10.1088, 10.2656, 10.3693, 10.5205, 10.6290, 10.7781],
    "H_lambda0": [9.4916, 9.7494, 9.8532, 10.0071, 10.1109, 10.2649, 10.3687, 10.5226, 10.6265, 10.7804],
    "H_ad": [9.4857, 9.7243, 9.9205, 9.9527, 10.1132, 10.3054, 10.3247, 10.5346, 10.6339, 10.7520],
    "H_BH": [9.4938, 9.7686, 9.9762, 10.0517, 10.1230, 10.3672, 10.3747, 10.5435, 10.6500, 10.7851],
}
# lowest single-surface levels of the ground factorized potential, listed
# against the states dominated by the lower-minimum diabatic surface
ONE_MODE_HBAR0 = {0: 9.4878, 1: 9.7428, 3: 9.9941, 5: 10.2361, 7: 10.4560, 9: 10.6458}

# overlaps with the exact states in the diabatic basis, n = 0..9
ONE_MODE_OVERLAPS = {
    "Hbar_n": [1.0] * 10,
    "H_lambda0": [0.9965, 0.9679, 0.9521, 0.9819, 0.9862, 0.9852, 0.9904, 0.9839, 0.9849, 0.9855],
    "H_ad": [0.9937, 0.9621, 0.7117, 0.4422, 0.5657, 0.3735, 0.4553, 0.7328, 0.6283, 0.6941],
    "H_BH": [0.9948, 0.9684, 0.7283, 0.3824, 0.5137, 0.4296, 0.4566, 0.7043, 0.6499, 0.7339],
}

# two modes, n = 0..7
TWO_MODE_ENERGIES = {
    "H": [9.2381, 9.2381, 9.3251, 9.3253, 9.4084, 9.4113, 9.4703, 9.4704],
    "Hbar_n": [9.2381, 9.2381, 9.3251, 9.3253, 9.4084, 9.4113, 9.4703, 9.4704],
    "H_ad": [9.2367, 9.2367, 9.3232, 9.3235, 9.4053, 9.4091, 9.4693, 9.4694],
    "H_BH": [9.2383, 9.2383, 9.3254, 9.3257, 9.4091, 9.4120, 9.4709, 9.4710],
    "Hbar_0": [9.2381, 9.2381, 9.3251, 9.3254, 9.4086, 9.4116, 9.4710, 9.4711],
}

CONICAL_INTERSECTION = {"q": (-0.8571, 0.0), "energy": 9.7265}


@dataclass(frozen=True)
class Tolerances:
    energy: float = 2e-3
    overlap: float = 0.01
    unit_overlap: float = 1e-6
    verification_overlap: float = 0.999
    intersection: float = 1e-3
    identity: float = 1e-8
    property: float = 1e-10
    solver_agreement: float = 1e-8
    convergence: float = 5e-4
    degeneracy_structure: float = 5e-4
    good_overlap: float = 0.99  # adiabatic rows m <= 10
    poor_overlap: float = 0.9  # adiabatic rows 11..50
    poor_fraction: float = 0.5
    diagonal_fraction: float = 0.9


@dataclass(frozen=True)
class Benchmarks:
    one_mode_energies: dict = field(default_factory=lambda: ONE_MODE_ENERGIES)
    one_mode_overlaps: dict = field(default_factory=lambda: ONE_MODE_OVERLAPS)
    two_mode_energies: dict = field(default_factory=lambda: TWO_MODE_ENERGIES)
    conical_intersection: dict = field(default_factory=lambda: CONICAL_INTERSECTION)
    tolerances: Tolerances = field(default_factory=Tolerances)
