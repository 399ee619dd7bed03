"""
Acceptance criteria evaluated on pipeline reports.

Each criterion is split into parts; a criterion passes when all of its
evaluated parts pass. 1D reports feed criteria 1-4, 2D reports criteria
5-7, and both feed 8-11.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .benchmarks import Benchmarks
from .eigen import LinearOperatorHandle, solve_dense, solve_lowest
from .grid import GridSpec, ProductGrid, gradient
from .hamiltonian import vibronic_matrix
from .model import adiabatic_on_grid, adt_matrix, diabatic_on_grid
from .report import RunReport

CRITERIA = {
    1: "1D exact spectrum",
    2: "1D reference spectra",
    3: "1D single-surface verification",
    4: "1D overlap table",
    5: "2D exact spectrum",
    6: "2D reference spectra",
    7: "conical intersection",
    8: "Born-Huang identity",
    9: "property suite",
    10: "overlap structure",
    11: "grid convergence",
}


@dataclass(frozen=True)
class Part:
    criterion: int
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    parts: tuple[Part, ...]

    @property
    def passed(self) -> bool:
        return bool(self.parts) and all(p.passed for p in self.parts)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name}"


def _max_dev(values, ref) -> float:
    n = min(len(values), len(ref))
    return float(np.max(np.abs(np.asarray(values[:n]) - np.asarray(ref[:n])))) if n else np.inf


def _energy_part(crit, rep, label, ref, tol, tag="") -> Part:
    col = rep.energy_table[label]
    vals = col.values
    dev = _max_dev(vals, ref) if len(vals) >= len(ref) else np.inf
    return Part(crit, f"{label}{tag}", dev <= tol, f"max |dE| = {dev:.2e} eV over {len(ref)} levels (tol {tol:g})")


def one_mode_parts(rep: RunReport, bm: Benchmarks) -> list[Part]:
    t = bm.tolerances
    E, O = bm.one_mode_energies, bm.one_mode_overlaps
    parts = [_energy_part(1, rep, "H", E["H"], t.energy)]
    parts += [_energy_part(2, rep, lab, E[lab], t.energy) for lab in ("H_lambda0", "H_ad", "H_BH")]

    ver = [f for f in rep.factorization if "e0" in f]
    ref = E["Hbar_n"]
    if len(ver) >= len(ref):
        dev = _max_dev([f["e0"] for f in ver], ref)
        worst = min(f["amplitude_overlap"] for f in ver[: len(ref)])
        parts.append(Part(3, "single-surface ground energies", dev <= t.energy, f"max |e0 - ref| = {dev:.2e} eV"))
        parts.append(Part(3, "single-surface ground overlaps", worst >= t.verification_overlap,
                          f"min overlap = {worst:.6f} (bound {t.verification_overlap})"))
    else:
        parts.append(Part(3, "single-surface check", False, f"only {len(ver)} states verified"))

    for lab in ("H_lambda0", "H_ad", "H_BH"):
        diag = np.abs(rep.overlap_tables[lab].diagonal())
        dev = _max_dev(diag, O[lab])
        parts.append(Part(4, f"overlaps {lab}", dev <= t.overlap, f"max |dS| = {dev:.4f}"))
    fine = [f.get("amplitude_overlap_fine", f.get("amplitude_overlap")) for f in ver[:10]]
    dev = _max_dev(fine, O["Hbar_n"]) if len(fine) >= 10 else np.inf
    pts = ver[0].get("overlap_points", ver[0].get("verification_points")) if ver else 0
    parts.append(Part(4, "overlaps Hbar_n", dev <= t.unit_overlap, f"max |1 - S| = {dev:.2e} on {pts} points"))

    om = rep.overlap_tables["modulus_vs_amplitude"]
    arg = om.argmax_per_row()
    ok = len(arg) > 3 and arg[2] == 3 and arg[3] == 2
    parts.append(Part(10, "1D index permutation 2<->3", bool(ok), f"argmax rows 0..5: {arg[:6].tolist()}"))
    return parts


def two_mode_parts(rep: RunReport, bm: Benchmarks) -> list[Part]:
    t = bm.tolerances
    E = bm.two_mode_energies
    parts = [_energy_part(5, rep, "H", E["H"], t.energy)]
    h = rep.energy_table["H"].values
    split = np.diff(h[:8])[::2]
    ref_split = np.diff(E["H"])[::2]
    dev = _max_dev(split, ref_split)
    parts.append(Part(5, "near-degenerate pair splittings", dev <= t.degeneracy_structure,
                      f"splittings {np.round(split, 5).tolist()} (max dev {dev:.1e})"))
    parts += [_energy_part(6, rep, lab, E[lab], t.energy) for lab in ("H_ad", "H_BH", "Hbar_0")]

    ci = rep.checks.get("conical_intersection")
    ref = bm.conical_intersection
    if ci is None:
        parts.append(Part(7, "locator", False, "no intersection found"))
    else:
        dq = max(abs(ci["q"][0] - ref["q"][0]), abs(ci["q"][1] - ref["q"][1]))
        de = abs(ci["energy"] - ref["energy"])
        parts.append(Part(7, "locator", dq <= t.intersection and de <= t.intersection,
                          f"q = ({ci['q'][0]:.4f}, {ci['q'][1]:.4f}), E = {ci['energy']:.4f}"))

    parts += structure_parts(rep, bm)
    return parts


def structure_parts(rep: RunReport, bm: Benchmarks) -> list[Part]:
    """Overlap-structure claims for the 2D model (rows 0..50)."""
    t = bm.tolerances
    parts = []
    om = rep.overlap_tables["H_ad_rows"]
    _, best = om.best_cluster()
    if om.shape[0] < 51:
        return [Part(10, "2D overlap structure", False, f"need 51 rows, have {om.shape[0]}")]
    low = best[:11]
    parts.append(Part(10, "2D adiabatic rows m <= 10 match", bool(np.all(low >= t.good_overlap)),
                      f"min best-cluster overlap {low.min():.4f} (bound {t.good_overlap}); "
                      f"rows below: {np.flatnonzero(low < t.good_overlap).tolist()}"))
    frac = float(np.mean(best[11:51] < t.poor_overlap))
    parts.append(Part(10, "2D adiabatic rows 11..50 degrade", frac >= t.poor_fraction,
                      f"fraction below {t.poor_overlap}: {frac:.3f} (need {t.poor_fraction})"))

    mv = rep.overlap_tables["modulus_vs_amplitude"]
    diag = mv.on_diagonal()[:51]
    frac = float(np.mean(diag))
    parts.append(Part(10, "modulus vs amplitude diagonal dominance", frac >= t.diagonal_fraction,
                      f"diagonal rows {frac:.3f} (need {t.diagonal_fraction})"))
    arg = mv.argmax_per_row()
    swap = arg[15] == 16 and arg[16] == 15
    parts.append(Part(10, "modulus vs amplitude 15/16 swap", bool(swap), f"argmax rows 13..16: {arg[13:17].tolist()}"))
    return parts


def identity_parts(rep: RunReport, bm: Benchmarks, tag: str) -> list[Part]:
    d = rep.checks["born_huang_identity"]
    return [Part(8, f"identity ({tag})", d["max_deviation"] <= bm.tolerances.identity,
                 f"max deviation {d['max_deviation']:.2e} eV, {d['excluded_points']} points excluded")]


def convergence_parts(rep: RunReport, bm: Benchmarks, tag: str) -> list[Part]:
    c = rep.convergence
    if not c:
        return [Part(11, f"convergence ({tag})", False, "convergence check not run")]
    return [Part(11, f"convergence ({tag})", c["max_abs_delta"] < bm.tolerances.convergence,
                 f"max |dE| = {c['max_abs_delta']:.2e} eV going {c['base_shape']} -> {c['scaled_shape']}")]


def property_parts(rep: RunReport, bm: Benchmarks, tag: str) -> list[Part]:
    """Structural properties checked on the states and model of a report."""
    t = bm.tolerances
    ses = rep.data["session"]
    params, grid = ses.params, ses.grid
    fs_all = ses.factorized_all()
    states, _ = ses.exact()
    parts = []

    min_amp = min(float(f.amplitude.min()) for f in fs_all)
    parts.append(Part(9, f"nodeless amplitudes ({tag})", min_amp >= 0.0, f"min amplitude {min_amp:.1e}"))
    unit = max(float(np.max(np.abs(f.c1**2 + f.c2**2 - 1.0)[f.defined_mask])) for f in fs_all)
    parts.append(Part(9, f"c1^2 + c2^2 = 1 ({tag})", unit <= t.property, f"max deviation {unit:.1e}"))
    rec = max(float(np.max(np.abs(f.reconstruct() - s.chi)[:, f.defined_mask])) for f, s in zip(fs_all, states))
    parts.append(Part(9, f"reconstruction ({tag})", rec <= t.property, f"max deviation {rec:.1e}"))
    spike = min(float(f.spike_part.min()) for f in fs_all)
    parts.append(Part(9, f"spike positivity ({tag})", spike >= 0.0, f"min spike {spike:.1e}"))

    # Lanczos against LAPACK on a problem small enough for both
    small = grid if grid.total_size <= 500 else ProductGrid.from_specs(
        *(GridSpec(a.spec.q_min, a.spec.q_max, 401 if grid.ndim == 1 else 21, a.spec.omega) for a in grid.axes)
    )
    H = vibronic_matrix(params, small)
    k = min(10, H.shape[0] - 1)
    dense = solve_dense(H, k)
    lz = solve_lowest(LinearOperatorHandle.from_matrix(H), k, 1e-10, seed=ses.cfg.seed)
    dev = float(np.max(np.abs(dense.values - lz.values)))
    parts.append(Part(9, f"Lanczos vs dense ({tag})", dev <= t.solver_agreement, f"max |dE| = {dev:.1e} on {H.shape[0]} dims"))

    v = diabatic_on_grid(params, grid)
    ad = adiabatic_on_grid(params, grid)
    ok = np.isfinite(ad.mixing_angle)
    S = adt_matrix(np.where(ok, ad.mixing_angle, 0.0))
    StS = np.einsum("ji...,jk...->ik...", S, S)
    orth = float(np.max(np.abs(StS - np.eye(2).reshape(2, 2, *([1] * grid.ndim)))[..., ok]))
    V = v.as_array()
    D = np.einsum("ji...,jk...,kl...->il...", S, V, S)
    rot = float(max(np.max(np.abs(D[0, 0] - ad.lower)[ok]), np.max(np.abs(D[1, 1] - ad.upper)[ok]),
                    np.max(np.abs(D[0, 1])[ok])))
    tr = float(np.max(np.abs(ad.lower + ad.upper - v.v11 - v.v22)))
    det = float(np.max(np.abs(ad.lower * ad.upper - (v.v11 * v.v22 - v.v12**2))))
    worst = max(orth, rot, tr, det)
    parts.append(Part(9, f"S orthogonal, trace/determinant kept ({tag})", worst <= t.property,
                      f"orth {orth:.1e}, rotation {rot:.1e}, trace {tr:.1e}, det {det:.1e}"))

    errs = []
    for n in (1000, 2000):
        g = ProductGrid.from_specs(GridSpec(0.0, 10.0, n, 1.0))
        q = g.axes[0].points
        errs.append(float(np.max(np.abs(gradient(np.sin(q), g, 0) - np.cos(q))[1:-1])))
    rate = float(np.log2(errs[0] / errs[1]))
    parts.append(Part(9, "second-order finite differences", 1.8 <= rate <= 2.2, f"observed order {rate:.2f}"))
    return parts


def evaluate(one_mode: RunReport | None, two_mode: RunReport | None, bm: Benchmarks | None = None) -> list[CriterionResult]:
    """Evaluate all criteria that the given reports can feed."""
    bm = bm or Benchmarks()
    parts: list[Part] = []
    if one_mode is not None:
        parts += one_mode_parts(one_mode, bm)
        parts += identity_parts(one_mode, bm, "1D")
        parts += property_parts(one_mode, bm, "1D")
        parts += convergence_parts(one_mode, bm, "1D")
    if two_mode is not None:
        parts += two_mode_parts(two_mode, bm)
        parts += identity_parts(two_mode, bm, "2D")
        parts += property_parts(two_mode, bm, "2D")
        parts += convergence_parts(two_mode, bm, "2D")
    out = []
    for n, name in CRITERIA.items():
        mine = tuple(p for p in parts if p.criterion == n)
        if mine:
            out.append(CriterionResult(n, name, mine))
    return out


def format_results(results: list[CriterionResult], verbose: bool = True) -> str:
    lines = []
    for r in results:
        lines.append(r.line())
        if verbose:
            for p in r.parts:
                lines.append(f"    {'ok  ' if p.passed else 'FAIL'} {p.name}: {p.detail}")
    return "\n".join(lines)

