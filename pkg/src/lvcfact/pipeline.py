"""
End-to-end run: model -> grid -> eigenstates -> factorization -> references -> overlaps.
"""

from __future__ import annotations

import contextlib
import logging
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .approx import (
    ReferenceKind,
    born_huang_identity_check,
    build_reference,
    modulus_family,
    overlap_matrix,
    solve_reference,
)
from .config import RunConfig
from .eigen import NotConvergedError
from .factorize import (
    clipped,
    factorize_state,
    rayleigh_energy,
    single_surface_spectrum,
    verify_single_surface,
)
from .grid import GridSpec, ProductGrid
from .hamiltonian import SINGLE_SURFACE_DENSE_CUTOFF, solve_vibronic
from .model import CouplingKind, adiabatic_on_grid, diagonal_correction, locate_conical_intersection
from .report import RunReport, export_field

log = logging.getLogger(__name__)

FAMILY_LABELS = {
    "exact": "H",
    "lambda0": "H_lambda0",
    "adiabatic": "H_ad",
    "born_huang": "H_BH",
    "amplitude": "chi_bar",
    "modulus": "|chi_ad|",
    "hbar0": "Hbar_0",
}
DIABATIC_FAMILIES = ("exact", "lambda0", "adiabatic", "born_huang")
SCALAR_FAMILIES = ("amplitude", "modulus", "hbar0")
REFERENCE_OF = {
    "lambda0": ReferenceKind.DIABATIC_LAMBDA_ZERO,
    "adiabatic": ReferenceKind.ADIABATIC,
    "born_huang": ReferenceKind.BORN_HUANG,
}


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message names the stage."""


@contextlib.contextmanager
def stage(name: str):
    t0 = time.perf_counter()
    log.info("stage %s", name)
    try:
        yield
    except PipelineError:
        raise
    except NotConvergedError as exc:
        raise PipelineError(f"stage '{name}': eigensolver did not converge: {exc}") from exc
    except OSError as exc:
        raise PipelineError(f"stage '{name}': I/O failure: {exc}") from exc
    log.info("stage %s done in %.1f s", name, time.perf_counter() - t0)


def build_grid(cfg: RunConfig) -> ProductGrid:
    return ProductGrid.from_specs(*cfg.grids)


def _lanczos_kw(cfg: RunConfig) -> dict:
    s = cfg.solver
    return {"dense_cutoff": s.dense_cutoff, "tol": s.tol, "seed": s.seed,
            "block_size": s.block_size, "max_restarts": s.max_restarts}


def _fact_kw(cfg: RunConfig) -> dict:
    f = cfg.factorize
    return {"fd_order": f.fd_order, "floor": f.floor, "cap": f.cap}


class Session:
    """
    Lazily computed pipeline products for one config.

    Each product is computed on first access and cached, so the CLI
    subcommands only pay for what they use.
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.params = cfg.model
        self.grid = build_grid(cfg)
        self._cache: dict = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def k(self) -> int:
        return self.cfg.n_states

    def exact(self):
        """(states, EigenResult) of the full two-state Hamiltonian."""
        def run():
            with stage("exact spectrum"):
                return solve_vibronic(self.params, self.grid, self.k, **_lanczos_kw(self.cfg))
        return self._get("exact", run)

    def reference(self, name: str):
        kind = REFERENCE_OF[name]

        def run():
            with stage(f"reference {kind.value}"):
                prob = build_reference(kind, self.params, self.grid, correction_cap=self.cfg.factorize.correction_cap)
                kw = _lanczos_kw(self.cfg)
                if kind is not ReferenceKind.DIABATIC_LAMBDA_ZERO:
                    # single-surface problems are half the size but go iterative sooner
                    kw["dense_cutoff"] = min(kw["dense_cutoff"], SINGLE_SURFACE_DENSE_CUTOFF)
                return solve_reference(prob, self.k, **kw)
        return self._get(("ref", name), run)

    def factorized(self, n: int):
        states, _ = self.exact()

        def run():
            with stage(f"factorize state {n}"):
                return factorize_state(states[n], self.params, **_fact_kw(self.cfg))
        return self._get(("fact", n), run)

    def factorized_all(self):
        return [self.factorized(n) for n in range(self.k)]

    def hbar0(self):
        """Spectrum and eigenfunctions of T_N plus the ground-state factorized potential."""
        def run():
            with stage("single-surface spectrum of the ground factorized potential"):
                s = self.cfg.solver
                return single_surface_spectrum(self.factorized(0), self.k, tol=s.tol, seed=s.seed)
        return self._get("hbar0", run)

    def verification_grid(self, points: int | None = None) -> ProductGrid | None:
        if self.grid.ndim != 1:
            return None
        v = self.cfg.verification
        n = points or v.n_points
        # shared so cached results do not each hold a dense kinetic matrix
        return self._get(("vgrid", n), lambda: ProductGrid.from_specs(GridSpec(v.q_min, v.q_max, n, self.params.omega_x)))

    def verify(self, n: int, points: int | None = None):
        def run():
            fine = self.verification_grid(points)
            label = f"{fine.total_size} points" if fine is not None else "vibronic grid"
            with stage(f"single-surface check of state {n} ({label})"):
                s = self.cfg.solver
                return verify_single_surface(self.factorized(n), self.params, fine, tol=s.tol, seed=s.seed,
                                             **_fact_kw(self.cfg))
        return self._get(("verify", n, points), run)

    def verified_states(self) -> list[int]:
        return list(range(min(self.k, self.cfg.verification.max_state + 1)))

    def family(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        """(fields, energies) of a named eigenfunction family."""
        if name == "exact":
            states, res = self.exact()
            return np.array([s.chi for s in states]), res.values
        if name in REFERENCE_OF:
            sp = self.reference(name)
            return sp.diabatic, sp.values
        if name == "amplitude":
            fs = self.factorized_all()
            return np.array([f.amplitude for f in fs]), np.array([f.energy for f in fs])
        if name == "modulus":
            sp = self.reference("adiabatic")
            return modulus_family(sp.fields, self.grid), sp.values
        if name == "hbar0":
            res, fields = self.hbar0()
            return fields, res.values
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILY_LABELS)}")

    def overlaps(self, rows: str, cols: str):
        if (rows in DIABATIC_FAMILIES) != (cols in DIABATIC_FAMILIES):
            raise ValueError(
                f"families {rows!r} and {cols!r} live in different representations "
                f"(two-component: {', '.join(DIABATIC_FAMILIES)}; scalar: {', '.join(SCALAR_FAMILIES)})"
            )

        def run():
            with stage(f"overlaps {rows} x {cols}"):
                a, ea = self.family(rows)
                b, eb = self.family(cols)
                return overlap_matrix(a, b, self.grid, row_energies=ea, col_energies=eb,
                                      row_label=FAMILY_LABELS[rows], col_label=FAMILY_LABELS[cols])
        return self._get(("ovl", rows, cols), run)

    def convergence(self):
        """Exact eigenvalues on a grid with extent and point count scaled up, against the base grid."""
        conv = self.cfg.convergence

        def run():
            k = min(conv.n_states, self.k)
            specs = tuple(g.scaled(conv.factor) for g in self.cfg.grids)
            big = ProductGrid.from_specs(*specs)
            with stage(f"convergence check on {'x'.join(map(str, big.shape))} points"):
                _, res = solve_vibronic(self.params, big, k, **_lanczos_kw(self.cfg))
            base = self.exact()[1].values[:k]
            return {
                "factor": conv.factor,
                "base_shape": list(self.grid.shape),
                "scaled_shape": list(big.shape),
                "base": base,
                "scaled": res.values,
                "deltas": res.values - base,
                "max_abs_delta": float(np.max(np.abs(res.values - base))),
            }
        return self._get("convergence", run)

    def cap_sensitivity(self):
        """Shift of the single-surface ground energy e0 when the potential cap is lowered."""
        conv = self.cfg.convergence

        def run():
            states, _ = self.exact()
            fine = self.verification_grid()
            s = self.cfg.solver
            entries = []
            for n in self.verified_states()[: conv.cap_states]:
                base = self.verify(n).e0
                for cap in conv.cap_values:
                    kw = {**_fact_kw(self.cfg), "cap": cap}
                    with stage(f"cap study of state {n} at {cap:g} eV"):
                        if fine is None:
                            fs = factorize_state(states[n], self.params, **kw)
                            vr = verify_single_surface(fs, self.params, None, tol=s.tol, seed=s.seed)
                        else:
                            vr = verify_single_surface(self.factorized(n), self.params, fine, tol=s.tol, seed=s.seed, **kw)
                    entries.append({"n": n, "cap": cap, "e0": vr.e0, "delta_e0": vr.e0 - base,
                                    "amplitude_overlap": vr.amplitude_overlap})
            return {
                "reference_cap": self.cfg.factorize.cap,
                "entries": entries,
                "max_abs_delta_e0": max((abs(e["delta_e0"]) for e in entries), default=0.0),
            }
        return self._get("cap_sensitivity", run)


def run_pipeline(cfg: RunConfig, *, write: bool = True, session: Session | None = None) -> RunReport:
    """
    Run every stage for ``cfg`` and return the report; artifacts go to the output directory.

    Raises
    ------
    PipelineError
        A stage did not converge or an output could not be written.
    """
    ses = session or Session(cfg)
    params, grid = ses.params, ses.grid
    rep = RunReport(config_source=cfg.source)
    rep.data["session"] = ses

    states, res = ses.exact()
    rep.add_energies("H", res.values, "hamiltonian", "solve_vibronic")
    converged = bool(res.converged)

    fams = {}
    for name in REFERENCE_OF:
        sp = ses.reference(name)
        fams[name] = sp
        converged &= bool(sp.converged)
        rep.add_energies(FAMILY_LABELS[name], sp.values, "approx", f"solve_reference[{REFERENCE_OF[name].value}]")

    fs_all = ses.factorized_all()
    hres, _ = ses.hbar0()
    rep.add_energies("Hbar_0", hres.values, "factorize", "single_surface_spectrum[n=0]")

    verified = ses.verified_states()
    e0, summaries = [], []
    for n, fs in enumerate(fs_all):
        entry = {
            "n": n,
            "energy": fs.energy,
            "masked_points": int((~fs.defined_mask).sum()),
            "max_spike": float(fs.spike_part.max()),
            "rayleigh_minus_energy": rayleigh_energy(fs) - fs.energy,
        }
        if n in verified:
            vr = ses.verify(n)
            e0.append(vr.e0)
            entry.update({
                "verification_points": vr.factorized.grid.total_size,
                "e0": vr.e0,
                "energy_gap": vr.energy_gap,
                "amplitude_overlap": vr.amplitude_overlap,
                "excitation_gap": vr.excitation_gap,
                "rayleigh_minus_energy_verification": rayleigh_energy(vr.factorized) - fs.energy,
            })
            if grid.ndim == 1 and cfg.verification.overlap_points:
                vf = ses.verify(n, cfg.verification.overlap_points)
                entry.update({
                    "overlap_points": vf.factorized.grid.total_size,
                    "e0_fine": vf.e0,
                    "amplitude_overlap_fine": vf.amplitude_overlap,
                })
        summaries.append(entry)
    rep.factorization = summaries
    rep.add_energies("Hbar_n", e0, "factorize", "verify_single_surface", rows=verified)

    for name in REFERENCE_OF:
        rep.add_overlaps(FAMILY_LABELS[name], ses.overlaps("exact", name), "approx", f"overlap_matrix[exact x {name}]")
    rep.add_overlaps("H_ad_rows", ses.overlaps("adiabatic", "exact"), "approx", "overlap_matrix[adiabatic x exact]")
    rep.add_overlaps("modulus_vs_amplitude", ses.overlaps("modulus", "amplitude"), "approx",
                     "overlap_matrix[modulus x amplitude]")
    rep.add_overlaps("amplitude_vs_Hbar_0", ses.overlaps("amplitude", "hbar0"), "approx",
                     "overlap_matrix[amplitude x hbar0]")

    with stage("model checks"):
        ident = born_huang_identity_check(params, grid, fd_cap=cfg.factorize.correction_cap)
        rep.checks["born_huang_identity"] = {
            "max_deviation": ident.max_deviation,
            "finite_difference_deviation": ident.fd_deviation,
            "excluded_points": ident.excluded,
        }
        if params.coupling is CouplingKind.LINEAR_IN_QY:
            ci = locate_conical_intersection(params)
            rep.checks["conical_intersection"] = None if ci is None else {"q": list(ci[0]), "energy": ci[1]}

    if cfg.convergence.enabled:
        rep.convergence = {**ses.convergence(), "cap_sensitivity": ses.cap_sensitivity()}

    rep.converged = converged
    if write:
        with stage("write outputs"):
            write_outputs(ses, rep)
    return rep


def write_outputs(ses: Session, rep: RunReport) -> list[Path]:
    cfg = ses.cfg
    out = Path(cfg.output.directory)
    written = rep.write(out, cfg.output.formats)
    written += write_model_fields(ses, out)
    for n in cfg.output.field_states:
        if n < ses.k:
            written += write_state_fields(ses, n, out)
    return written


def _formats(cfg):
    return [f for f in cfg.output.formats if f in ("csv", "json")]


def write_model_fields(ses: Session, out: Path) -> list[Path]:
    ad = adiabatic_on_grid(ses.params, ses.grid)
    corr = diagonal_correction(ses.params, ses.grid, ad.mixing_angle, cap=ses.cfg.factorize.correction_cap)
    written = []
    for fmt in _formats(ses.cfg):
        for name, values, mask in (
            ("adiabatic_lower", ad.lower, None),
            ("adiabatic_upper", ad.upper, None),
            ("mixing_angle", ad.mixing_angle, ad.degenerate),
            ("diagonal_correction", corr, None),
        ):
            written.append(export_field(values, ses.grid, out / f"{name}.{fmt}", fmt, mask))
    return written


def write_state_fields(ses: Session, n: int, out: Path) -> list[Path]:
    """Amplitude, angle, potentials and diabatic components of state ``n``."""
    fs = ses.factorized(n)
    states, _ = ses.exact()
    mask = ~fs.defined_mask
    clip = ses.cfg.factorize.plot_clip
    written = []
    for fmt in _formats(ses.cfg):
        for name, values, m in (
            ("amplitude", fs.amplitude, None),
            ("theta", fs.theta, mask),
            ("exact_potential", fs.exact_potential, mask),
            ("exact_potential_clipped", clipped(fs.exact_potential, clip), mask),
            ("spike_part", fs.spike_part, mask),
            ("potential_part", fs.potential_part, mask),
            ("chi1", states[n].chi1, None),
            ("chi2", states[n].chi2, None),
        ):
            written.append(export_field(values, ses.grid, out / f"state{n:03d}_{name}.{fmt}", fmt, m))
    return written


def spectrum_report(ses: Session) -> RunReport:
    """Eigenvalues of the exact and reference Hamiltonians only."""
    rep = RunReport(config_source=ses.cfg.source)
    _, res = ses.exact()
    rep.add_energies("H", res.values, "hamiltonian", "solve_vibronic")
    conv = bool(res.converged)
    for name in REFERENCE_OF:
        sp = ses.reference(name)
        conv &= bool(sp.converged)
        rep.add_energies(FAMILY_LABELS[name], sp.values, "approx", f"solve_reference[{REFERENCE_OF[name].value}]")
    rep.converged = conv
    return rep


def with_states(cfg: RunConfig, n: int) -> RunConfig:
    """Config whose state count covers index ``n``."""
    if n < cfg.n_states:
        return cfg
    return replace(cfg, solver=replace(cfg.solver, n_states=n + 1))
