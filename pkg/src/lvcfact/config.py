"""
Run configuration read from INI-style files.

Sections
--------
[model]        e1, e2, omega_x, omega_y, kappa1, kappa2, lambda, coupling (constant | linear)
[grid.x]       q_min, q_max, n_points
[grid.y]       same, 2D models only
[solver]       n_states, tol, dense_cutoff, block_size, max_restarts, seed
[factorize]    floor, cap, plot_clip, fd_order, correction_cap
[verification] q_min, q_max, n_points, overlap_points, max_state
[convergence]  enabled, factor, n_states, cap_values, cap_states
[output]       directory, formats, field_states

Missing keys take the defaults of the dataclasses below. The environment
variable ``LVCFACT_OUT`` overrides the output directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .grid import GridSpec
from .model import CouplingKind, ModelParams

OUTPUT_ENV = "LVCFACT_OUT"


@dataclass(frozen=True)
class SolverOptions:
    n_states: int = 10
    tol: float = 1e-9
    dense_cutoff: int = 12000
    block_size: int = 4
    max_restarts: int = 200
    seed: int = 0


@dataclass(frozen=True)
class FactorizeOptions:
    floor: float = 1e-12
    cap: float = 1e6
    plot_clip: float = 12.0
    fd_order: int = 4
    correction_cap: float = 50.0


@dataclass(frozen=True)
class VerificationOptions:
    """Single-surface check. 1D states are refined onto their own grid; 2D states use the vibronic grid."""

    q_min: float = -7.0
    q_max: float = 7.0
    n_points: int = 3200
    overlap_points: int = 0  # extra finer 1D grid for the amplitude overlaps; 0 disables
    max_state: int = 9


@dataclass(frozen=True)
class ConvergenceOptions:
    enabled: bool = False
    factor: float = 2.0
    n_states: int = 10
    cap_values: tuple[float, ...] = (50.0,)  # potential caps whose effect on e0 is reported
    cap_states: int = 2  # lowest verified states included in the cap study


@dataclass(frozen=True)
class OutputOptions:
    directory: Path = Path("out")
    formats: tuple[str, ...] = ("csv", "json")
    field_states: tuple[int, ...] = (0,)


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    grids: tuple[GridSpec, ...]
    solver: SolverOptions = field(default_factory=SolverOptions)
    factorize: FactorizeOptions = field(default_factory=FactorizeOptions)
    verification: VerificationOptions = field(default_factory=VerificationOptions)
    convergence: ConvergenceOptions = field(default_factory=ConvergenceOptions)
    output: OutputOptions = field(default_factory=OutputOptions)
    source: str = ""

    def __post_init__(self):
        if self.solver.n_states < 1:
            raise ValueError("n_states must be at least 1")
        if len(self.grids) != self.model.ndim:
            raise ValueError(f"{self.model.ndim}D model needs {self.model.ndim} grid sections, got {len(self.grids)}")
        for fmt in self.output.formats:
            if fmt not in ("csv", "json"):
                raise ValueError(f"unknown output format {fmt!r}")

    @property
    def seed(self) -> int:
        return self.solver.seed

    @property
    def n_states(self) -> int:
        return self.solver.n_states

    def with_overrides(
        self,
        *,
        n_states: int | None = None,
        grid_points: int | None = None,
        seed: int | None = None,
        out: str | os.PathLike | None = None,
    ) -> "RunConfig":
        """Copy with command-line scalars applied; ``grid_points`` sets every vibronic axis."""
        cfg = self
        if n_states is not None:
            cfg = replace(cfg, solver=replace(cfg.solver, n_states=n_states))
        if seed is not None:
            cfg = replace(cfg, solver=replace(cfg.solver, seed=seed))
        if grid_points is not None:
            cfg = replace(cfg, grids=tuple(replace(g, n_points=grid_points) for g in cfg.grids))
        if out is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=Path(out)))
        return cfg


def _section(cp: configparser.ConfigParser, name: str) -> configparser.SectionProxy | dict:
    return cp[name] if cp.has_section(name) else {}


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _grid(cp, name: str, omega: float) -> GridSpec:
    sec = cp[name]
    return GridSpec(sec.getfloat("q_min", -9.0), sec.getfloat("q_max", 9.0), sec.getint("n_points"), omega)


def parse_config(text: str, source: str = "") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(text, source=source or "<string>")
    if not cp.has_section("model"):
        raise ValueError("config lacks a [model] section")
    m = cp["model"]
    coupling = CouplingKind(m.get("coupling", "linear").strip())
    model = ModelParams(
        e1=m.getfloat("e1"), e2=m.getfloat("e2"),
        omega_x=m.getfloat("omega_x"), omega_y=m.getfloat("omega_y", 0.0),
        kappa1=m.getfloat("kappa1"), kappa2=m.getfloat("kappa2"),
        lam=m.getfloat("lambda"), coupling=coupling,
    )
    if not cp.has_section("grid.x"):
        raise ValueError("config lacks a [grid.x] section")
    grids = [_grid(cp, "grid.x", model.omega_x)]
    if model.ndim == 2:
        if not cp.has_section("grid.y"):
            raise ValueError("a 2D model needs a [grid.y] section")
        grids.append(_grid(cp, "grid.y", model.omega_y))

    s = _section(cp, "solver")
    d = SolverOptions()
    solver = SolverOptions(
        n_states=int(s.get("n_states", d.n_states)), tol=float(s.get("tol", d.tol)),
        dense_cutoff=int(s.get("dense_cutoff", d.dense_cutoff)), block_size=int(s.get("block_size", d.block_size)),
        max_restarts=int(s.get("max_restarts", d.max_restarts)), seed=int(s.get("seed", d.seed)),
    )
    f = _section(cp, "factorize")
    d = FactorizeOptions()
    fact = FactorizeOptions(
        floor=float(f.get("floor", d.floor)), cap=float(f.get("cap", d.cap)),
        plot_clip=float(f.get("plot_clip", d.plot_clip)), fd_order=int(f.get("fd_order", d.fd_order)),
        correction_cap=float(f.get("correction_cap", d.correction_cap)),
    )
    v = _section(cp, "verification")
    d = VerificationOptions()
    ver = VerificationOptions(
        q_min=float(v.get("q_min", d.q_min)), q_max=float(v.get("q_max", d.q_max)),
        n_points=int(v.get("n_points", d.n_points)), overlap_points=int(v.get("overlap_points", d.overlap_points)),
        max_state=int(v.get("max_state", d.max_state)),
    )
    c = _section(cp, "convergence")
    d = ConvergenceOptions()
    conv = ConvergenceOptions(
        enabled=str(c.get("enabled", d.enabled)).strip().lower() in ("1", "true", "yes", "on"),
        factor=float(c.get("factor", d.factor)), n_states=int(c.get("n_states", d.n_states)),
        cap_values=_floats(c["cap_values"]) if "cap_values" in c else d.cap_values,
        cap_states=int(c.get("cap_states", d.cap_states)),
    )
    o = _section(cp, "output")
    d = OutputOptions()
    directory = Path(os.environ.get(OUTPUT_ENV) or o.get("directory", str(d.directory)))
    formats = tuple(t.strip() for t in o.get("formats", ",".join(d.formats)).split(",") if t.strip())
    field_states = _ints(o.get("field_states", "0"))
    out = OutputOptions(directory, formats, field_states)
    return RunConfig(model, tuple(grids), solver, fact, ver, conv, out, source)


def load_config(path: str | os.PathLike) -> RunConfig:
    """Read a config file; a bare bundled name such as ``butatriene_1d`` is also accepted."""
    p = Path(path)
    if not p.exists():
        bundled = bundled_config_path(p.name)
        if bundled is None:
            raise FileNotFoundError(f"config {path} not found")
        p = bundled
    return parse_config(p.read_text(), source=str(p))


def bundled_config_path(name: str) -> Path | None:
    base = Path(__file__).parent / "configs"
    for cand in (base / name, base / f"{name}.cfg"):
        if cand.is_file():
            return cand
    return None
