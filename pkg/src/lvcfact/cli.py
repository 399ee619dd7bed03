"""
Command-line interface.

    lvcfact run <config>                     full pipeline, all artifacts
    lvcfact spectrum <config>                eigenvalues of every Hamiltonian
    lvcfact factorize <config> --state n     factorized fields of one state
    lvcfact overlaps <config> --families a,b overlap matrix of two families
    lvcfact check <config>                   acceptance criteria for the config's study

Exit status is 0 when every requested stage converged (and, for ``check``,
every evaluated criterion passed), 1 otherwise, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .acceptance import evaluate, format_results
from .config import load_config
from .pipeline import (
    DIABATIC_FAMILIES,
    FAMILY_LABELS,
    PipelineError,
    Session,
    run_pipeline,
    spectrum_report,
    with_states,
    write_state_fields,
)
from .report import dump_json


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="config file, or the name of a bundled config (butatriene_1d, butatriene_2d)")
    p.add_argument("--n-states", type=int, help="number of eigenstates per Hamiltonian")
    p.add_argument("--grid-points", type=int, help="points on every vibronic grid axis")
    p.add_argument("--seed", type=int, help="seed of the iterative eigensolver")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", help="log stage timings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lvcfact", description="Vibronic eigenstates and their exact factorization.")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="full pipeline"))
    _common(sub.add_parser("spectrum", help="eigenvalues only"))
    p = sub.add_parser("factorize", help="factorize one eigenstate")
    _common(p)
    p.add_argument("--state", type=int, required=True, help="eigenstate index n")
    p = sub.add_parser("overlaps", help="overlap matrix between two eigenfunction families")
    _common(p)
    p.add_argument("--families", required=True, help=f"two of: {', '.join(FAMILY_LABELS)}, e.g. exact,adiabatic")
    _common(sub.add_parser("check", help="evaluate the acceptance criteria"))
    return parser


def _config(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(n_states=args.n_states, grid_points=args.grid_points, seed=args.seed, out=args.out)


def cmd_run(args) -> int:
    rep = run_pipeline(_config(args))
    sys.stdout.write(rep.energy_text())
    return 0 if rep.converged else 1


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    rep = spectrum_report(Session(cfg))
    sys.stdout.write(rep.energy_text())
    out = Path(cfg.output.directory)
    dump_json(rep.energy_json(), out / "energy_table.json")
    return 0 if rep.converged else 1


def cmd_factorize(args) -> int:
    if args.state < 0:
        raise ValueError("--state must be non-negative")
    cfg = with_states(_config(args), args.state)
    ses = Session(cfg)
    fs = ses.factorized(args.state)
    out = Path(cfg.output.directory)
    write_state_fields(ses, args.state, out)
    summary = {
        "n": args.state,
        "energy": fs.energy,
        "masked_points": int((~fs.defined_mask).sum()),
        "max_spike": float(fs.spike_part.max()),
    }
    if args.state in ses.verified_states():
        vr = ses.verify(args.state)
        summary.update({"e0": vr.e0, "energy_gap": vr.energy_gap, "amplitude_overlap": vr.amplitude_overlap})
    dump_json(summary, out / f"state{args.state:03d}_summary.json")
    print(json.dumps(summary, indent=1))
    return 0 if ses.exact()[1].converged else 1


def cmd_overlaps(args) -> int:
    names = [s.strip() for s in args.families.split(",")]
    if len(names) != 2 or any(n not in FAMILY_LABELS for n in names):
        raise ValueError(f"--families needs two of {', '.join(FAMILY_LABELS)}, got {args.families!r}")
    cfg = _config(args)
    ses = Session(cfg)
    om = ses.overlaps(*names)
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"overlaps_{names[0]}_{names[1]}"
    if "csv" in cfg.output.formats:
        (out / f"{stem}.csv").write_text(om.to_csv())
    if "json" in cfg.output.formats:
        (out / f"{stem}.json").write_text(om.to_json() + "\n")
    print(f"{'m':>4} {'argmax':>7} {'|S|max':>8} {'cluster':>8}")
    for row in om.summary():
        print(f"{row['row']:>4} {row['argmax']:>7} {row['max_abs']:>8.4f} {row['cluster_overlap']:>8.4f}")
    converged = ses.exact()[1].converged if "exact" in names else True
    for n in names:
        if n in DIABATIC_FAMILIES and n != "exact":
            converged &= ses.reference(n).converged
    return 0 if converged else 1


def cmd_check(args) -> int:
    cfg = _config(args)
    rep = run_pipeline(cfg)
    results = evaluate(rep if cfg.model.ndim == 1 else None, rep if cfg.model.ndim == 2 else None)
    print(format_results(results))
    return 0 if rep.converged and all(r.passed for r in results) else 1


COMMANDS = {
    "run": cmd_run,
    "spectrum": cmd_spectrum,
    "factorize": cmd_factorize,
    "overlaps": cmd_overlaps,
    "check": cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as exc:
        parser.error(str(exc))
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
