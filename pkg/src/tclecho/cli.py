"""
Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bath_builder, exact_engine, fileio, hetero_engine, spin_model, tcl_engine
from .errors import ConfigError, TCLEchoError
from .fitting import fit_stretched_exp

log = logging.getLogger("tclecho")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _vector(text):
    try:
        return fileio._parse_vector(text)
    except (ConfigError, ValueError):
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tclecho", description="Hahn-echo decoherence from nuclear spin pairs.")
    p.add_argument("--config", type=Path, help="INI config file")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def spin_inputs(sp):
        sp.add_argument("--geometry", type=Path, help="XYZ file")
        sp.add_argument("--hyperfine", type=Path, help="hyperfine CSV (index,isotope,azz,azz_unit)")
        sp.add_argument("--spins", type=Path, help="spin CSV instead of geometry + hyperfine")
        sp.add_argument("--bath", type=Path, help="extra spin CSV (e.g. from the bath command)")
        sp.add_argument("--B0", type=float, help="field in tesla")

    def grid(sp):
        sp.add_argument("--horizon-us", type=float, help="last pulse delay in microseconds")
        sp.add_argument("--points", type=int)

    sp = sub.add_parser("pairs", help="pair parameter table")
    spin_inputs(sp)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("echo", help="TCL2/TCL4 echo envelope")
    spin_inputs(sp)
    grid(sp)
    sp.add_argument("--order", choices=["tcl2", "tcl4"], type=str.lower)
    sp.add_argument("--include-hetero", action="store_true", default=None)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("exact", help="dense-propagation echo for small systems")
    spin_inputs(sp)
    grid(sp)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("fidelity-sweep", help="exact vs TCL fidelity over alpha^2")
    sp.add_argument("--grid", type=int, default=25)
    sp.add_argument("--branch", choices=["below", "above", "both"], default="both")
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("hetero", help="heteronuclear pair contributions")
    sp.add_argument("--isotopes", default="2D,63Cu,55Mn,51V")
    sp.add_argument("--B0", type=float, default=0.35)
    sp.add_argument("--r", type=float, default=3.0, help="distance in angstrom")
    sp.add_argument("--theta-deg", type=float, default=0.0)
    sp.add_argument("--delta", type=float, default=1e5, help="hyperfine of the heavy nucleus, rad/s")
    sp.add_argument("--horizon-us", type=float, default=100.0)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("bath", help="random solvent proton bath")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--edge", type=float)
    sp.add_argument("--fraction", type=float, help="residual proton fraction")
    sp.add_argument("--boost", type=float, help="counter-ion boost factor")
    sp.add_argument("--exclusion", type=float, help="exclusion radius in angstrom")
    sp.add_argument("--electron", type=_vector, help="electron position x,y,z in angstrom")
    sp.add_argument("--start-id", type=int, default=1000)
    sp.add_argument("--out", type=Path)

    sp = sub.add_parser("fit", help="stretched-exponential fit of a series CSV")
    sp.add_argument("--series", type=Path, required=True)
    sp.add_argument("--out", type=Path)
    return p


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        fileio.atomic_write(out, text)


def _field(args, cfg):
    if getattr(args, "B0", None) is not None:
        return spin_model.FieldConfig(B0=args.B0, gamma_e=cfg.field.gamma_e)
    return cfg.field


def _load_spins(args, cfg):
    spins_path = getattr(args, "spins", None)
    geometry = args.geometry or cfg.geometry
    hyperfine = args.hyperfine or cfg.hyperfine
    if spins_path is not None:
        spins = fileio.read_spins_csv(spins_path)
    elif geometry is not None and hyperfine is not None:
        spins = fileio.parse_hyperfine_csv(hyperfine, fileio.parse_xyz(geometry))
    else:
        raise UsageError("need --spins or both --geometry and --hyperfine")
    bath = args.bath or cfg.bath
    if bath is not None:
        extra = fileio.read_spins_csv(bath)
        taken = {s.id for s in spins}
        if taken & {s.id for s in extra}:
            offset = max(taken) + 1 - min(s.id for s in extra)
            extra = [replace(s, id=s.id + offset) for s in extra]
        spins = spins + extra
    return spins


def _protocol(args, cfg):
    horizon = args.horizon_us if args.horizon_us is not None else cfg.horizon_us
    points = args.points if args.points is not None else cfg.points
    replace(cfg, horizon_us=horizon, points=points).validate()
    return tcl_engine.EchoProtocol.linspace(horizon * 1e-6, points)


def cmd_pairs(args, cfg):
    pairs = spin_model.build_pairs(_load_spins(args, cfg))
    _emit(fileio.pairs_text(pairs), args.out)


def cmd_echo(args, cfg):
    spins = _load_spins(args, cfg)
    protocol = _protocol(args, cfg)
    order = (args.order or cfg.order).upper()
    include_hetero = cfg.include_hetero if args.include_hetero is None else args.include_hetero
    pid, delta, b = spin_model.pair_arrays(spins)
    extra = None
    if include_hetero:
        hetero = spin_model.heteronuclear_pairs(spins)
        extra = hetero_engine.hetero_exponent(hetero, _field(args, cfg), protocol.times)
    series = tcl_engine.echo_envelope((delta, b), protocol, order, extra_w=extra)
    log.info("%d homonuclear pairs, order %s", len(delta), order)
    _emit(fileio.series_text(series), args.out or cfg.output)


def cmd_exact(args, cfg):
    spins = _load_spins(args, cfg)
    protocol = _protocol(args, cfg)
    system = exact_engine.SpinSystem.from_spins(spins, _field(args, cfg))
    series = exact_engine.exact_series(system, protocol)
    _emit(fileio.series_text(series), args.out or cfg.output)


def cmd_fidelity_sweep(args, cfg):
    if args.grid < 1:
        raise UsageError("--grid must be >= 1")
    alpha = np.arange(1, args.grid + 1) / args.grid
    points = exact_engine.fidelity_sweep(alpha, args.branch)
    header = ["branch", "alpha_sq", "delta", "b", "F_tcl2_half", "F_tcl4_half", "F_tcl2_revival", "F_tcl4_revival"]
    rows = [
        [p.branch, repr(p.alpha_sq), repr(p.delta), repr(float(p.b)), repr(p.fid_tcl2_half),
         repr(p.fid_tcl4_half), repr(p.fid_tcl2_revival), repr(p.fid_tcl4_revival)]
        for p in points
    ]
    _emit(fileio.table_text(header, rows), args.out)


def cmd_hetero(args, cfg):
    isotopes = [s for s in args.isotopes.split(",") if s.strip()]
    params = hetero_engine.HeteroTableParams(
        B0=args.B0, r=args.r, theta=np.deg2rad(args.theta_deg), A_hetero=args.delta, horizon=args.horizon_us * 1e-6
    )
    rows = hetero_engine.table1_report(isotopes, params)
    out = [[r.isotope, r.spin_I, f"{r.max_w:.6e}", f"1e{r.exponent}"] for r in rows]
    _emit(fileio.table_text(["isotope", "spin_I", "max_W", "order"], out), args.out)


def cmd_bath(args, cfg):
    bc = cfg.bath_config
    overrides = {
        "seed": args.seed,
        "edge": args.edge,
        "protonation_fraction": args.fraction,
        "counter_ion_boost": args.boost,
        "exclusion_radius": args.exclusion,
    }
    bc = replace(bc, **{k: v for k, v in overrides.items() if v is not None})
    electron = args.electron or cfg.electron_position
    spins = bath_builder.generate_bath(bc, electron, start_id=args.start_id, gamma_e=cfg.field.gamma_e)
    log.info("generated %d bath protons (seed %d)", len(spins), bc.seed)
    _emit(fileio.spins_text(spins), args.out or cfg.output)


def cmd_fit(args, cfg):
    result = fit_stretched_exp(fileio.read_series_csv(args.series))
    _emit(result.as_text(), args.out)


COMMANDS = {
    "pairs": cmd_pairs,
    "echo": cmd_echo,
    "exact": cmd_exact,
    "fidelity-sweep": cmd_fidelity_sweep,
    "hetero": cmd_hetero,
    "bath": cmd_bath,
    "fit": cmd_fit,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = fileio.load_config(args.config)
        COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"tclecho: error: {exc}", file=sys.stderr)
        return 1
    except (TCLEchoError, OSError) as exc:
        print(f"tclecho: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
