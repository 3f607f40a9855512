"""Command line front end: ``twirlsim sweep | twirl | check``."""

from __future__ import annotations

import argparse
import logging
import math
import sys

from twirlsim import qlin
from twirlsim.channels import (
    CZErrorParams,
    DecoherenceParams,
    avg_gate_fidelity,
    decoherence_channel,
    markovian_tphi,
    nonideal_cz,
    split_gate_error,
)
from twirlsim.checks import run_checks
from twirlsim.protocol import SimMode
from twirlsim.report import emit_csv, emit_plot
from twirlsim.sweep import SweepConfig, load_config, parse_value, run_sweep
from twirlsim.twirl import cz_error_channel, pta_cz, pta_decoherence, twirl_numeric

_D = SweepConfig()


def _sweep_parser(sub):
    p = sub.add_parser("sweep", help="failure probability sweep, exact vs twirled models",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--config", metavar="PATH", help="key = value file of sweep settings")
    p.add_argument("--seed", type=int, help=f"master seed (default {_D.seed})")
    p.add_argument("--mode", action="append", choices=[m.value for m in SimMode],
                   help="simulation mode, repeatable (default exact and pta)")
    p.add_argument("--t2-ratio", type=float, help=f"T2/T1 (default {_D.t2_ratio})")
    p.add_argument("--phi", type=float, help=f"CZ phase angle in radians (default {_D.phi})")
    p.add_argument("--alpha", type=float, help=f"1/f noise exponent (default {_D.alpha})")
    p.add_argument("--t-step", type=float, help=f"step duration in seconds (default {_D.t_step})")
    p.add_argument("--p-steps", help="comma-separated p_step grid (default 13 points, 1e-4..1e-1)")
    p.add_argument("--gate-errors", help="comma-separated gate errors E (default 0,1e-4,1e-3,1e-2,0.1)")
    p.add_argument("--trials", type=int, help=f"Monte Carlo trials per point (default {_D.trials})")
    p.add_argument("--max-cycles", type=int, help=f"cycle cap per trial (default {_D.max_cycles})")
    p.add_argument("--prune", type=float, help=f"branch prune threshold (default {_D.prune})")
    p.add_argument("--no-wall-time", action="store_true",
                   help="write wall_s = 0 so output is byte-reproducible")
    p.add_argument("--out-csv", metavar="PATH", default="sweep.csv")
    p.add_argument("--out-svg", metavar="PATH", help="also render the sweep to SVG")
    p.set_defaults(func=cmd_sweep)


def _twirl_parser(sub):
    p = sub.add_parser("twirl", help="print twirled channels for given error parameters",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--t1", type=float, default=25e-6, help="T1 in seconds")
    p.add_argument("--t2", type=float, help="T2 in seconds (sets Tphi by the Markovian relation)")
    p.add_argument("--tphi", type=float, help="pure dephasing time in seconds (default: infinite)")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--t-step", type=float, default=25e-9)
    p.add_argument("--gate-error", type=float, help="total CZ error E, split equally")
    p.add_argument("--e1", type=float, default=0.0, help="CZ switching probability")
    p.add_argument("--delta", type=float, default=0.0, help="CZ controlled-phase error")
    p.add_argument("--phi", type=float, default=0.0)
    p.set_defaults(func=cmd_twirl)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twirlsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _sweep_parser(sub)
    _twirl_parser(sub)
    p = sub.add_parser("check", help="run the oracle and invariant checks")
    p.set_defaults(func=cmd_check)
    return parser


def sweep_config_from_args(args) -> SweepConfig:
    cfg = load_config(args.config) if args.config else SweepConfig()
    overrides = {
        "seed": args.seed, "t2_ratio": args.t2_ratio, "phi": args.phi, "alpha": args.alpha,
        "t_step": args.t_step, "trials": args.trials, "max_cycles": args.max_cycles,
        "prune": args.prune,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.p_steps:
        cfg.p_steps = parse_value("p_steps", args.p_steps)
    if args.gate_errors:
        cfg.gate_errors = parse_value("gate_errors", args.gate_errors)
    if args.mode:
        cfg.modes = [SimMode(m) for m in args.mode]
    if args.no_wall_time:
        cfg.record_wall_time = False
    return cfg


def cmd_sweep(args) -> int:
    cfg = sweep_config_from_args(args)
    res = run_sweep(cfg)
    emit_csv(res, args.out_csv)
    print(f"wrote {len(res)} rows to {args.out_csv}")
    if args.out_svg:
        emit_plot(res, args.out_svg)
        print(f"wrote {args.out_svg}")
    return 0


def _table(rows, header):
    print("  ".join(f"{h:>14}" for h in header))
    for row in rows:
        print("  ".join(f"{v:>14}" if isinstance(v, str) else f"{v:>14.6e}" for v in row))


def cmd_twirl(args) -> int:
    if args.t2 is not None:
        tphi = markovian_tphi(args.t1, args.t2)
    else:
        tphi = args.tphi if args.tphi is not None else math.inf
    dec = DecoherenceParams(T1=args.t1, t_step=args.t_step, Tphi=tphi, alpha=args.alpha)
    closed = pta_decoherence(dec)
    numeric = twirl_numeric(decoherence_channel(dec))
    print(f"decoherence per step: T1={dec.T1:g} s, Tphi={dec.Tphi:g} s, alpha={dec.alpha:g}, "
          f"t_step={dec.t_step:g} s, p_step={closed.error_probability():.6e}")
    _table([(a, closed[a], numeric[a]) for a in "IXYZ"], ["Pauli", "closed form", "twirl"])

    if args.gate_error is not None:
        cz = split_gate_error(args.gate_error, args.phi)
    else:
        cz = CZErrorParams(E1=args.e1, delta=args.delta, phi=args.phi)
    closed = pta_cz(cz)
    numeric = twirl_numeric(cz_error_channel(cz))
    fid = avg_gate_fidelity(nonideal_cz(cz), qlin.CZ)
    print()
    print(f"CZ error: E1={cz.E1:g}, delta={cz.delta:g}, phi={cz.phi:g}, gate error 1-F={1 - fid:.6e}")
    labels = [a for a in qlin.pauli_strings(2) if closed[a] > 0 or numeric[a] > 1e-15]
    _table([(a, closed[a], numeric[a]) for a in labels], ["Pauli", "closed form", "twirl"])
    return 0


def cmd_check(args) -> int:
    return 0 if run_checks() else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
