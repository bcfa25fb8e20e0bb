"""Command-line entry point: ``kerrcat <command> [options]``.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure or inconclusive
verification, 4 verification failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import warnings

import numpy as np

from . import config as config_mod
from .errors import ConvergenceError, KerrCatError, TruncationWarning
from .gate import (
    gate_sweep,
    residual_infidelity,
    run_gate,
    write_gate_sweep_csv,
    write_residual_csv,
)
from .params import design_charging, rotating_frame_params
from .perturb import cat_amplitudes, find_null_bias, write_sweep_csv, zeta_values, zz_at_bias, zz_sweep
from .verify import run_verification

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class _ConfigArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _dims(text: str) -> tuple[int, int, int]:
    dims = tuple(int(x) for x in text.split(","))
    if len(dims) != 3:
        raise argparse.ArgumentTypeError("--dims needs three comma-separated integers")
    return dims


def _mode(text: str) -> str:
    return {"both": "both-tuned", "coupler-only": "coupler-only", "both-tuned": "both-tuned"}.get(text, text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (default: bundled reference design)")
    common.add_argument("--dims", type=_dims, help="Fock truncation d1,d2,dc")
    common.add_argument("--convergence-check", action="store_true", help="repeat at doubled dims and compare")
    common.add_argument("--jobs", type=int, default=int(os.environ.get("KERRCAT_JOBS", "1")))
    common.add_argument("--out", help="CSV output path (stdout when omitted)")
    common.add_argument("--echo-config", action="store_true", help="print the effective configuration as JSON")

    parser = _ConfigArgumentParser(prog="kerrcat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ConfigArgumentParser)

    sub.add_parser("derive", parents=[common], help="derived Hamiltonian parameters")
    p = sub.add_parser("verify", parents=[common], help="check against reference numbers")
    p.add_argument("--skip-dynamics", action="store_true", help="only the static checks")

    p = sub.add_parser("zz-sweep", parents=[common], help="zeta_ZZ versus coupler bias")
    p.add_argument("--range", type=_floats, default=[-0.01, 0.01], help="lo,hi in flux quanta")
    p.add_argument("--points", type=int, default=201)

    p = sub.add_parser("find-null", parents=[common], help="coupler bias with zeta_ZZ = 0")
    p.add_argument("--bracket", type=_floats, default=[0.0, 0.01])

    p = sub.add_parser("residual", parents=[common], help="idle infidelity at the null point")
    p.add_argument("--duration", type=float, default=100.0, help="ns")
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("gate", parents=[common], help="simulate one R_ZZ(-pi/2) gate")
    p.add_argument("--t-g", type=float, default=25.0, help="gate time, ns")
    p.add_argument("--mode", type=_mode, default="both-tuned", choices=["both-tuned", "coupler-only"])

    p = sub.add_parser("gate-sweep", parents=[common], help="gate infidelity versus t_g")
    p.add_argument("--t-gs", type=_floats, default=[15, 17.5, 20, 22.5, 25])
    p.add_argument("--mode", type=_mode, default="both-tuned", choices=["both-tuned", "coupler-only"])
    return parser


def _load_config(args) -> config_mod.RunConfig:
    cfg = config_mod.load(args.config) if args.config else config_mod.table1_config()
    if args.dims:
        cfg.dims = args.dims
        cfg.space
    if args.convergence_check:
        cfg.convergence_check = True
    return cfg


def _emit_csv(args, writer, payload):
    writer(args.out or sys.stdout, payload)


def cmd_derive(cfg, args, out=sys.stdout):
    d = cfg.design
    ec = design_charging(d)
    p = rotating_frame_params(d)
    rows = [
        ("E_1^C", ec[0, 0] * 1e3, "MHz"),
        ("E_2^C", ec[1, 1] * 1e3, "MHz"),
        ("E_c^C", ec[2, 2] * 1e3, "MHz"),
        ("E_12^C", ec[0, 1] * 1e3, "MHz"),
        ("E_1c^C", ec[0, 2] * 1e3, "MHz"),
        ("E_2c^C", ec[1, 2] * 1e3, "MHz"),
        ("K_j/2pi", p.kerr1 * 1e3, "MHz"),
        ("K_c/2pi", p.kerr_c * 1e3, "MHz"),
        ("omega_j/2pi", p.omega1, "GHz"),
        ("omega_c/2pi", p.omega_c, "GHz"),
        ("p_j/2pi", p.pump1 * 1e3, "MHz"),
        ("g_jc/2pi", p.g1c * 1e3, "MHz"),
        ("g_12/2pi", p.g12 * 1e6, "kHz"),
        ("Delta_j/2pi", p.delta1 * 1e6, "kHz"),
        ("Delta_c/2pi", p.delta_c, "GHz"),
        ("(Delta_j - g_jc^2/Delta_c)/2pi", p.residual_detuning(1) * 1e6, "kHz"),
    ]
    cat = cat_amplitudes(p)
    rows += [
        ("alpha_j", cat.alpha1, ""),
        ("alpha_c^+", cat.alpha_c_plus, ""),
        ("alpha_c^-", cat.alpha_c_minus, ""),
        ("zeta_ZZ/2pi", zeta_values(p).zeta_zz * 1e9, "Hz"),
    ]
    out.write("quantity,value,unit\n")
    for name, value, unit in rows:
        out.write(f"{name},{value:.16e},{unit}\n")
    return EXIT_OK


def cmd_verify(cfg, args, out=sys.stdout):
    report = run_verification(cfg, dynamics=not args.skip_dynamics)
    for check in report.checks:
        out.write(check.line() + "\n")
    if report.passed:
        out.write("overall: PASS\n")
        return EXIT_OK
    failed = any(c.status == "fail" for c in report.checks)
    out.write(f"overall: {'FAIL' if failed else 'INCONCLUSIVE'}\n")
    return EXIT_VERIFY if failed else EXIT_NUMERIC


def cmd_zz_sweep(cfg, args, out=sys.stdout):
    rows = zz_sweep(cfg.design, args.range, args.points, jobs=args.jobs)
    _emit_csv(args, write_sweep_csv, rows)
    out.write(f"# {len(rows)} points, |zeta_ZZ| min {np.abs(rows[:, 1]).min():.3e} Hz\n")
    return EXIT_OK


def cmd_find_null(cfg, args, out=sys.stdout):
    root = find_null_bias(cfg.design, tuple(args.bracket))
    out.write(f"phi_c_bias_over_2pi={root:.16e} zeta_zz_hz={zz_at_bias(cfg.design, root) * 1e9:.3e}\n")
    return EXIT_OK


def _shift_ok(a: float, b: float) -> bool:
    return abs(a - b) < 0.1 * abs(a)


def cmd_residual(cfg, args, out=sys.stdout):
    res = residual_infidelity(cfg.design, cfg.space, args.duration, args.samples, spec=cfg.propagation_spec())
    _emit_csv(args, write_residual_csv, res)
    out.write(f"# max_infidelity={res.max_infidelity:.6e} local_maxima={res.local_maxima()} norm_drift={res.norm_drift:.2e}\n")
    if cfg.convergence_check:
        big = residual_infidelity(cfg.design, cfg.space.enlarged(), args.duration, args.samples, spec=cfg.propagation_spec())
        out.write(f"# convergence dims={cfg.space.enlarged().dims} max_infidelity={big.max_infidelity:.6e}\n")
        if not _shift_ok(res.max_infidelity, big.max_infidelity):
            return EXIT_NUMERIC
    return EXIT_OK


def _gate_line(rep) -> str:
    return (
        f"t_g={rep.t_g:g} ns mode={rep.mode} infidelity={rep.infidelity:.6e} "
        f"theta={rep.theta_measured:.8f} rad global_phase={rep.global_phase:.6f} rad "
        f"offset_drift_hz_max={rep.offset_drift_hz_max:.3e} norm_drift={rep.norm_drift:.2e}"
    )


def cmd_gate(cfg, args, out=sys.stdout):
    rep = run_gate(cfg.design, cfg.space, args.t_g, args.mode, cfg.propagation_spec())
    out.write(_gate_line(rep) + "\n")
    if args.out:
        write_gate_sweep_csv(args.out, [rep])
    if cfg.convergence_check:
        big = run_gate(cfg.design, cfg.space.enlarged(), args.t_g, args.mode, cfg.propagation_spec())
        out.write("# convergence " + _gate_line(big) + "\n")
        if not _shift_ok(rep.infidelity, big.infidelity):
            return EXIT_NUMERIC
    return EXIT_OK


def cmd_gate_sweep(cfg, args, out=sys.stdout):
    reports = gate_sweep(cfg.design, cfg.space, args.t_gs, args.mode, cfg.propagation_spec(), jobs=args.jobs)
    _emit_csv(args, write_gate_sweep_csv, reports)
    best = min(reports, key=lambda r: r.infidelity)
    out.write(f"# best t_g={best.t_g:g} ns infidelity={best.infidelity:.6e}\n")
    return EXIT_OK


COMMANDS = {
    "derive": cmd_derive,
    "verify": cmd_verify,
    "zz-sweep": cmd_zz_sweep,
    "find-null": cmd_find_null,
    "residual": cmd_residual,
    "gate": cmd_gate,
    "gate-sweep": cmd_gate_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
    except (KerrCatError, ValueError, OSError) as exc:
        print(f"kerrcat: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.echo_config:
        print(config_mod.dumps(cfg), file=sys.stderr)
    # the summary line already reports truncation-sensitive quantities
    warnings.simplefilter("ignore", TruncationWarning)
    try:
        return COMMANDS[args.command](cfg, args, sys.stdout)
    except ConvergenceError as exc:
        print(f"kerrcat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KerrCatError as exc:
        print(f"kerrcat: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
