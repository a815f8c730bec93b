"""Command-line entry point: ``ybofr <subcommand>``.

Exit codes: 0 success, 1 validation failure, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import units
from .angular.channels import enumerate_channels, parse_parity, parity_name
from .config import ConfigError, RunConfig, load_config
from .ofr import gate_plan, ofr_point
from .pipeline import delta_from_spec, levels, nearest_line, parse_block, s_wave_lines

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _fmt(x, digits: int) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "nan"
        return f"{x:.{digits}g}"
    return str(x)


def write_table(rows: list[dict], cfg: RunConfig, out, fmt: str, meta: dict | None = None) -> None:
    """CSV ('.' decimal, LF endings, '#' header lines with the resolved config) or JSON."""
    if fmt == "json":
        doc = {"config": cfg.echo(), "meta": meta or {}, "rows": rows}
        out.write(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
        return
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(cfg.echo(), sort_keys=True, default=str) + "\n")
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {v}\n")
    if rows:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([_fmt(v, cfg.float_digits) for v in r.values()])
    out.write(buf.getvalue())


def cmd_channels(args, cfg: RunConfig) -> int:
    block = enumerate_channels(args.T, parse_parity(args.parity), args.manifold)
    rows = []
    cc = block.case_c_channels if args.manifold == "excited" else [None] * len(block)
    for i, ch in enumerate(block.channels):
        row = {"index": i, "f1": str(ch.f1), "f2": str(ch.f2), "F": str(ch.F), "R": str(ch.R)}
        if args.manifold == "ground":
            row = {"index": i, "I": str(ch.F), "R": str(ch.R)}
        if cc[i] is not None:
            c = cc[i]
            row.update({"c_Omega": str(c.Omega), "c_sigma": c.sigma, "c_I": str(c.I), "c_iota": str(c.iota), "c_Phi": str(c.Phi)})
        rows.append(row)
    write_table(rows, cfg, args.out, args.format or cfg.output_format, {"T": args.T, "parity": args.parity, "n_channels": len(block)})
    return EXIT_OK


def _state_row(s, optics, intensity) -> dict:
    row = {
        "T": s.T,
        "parity": parity_name(s.parity),
        "E_b_MHz": s.E_b_mhz,
        "Gamma_M_kHz": s.Gamma_M_khz,
        "is_PLR": bool(s.is_PLR),
        "outer_turning_point_a0": s.outer_turning_point,
        "closed_weight": s.closed_weight,
        "converged": bool(s.converged),
    }
    if optics is not None:
        row["l_opt_a0"] = optics.l_opt(intensity)
        row["fcf_per_MHz"] = optics.fcf * units.mhz_to_au(1.0)
    for i, w in enumerate(s.channel_weights):
        row[f"w{i}"] = float(w)
    row["note"] = s.note
    return row


def _save_columns(path: Path, header: str, cols) -> None:
    np.savetxt(path, np.column_stack(cols), fmt="%.10e", header=header, comments="# ", newline="\n", encoding="utf-8")


def export_wavefunctions(directory: str, states, scat=None) -> list[Path]:
    """Plot-ready text columns: r_a0 then u_c(r) per case-(e) channel, one file per level."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for s in states:
        block = enumerate_channels(s.T, s.parity)
        labels = " ".join(f"u[{ch.f2},{ch.F},{ch.R}]" for ch in block.channels)
        path = out / f"bound_T{s.T}_{parity_name(s.parity)}_Eb{s.E_b_mhz:.4f}MHz.txt"
        _save_columns(path, f"E_b_MHz={s.E_b_mhz!r}\nr_a0 {labels}", [s.grid.r, *s.amplitudes])
        written.append(path)
    if scat is not None:
        path = out / f"ground_l{scat.l}_E{units.au_to_kelvin(scat.E_col) * 1e6:.4g}uK.txt"
        _save_columns(path, f"energy-normalized, delta_rad={scat.phase_shift!r}\nr_a0 u", [scat.r, scat.u])
        written.append(path)
    return written


def cmd_bound_states(args, cfg: RunConfig) -> int:
    if args.window:
        lo, hi = (float(x) for x in args.window.split(":"))
        cfg.search = type(cfg.search)(**{**cfg.search.__dict__, "window_mhz": (lo, hi)})
    blocks = parse_block(args.block)
    rows, found, scat = [], [], None
    for key in blocks:
        if key == (1, -1) and not args.no_optics:
            lines, scat, _ = s_wave_lines(cfg)
            rows += [_state_row(ln.state, ln.optics, cfg.intensity) for ln in lines]
            found += [ln.state for ln in lines]
        else:
            states = levels(cfg, key)
            rows += [_state_row(s, None, cfg.intensity) for s in states]
            found += states
    if args.wavefunctions:
        export_wavefunctions(args.wavefunctions, found, scat)
    meta = {"intensity_W_cm2": cfg.intensity, "E_col_uK": units.au_to_kelvin(cfg.collision_energy) * 1e6}
    write_table(rows, cfg, args.out, args.format or cfg.output_format, meta)
    return EXIT_OK


def _line(cfg, e_b_mhz):
    lines, _, _ = s_wave_lines(cfg)
    return nearest_line(lines, e_b_mhz, tol_mhz=max(5.0, 0.1 * e_b_mhz))


def cmd_scan(args, cfg: RunConfig) -> int:
    ln = _line(cfg, args.line)
    lo, hi, step = (float(x) for x in args.detuning_range.split(":"))
    if step <= 0 or hi < lo:
        raise ConfigError("detuning range must be lo:hi:step with step > 0 and hi >= lo")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    intensity = args.intensity if args.intensity is not None else cfg.intensity
    rows = []
    for i in range(n):
        d = units.mhz_to_au(lo + i * step)
        if d == 0:
            continue
        rows.append(ofr_point(ln.optics, intensity, d, cfg.density_cm3, cfg.gate_phase).row())
    meta = {"line_E_b_MHz": ln.state.E_b_mhz, "Gamma_M_kHz": ln.state.Gamma_M_khz}
    write_table(rows, cfg, args.out, args.format or cfg.output_format, meta)
    return EXIT_OK


def cmd_gate(args, cfg: RunConfig) -> int:
    ln = _line(cfg, args.line)
    delta = delta_from_spec(args.detuning, ln.optics.Gamma_M)
    density = args.density if args.density is not None else cfg.density_cm3
    plan = gate_plan(ln.optics, args.intensity, delta, density, cfg.gate_phase)
    doc = {"config": cfg.echo(), "gate": plan.as_dict(), "Gamma_M_kHz": ln.state.Gamma_M_khz, "l_opt_per_W_cm2_a0": ln.optics.l_opt_per_intensity}
    args.out.write(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig) -> int:
    from .validate import run_suite

    report = run_suite(args.suite, cfg)
    args.out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ybofr", description="Optical Feshbach resonances of 171Yb near the 1S0-3P1 line")
    ap.add_argument("--config", help="INI file overriding the shipped defaults")
    ap.add_argument("--output", help="output path (default stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channels", help="list the channels of a (T, parity) block")
    p.add_argument("--manifold", choices=("excited", "ground"), default="excited")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--parity", required=True)
    p.set_defaults(func=cmd_channels)

    p = sub.add_parser("bound-states", help="bound levels, linewidths and optical lengths")
    p.add_argument("--block", default="s", help="s, p, or T,parity")
    p.add_argument("--window", help="lo:hi in MHz, both <= 0")
    p.add_argument("--no-optics", action="store_true", help="skip ground calibration and l_opt")
    p.add_argument("--wavefunctions", metavar="DIR", help="also write r, u_1..u_n text columns per level")
    p.set_defaults(func=cmd_bound_states)

    p = sub.add_parser("scan", help="detuning scan of a_opt, b_opt, K, F at one line")
    p.add_argument("--line", type=float, required=True, help="binding energy of the line, MHz")
    p.add_argument("--intensity", type=float, help="W/cm^2")
    p.add_argument("--detuning-range", required=True, help="lo:hi:step in MHz")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("gate", help="sqrt(SWAP) gate design at one line")
    p.add_argument("--line", type=float, required=True, help="binding energy, MHz")
    p.add_argument("--intensity", type=float, help="W/cm^2; default sets Gamma_stim = |Delta|")
    p.add_argument("--detuning", required=True, help="MHz, or a multiple of Gamma_M such as -30G")
    p.add_argument("--density", type=float, help="cm^-3")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("validate", help="run the oracle suites")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.format:
            cfg.output_format = args.format
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                args.out = fh
                return args.func(args, cfg)
        args.out = sys.stdout
        return args.func(args, cfg)
    except (ConfigError, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
