"""Command-line front end.

Exit codes: 0 success, 2 input or configuration error, 3 clock-loop divergence.
All user-facing quantities are in G, uK, Hz and s.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import shifts
from .allan import allan_deviation, octave_taus, write_allan_csv
from .clock import ClockDivergence, run_clock, sql_stability
from .config import ConfigError, RunConfig, load_config
from .species import derive_chi, derive_zeta, load_species, shift_per_density, species_to_toml

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGED = 3

DEFAULT_SCAN_ATOMS = (1e4, 1e5, 1e6, 1e7)


class InputError(Exception):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load(args) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
        if cfg.clock is not None:
            cfg.clock = cfg.clock.replace(seed=args.seed)
    return cfg


def _out_path(args, cfg: RunConfig) -> str | None:
    return args.out if args.out is not None else cfg.output


def _require_trap(cfg: RunConfig) -> shifts.TrapConfig:
    if cfg.trap is None:
        raise ConfigError(f"{cfg.source}: trap: section required for this command")
    return cfg.trap


def _require_atoms(cfg: RunConfig) -> int:
    if cfg.atom_count is None:
        raise ConfigError(f"{cfg.source}: ensemble.atom_count: required for this command")
    return cfg.atom_count


def cmd_scan_shifts(args) -> int:
    cfg = _load(args)
    trap = _require_trap(cfg)
    if args.n_points < 2:
        raise InputError("--n-points must be >= 2")
    if not 0 < args.t_min_uk < args.t_max_uk:
        raise InputError("need 0 < --t-min-uk < --t-max-uk")
    atoms = args.atoms or list(DEFAULT_SCAN_ATOMS)
    for N in atoms:
        if N < 1 or N != int(N):
            raise InputError(f"--atoms: {N!r} is not a positive integer")
    if args.linear:
        temps = np.linspace(args.t_min_uk, args.t_max_uk, args.n_points)
    else:
        temps = np.geomspace(args.t_min_uk, args.t_max_uk, args.n_points)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T_uK"] + [f"total_Hz_N{int(N)}" for N in atoms])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", shifts.ShiftModelWarning)
        for T in temps:
            row = [_fmt(T)]
            for N in atoms:
                b = shifts.total_shift(cfg.species, trap, shifts.Ensemble(int(N), T * 1e-6))
                row.append(_fmt(b.total_Hz))
            w.writerow(row)
    _emit(buf.getvalue(), _out_path(args, cfg))
    return EXIT_OK


def cmd_scan_field(args) -> int:
    cfg = _load(args)
    if args.n_points < 2:
        raise InputError("--n-points must be >= 2")
    if not 0 <= args.b_min_g < args.b_max_g:
        raise InputError("need 0 <= --b-min-g < --b-max-g")
    B = np.linspace(args.b_min_g, args.b_max_g, args.n_points)
    magic = shifts.zeeman_shift_at_field(cfg.species, B)
    standard = shifts.standard_zeeman_shift(cfg.species, B)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["B_G", "shift_magic_Hz", "shift_standard_Hz"])
    for row in zip(B, magic, standard):
        w.writerow([_fmt(v) for v in row])
    _emit(buf.getvalue(), _out_path(args, cfg))
    return EXIT_OK


def optimum_report(cfg: RunConfig, rel_n: float | None = None) -> list[tuple[str, float, str]]:
    trap = _require_trap(cfg)
    N = _require_atoms(cfg)
    rel = cfg.relative_atom_number_uncertainty if rel_n is None else rel_n
    sp = cfg.species
    T0 = shifts.zero_shift_temperature(sp, trap, N)
    b = shifts.total_shift(sp, trap, shifts.Ensemble(N, T0))
    size = shifts.rms_cloud_size(trap, T0, sp.mass)
    Tc = shifts.bec_critical_temperature(trap, N)
    return [
        ("T0", T0 * 1e6, "uK"),
        ("zeeman_shift", b.zeeman_Hz, "Hz"),
        ("collision_shift", b.collision_Hz, "Hz"),
        ("total_shift", b.total_Hz, "Hz"),
        ("mean_density", b.mean_density * 1e-6, "cm^-3"),
        ("rms_size_x", size.x * 1e6, "um"),
        ("rms_size_y", size.y * 1e6, "um"),
        ("rms_size_z", size.z * 1e6, "um"),
        ("rms_size_mean", size.geometric * 1e6, "um"),
        ("T_bec", Tc * 1e6, "uK"),
        ("T0_over_T_bec", T0 / Tc, "1"),
        ("relative_atom_number_uncertainty", rel, "1"),
        ("fractional_accuracy", shifts.accuracy_from_atom_number_control(sp, trap, N, rel), "1"),
    ]


def cmd_optimum(args) -> int:
    cfg = _load(args)
    if args.rel_n is not None and args.rel_n < 0:
        raise InputError("--rel-n must be >= 0")
    rows = optimum_report(cfg, args.rel_n)
    trap = cfg.trap
    print(f"species {cfg.species.name}, N = {cfg.atom_count}, "
          f"wbar/2pi = {trap.omega_bar / (2 * math.pi):.6g} Hz")
    for name, value, unit in rows:
        print(f"  {name:34s} {value:.6g} {'' if unit == '1' else unit}".rstrip())
    out = _out_path(args, cfg)
    if out is not None:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["quantity", "value", "unit"])
            for name, value, unit in rows:
                w.writerow([name, _fmt(value), unit])
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if cfg.clock is None:
        raise ConfigError(f"{cfg.source}: clockloop: section required for simulate")
    clock = cfg.clock
    if args.n_cycles is not None:
        if args.n_cycles < 1:
            raise InputError("--n-cycles must be >= 1")
        clock = clock.replace(n_cycles=args.n_cycles)
    run_out = _out_path(args, cfg) or "run.csv"
    allan_out = args.allan_out or str(Path(run_out).with_name(Path(run_out).stem + "_allan.csv"))
    try:
        rec = run_clock(clock)
    except ClockDivergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    taus = args.taus or cfg.taus or list(octave_taus(rec.steered.size, rec.tick))
    res = rec.allan(taus)
    rec.to_csv(run_out)
    res.to_csv(allan_out)
    parts = [f"duty_factor={rec.duty_factor:.4f}", f"reloads={rec.reload_count}",
             f"cycles={clock.n_cycles}"]
    # reference: projection-noise limit at the achieved cycle period and mean atom number
    period = rec.total_time / clock.n_cycles
    mean_atoms = float(rec.atom_count.mean())
    for tau, s in zip(res.taus, res.sigma_y):
        ref = ""
        if tau >= period:
            sql = sql_stability(clock.species.nu0_magic, clock.ramsey_time, period,
                                mean_atoms, tau, clock.squeezing_xi)
            ref = f" (sql {sql:.3e})"
        parts.append(f"sigma_y({tau:g} s)={s:.3e}{ref}")
    print(" ".join(parts))
    return EXIT_OK


def read_series(path: str) -> np.ndarray:
    """One numeric column, optional header line; errors name the offending line."""
    values = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 1:
                raise InputError(f"{path}:{lineno}: expected a single column, got {len(row)}")
            try:
                values.append(float(row[0]))
            except ValueError:
                if lineno == 1 and not values:
                    continue  # header
                raise InputError(f"{path}:{lineno}: not a number: {row[0]!r}") from None
    if len(values) < 3:
        raise InputError(f"{path}: need at least 3 samples, got {len(values)}")
    return np.array(values)


def cmd_allan(args) -> int:
    if not args.dt > 0:
        raise InputError("--dt must be > 0")
    y = read_series(args.input)
    taus = args.taus or list(octave_taus(y.size, args.dt))
    res = allan_deviation(y, args.dt, taus)
    buf = io.StringIO()
    write_allan_csv(buf, res)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_constants(args) -> int:
    if args.species_file is not None:
        sp = load_species(args.species_file)
    else:
        sp = _load(args).species
    text = species_to_toml(sp)
    text += (
        f"# derived: zeta = {derive_zeta(sp):.6g} Hz/uK^2, chi = {derive_chi(sp):.6g} Hz s^3 uK^1.5, "
        f"shift_per_density = {shift_per_density(sp):.6g} Hz cm^3\n"
    )
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="chipclock",
        description="Shift budget, operating point and servo-loop simulation of magic-field trapped-atom clocks.",
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp, seed=True):
        sp.add_argument("--config", metavar="PATH", help="TOML run configuration (default: packaged reference config)")
        if seed:
            sp.add_argument("--seed", type=int, help="RNG seed (integer), overrides the config file")
        sp.add_argument("--out", metavar="PATH", help="output file (default: stdout, or [output].path)")

    sp = sub.add_parser("scan-shifts", help="total shift vs temperature for several atom numbers (CSV)")
    common(sp)
    sp.add_argument("--t-min-uk", type=float, default=0.05, help="lowest temperature [uK] (default 0.05)")
    sp.add_argument("--t-max-uk", type=float, default=10.0, help="highest temperature [uK] (default 10)")
    sp.add_argument("--n-points", type=int, default=400, help="number of temperatures [count] (default 400)")
    sp.add_argument("--atoms", type=float, nargs="+", metavar="N",
                    help="atom numbers [count] (default 1e4 1e5 1e6 1e7)")
    sp.add_argument("--linear", action="store_true", help="linear instead of logarithmic temperature grid")
    sp.set_defaults(func=cmd_scan_shifts)

    sp = sub.add_parser("scan-field", help="magic and m_F=0 transition shifts vs field (CSV)")
    common(sp)
    sp.add_argument("--b-min-g", type=float, default=0.0, help="lowest field [G] (default 0)")
    sp.add_argument("--b-max-g", type=float, default=6.0, help="highest field [G] (default 6)")
    sp.add_argument("--n-points", type=int, default=6001, help="number of fields [count] (default 6001)")
    sp.set_defaults(func=cmd_scan_field)

    sp = sub.add_parser("optimum", help="zero-shift operating point report")
    common(sp)
    sp.add_argument("--rel-n", type=float, help="relative atom-number uncertainty dN/N [1] (default from config)")
    sp.set_defaults(func=cmd_optimum)

    sp = sub.add_parser("simulate", help="run the Ramsey servo loop, write run record and Allan CSVs")
    common(sp)
    sp.add_argument("--allan-out", metavar="PATH", help="Allan CSV path (default: <out stem>_allan.csv)")
    sp.add_argument("--taus", type=float, nargs="+", metavar="TAU", help="averaging times [s], multiples of the LO grid step")
    sp.add_argument("--n-cycles", type=int, help="number of clock cycles [count], overrides the config")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("allan", help="overlapping Allan deviation of a fractional-frequency column")
    sp.add_argument("input", metavar="CSV", help="single numeric column of fractional frequency [1], optional header")
    sp.add_argument("--dt", type=float, required=True, help="sample spacing [s]")
    sp.add_argument("--taus", type=float, nargs="+", metavar="TAU", help="averaging times [s] (default: octaves of dt)")
    sp.add_argument("--out", metavar="PATH", help="output CSV (default: stdout)")
    sp.set_defaults(func=cmd_allan)

    sp = sub.add_parser("constants", help="dump the species parameters as TOML")
    common(sp, seed=False)
    sp.add_argument("--species-file", metavar="PATH", help="species TOML file instead of the config's species")
    sp.set_defaults(func=cmd_constants)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InputError, ValueError, KeyError, TypeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
