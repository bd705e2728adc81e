"""Experiment-runner CLI.

Subcommands: coupling-matrix, ber-sweep, optimize, selection-compare.
Parameter precedence is flags over config-file values over defaults; the
config file is INI-style with [array], [sim], and [search] sections.
Exit codes: 0 success, 2 validation failure, 3 numerical failure.

Distances are in wavelengths by default; pass --units meters together with
the carrier frequency (default 2 GHz) to convert.
"""

import argparse
import configparser
import csv
import os
import sys
from pathlib import Path

import numpy as np

from .channel import SubArrayStyle
from .coupling import (
    DEFAULT_ANTENNA_IMPEDANCE,
    DipoleArraySpec,
    SingularCouplingError,
    coupling_matrix,
)
from .modulation import ModulationScheme
from .optimizer import SearchSpec, optimal_antenna_count, write_trace_csv
from .simulator import (
    DEFAULT_TRIALS,
    SimConfig,
    simulate_ber,
    write_result_csv,
)

SPEED_OF_LIGHT = 299792458.0

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Invalid configuration; the message names the offending field."""


# ---------------------------------------------------------------- config


def _parse_complex(text: str, where: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"{where}: expected a complex number, got {text!r}") from None


def _parse_float_list(text: str, where: str) -> list[float]:
    try:
        values = [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{where}: list must be nonempty")
    return values


def _parse_int_list(text: str, where: str) -> list[int]:
    try:
        return [int(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated integers, got {text!r}") from None


class FileSettings:
    """Flat view over the INI config file with field-anchored errors."""

    def __init__(self, path: str | None):
        self.parser = configparser.ConfigParser()
        if path is not None:
            if not Path(path).is_file():
                raise ConfigError(f"config file not found: {path}")
            try:
                self.parser.read(path)
            except configparser.Error as exc:
                raise ConfigError(f"config file {path}: {exc}") from None

    def get(self, section: str, key: str):
        if self.parser.has_option(section, key):
            return self.parser.get(section, key)
        return None


def _pick(flag_value, settings: FileSettings, section: str, key: str, default):
    if flag_value is not None:
        return flag_value
    raw = settings.get(section, key)
    return raw if raw is not None else default


def _resolve_style(value, where="--style") -> SubArrayStyle:
    if isinstance(value, SubArrayStyle):
        return value
    try:
        return SubArrayStyle(str(value).strip().lower())
    except ValueError:
        raise ConfigError(f"{where}: expected contiguous or interleaved, got {value!r}") from None


def _to_wavelengths(value: float, units: str, frequency_ghz: float) -> float:
    if units == "wavelengths":
        return value
    wavelength_m = SPEED_OF_LIGHT / (frequency_ghz * 1e9)
    return value / wavelength_m


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get("STCM_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------- argparse


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="INI config file")
    sub.add_argument("--seed", type=int, help="master seed (default 0)")
    sub.add_argument("--trials", type=int, help=f"Monte-Carlo trials per SNR (default {DEFAULT_TRIALS})")
    sub.add_argument("--workers", type=int, default=1, help="parallel worker cap (default 1)")
    sub.add_argument("--out-dir", help="output directory (or $STCM_OUT_DIR)")
    sub.add_argument("--no-coupling", action="store_true", help="disable the coupling matrix")
    sub.add_argument("--style", choices=["contiguous", "interleaved"], help="sub-array selection style")
    sub.add_argument("--units", choices=["wavelengths", "meters"], default="wavelengths")
    sub.add_argument("--frequency-ghz", type=float, help="carrier frequency for meter conversion (default 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stcm-mimo",
        description="Space-time coded massive MIMO downlink simulator with dipole-array mutual coupling",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("coupling-matrix", help="write the coupling matrix C as CSV")
    p.add_argument("--elements", type=int, help="array size M (even)")
    p.add_argument("--spacing", type=float, help="element spacing")
    p.add_argument("--length", type=float, help="dipole length (default 0.5 wavelengths)")
    p.add_argument("--z-a", help="antenna impedance, e.g. 73+42j")
    p.add_argument("--z-l", help="load impedance, or 'conj' for the matched load")
    p.add_argument("--out", help="output CSV (default coupling_matrix.csv in out-dir)")
    _add_common(p)

    p = subs.add_parser("ber-sweep", help="BER curves over an SNR / spacing / element-count sweep")
    p.add_argument("--sweep", choices=["snr", "spacing", "elements"], default="snr")
    p.add_argument("--elements", type=int, help="array size M (even)")
    p.add_argument("--spacing", type=float, help="element spacing")
    p.add_argument("--total-length", type=float, help="fixed aperture; spacing becomes total/M")
    p.add_argument("--spacing-list", help="comma-separated spacings (sweep=spacing)")
    p.add_argument("--m-list", help="comma-separated element counts (sweep=elements)")
    p.add_argument("--snr-list", help="comma-separated SNR values in dB")
    p.add_argument("--modulation", help="qpsk (default), Npsk, or Nqam")
    p.add_argument("--users", type=int, help="number of users K (default 1)")
    p.add_argument("--plot-script", action="store_true", help="also emit a gnuplot script")
    _add_common(p)

    p = subs.add_parser("optimize", help="search the optimal antenna count for a fixed aperture")
    p.add_argument("--interval", help="search interval, e.g. 50,250")
    p.add_argument("--step", type=int, help="initial sweep step")
    p.add_argument("--total-length", type=float, help="array aperture")
    p.add_argument("--snr-list", help="objective SNR values in dB (default 10)")
    p.add_argument("--modulation", help="qpsk (default), Npsk, or Nqam")
    p.add_argument("--users", type=int)
    _add_common(p)

    p = subs.add_parser("selection-compare", help="contiguous vs interleaved selection at one seed")
    p.add_argument("--elements", type=int, help="array size M (even)")
    p.add_argument("--spacing", type=float, help="element spacing")
    p.add_argument("--snr-list", help="comma-separated SNR values in dB")
    p.add_argument("--modulation", help="qpsk (default), Npsk, or Nqam")
    p.add_argument("--users", type=int)
    _add_common(p)

    return parser


# ---------------------------------------------------------------- resolution


def _resolve_array(args, settings: FileSettings, need_spacing=True) -> DipoleArraySpec:
    elements = _pick(getattr(args, "elements", None), settings, "array", "elements", None)
    if elements is None:
        raise ConfigError("[array] elements / --elements is required")
    spacing = _pick(getattr(args, "spacing", None), settings, "array", "spacing", None)
    if spacing is None:
        if need_spacing:
            raise ConfigError("[array] spacing / --spacing is required")
        spacing = 1.0  # placeholder; aperture-derived sweeps replace it per candidate
    length = _pick(getattr(args, "length", None), settings, "array", "dipole_length", 0.5)
    z_a = _pick(getattr(args, "z_a", None), settings, "array", "antenna_impedance", None)
    z_l = _pick(getattr(args, "z_l", None), settings, "array", "load_impedance", "conj")
    antenna = (
        _parse_complex(str(z_a), "[array] antenna_impedance")
        if z_a is not None
        else DEFAULT_ANTENNA_IMPEDANCE
    )
    load = (
        np.conj(antenna)
        if str(z_l).strip().lower() in ("conj", "matched")
        else _parse_complex(str(z_l), "[array] load_impedance")
    )
    freq = float(_pick(args.frequency_ghz, settings, "array", "carrier_frequency_ghz", 2.0))
    try:
        return DipoleArraySpec(
            element_count=int(elements),
            spacing=_to_wavelengths(float(spacing), args.units, freq),
            dipole_length=float(length),
            antenna_impedance=complex(antenna),
            load_impedance=complex(load),
        )
    except ValueError as exc:
        raise ConfigError(f"[array]: {exc}") from None


def _resolve_sim_knobs(args, settings: FileSettings):
    snr_raw = _pick(getattr(args, "snr_list", None), settings, "sim", "snr_db", "0,5,10,15,20")
    snr = _parse_float_list(snr_raw, "[sim] snr_db")
    trials = int(_pick(args.trials, settings, "sim", "trials", DEFAULT_TRIALS))
    users = int(_pick(getattr(args, "users", None), settings, "sim", "users", 1))
    seed = int(_pick(args.seed, settings, "sim", "seed", 0))
    style = _resolve_style(_pick(args.style, settings, "sim", "style", "contiguous"))
    coupling = not args.no_coupling
    if args.no_coupling is False:
        file_coupling = settings.get("sim", "coupling")
        if file_coupling is not None:
            coupling = str(file_coupling).strip().lower() in ("1", "on", "true", "yes")
    mod = _pick(getattr(args, "modulation", None), settings, "sim", "modulation", "qpsk")
    try:
        scheme = ModulationScheme.from_name(str(mod))
    except ValueError as exc:
        raise ConfigError(f"[sim] modulation: {exc}") from None
    return snr, trials, users, seed, style, coupling, scheme


# ---------------------------------------------------------------- commands


def cmd_coupling_matrix(args) -> int:
    settings = FileSettings(args.config)
    spec = _resolve_array(args, settings)
    cm = coupling_matrix(spec)
    out = Path(args.out) if args.out else _out_dir(args) / "coupling_matrix.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["m", "n", "re", "im"])
        for m in range(cm.size):
            for n in range(cm.size):
                entry = complex(cm.entries[m, n])
                writer.writerow([m, n, repr(entry.real), repr(entry.imag)])
    print(f"condition estimate of (Z + Z_L I): {cm.condition:.6e}")
    print(f"wrote {out}")
    return EXIT_OK


def _sweep_points(args, settings, spec_template, snr):
    """(sweep_value, DipoleArraySpec) pairs for the requested axis."""
    if args.sweep == "snr":
        return [(None, spec_template)]
    if args.sweep == "spacing":
        raw = _pick(args.spacing_list, settings, "sim", "spacing_list", None)
        if raw is None:
            raise ConfigError("--spacing-list is required for sweep=spacing")
        values = _parse_float_list(raw, "--spacing-list")
        return [
            (
                d,
                DipoleArraySpec(
                    spec_template.element_count,
                    d,
                    spec_template.dipole_length,
                    spec_template.antenna_impedance,
                    spec_template.load_impedance,
                ),
            )
            for d in values
        ]
    raw = _pick(args.m_list, settings, "sim", "m_list", None)
    if raw is None:
        raise ConfigError("--m-list is required for sweep=elements")
    counts = _parse_int_list(raw, "--m-list")
    total_length = _pick(args.total_length, settings, "array", "total_length", None)
    specs = []
    for m in counts:
        if total_length is not None:
            d = float(total_length) / m
        elif args.spacing is not None or settings.get("array", "spacing") is not None:
            d = spec_template.spacing
        else:
            raise ConfigError("sweep=elements needs --total-length or --spacing")
        try:
            specs.append(
                (
                    m,
                    DipoleArraySpec(
                        m,
                        d,
                        spec_template.dipole_length,
                        spec_template.antenna_impedance,
                        spec_template.load_impedance,
                    ),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"--m-list: {exc}") from None
    return specs


def cmd_ber_sweep(args) -> int:
    settings = FileSettings(args.config)
    snr, trials, users, seed, style, coupling, scheme = _resolve_sim_knobs(args, settings)
    need_spacing = args.sweep != "elements" or (
        args.total_length is None and settings.get("array", "total_length") is None
    )
    spec_template = _resolve_array(args, settings, need_spacing=need_spacing)
    out_dir = _out_dir(args)

    combined_rows = []
    for sweep_value, spec in _sweep_points(args, settings, spec_template, snr):
        config = SimConfig(
            array=spec,
            snr_db_list=snr,
            coupling_enabled=coupling,
            style=style,
            scheme=scheme,
            n_trials=trials,
            n_users=users,
            master_seed=seed,
        )
        result = simulate_ber(config, workers=args.workers)
        tag = "snr" if sweep_value is None else f"{args.sweep}_{sweep_value:g}"
        write_result_csv(result, out_dir / f"ber_{tag}.csv")
        for p in result.points:
            value = p.snr_db if sweep_value is None else sweep_value
            combined_rows.append([value, p.snr_db, p.ber, p.ci_low, p.ci_high])

    combined = out_dir / "sweep.csv"
    with open(combined, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sweep_value", "snr_db", "ber", "ci_low", "ci_high"])
        for row in combined_rows:
            writer.writerow([repr(float(row[0]))] + [repr(float(v)) for v in row[1:]])
    print(f"wrote {combined}")
    if args.plot_script:
        _write_plot_script(out_dir, combined)
    return EXIT_OK


def _write_plot_script(out_dir: Path, combined: Path):
    script = out_dir / "plot_sweep.gp"
    script.write_text(
        "set datafile separator ','\n"
        "set logscale y\n"
        "set xlabel 'SNR (dB)'\n"
        "set ylabel 'BER'\n"
        f"plot '{combined.name}' using 2:3 with linespoints notitle\n",
        encoding="utf-8",
    )
    print(f"wrote {script}")


def cmd_optimize(args) -> int:
    settings = FileSettings(args.config)
    interval_raw = _pick(args.interval, settings, "search", "interval", None)
    if interval_raw is None:
        raise ConfigError("[search] interval / --interval is required")
    interval = _parse_int_list(str(interval_raw), "[search] interval")
    if len(interval) != 2:
        raise ConfigError("[search] interval: expected two integers, e.g. 50,250")
    step = _pick(args.step, settings, "search", "step", None)
    if step is None:
        raise ConfigError("[search] step / --step is required")
    total_length = _pick(args.total_length, settings, "search", "total_length", None)
    if total_length is None:
        raise ConfigError("[search] total_length / --total-length is required")
    snr_raw = _pick(args.snr_list, settings, "search", "snr_db", "10")
    _, trials, users, seed, style, coupling, scheme = _resolve_sim_knobs(args, settings)
    freq = float(_pick(args.frequency_ghz, settings, "array", "carrier_frequency_ghz", 2.0))

    try:
        spec = SearchSpec(
            interval=(int(interval[0]), int(interval[1])),
            step=int(step),
            total_length=_to_wavelengths(float(total_length), args.units, freq),
            snr_db_list=_parse_float_list(snr_raw, "[search] snr_db"),
            n_trials=trials,
            n_users=users,
            master_seed=seed,
            coupling_enabled=coupling,
            style=style,
            scheme=scheme,
        )
    except ValueError as exc:
        raise ConfigError(f"[search]: {exc}") from None

    optimum, trace = optimal_antenna_count(spec, workers=args.workers)
    out = _out_dir(args) / "optimize_trace.csv"
    write_trace_csv(trace, out)
    print(f"optimal antenna count: {optimum}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_selection_compare(args) -> int:
    settings = FileSettings(args.config)
    snr, trials, users, seed, _, coupling, scheme = _resolve_sim_knobs(args, settings)
    spec = _resolve_array(args, settings)
    results = {}
    for style in (SubArrayStyle.CONTIGUOUS, SubArrayStyle.INTERLEAVED):
        config = SimConfig(
            array=spec,
            snr_db_list=snr,
            coupling_enabled=coupling,
            style=style,
            scheme=scheme,
            n_trials=trials,
            n_users=users,
            master_seed=seed,
        )
        results[style] = simulate_ber(config, workers=args.workers)

    out = _out_dir(args) / "selection_compare.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "snr_db",
                "ber_style1",
                "ber_style2",
                "ci_low_style1",
                "ci_high_style1",
                "ci_low_style2",
                "ci_high_style2",
            ]
        )
        for p1, p2 in zip(
            results[SubArrayStyle.CONTIGUOUS].points,
            results[SubArrayStyle.INTERLEAVED].points,
        ):
            writer.writerow(
                [
                    repr(p1.snr_db),
                    repr(p1.ber),
                    repr(p2.ber),
                    repr(p1.ci_low),
                    repr(p1.ci_high),
                    repr(p2.ci_low),
                    repr(p2.ci_high),
                ]
            )
    print(f"wrote {out}")
    return EXIT_OK


_COMMANDS = {
    "coupling-matrix": cmd_coupling_matrix,
    "ber-sweep": cmd_ber_sweep,
    "optimize": cmd_optimize,
    "selection-compare": cmd_selection_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SingularCouplingError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
