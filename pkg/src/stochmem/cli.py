"""Command-line front end.

Subcommands: simulate, ensemble, spectrum, hysteresis, sweep, oracle,
validate. Every experiment is described by a config file (see the config
module); --seed overrides the config's seed, --workers sizes the process
pool for ensemble work, --out picks the output directory.

Every CSV starts with `#`-prefixed sidecar lines echoing the exact
canonical config (seed override included) followed by derived result
metadata. Stripping the `#` prefixes from the config lines yields a file
the parser accepts, so each CSV carries its own replay recipe. Floats are
written with repr, the shortest digits that round-trip, and no output
contains wall-clock information, so reruns with the same seed are byte
identical whatever the worker count.

Exit codes: 0 success, 2 malformed config or command line, 3 validity-gate
failure, 4 runtime blow-up. The validity gate runs before any integration:
simulate needs the stationary mean to exist; ensemble, spectrum,
hysteresis and sweep also need the stationary variance, since their
statistics are meaningless without it. A violated drive-positivity bound
only warns; negative memductance is a regime, not an error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analysis import extract_loops
from .config import ConfigError, ExperimentConfig, parse_config
from .core import CorrelatedLinearModel, TimeDelayModel
from .ensemble import EnsembleError, run_ensemble
from .integrate import BlowUpError, integrate
from .noise import streams_for, uniform_angles
from .oracle import (
    DomainError,
    timedelay_parameters,
    g_infinity,
    asymptotic_variance,
    resonance_q,
    validate,
)
from .spectral import snr

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDITY = 3
EXIT_BLOWUP = 4


class ValidityError(RuntimeError):
    pass


def _default_workers() -> int:
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochmem",
        description="simulate and analyze stochastic memristive models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "simulate": (cmd_simulate, "integrate one realization and write t,G,V,I"),
        "ensemble": (cmd_ensemble, "pointwise ensemble statistics of G"),
        "spectrum": (cmd_spectrum, "ensemble-averaged current spectrum and drive-line SNR"),
        "hysteresis": (cmd_hysteresis, "per-period current-voltage loops and areas"),
        "sweep": (cmd_sweep, "SNR versus one swept parameter"),
        "oracle": (cmd_oracle, "closed-form stationary values for the config's model"),
        "validate": (cmd_validate, "report moment-existence and drive-bound checks"),
    }
    for name, (handler, help_text) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")
        p.add_argument(
            "--workers",
            type=int,
            default=_default_workers(),
            help="worker processes for ensemble work (default: machine parallelism)",
        )
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.set_defaults(handler=handler)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidityError as exc:
        print(f"validity error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except (BlowUpError, EnsembleError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


def _load(args) -> ExperimentConfig:
    cfg = parse_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
        cfg = cfg.with_seed(args.seed)
    return cfg


def _gate(cfg: ExperimentConfig, need_variance: bool) -> None:
    report = validate(cfg.model)
    problems = []
    if not report.mean_exists:
        problems.append("stationary mean does not exist")
    if need_variance and not report.variance_exists:
        problems.append("stationary variance does not exist")
    if problems:
        detail = "; ".join(report.messages)
        raise ValidityError("; ".join(problems) + (f" ({detail})" if detail else ""))
    if not report.nonneg_drive_ok:
        print(f"warning: {'; '.join(report.messages)}", file=sys.stderr)


def _require(cfg: ExperimentConfig, **fields) -> None:
    for name, value in fields.items():
        if value is None:
            raise ConfigError(f"run.{name} is required for this command")


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(
    out_dir: str,
    filename: str,
    command: str,
    cfg: ExperimentConfig,
    columns: list[str],
    rows,
    extra_meta: list[tuple[str, object]] = (),
) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / filename
    lines = [f"# stochmem {command}"]
    lines += [f"# {key} = {value}" for key, value in cfg.canonical_items()]
    lines += [f"# {key} = {_format_cell(value)}" for key, value in extra_meta]
    lines.append(",".join(columns))
    lines += [",".join(_format_cell(cell) for cell in row) for row in rows]
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def _single_trajectory(cfg: ExperimentConfig):
    """Realization 0 under the config, with its phase drawn exactly as the
    ensemble machinery would draw it."""
    stream_xi, stream_eta, stream_phase = streams_for(cfg.base_seed, 0)
    model = cfg.model
    if cfg.randomize_phase:
        phi = float(uniform_angles(stream_phase, 1)[0])
        model = replace(model, drive=replace(model.drive, phi=phi))
    return integrate(
        model,
        cfg.scheme,
        cfg.t_end,
        stream_xi,
        stream_eta,
        dt=cfg.dt,
        stride=cfg.stride,
        initial=cfg.initial,
    )


def cmd_simulate(args) -> int:
    cfg = _load(args)
    _require(cfg, t_end=cfg.t_end)
    _gate(cfg, need_variance=False)
    traj = _single_trajectory(cfg)
    t = traj.times()
    v = traj.drive_values()
    i = traj.current_values()
    rows = zip(t, traj.samples, v, i)
    target = _write_csv(
        args.out,
        "simulate.csv",
        "simulate",
        cfg,
        ["t", "G", "V", "I"],
        rows,
        extra_meta=[("result.phi", traj.model.drive.phi)],
    )
    print(target)
    return EXIT_OK


def cmd_ensemble(args) -> int:
    cfg = _load(args)
    _require(cfg, t_end=cfg.t_end, realizations=cfg.realizations)
    _gate(cfg, need_variance=True)
    result = run_ensemble(
        cfg.model,
        cfg.scheme,
        cfg.realizations,
        cfg.base_seed,
        t_end=cfg.t_end,
        dt=cfg.dt,
        stride=cfg.stride,
        workers=args.workers,
        randomize_phase=cfg.randomize_phase,
        initial=cfg.initial,
    )
    rows = zip(result.times, result.mean, result.variance, result.stderr)
    meta = [
        ("result.n_effective", result.n_effective),
        ("result.aborted", len(result.aborted)),
    ]
    target = _write_csv(
        args.out, "ensemble.csv", "ensemble", cfg, ["t", "mean_G", "var_G", "stderr"], rows, meta
    )
    print(target)
    return EXIT_OK


def _spectrum_pipeline(cfg: ExperimentConfig, model, workers: int):
    """Shared by spectrum and sweep: ensemble, averaged current PSD, SNR."""
    period = model.drive.period
    t_end = (cfg.transient_periods + cfg.record_periods) * period
    result = run_ensemble(
        model,
        cfg.scheme,
        cfg.realizations,
        cfg.base_seed,
        t_end=t_end,
        dt=cfg.dt,
        stride=cfg.stride,
        workers=workers,
        randomize_phase=cfg.randomize_phase,
        initial=cfg.initial,
        psd_window=(cfg.transient_periods, cfg.record_periods),
    )
    return result, snr(result.psd, model.drive.omega)


def cmd_spectrum(args) -> int:
    cfg = _load(args)
    _require(cfg, realizations=cfg.realizations)
    _gate(cfg, need_variance=True)
    result, line = _spectrum_pipeline(cfg, cfg.model, args.workers)
    meta = [
        ("result.snr_db", line.snr_db),
        ("result.peak_power", line.peak_power),
        ("result.background_power", line.background_power),
        ("result.peak_bin", line.peak_bin),
        ("result.background_is_zero", line.background_is_zero),
        ("result.window_clipped", line.window_clipped),
        ("result.n_effective", result.n_effective),
        ("result.aborted", len(result.aborted)),
    ]
    rows = zip(result.psd.freq, result.psd.power)
    target = _write_csv(args.out, "spectrum.csv", "spectrum", cfg, ["freq", "power"], rows, meta)
    print(target)
    return EXIT_OK


def cmd_hysteresis(args) -> int:
    cfg = _load(args)
    _require(cfg, t_end=cfg.t_end)
    _gate(cfg, need_variance=True)
    traj = _single_trajectory(cfg)
    if traj.whole_periods() <= cfg.transient_periods:
        raise ConfigError(
            f"run.t_end covers {traj.whole_periods()} whole periods; need more than "
            f"run.transient_periods = {cfg.transient_periods}"
        )
    loops = extract_loops(traj, start_period=cfg.transient_periods)
    loop_rows = []
    for loop in loops:
        for v, i in zip(loop.voltage, loop.current):
            loop_rows.append((loop.period_index, v, i))
    meta = [("result.phi", traj.model.drive.phi), ("result.periods", len(loops))]
    target = _write_csv(
        args.out, "hysteresis_loops.csv", "hysteresis", cfg, ["period", "V", "I"], loop_rows, meta
    )
    areas = _write_csv(
        args.out,
        "hysteresis_areas.csv",
        "hysteresis",
        cfg,
        ["period", "area"],
        [(loop.period_index, loop.area) for loop in loops],
        meta,
    )
    print(target)
    print(areas)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if cfg.sweep_parameter is None:
        raise ConfigError("sweep.parameter and sweep.values are required for sweep")
    _require(cfg, realizations=cfg.realizations)
    rows = []
    for value in cfg.sweep_values:
        model = cfg.model_for(cfg.sweep_parameter, value)
        variant = replace(cfg, model=model)
        _gate(variant, need_variance=True)
        result, line = _spectrum_pipeline(variant, model, args.workers)
        rows.append((value, line.snr_db, line.peak_power, line.background_power, len(result.aborted)))
    target = _write_csv(
        args.out,
        "sweep.csv",
        "sweep",
        cfg,
        [cfg.sweep_parameter, "snr_db", "peak_power", "background_power", "aborted"],
        rows,
    )
    print(target)
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = _load(args)
    model = cfg.model
    report = validate(model)
    g_inf = variance = q_star = None
    level = amplitude = delay = None
    if isinstance(model, TimeDelayModel):
        level, amplitude, delay = timedelay_parameters(model)
    elif isinstance(model, CorrelatedLinearModel):
        linear = TimeDelayModel(a=model.a, V0=model.V0, drive=model.drive)
        level, amplitude, delay = timedelay_parameters(linear)
        if report.mean_exists:
            g_inf = g_infinity(model)
        if report.variance_exists:
            variance = asymptotic_variance(model)
        try:
            q_star = resonance_q(model)
        except DomainError:
            q_star = None
    columns = [
        "g_infinity",
        "variance_D",
        "q_star",
        "mean_exists",
        "variance_exists",
        "nonneg_drive_ok",
        "asymptotic_level",
        "asymptotic_amplitude",
        "asymptotic_delay",
    ]
    row = (
        g_inf,
        variance,
        q_star,
        report.mean_exists,
        report.variance_exists,
        report.nonneg_drive_ok,
        level,
        amplitude,
        delay,
    )
    meta = [("result.message", m) for m in report.messages]
    target = _write_csv(args.out, "oracle.csv", "oracle", cfg, columns, [row], meta)
    print(target)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args)
    report = validate(cfg.model)
    print(f"family: {cfg.model.family}")
    print(f"mean_exists: {str(report.mean_exists).lower()}")
    print(f"variance_exists: {str(report.variance_exists).lower()}")
    print(f"nonneg_drive_ok: {str(report.nonneg_drive_ok).lower()}")
    for message in report.messages:
        print(f"note: {message}")
    return EXIT_OK if report.all_ok else EXIT_VALIDITY


if __name__ == "__main__":
    sys.exit(main())
