"""Flat key-value experiment configs.

The format is line oriented: one `key = value` pair per line, `#` starts a
comment, blank lines are ignored. Keys are namespaced with the prefixes
model., run. and sweep.; unknown keys are rejected rather than ignored so
a typo cannot silently change an experiment.

model.family selects the model type and fixes which other model.* keys are
required. model.phi accepts a number or the word `random`, which asks
ensemble runs to draw one drive phase per realization.

Emitting a config and reparsing the emitted text reproduces the config
exactly; the command-line tools prepend the emitted lines, `#`-prefixed,
to every CSV they write, so any result file doubles as the recipe for its
own replay.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .core import (
    CorrelatedLinearModel,
    DoubleWellModel,
    DriveSignal,
    ModelSpec,
    MonostablePowerModel,
    TimeDelayModel,
)
from .integrate import DEFAULT_DT, Scheme

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "parse_config_text"]

_MODEL_KEYS = {
    "time_delay": ("a", "V0"),
    "double_well": ("sigma",),
    "correlated_linear": ("a", "V0", "p", "q", "c"),
    "monostable_power": ("a", "V0", "p", "q", "c", "n"),
}

_DRIVE_SWEEPABLE = ("V1", "omega")

_INT_RUN_KEYS = ("stride", "transient_periods", "record_periods", "realizations", "seed")
_FLOAT_RUN_KEYS = ("dt", "t_end", "initial")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Parsed experiment description.

    t_end and realizations stay None when the config omits them; commands
    that need them say so. randomize_phase mirrors model.phi = random, in
    which case the model itself carries phi = 0 as a placeholder.
    """

    model: ModelSpec
    scheme: Scheme
    dt: float
    stride: int
    t_end: float | None
    transient_periods: int
    record_periods: int
    realizations: int | None
    base_seed: int
    initial: float | None
    randomize_phase: bool
    sweep_parameter: str | None
    sweep_values: tuple[float, ...] | None

    def with_seed(self, base_seed: int) -> "ExperimentConfig":
        return replace(self, base_seed=base_seed)

    def sweepable_parameters(self) -> tuple[str, ...]:
        return _MODEL_KEYS[self.model.family] + _DRIVE_SWEEPABLE

    def model_for(self, parameter: str, value: float) -> ModelSpec:
        """The config's model with one swept parameter replaced."""
        if parameter not in self.sweepable_parameters():
            raise ConfigError(
                f"cannot sweep {parameter!r} for family {self.model.family}; "
                f"choices: {', '.join(self.sweepable_parameters())}"
            )
        try:
            if parameter in _DRIVE_SWEEPABLE:
                drive = replace(self.model.drive, **{parameter: value})
                return replace(self.model, drive=drive)
            if parameter == "n":
                n = int(value)
                if n != value:
                    raise ConfigError(f"sweep over n needs integer values, got {value!r}")
                return replace(self.model, n=n)
            return replace(self.model, **{parameter: value})
        except ValueError as exc:
            raise ConfigError(f"sweep value {parameter} = {value!r} rejected: {exc}") from exc

    def canonical_items(self) -> list[tuple[str, str]]:
        """Ordered key-value pairs whose text form reparses to this config."""
        model = self.model
        items: list[tuple[str, str]] = [("model.family", model.family)]
        for key in _MODEL_KEYS[model.family]:
            value = getattr(model, key)
            items.append((f"model.{key}", repr(float(value)) if key != "n" else str(value)))
        items.append(("model.V1", repr(model.drive.V1)))
        items.append(("model.omega", repr(model.drive.omega)))
        items.append(("model.phi", "random" if self.randomize_phase else repr(model.drive.phi)))
        items.append(("run.scheme", self.scheme.value))
        items.append(("run.dt", repr(self.dt)))
        items.append(("run.stride", str(self.stride)))
        if self.t_end is not None:
            items.append(("run.t_end", repr(self.t_end)))
        items.append(("run.transient_periods", str(self.transient_periods)))
        items.append(("run.record_periods", str(self.record_periods)))
        if self.realizations is not None:
            items.append(("run.realizations", str(self.realizations)))
        items.append(("run.seed", str(self.base_seed)))
        if self.initial is not None:
            items.append(("run.initial", repr(self.initial)))
        if self.sweep_parameter is not None:
            items.append(("sweep.parameter", self.sweep_parameter))
            items.append(("sweep.values", ", ".join(repr(v) for v in self.sweep_values)))
        return items

    def canonical_text(self) -> str:
        return "\n".join(f"{k} = {v}" for k, v in self.canonical_items()) + "\n"


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from exc


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from exc


def parse_config_text(text: str) -> ExperimentConfig:
    pairs: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw_line.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw_line.strip()!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return _build(pairs)


def parse_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config_text(text)


def _build(pairs: dict[str, str]) -> ExperimentConfig:
    taken = set()

    def take(key: str) -> str | None:
        taken.add(key)
        return pairs.get(key)

    family = take("model.family")
    if family is None:
        raise ConfigError("missing required key model.family")
    if family not in _MODEL_KEYS:
        raise ConfigError(
            f"model.family: unknown family {family!r}; "
            f"choices: {', '.join(_MODEL_KEYS)}"
        )

    v1_raw = take("model.V1")
    omega_raw = take("model.omega")
    if v1_raw is None or omega_raw is None:
        raise ConfigError("missing required keys model.V1 and model.omega")
    phi_raw = take("model.phi")
    randomize_phase = phi_raw is not None and phi_raw.lower() == "random"
    phi = 0.0 if phi_raw is None or randomize_phase else _parse_float("model.phi", phi_raw)
    try:
        drive = DriveSignal(
            V1=_parse_float("model.V1", v1_raw),
            omega=_parse_float("model.omega", omega_raw),
            phi=phi,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    params: dict[str, float | int] = {}
    for key in _MODEL_KEYS[family]:
        raw = take(f"model.{key}")
        if raw is None:
            raise ConfigError(f"missing required key model.{key} for family {family}")
        params[key] = _parse_int(f"model.{key}", raw) if key == "n" else _parse_float(f"model.{key}", raw)

    builders = {
        "time_delay": TimeDelayModel,
        "double_well": DoubleWellModel,
        "correlated_linear": CorrelatedLinearModel,
        "monostable_power": MonostablePowerModel,
    }
    try:
        model = builders[family](drive=drive, **params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    scheme_raw = take("run.scheme")
    try:
        scheme = Scheme.from_name(scheme_raw) if scheme_raw is not None else Scheme.HEUN_STRATONOVICH
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    dt_raw = take("run.dt")
    dt = _parse_float("run.dt", dt_raw) if dt_raw is not None else DEFAULT_DT
    if not dt > 0.0:
        raise ConfigError(f"run.dt must be > 0, got {dt}")
    stride_raw = take("run.stride")
    stride = _parse_int("run.stride", stride_raw) if stride_raw is not None else 1
    if stride < 1:
        raise ConfigError(f"run.stride must be >= 1, got {stride}")
    t_end_raw = take("run.t_end")
    t_end = _parse_float("run.t_end", t_end_raw) if t_end_raw is not None else None
    if t_end is not None and not t_end > 0.0:
        raise ConfigError(f"run.t_end must be > 0, got {t_end}")
    transient_raw = take("run.transient_periods")
    transient_periods = _parse_int("run.transient_periods", transient_raw) if transient_raw is not None else 20
    if transient_periods < 0:
        raise ConfigError(f"run.transient_periods must be >= 0, got {transient_periods}")
    record_raw = take("run.record_periods")
    record_periods = _parse_int("run.record_periods", record_raw) if record_raw is not None else 64
    if record_periods < 2:
        raise ConfigError(f"run.record_periods must be >= 2, got {record_periods}")
    realizations_raw = take("run.realizations")
    realizations = _parse_int("run.realizations", realizations_raw) if realizations_raw is not None else None
    if realizations is not None and realizations < 1:
        raise ConfigError(f"run.realizations must be >= 1, got {realizations}")
    seed_raw = take("run.seed")
    base_seed = _parse_int("run.seed", seed_raw) if seed_raw is not None else 0
    if not 0 <= base_seed < 2 ** 64:
        raise ConfigError(f"run.seed must be a 64-bit unsigned integer, got {base_seed}")
    initial_raw = take("run.initial")
    initial = _parse_float("run.initial", initial_raw) if initial_raw is not None else None

    sweep_parameter = take("sweep.parameter")
    sweep_values_raw = take("sweep.values")
    sweep_values: tuple[float, ...] | None = None
    if (sweep_parameter is None) != (sweep_values_raw is None):
        raise ConfigError("sweep.parameter and sweep.values must be given together")
    if sweep_values_raw is not None:
        parts = [p.strip() for p in sweep_values_raw.split(",") if p.strip()]
        if not parts:
            raise ConfigError("sweep.values: expected a comma-separated list of numbers")
        sweep_values = tuple(_parse_float("sweep.values", p) for p in parts)

    unknown = sorted(set(pairs) - taken)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    config = ExperimentConfig(
        model=model,
        scheme=scheme,
        dt=dt,
        stride=stride,
        t_end=t_end,
        transient_periods=transient_periods,
        record_periods=record_periods,
        realizations=realizations,
        base_seed=base_seed,
        initial=initial,
        randomize_phase=randomize_phase,
        sweep_parameter=sweep_parameter,
        sweep_values=sweep_values,
    )
    if sweep_parameter is not None:
        for value in sweep_values:
            config.model_for(sweep_parameter, value)  # reject bad grids up front
    return config
