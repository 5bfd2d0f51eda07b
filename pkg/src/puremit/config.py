"""Experiment configuration files.

Plain ``key = value`` lines with ``#`` comments. Noise models use dotted
keys (``noise.kind``, ``machinery_noise.strength``, ``dual_noise.kind``).
``shots`` is a positive integer or the word ``exact``. Parsing and
serialization round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channels import NO_NOISE, NOISE_KINDS, NoiseModel
from .observables import ObservableFormatError, parse_observable
from .resources import SCHEME_KINDS


class ConfigError(ValueError):
    """Malformed configuration; message names the offending line or key."""


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str
    circuit: str
    observable: str
    m: int = 2
    shots: int | None = None  # None means exact evaluation
    trials: int = 1
    seed: int = 0
    noise: NoiseModel = NO_NOISE
    machinery_noise: NoiseModel = NO_NOISE
    dual_noise: NoiseModel | None = None
    output: str | None = None

    def __post_init__(self):
        if self.scheme not in SCHEME_KINDS:
            raise ConfigError(
                f"unknown scheme {self.scheme!r}; choose from {SCHEME_KINDS}"
            )
        if self.m < 1:
            raise ConfigError(f"M must be >= 1, got {self.m}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        try:
            parse_observable(self.observable)
        except ObservableFormatError as exc:
            raise ConfigError(f"field 'observable': {exc}") from None


_REQUIRED = ("scheme", "circuit", "observable")
_KNOWN = {
    "scheme",
    "circuit",
    "observable",
    "m",
    "shots",
    "trials",
    "seed",
    "output",
    "noise.kind",
    "noise.strength",
    "machinery_noise.kind",
    "machinery_noise.strength",
    "dual_noise.kind",
    "dual_noise.strength",
}


def _to_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"field {key!r}: {value!r} is not an integer") from None


def _to_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"field {key!r}: {value!r} is not a number") from None


def _noise_from(fields: dict, prefix: str, default: NoiseModel | None) -> NoiseModel | None:
    kind = fields.get(f"{prefix}.kind")
    strength = fields.get(f"{prefix}.strength")
    if kind is None and strength is None:
        return default
    if kind is None:
        raise ConfigError(f"field {prefix}.strength given without {prefix}.kind")
    if kind not in NOISE_KINDS:
        raise ConfigError(
            f"field {prefix}.kind: unknown noise kind {kind!r}; choose from {NOISE_KINDS}"
        )
    s = _to_float(f"{prefix}.strength", strength) if strength is not None else 0.0
    try:
        return NoiseModel(kind, s)
    except ValueError as exc:
        raise ConfigError(f"field {prefix}.strength: {exc}") from None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _KNOWN:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in fields:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for key {key!r}")
        fields[key] = value
    for key in _REQUIRED:
        if key not in fields:
            raise ConfigError(f"{source}: missing required key {key!r}")
    shots_text = fields.get("shots")
    if shots_text is None or shots_text.lower() == "exact":
        shots = None
    else:
        shots = _to_int("shots", shots_text)
    try:
        return ExperimentConfig(
            scheme=fields["scheme"],
            circuit=fields["circuit"],
            observable=fields["observable"],
            m=_to_int("m", fields.get("m", "2")),
            shots=shots,
            trials=_to_int("trials", fields.get("trials", "1")),
            seed=_to_int("seed", fields.get("seed", "0")),
            noise=_noise_from(fields, "noise", NO_NOISE),
            machinery_noise=_noise_from(fields, "machinery_noise", NO_NOISE),
            dual_noise=_noise_from(fields, "dual_noise", None),
            output=fields.get("output"),
        )
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def format_config(config: ExperimentConfig) -> str:
    lines = [
        f"scheme = {config.scheme}",
        f"circuit = {config.circuit}",
        f"observable = {config.observable}",
        f"m = {config.m}",
        f"shots = {'exact' if config.shots is None else config.shots}",
        f"trials = {config.trials}",
        f"seed = {config.seed}",
        f"noise.kind = {config.noise.kind}",
        f"noise.strength = {config.noise.strength!r}",
        f"machinery_noise.kind = {config.machinery_noise.kind}",
        f"machinery_noise.strength = {config.machinery_noise.strength!r}",
    ]
    if config.dual_noise is not None:
        lines.append(f"dual_noise.kind = {config.dual_noise.kind}")
        lines.append(f"dual_noise.strength = {config.dual_noise.strength!r}")
    if config.output is not None:
        lines.append(f"output = {config.output}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))
