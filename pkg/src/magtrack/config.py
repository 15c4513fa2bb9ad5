"""Flat key-value configuration with env overrides.

The config file is plain text, one ``section.key = value`` per line,
``#`` lines are comments.  Every key has a documented default (see
DEFAULTS); unknown keys are rejected.  Environment variables override
file values using the prefix ``MAGTRACK_`` with dots mapped to
underscores (``MAGTRACK_RIG_BASELINE_D=12`` overrides
``rig.baseline_d``).  ``config_hash`` digests the canonical key=value
listing so output files can echo exactly which configuration produced
them.
"""
from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, replace

from .dsp import FilterSpec
from .errors import ConfigError, TrackingError
from .evaluation import GridSpec
from .field_model import RigConfig, Vec2, Vec3
from .pipeline import TrackingPipeline
from .signal_synth import NoiseModel, anchor_sources
from .solver import default_noise_floor

# key -> (default, kind); kind drives parsing and canonical formatting.
DEFAULTS = {
    "seed": (0, "int"),
    "deadzone_radius": (0.0, "float"),
    "rig.baseline_d": (10.0, "float"),
    "rig.f20": (20.0, "float"),
    "rig.f30": (30.0, "float"),
    "rig.sample_rate": (100.0, "float"),
    "rig.buffer_len": (50, "int"),
    "rig.min_valid_distance": (0.25, "float"),
    "rig.k20": (None, "optfloat"),
    "rig.k30": (None, "optfloat"),
    "noise.gaussian_sigma": (0.1, "float"),
    "noise.quantization_step": (0.6, "float"),
    "noise.dc_bias": ((20.0, -5.0, 43.0), "triple"),
    "noise.rng_seed": (0, "int"),
    "filter.low": (15.0, "float"),
    "filter.high": (35.0, "float"),
    "filter.order": (4, "int"),
    "grid.origin_x": (0.0, "float"),
    "grid.origin_y": (0.5, "float"),
    "grid.width": (10.0, "float"),
    "grid.height": (10.0, "float"),
    "grid.rows": (5, "int"),
    "grid.cols": (5, "int"),
    "solver.max_iterations": (5, "int"),
    "solver.tolerance": (1e-6, "float"),
    "solver.noise_floor": (None, "optfloat"),
    "sim.m_eff": (3000.0, "float"),
    "sim.phase20": (0.0, "float"),
    "sim.phase30": (math.pi / 3, "float"),
    "paths.input": ("", "str"),
    "paths.output": ("", "str"),
}

ENV_PREFIX = "MAGTRACK_"
# Environment names owned by other subsystems, not config keys.
ENV_RESERVED = {"MAGTRACK_KERNEL_BACKEND"}

_ENV_TO_KEY = {ENV_PREFIX + k.upper().replace(".", "_"): k for k in DEFAULTS}


def _parse_value(key: str, text: str):
    kind = DEFAULTS[key][1]
    text = text.strip()
    try:
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "optfloat":
            return None if text.lower() in ("", "none") else float(text)
        if kind == "triple":
            parts = [float(p) for p in text.split(",")]
            if len(parts) != 3:
                raise ValueError("expected three comma-separated numbers")
            return tuple(parts)
        return text
    except ValueError as e:
        raise ConfigError(f"invalid value for {key}: {text!r} ({e})") from None


def _format_value(key: str, value) -> str:
    kind = DEFAULTS[key][1]
    if kind == "optfloat":
        return "none" if value is None else repr(float(value))
    if kind == "float":
        return repr(float(value))
    if kind == "int":
        return str(int(value))
    if kind == "triple":
        return ",".join(repr(float(v)) for v in value)
    return str(value)


def parse_config_text(text: str) -> dict[str, object]:
    """Parse file contents into typed values; later lines win on repeats."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, val)
    return values


@dataclass(frozen=True)
class AppConfig:
    """Validated application configuration (built via load_config)."""

    rig: RigConfig
    noise: NoiseModel
    filter_spec: FilterSpec
    grid: GridSpec
    deadzone_radius: float
    seed: int
    max_iterations: int
    tolerance: float
    noise_floor: float | None
    m_eff: float
    phase20: float
    phase30: float
    input_path: str
    output_path: str

    def mapping(self) -> dict[str, str]:
        """Canonical flat key=value view (the hashing and writing format)."""
        values = {
            "seed": self.seed,
            "deadzone_radius": self.deadzone_radius,
            "rig.baseline_d": self.rig.baseline_d,
            "rig.f20": self.rig.f20,
            "rig.f30": self.rig.f30,
            "rig.sample_rate": self.rig.sample_rate,
            "rig.buffer_len": self.rig.buffer_len,
            "rig.min_valid_distance": self.rig.min_valid_distance,
            "rig.k20": self.rig.k20,
            "rig.k30": self.rig.k30,
            "noise.gaussian_sigma": self.noise.gaussian_sigma,
            "noise.quantization_step": self.noise.quantization_step,
            "noise.dc_bias": self.noise.dc_bias.as_tuple(),
            "noise.rng_seed": self.noise.rng_seed,
            "filter.low": self.filter_spec.passband[0],
            "filter.high": self.filter_spec.passband[1],
            "filter.order": self.filter_spec.order,
            "grid.origin_x": self.grid.origin.x,
            "grid.origin_y": self.grid.origin.y,
            "grid.width": self.grid.width,
            "grid.height": self.grid.height,
            "grid.rows": self.grid.rows,
            "grid.cols": self.grid.cols,
            "solver.max_iterations": self.max_iterations,
            "solver.tolerance": self.tolerance,
            "solver.noise_floor": self.noise_floor,
            "sim.m_eff": self.m_eff,
            "sim.phase20": self.phase20,
            "sim.phase30": self.phase30,
            "paths.input": self.input_path,
            "paths.output": self.output_path,
        }
        return {k: _format_value(k, v) for k, v in values.items()}

    @property
    def config_hash(self) -> str:
        return config_hash(self.mapping())

    def sources(self):
        return anchor_sources(self.rig, self.m_eff, self.phase20, self.phase30)

    def noise_floor_value(self) -> float:
        """Explicit solver.noise_floor, or the default derived from the
        quantization step and window length."""
        if self.noise_floor is not None:
            return self.noise_floor
        return default_noise_floor(self.noise.quantization_step, self.rig.buffer_len)

    def pipeline(self, kernel_backend=None) -> TrackingPipeline:
        return TrackingPipeline(self.rig, self.filter_spec,
                                deadzone_radius=self.deadzone_radius,
                                noise_floor=self.noise_floor_value(),
                                max_iterations=self.max_iterations,
                                tolerance=self.tolerance,
                                kernel_backend=kernel_backend)


def config_hash(mapping: dict[str, str]) -> str:
    """12-hex-digit digest of a canonical key=value listing."""
    text = "\n".join(f"{k}={mapping[k]}" for k in sorted(mapping))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _build(values: dict[str, object]) -> AppConfig:
    try:
        rig = RigConfig(
            baseline_d=values["rig.baseline_d"],
            f20=values["rig.f20"],
            f30=values["rig.f30"],
            sample_rate=values["rig.sample_rate"],
            k20=values["rig.k20"],
            k30=values["rig.k30"],
            min_valid_distance=values["rig.min_valid_distance"],
            buffer_len=values["rig.buffer_len"],
        )
        noise = NoiseModel(
            gaussian_sigma=values["noise.gaussian_sigma"],
            quantization_step=values["noise.quantization_step"],
            dc_bias=Vec3(*values["noise.dc_bias"]),
            rng_seed=values["noise.rng_seed"],
        )
        filter_spec = FilterSpec((values["filter.low"], values["filter.high"]),
                                 values["filter.order"])
        filter_spec.validate_against(rig)
        grid = GridSpec(Vec2(values["grid.origin_x"], values["grid.origin_y"]),
                        values["grid.width"], values["grid.height"],
                        values["grid.rows"], values["grid.cols"])
        grid.validate_against(rig)
        if values["deadzone_radius"] < 0:
            raise ConfigError("deadzone_radius must be non-negative")
        if values["solver.max_iterations"] < 1:
            raise ConfigError("solver.max_iterations must be at least 1")
    except ConfigError:
        raise
    except TrackingError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
    return AppConfig(
        rig=rig, noise=noise, filter_spec=filter_spec, grid=grid,
        deadzone_radius=values["deadzone_radius"],
        seed=values["seed"],
        max_iterations=values["solver.max_iterations"],
        tolerance=values["solver.tolerance"],
        noise_floor=values["solver.noise_floor"],
        m_eff=values["sim.m_eff"],
        phase20=values["sim.phase20"],
        phase30=values["sim.phase30"],
        input_path=values["paths.input"],
        output_path=values["paths.output"],
    )


def load_config(path: str | None = None, env: dict[str, str] | None = None) -> AppConfig:
    """Defaults, then the config file (if any), then MAGTRACK_* overrides."""
    values = {k: d for k, (d, _) in DEFAULTS.items()}
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        values.update(parse_config_text(text))
    env = os.environ if env is None else env
    for name, raw in env.items():
        if not name.startswith(ENV_PREFIX) or name in ENV_RESERVED:
            continue
        key = _ENV_TO_KEY.get(name)
        if key is None:
            raise ConfigError(f"unknown config override {name}")
        values[key] = _parse_value(key, raw)
    return _build(values)


def write_config(cfg: AppConfig, path: str) -> None:
    """Write every key in canonical form (reload gives an equal config)."""
    mapping = cfg.mapping()
    lines = ["# magtrack configuration", f"# config_hash={config_hash(mapping)}"]
    lines += [f"{k} = {mapping[k]}" for k in DEFAULTS]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def default_config() -> AppConfig:
    """The all-defaults configuration (no file, no env)."""
    return _build({k: d for k, (d, _) in DEFAULTS.items()})


def with_seed(cfg: AppConfig, seed: int | None) -> AppConfig:
    return cfg if seed is None else replace(cfg, seed=seed)
