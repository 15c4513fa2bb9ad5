"""Synthetic 3-axis magnetometer streams from the two AC-driven anchors.

The generator is the test oracle for the whole pipeline: each sample is
the superposition of the two anchors' dipole fields modulated by their
drive tones, rotated into an arbitrary sensor body frame, biased by an
Earth-like DC field, perturbed by Gaussian noise and quantized to the
sensor resolution.  Everything is a deterministic function of the inputs
and the noise seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateGeometry, DomainError, TrajectoryOutOfBounds
from .field_model import DipoleSource, RigConfig, Vec2, Vec3

# Effective moment (uT*cm^3) used for both anchors unless overridden.
# Chosen so the default noisy grid evaluation lands in the sub-centimeter
# error regime; the physical drive strength is unknowable from here.
DEFAULT_M_EFF = 3000.0

PRESETS = ("metal", "wood", "acrylic", "noiseless")


@dataclass(frozen=True)
class NoiseModel:
    """Per-axis sensor corruption: Gaussian noise, quantization, DC bias."""

    gaussian_sigma: float = 0.1
    quantization_step: float = 0.6
    dc_bias: Vec3 = Vec3(20.0, -5.0, 43.0)
    rng_seed: int = 0

    def __post_init__(self):
        if self.gaussian_sigma < 0:
            raise DomainError("gaussian_sigma must be non-negative")
        if self.quantization_step < 0:
            raise DomainError("quantization_step must be non-negative")


def noise_preset(name: str, rng_seed: int = 0) -> NoiseModel:
    """Named NoiseModel configurations.

    The three surface presets are deliberately identical: measured errors
    across surfaces are statistically indistinguishable, so they differ
    only as report labels.  "noiseless" disables sensor noise and
    quantization but keeps the DC bias (the filter must reject it anyway).
    """
    if name not in PRESETS:
        raise DomainError(f"unknown preset {name!r}, expected one of {PRESETS}")
    if name == "noiseless":
        return NoiseModel(gaussian_sigma=0.0, quantization_step=0.0, rng_seed=rng_seed)
    return NoiseModel(rng_seed=rng_seed)


@dataclass(frozen=True)
class SensorSample:
    """One timestamped 3-axis field reading (seconds, uT)."""

    t: float
    field: Vec3


@dataclass(frozen=True, eq=False)
class SensorPose:
    """Sensor position plus the rotation taking rig-frame fields into the
    sensor body frame (the rig's plane is embedded with third component 0)."""

    position: Vec2
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float)
        if r.shape != (3, 3):
            raise DomainError("rotation must be a 3x3 matrix")
        if not np.allclose(r.T @ r, np.eye(3), atol=1e-9):
            raise DomainError("rotation must be orthonormal (R^T R = I within 1e-9)")
        object.__setattr__(self, "rotation", r)


@dataclass(frozen=True)
class TrajectorySpec:
    """Sensor path over time; built via the static/linear/circular/waypoints
    factories rather than direct construction."""

    kind: str
    duration: float
    point: Vec2 | None = None
    start: Vec2 | None = None
    end: Vec2 | None = None
    center: Vec2 | None = None
    radius: float = 0.0
    angular_rate: float = 0.0
    phase0: float = 0.0
    waypoints: tuple[tuple[float, Vec2], ...] = ()

    def __post_init__(self):
        if self.duration <= 0:
            raise DomainError("trajectory duration must be positive")
        if self.kind == "static":
            if self.point is None:
                raise DomainError("static trajectory needs a point")
        elif self.kind == "linear":
            if self.start is None or self.end is None:
                raise DomainError("linear trajectory needs start and end")
        elif self.kind == "circular":
            if self.center is None:
                raise DomainError("circular trajectory needs a center")
            if self.radius <= 0:
                raise DomainError("circular trajectory needs a positive radius")
        elif self.kind == "waypoints":
            if len(self.waypoints) < 2:
                raise DomainError("waypoint trajectory needs at least two waypoints")
            times = [t for t, _ in self.waypoints]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise DomainError("waypoint times must be strictly increasing")
            if times[0] > 0 or times[-1] < self.duration:
                raise DomainError("waypoints must cover [0, duration]")
        else:
            raise DomainError(f"unknown trajectory kind {self.kind!r}")

    @classmethod
    def static(cls, point: Vec2, duration: float) -> "TrajectorySpec":
        return cls(kind="static", duration=duration, point=point)

    @classmethod
    def linear(cls, start: Vec2, end: Vec2, duration: float) -> "TrajectorySpec":
        return cls(kind="linear", duration=duration, start=start, end=end)

    @classmethod
    def circular(cls, center: Vec2, radius: float, angular_rate: float,
                 duration: float, phase0: float = 0.0) -> "TrajectorySpec":
        return cls(kind="circular", duration=duration, center=center,
                   radius=radius, angular_rate=angular_rate, phase0=phase0)

    @classmethod
    def from_waypoints(cls, waypoints, duration: float | None = None) -> "TrajectorySpec":
        pts = tuple((float(t), p) for t, p in waypoints)
        if duration is None:
            duration = pts[-1][0] if pts else 0.0
        return cls(kind="waypoints", duration=duration, waypoints=pts)


def trajectory_position(spec: TrajectorySpec, t: float) -> Vec2:
    """Sensor position at time t in [0, duration]."""
    if not 0.0 <= t <= spec.duration:
        raise DomainError(f"t={t} outside trajectory span [0, {spec.duration}]")
    x, y = trajectory_positions(spec, np.array([t])).ravel()
    return Vec2(float(x), float(y))


def trajectory_positions(spec: TrajectorySpec, ts: np.ndarray) -> np.ndarray:
    """Vectorized trajectory_position: (n,) times -> (n, 2) positions.

    Times are not range-checked here; synthesize generates them in-span.
    """
    ts = np.asarray(ts, dtype=float)
    if spec.kind == "static":
        out = np.empty((ts.size, 2))
        out[:, 0] = spec.point.x
        out[:, 1] = spec.point.y
        return out
    if spec.kind == "linear":
        f = ts / spec.duration
        return np.column_stack([
            spec.start.x + (spec.end.x - spec.start.x) * f,
            spec.start.y + (spec.end.y - spec.start.y) * f,
        ])
    if spec.kind == "circular":
        ang = spec.angular_rate * ts + spec.phase0
        return np.column_stack([
            spec.center.x + spec.radius * np.cos(ang),
            spec.center.y + spec.radius * np.sin(ang),
        ])
    times = np.array([t for t, _ in spec.waypoints])
    xs = np.array([p.x for _, p in spec.waypoints])
    ys = np.array([p.y for _, p in spec.waypoints])
    return np.column_stack([np.interp(ts, times, xs), np.interp(ts, times, ys)])


def quantize(v, step):
    """Round to the nearest multiple of ``step``, ties away from zero.

    step=0 disables quantization.  Accepts scalars or arrays.
    """
    if step < 0:
        raise DomainError("quantization step must be non-negative")
    if step == 0:
        return v
    q = np.copysign(np.floor(np.abs(v) / step + 0.5), v) * step
    return float(q) if np.isscalar(v) else q


def anchor_sources(rig: RigConfig, m_eff: float = DEFAULT_M_EFF,
                   phase20: float = 0.0, phase30: float = math.pi / 3,
                   ) -> tuple[DipoleSource, DipoleSource]:
    """The two anchor dipoles of a rig: at (0,0) and (D,0), axes along +Y.

    Default phases are arbitrary and unequal on purpose; extraction is
    magnitude-based so they must not matter.
    """
    axis = Vec2(0.0, 1.0)
    return (
        DipoleSource(rig.anchor20(), axis, m_eff, rig.f20, phase20),
        DipoleSource(rig.anchor30(), axis, m_eff, rig.f30, phase30),
    )


def synthesize(rig: RigConfig, sources: tuple[DipoleSource, DipoleSource],
               trajectory: TrajectorySpec, noise: NoiseModel,
               rotation: np.ndarray | None = None,
               duration: float | None = None) -> list[SensorSample]:
    """Generate round(duration*sample_rate) sensor samples along a trajectory.

    Sample i at t = i/sample_rate is
        rotation @ embed(sum_s dipole_field_at(s, p(t)) * sin(2*pi*f_s*t + phi_s))
        + dc_bias + N(0, sigma) per axis, then quantized.
    The trajectory must stay at least rig.min_valid_distance from both
    anchor centers.
    """
    if duration is None:
        duration = trajectory.duration
    if duration <= 0:
        raise DomainError("duration must be positive")
    if duration > trajectory.duration + 1e-12:
        raise DomainError("duration exceeds the trajectory span")
    freqs = (sources[0].frequency, sources[1].frequency)
    if freqs != (rig.f20, rig.f30):
        raise DomainError(f"source frequencies {freqs} do not match rig ({rig.f20}, {rig.f30})")
    if rotation is None:
        rotation = np.eye(3)
    else:
        rotation = np.asarray(rotation, dtype=float)
        if rotation.shape != (3, 3) or not np.allclose(
                rotation.T @ rotation, np.eye(3), atol=1e-9):
            raise DomainError("rotation must be a 3x3 orthonormal matrix")

    n = round(duration * rig.sample_rate)
    ts = np.arange(n) / rig.sample_rate
    pos = trajectory_positions(trajectory, ts)

    planar = np.zeros((n, 2))
    for src in sources:
        d = pos - [src.position.x, src.position.y]
        r = np.hypot(d[:, 0], d[:, 1])
        if np.any(r == 0.0):
            raise DegenerateGeometry("trajectory passes through a dipole center")
        if np.any(r < rig.min_valid_distance):
            raise TrajectoryOutOfBounds(
                f"trajectory comes within {r.min():.3g} cm of an anchor "
                f"(minimum {rig.min_valid_distance} cm)"
            )
        rhat = d / r[:, None]
        adot = rhat[:, 0] * src.axis.x + rhat[:, 1] * src.axis.y
        amp = (src.m_eff / r**3)[:, None] * (
            3.0 * adot[:, None] * rhat - [src.axis.x, src.axis.y]
        )
        planar += amp * np.sin(2.0 * math.pi * src.frequency * ts + src.phase)[:, None]

    readings = np.zeros((n, 3))
    readings[:, :2] = planar
    readings = readings @ rotation.T
    readings += [noise.dc_bias.hx, noise.dc_bias.hy, noise.dc_bias.hz]
    if noise.gaussian_sigma > 0:
        rng = np.random.default_rng(noise.rng_seed)
        readings += rng.normal(0.0, noise.gaussian_sigma, size=(n, 3))
    if noise.quantization_step > 0:
        readings = quantize(readings, noise.quantization_step)

    return [SensorSample(float(t), Vec3(*row)) for t, row in zip(ts, readings)]


def synthesize_static(rig: RigConfig, sources, pose: SensorPose,
                      noise: NoiseModel, duration: float) -> list[SensorSample]:
    """synthesize() for a sensor dwelling at a fixed pose."""
    traj = TrajectorySpec.static(pose.position, duration)
    return synthesize(rig, sources, traj, noise, rotation=pose.rotation)


def samples_to_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    """Split a sample stream into a (n,) time array and (n, 3) field array."""
    ts = np.array([s.t for s in samples])
    fields = np.array([s.field.as_tuple() for s in samples])
    return ts, fields.reshape(-1, 3)
