"""Iterative two-anchor localization, calibration and output smoothing.

The core loop alternates between inverting the magnitude law for the two
radii (at the current angle terms) and intersecting the two circles; it
iterates on cos^2(theta) rather than theta itself, which is algebraically
identical for y > 0 and removes the arctan hazards on the baseline.  The
angle terms start at 1 (theta = 0) on a cold solve and warm-start from
the previous solution on a live stream.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dsp import BandpassFilter, FilterSpec, SampleBuffer, SpectralAmplitudes, extract_h
from .errors import (
    DegenerateGeometry,
    DomainError,
    ExcessiveSpread,
    InsufficientSamples,
    NotCalibrated,
)
from .field_model import RigConfig, Vec2
from .signal_synth import SensorSample

# Relative spread of per-window K estimates beyond which calibration is
# rejected (the finger most likely moved during the capture).
SPREAD_LIMIT = 0.20

DEFAULT_MAX_ITERATIONS = 5
DEFAULT_TOLERANCE = 1e-6


class Quality(enum.Enum):
    OK = "Ok"
    CLAMPED_INFEASIBLE = "ClampedInfeasible"
    OUT_OF_RANGE = "OutOfRange"


@dataclass(frozen=True)
class PositionEstimate:
    """One solver output.

    ``position`` is the emitted point (after dead-zone smoothing, so with
    a nonzero dead-zone it may repeat the previous output); r20/r30 and
    the cos^2 terms always describe the raw circle solution of this
    window.  ``position`` and the radii are None when quality is
    OutOfRange with no usable solve.  ``final_delta`` is the position
    change of the last iteration (inf when only one iteration ran).
    """

    position: Vec2 | None
    r20: float | None
    r30: float | None
    cos2_20: float
    cos2_30: float
    iterations: int
    final_delta: float
    quality: Quality


@dataclass
class SolverState:
    """Mutable per-sensor solver memory: warm-start angle terms (cos^2,
    initialized to 1 i.e. theta=0) and the dead-zone's last output."""

    warm_cos2_20: float = 1.0
    warm_cos2_30: float = 1.0
    last_output: Vec2 | None = None
    deadzone_radius: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.warm_cos2_20 <= 1.0 and 0.0 <= self.warm_cos2_30 <= 1.0):
            raise DomainError("warm cos^2 values must lie in [0, 1]")
        if self.deadzone_radius < 0:
            raise DomainError("deadzone_radius must be non-negative")

    def reset(self) -> None:
        self.warm_cos2_20 = 1.0
        self.warm_cos2_30 = 1.0
        self.last_output = None


@dataclass(frozen=True)
class CalibrationResult:
    k20: float
    k30: float
    samples_used: int
    residual_spread: float


def circle_intersect(r20: float, r30: float, d: float) -> tuple[float, float, bool]:
    """Intersection of circles centered at (0,0) and (d,0), keeping the
    y >= 0 half-plane.

    Returns (x, y, feasible); when the circles do not meet, y clamps to 0
    and feasible is False rather than raising; transient noise must not
    kill a live stream.
    """
    if r20 <= 0 or r30 <= 0 or d <= 0:
        raise DomainError("radii and baseline must be positive")
    x = (r20 * r20 - r30 * r30 + d * d) / (2.0 * d)
    y2 = r20 * r20 - x * x
    if y2 >= 0.0:
        return x, math.sqrt(y2), True
    return x, 0.0, False


def update_cos2(x: float, y: float, d: float) -> tuple[float, float]:
    """Angle terms of a point relative to both anchors.

    cos^2(theta20) = y^2/(x^2+y^2) and cos^2(theta30) = y^2/((d-x)^2+y^2):
    the squared cosine of the angle from each anchor's +Y axis, well
    defined on the baseline (both 0) unlike the arctan form.
    """
    den20 = x * x + y * y
    den30 = (d - x) * (d - x) + y * y
    if den20 == 0.0 or den30 == 0.0:
        raise DegenerateGeometry("point coincides with an anchor center")
    return y * y / den20, y * y / den30


def apply_deadzone(state: SolverState, new_pos: Vec2) -> Vec2:
    """Suppress movements smaller than the dead-zone radius.

    Returns the previous output unchanged when the new position lies
    within the radius; otherwise emits the new position and remembers it.
    A zero radius disables the dead-zone.
    """
    last = state.last_output
    if last is not None and state.deadzone_radius > 0:
        if (new_pos - last).norm() < state.deadzone_radius:
            return last
    state.last_output = new_pos
    return new_pos


def default_noise_floor(quantization_step: float, buffer_len: int) -> float:
    """Amplitude floor below which a tone is indistinguishable from noise.

    Three times the expected single-bin amplitude noise produced by
    quantization alone: the step contributes variance step^2/12 per
    sample, and an N-sample bin estimate sees that as an amplitude
    standard deviation of sqrt(2/N) times the per-sample sigma.
    """
    if quantization_step < 0 or buffer_len < 2:
        raise DomainError("need a non-negative step and a buffer of at least 2")
    return 3.0 * (quantization_step / math.sqrt(12.0)) * math.sqrt(2.0 / buffer_len)


def locate(h: SpectralAmplitudes, rig: RigConfig, state: SolverState,
           noise_floor: float = 0.0,
           max_iterations: int = DEFAULT_MAX_ITERATIONS,
           tolerance: float = DEFAULT_TOLERANCE,
           kernel=None) -> PositionEstimate:
    """One position solve from a pair of tone amplitudes.

    Runs the fixed-point loop (at most ``max_iterations`` passes, exiting
    early once the position moves less than ``tolerance`` cm), applies the
    dead-zone, and updates the warm-start state.  Amplitudes at or below
    ``noise_floor`` return an OutOfRange estimate without touching the
    state; radii inside rig.min_valid_distance are flagged OutOfRange
    (the dipole model is not trustworthy that close) but still reported.
    """
    if not rig.calibrated:
        raise NotCalibrated("rig has no k20/k30; run calibration first")
    if max_iterations < 1:
        raise DomainError("max_iterations must be at least 1")
    if h.h20 <= noise_floor or h.h30 <= noise_floor:
        return PositionEstimate(None, None, None, state.warm_cos2_20,
                                state.warm_cos2_30, 0, math.inf,
                                Quality.OUT_OF_RANGE)
    x, y, r20, r30, c20, c30, iterations, delta, feasible = kernels.get(kernel).solve_position(
        h.h20 * h.h20, h.h30 * h.h30, rig.k20, rig.k30, rig.baseline_d,
        state.warm_cos2_20, state.warm_cos2_30, max_iterations, tolerance,
    )
    if (x == 0.0 and y == 0.0) or (x == rig.baseline_d and y == 0.0):
        raise DegenerateGeometry("solution landed on an anchor center")
    state.warm_cos2_20 = c20
    state.warm_cos2_30 = c30
    pos = Vec2(x, y)
    if r20 < rig.min_valid_distance or r30 < rig.min_valid_distance:
        return PositionEstimate(pos, r20, r30, c20, c30, iterations, delta,
                                Quality.OUT_OF_RANGE)
    quality = Quality.OK if feasible else Quality.CLAMPED_INFEASIBLE
    out = apply_deadzone(state, pos)
    return PositionEstimate(out, r20, r30, c20, c30, iterations, delta, quality)


def calibrate(samples: list[SensorSample], rig: RigConfig,
              filter_spec: FilterSpec | None = None,
              settle_time: float = 1.0,
              min_duration: float = 2.0,
              kernel=None) -> CalibrationResult:
    """Estimate k20/k30 from a dwell at the marked point (D/2, 0).

    At that point r = D/2 and theta = 90 degrees for both anchors, so
    k = mean(h)^2 * (D/2)^6 per anchor, with h extracted from every full
    window after the filter settles.  Stores the constants into ``rig``.
    Raises InsufficientSamples below ``min_duration`` seconds of input and
    ExcessiveSpread when per-window k estimates vary more than 20%
    relative (or carry no tone energy at all).
    """
    if len(samples) < round(min_duration * rig.sample_rate):
        raise InsufficientSamples(
            f"calibration needs at least {min_duration} s of samples, "
            f"got {len(samples) / rig.sample_rate:.2f} s"
        )
    filt = BandpassFilter(rig, filter_spec, kernel=kernel)
    buf = SampleBuffer(rig.buffer_len)
    t0 = samples[0].t
    h20s: list[float] = []
    h30s: list[float] = []
    for s in samples:
        buf.push(SensorSample(s.t, filt.step(s.field)))
        if buf.is_full and s.t - t0 >= settle_time:
            h = extract_h(buf, rig, filt, kernel=kernel)
            h20s.append(h.h20)
            h30s.append(h.h30)
    if not h20s:
        raise InsufficientSamples("no full windows past the filter settling time")

    scale = (rig.baseline_d / 2.0) ** 6
    ks = []
    spreads = []
    for hs in (h20s, h30s):
        per_window = np.asarray(hs) ** 2 * scale
        mean_k = float(per_window.mean())
        if mean_k <= 0.0:
            raise ExcessiveSpread("no tone energy at the calibration point")
        spread = float(per_window.std() / mean_k)
        if spread > SPREAD_LIMIT:
            raise ExcessiveSpread(
                f"per-window K spread {spread:.1%} exceeds {SPREAD_LIMIT:.0%} "
                "(did the sensor move?)"
            )
        ks.append(float(np.mean(hs)) ** 2 * scale)
        spreads.append(spread)

    rig.k20, rig.k30 = ks[0], ks[1]
    return CalibrationResult(ks[0], ks[1], len(samples), max(spreads))
