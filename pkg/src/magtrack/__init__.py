"""Magnetic two-anchor 2D tracking in simulation.

A dipole forward model generates synthetic 3-axis magnetometer streams
from two AC-driven anchor magnets; a streaming pipeline (band-pass,
sliding window, exact-bin tone extraction, iterative trilateration)
recovers the sensor position; an evaluation harness scores the whole
loop over a grid.
"""
from .dsp import BandpassFilter, FilterSpec, SampleBuffer, SpectralAmplitudes, bin_amplitude, extract_h
from .errors import (
    BinMisalignment,
    BufferNotFull,
    ConfigError,
    DegenerateGeometry,
    DomainError,
    EmptyInput,
    ExcessiveSpread,
    InsufficientSamples,
    NonMonotonicTimestamp,
    NotCalibrated,
    OutOfRange,
    TrackingError,
    TrajectoryOutOfBounds,
)
from .evaluation import (
    EvalReport,
    GridSpec,
    error_stats,
    run_grid_eval,
    run_trajectory_eval,
    row_mean_errors,
)
from .field_model import (
    DipoleSource,
    RigConfig,
    Vec2,
    Vec3,
    dipole_field_at,
    field_magnitude_sq,
    invert_radius,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .pipeline import TrackingPipeline
from .signal_synth import (
    DEFAULT_M_EFF,
    NoiseModel,
    SensorPose,
    SensorSample,
    TrajectorySpec,
    anchor_sources,
    noise_preset,
    quantize,
    synthesize,
    synthesize_static,
    trajectory_position,
)
from .solver import (
    CalibrationResult,
    PositionEstimate,
    Quality,
    SolverState,
    apply_deadzone,
    calibrate,
    circle_intersect,
    default_noise_floor,
    locate,
    update_cos2,
)

__version__ = "0.1.0"
