"""Per-sample tracking pipeline: filter, window, extract, locate.

Glues the streaming pieces together in the order the firmware would run
them: each incoming sample is band-pass filtered, pushed into the ring
buffer, and, once the buffer has filled, the window's two tone
amplitudes are extracted and handed to the solver, producing one position
estimate per sample.
"""
from __future__ import annotations

from dataclasses import replace

from .dsp import BandpassFilter, FilterSpec, SampleBuffer, extract_h
from .field_model import RigConfig
from .signal_synth import SensorSample
from .solver import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
    PositionEstimate,
    SolverState,
    locate,
)


class TrackingPipeline:
    """Streaming tracker over one sensor.

    ``kernel_backend`` picks the hot-loop implementation ("python",
    "compiled", or None for the import-time default); it exists so the
    benchmark and the differential tests can run both side by side.
    """

    def __init__(self, rig: RigConfig, filter_spec: FilterSpec | None = None,
                 deadzone_radius: float = 0.0, noise_floor: float = 0.0,
                 max_iterations: int = DEFAULT_MAX_ITERATIONS,
                 tolerance: float = DEFAULT_TOLERANCE,
                 kernel_backend=None):
        # private copy: later calibration of the caller's rig must not
        # retune a pipeline that is already streaming
        self.rig = replace(rig)
        self.noise_floor = noise_floor
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self._kernel = kernel_backend
        self.filter = BandpassFilter(rig, filter_spec, kernel=kernel_backend)
        self.buffer = SampleBuffer(rig.buffer_len)
        self.state = SolverState(deadzone_radius=deadzone_radius)

    def step(self, sample: SensorSample) -> PositionEstimate | None:
        """Process one sample; returns None until the window first fills."""
        self.buffer.push(SensorSample(sample.t, self.filter.step(sample.field)))
        if not self.buffer.is_full:
            return None
        h = extract_h(self.buffer, self.rig, self.filter, kernel=self._kernel)
        return locate(h, self.rig, self.state, noise_floor=self.noise_floor,
                      max_iterations=self.max_iterations,
                      tolerance=self.tolerance, kernel=self._kernel)

    def reset(self) -> None:
        self.filter.reset()
        self.buffer.reset()
        self.state.reset()
