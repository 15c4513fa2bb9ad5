"""Shared fixtures and helpers for the test suite."""
import numpy as np
import pytest

from magtrack import (
    DEFAULT_M_EFF,
    RigConfig,
    SensorSample,
    TrajectorySpec,
    Vec2,
    anchor_sources,
    noise_preset,
    synthesize,
)
from magtrack.dsp import BandpassFilter, SampleBuffer, extract_h

IDEAL_K = DEFAULT_M_EFF ** 2


@pytest.fixture
def rig():
    """Fresh uncalibrated rig with package defaults."""
    return RigConfig()


@pytest.fixture
def calibrated_rig():
    """Rig with the analytically exact gains for the default sources."""
    return RigConfig(k20=IDEAL_K, k30=IDEAL_K)


@pytest.fixture
def noiseless():
    return noise_preset("noiseless")


def random_rotation(seed: int) -> np.ndarray:
    """Uniform-ish random proper rotation via QR decomposition."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def static_stream(rig, position, duration, noise, rotation=None, sources=None):
    """Synthetic dwell at one point with the rig's default sources."""
    src = sources if sources is not None else anchor_sources(rig)
    traj = TrajectorySpec.static(position, duration)
    return synthesize(rig, src, traj, noise, rotation=rotation)


def amplitudes_at(rig, position, duration=3.0, noise=None, rotation=None,
                  use_filter=True):
    """Run a noiseless (by default) dwell through filter+buffer+extract_h
    and return the final window's SpectralAmplitudes."""
    noise = noise if noise is not None else noise_preset("noiseless")
    filt = BandpassFilter(rig) if use_filter else None
    buf = SampleBuffer(rig.buffer_len)
    for s in static_stream(rig, position, duration, noise, rotation):
        field = filt.step(s.field) if filt is not None else s.field
        buf.push(SensorSample(s.t, field))
    return extract_h(buf, rig, filt)
