"""Differential tests: the compiled kernels must agree with the pure
Python reference on random inputs, and the backend selector must be
explicit about what is available."""
import numpy as np
import pytest
from scipy import signal as sg

from magtrack import ConfigError
from magtrack import kernels

BOTH = len(kernels.AVAILABLE) == 2
needs_compiled = pytest.mark.skipif(
    not BOTH, reason="compiled kernel extension not built")


def _backends():
    return [kernels.get(name) for name in kernels.AVAILABLE]


def test_selected_backend_is_available():
    assert kernels.BACKEND in kernels.AVAILABLE
    assert "python" in kernels.AVAILABLE


def test_get_rejects_unknown_backend():
    with pytest.raises(ConfigError):
        kernels.get("fortran")


def test_get_none_returns_selected():
    assert kernels.get(None) is kernels.get(kernels.BACKEND)


@needs_compiled
def test_sos_step_matches_reference():
    rng = np.random.default_rng(11)
    sos = np.ascontiguousarray(sg.butter(2, [15, 35], btype="bandpass",
                                         fs=100, output="sos"))
    x = rng.normal(size=500) * 10
    py, cy = _backends()
    zi_py = np.zeros((sos.shape[0], 2))
    zi_cy = np.zeros((sos.shape[0], 2))
    for v in x:
        out_py = py.sos_step(sos, zi_py, float(v))
        out_cy = cy.sos_step(sos, zi_cy, float(v))
        assert out_cy == pytest.approx(out_py, abs=1e-12)
    np.testing.assert_allclose(zi_cy, zi_py, atol=1e-12)


@needs_compiled
def test_goertzel_window_matches_reference_and_fft():
    rng = np.random.default_rng(7)
    py, cy = _backends()
    for n, k in [(50, 10), (50, 15), (20, 4), (20, 6), (64, 9)]:
        x = np.ascontiguousarray(rng.normal(size=n))
        a_py = py.goertzel_window(x, k)
        a_cy = cy.goertzel_window(x, k)
        a_fft = 2.0 * abs(np.fft.rfft(x)[k]) / n
        assert a_cy == pytest.approx(a_py, rel=1e-12, abs=1e-12)
        assert a_py == pytest.approx(a_fft, rel=1e-9, abs=1e-12)


@needs_compiled
def test_goertzel_ring_matches_reference():
    rng = np.random.default_rng(13)
    py, cy = _backends()
    buf = np.ascontiguousarray(rng.normal(size=(50, 3)))
    for head in (0, 1, 17, 49):
        for axis in range(3):
            a_py = py.goertzel_ring(buf, head, 10, axis)
            a_cy = cy.goertzel_ring(buf, head, 10, axis)
            assert a_cy == pytest.approx(a_py, rel=1e-12, abs=1e-12)


def test_goertzel_ring_equals_window_on_unrolled_buffer():
    ker = kernels.get("python")
    rng = np.random.default_rng(3)
    buf = np.ascontiguousarray(rng.normal(size=(20, 3)))
    head = 7
    unrolled = np.ascontiguousarray(
        np.concatenate([buf[head:, 1], buf[:head, 1]]))
    assert ker.goertzel_ring(buf, head, 4, 1) == pytest.approx(
        ker.goertzel_window(unrolled, 4), rel=1e-12)


@needs_compiled
def test_solve_position_matches_reference():
    rng = np.random.default_rng(23)
    py, cy = _backends()
    k = 9e6
    for _ in range(200):
        x, y = rng.uniform(0.5, 9.5), rng.uniform(0.3, 12.0)
        r20 = np.hypot(x, y)
        r30 = np.hypot(10.0 - x, y)
        h20 = k * r20**-6 * (3 * y**2 / r20**2 + 1)
        h30 = k * r30**-6 * (3 * y**2 / r30**2 + 1)
        # jitter so infeasible clamps also get exercised
        h20 *= rng.uniform(0.8, 1.2)
        h30 *= rng.uniform(0.8, 1.2)
        args = (h20, h30, k, k, 10.0, 1.0, 1.0, 5, 1e-6)
        res_py = py.solve_position(*args)
        res_cy = cy.solve_position(*args)
        assert res_py[6] == res_cy[6]            # iterations
        assert res_py[8] == res_cy[8]            # feasible flag
        for a, b in zip(res_py[:6], res_cy[:6]):
            assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


@needs_compiled
def test_backends_agree_end_to_end():
    """The full pipeline run on the same noisy stream must produce the
    same estimates regardless of kernel backend."""
    from magtrack import (NoiseModel, RigConfig, TrackingPipeline,
                          TrajectorySpec, Vec2, anchor_sources, synthesize)
    rig = RigConfig(k20=9e6, k30=9e6)
    traj = TrajectorySpec.circular(Vec2(5, 6), 2.0, 0.8, 4.0)
    samples = synthesize(rig, anchor_sources(rig), traj, NoiseModel(rng_seed=5))
    pipes = {name: TrackingPipeline(rig, kernel_backend=name)
             for name in kernels.AVAILABLE}
    compared = 0
    for s in samples:
        results = {name: pipe.step(s) for name, pipe in pipes.items()}
        a, b = results.values()
        if a is None or b is None:
            assert a is None and b is None
            continue
        assert a.quality == b.quality
        assert b.position.x == pytest.approx(a.position.x, abs=1e-9)
        assert b.position.y == pytest.approx(a.position.y, abs=1e-9)
        assert a.iterations == b.iterations
        compared += 1
    assert compared > 300


def test_solve_position_converges_on_exact_input():
    ker = kernels.get(None)
    k = 9e6
    x, y = 3.0, 4.0
    r20, r30 = 5.0, np.hypot(7.0, 4.0)
    h20 = k * r20**-6 * (3 * (y / r20) ** 2 + 1)
    h30 = k * r30**-6 * (3 * (y / r30) ** 2 + 1)
    got = ker.solve_position(h20, h30, k, k, 10.0, 1.0, 1.0, 25, 1e-12)
    gx, gy, *_rest, iters, delta, feasible = got
    assert gx == pytest.approx(3.0, abs=1e-9)
    assert gy == pytest.approx(4.0, abs=1e-9)
    assert feasible
    assert delta < 1e-12
