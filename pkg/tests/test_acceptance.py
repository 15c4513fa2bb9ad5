"""Acceptance gate: the nine headline guarantees of the tracking engine,
one test per criterion, each printing a single pass/fail line.

Criteria 2 and 3 depend on a pinned RNG seed (42); the underlying claims
were spot-checked across several seeds during development, but the gate
itself is deterministic by construction.
"""
import contextlib
import math
import time

import numpy as np
import pytest

from magtrack import (
    DEFAULT_M_EFF,
    NoiseModel,
    RigConfig,
    SolverState,
    TrackingPipeline,
    TrajectorySpec,
    Vec2,
    anchor_sources,
    bin_amplitude,
    calibrate,
    circle_intersect,
    noise_preset,
    row_mean_errors,
    run_grid_eval,
    synthesize,
    update_cos2,
)
from magtrack.cli import capacity
from magtrack.dsp import extract_h
from magtrack.evaluation import GridSpec

from conftest import IDEAL_K, random_rotation, static_stream

ACCEPTANCE_SEED = 42

_CAP = None


@pytest.fixture(autouse=True)
def _live_lines(capfd):
    # the per-criterion verdict must reach the terminal even under
    # pytest's default output capture
    global _CAP
    _CAP = capfd
    yield
    _CAP = None


def _line(ok: bool, name: str, detail: str) -> None:
    text = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    with _CAP.disabled() if _CAP is not None else contextlib.nullcontext():
        print(text)
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def noisy_report():
    return run_grid_eval(RigConfig(), noise=NoiseModel(), seed=ACCEPTANCE_SEED)


def test_criterion_1_noiseless_grid_round_trip():
    start = time.perf_counter()
    report = run_grid_eval(RigConfig(), noise=noise_preset("noiseless"),
                           seed=ACCEPTANCE_SEED)
    elapsed = time.perf_counter() - start
    ok = report.aggregate_mean < 0.01 and elapsed < 60.0
    _line(ok, "criterion 1 (noiseless round trip)",
          f"grid MAE {report.aggregate_mean:.3e} cm (< 0.01), "
          f"runtime {elapsed:.1f} s (< 60)")


def test_criterion_2_noisy_mae_plausible_and_deterministic(noisy_report):
    again = run_grid_eval(RigConfig(), noise=NoiseModel(), seed=ACCEPTANCE_SEED)
    mae = noisy_report.aggregate_mean
    ok = 0.02 <= mae <= 0.5 and again.aggregate_mean == mae
    _line(ok, "criterion 2 (noisy regime)",
          f"grid MAE {mae:.4f} cm in [0.02, 0.5], rerun identical "
          f"({again.aggregate_mean == mae})")


def test_criterion_3_u_shaped_error_profile(noisy_report):
    rows = row_mean_errors(noisy_report)
    errors = [err for _, err in rows]
    nearest, farthest = errors[0], errors[-1]
    middle = errors[1:-1]
    ok = all(nearest > m for m in middle) and all(farthest > m for m in middle)
    _line(ok, "criterion 3 (U-shaped error profile)",
          "row errors " + ", ".join(f"{e:.3f}" for e in errors) +
          " cm (nearest/farthest strictly above middle rows)")


def test_criterion_4_convergence_on_noiseless_grid():
    rig = RigConfig(k20=IDEAL_K, k30=IDEAL_K)
    noise = noise_preset("noiseless")
    worst_delta, worst_iters = 0.0, 0
    for point in GridSpec().points():
        pipe = TrackingPipeline(rig)
        last = None
        for s in static_stream(rig, point, 3.0, noise):
            est = pipe.step(s)
            if est is not None:
                last = est
        worst_delta = max(worst_delta, last.final_delta)
        worst_iters = max(worst_iters, last.iterations)
    ok = worst_delta < 1e-6 and worst_iters <= 5
    _line(ok, "criterion 4 (convergence bound)",
          f"all 25 points: final delta <= {worst_delta:.2e} cm (< 1e-6), "
          f"iterations <= {worst_iters} (<= 5)")


def test_criterion_5_per_sample_throughput():
    details = []
    ok = True
    for buffer_len in (50, 20):
        rig = RigConfig(buffer_len=buffer_len, k20=IDEAL_K, k30=IDEAL_K)
        samples = static_stream(rig, Vec2(4.0, 6.0), 100.0, NoiseModel())
        assert len(samples) >= 10_000
        pipe = TrackingPipeline(rig)
        start = time.perf_counter()
        for s in samples:
            pipe.step(s)
        mean_ms = (time.perf_counter() - start) / len(samples) * 1e3
        ok = ok and mean_ms < 5.0
        details.append(f"N={buffer_len}: {mean_ms:.4f} ms/sample")
    _line(ok, "criterion 5 (throughput)",
          "; ".join(details) + f" over 10^4+ samples (< 5 ms)")


def test_criterion_6_exact_bin_recovery_and_leakage():
    rng = np.random.default_rng(ACCEPTANCE_SEED)
    worst_rec, worst_leak = 0.0, 0.0
    for n in (50, 20):
        for f, other in ((20.0, 30.0), (30.0, 20.0)):
            for _ in range(5):
                amp = rng.uniform(0.5, 10.0)
                phase = rng.uniform(0.0, 2 * math.pi)
                t = np.arange(n) / 100.0
                tone = np.ascontiguousarray(
                    amp * np.sin(2 * math.pi * f * t + phase))
                rec = bin_amplitude(tone, f, 100.0)
                leak = bin_amplitude(tone, other, 100.0)
                worst_rec = max(worst_rec, abs(rec - amp) / amp)
                worst_leak = max(worst_leak, leak / amp)
    ok = worst_rec < 1e-3 and worst_leak < 1e-3
    _line(ok, "criterion 6 (DSP exactness)",
          f"recovery error {worst_rec:.2e} (< 1e-3), "
          f"leakage {worst_leak:.2e} (< 1e-3) for N in {{50, 20}}")


def test_criterion_7_rotation_and_phase_invariance():
    rig = RigConfig(k20=IDEAL_K, k30=IDEAL_K)
    noise = noise_preset("noiseless")
    point = Vec2(3.3, 4.7)
    rng = np.random.default_rng(ACCEPTANCE_SEED)

    def final_state(rotation, phase20, phase30):
        sources = anchor_sources(rig, phase20=phase20, phase30=phase30)
        pipe = TrackingPipeline(rig)
        h = est = None
        for s in synthesize(rig, sources, TrajectorySpec.static(point, 3.0),
                            noise, rotation=rotation):
            out = pipe.step(s)
            if out is not None:
                est = out
                h = extract_h(pipe.buffer, pipe.rig, pipe.filter)
        return h, est

    h0, e0 = final_state(None, 0.0, math.pi / 3)
    worst_h = worst_p = 0.0
    for seed in range(3):
        rot = random_rotation(int(rng.integers(1 << 30)))
        h, e = final_state(rot, rng.uniform(0, 2 * math.pi),
                           rng.uniform(0, 2 * math.pi))
        worst_h = max(worst_h,
                      abs(h.h20 - h0.h20) / h0.h20,
                      abs(h.h30 - h0.h30) / h0.h30)
        worst_p = max(worst_p,
                      (e.position - e0.position).norm() / e0.position.norm())
    ok = worst_h < 1e-6 and worst_p < 1e-6
    _line(ok, "criterion 7 (rotation/phase invariance)",
          f"amplitude shift {worst_h:.2e}, position shift {worst_p:.2e} "
          "relative (< 1e-6)")


def test_criterion_8_calibration_recovery_and_scaling():
    noise = noise_preset("noiseless")
    mid = Vec2(5.0, 0.0)

    def calibrated_k(scale):
        rig = RigConfig()
        sources = anchor_sources(rig, m_eff=DEFAULT_M_EFF * scale)
        samples = synthesize(rig, sources, TrajectorySpec.static(mid, 4.0), noise)
        result = calibrate(samples, rig)
        return result.k20, result.k30

    k20, k30 = calibrated_k(1.0)
    rec_err = max(abs(k20 - IDEAL_K), abs(k30 - IDEAL_K)) / IDEAL_K
    worst_scale_err = 0.0
    for s in (0.5, 2.0, 4.0):
        k20_s, k30_s = calibrated_k(s)
        for base, scaled in ((k20, k20_s), (k30, k30_s)):
            worst_scale_err = max(worst_scale_err,
                                  abs(scaled / base - s**2) / s**2)
    ok = rec_err < 5e-3 and worst_scale_err < 5e-3
    _line(ok, "criterion 8 (calibration)",
          f"K recovery error {rec_err:.2e} (< 0.5%), "
          f"s^2-law error {worst_scale_err:.2e} for s in {{0.5, 2, 4}} (< 0.5%)")


def test_criterion_9_closed_form_checks():
    x, y, feasible = circle_intersect(6.0, 8.0, 10.0)
    c20, c30 = update_cos2(3.0, 4.0, 10.0)
    cap = capacity(100_000, 100, 12)
    ok = (abs(x - 3.6) <= 1e-12 and abs(y - 4.8) <= 1e-12 and feasible
          and abs(c20 - 16.0 / 25.0) <= 1e-12
          and abs(c30 - 16.0 / 65.0) <= 1e-12
          and cap == 83)
    _line(ok, "criterion 9 (closed-form checks)",
          f"circle_intersect -> ({x}, {y}), update_cos2 -> ({c20:.6f}, "
          f"{c30:.6f}), capacity -> {cap}")
