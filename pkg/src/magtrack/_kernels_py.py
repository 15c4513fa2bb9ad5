"""Pure-Python per-sample kernels.

Reference implementation of the four hot operations: one biquad-cascade
filter step, single-bin tone amplitude over a window (contiguous and ring
layouts), and the two-anchor fixed-point position solve.  The compiled
module ``_kernels`` mirrors these functions line for line; the ``kernels``
module picks whichever is available at import time.  Keep the two in exact
behavioral agreement; the differential kernel tests compare them on
random inputs.
"""
import math


def sos_step(sos, zi, x):
    """Advance a cascaded-biquad filter by one sample.

    ``sos`` is an (n_sections, 6) array of [b0, b1, b2, 1, a1, a2] rows
    (scipy second-order-section layout, a0 normalized to 1); ``zi`` is the
    (n_sections, 2) transposed-direct-form-II state, updated in place.
    Returns the filtered sample.
    """
    for i in range(sos.shape[0]):
        y = sos[i, 0] * x + zi[i, 0]
        zi[i, 0] = sos[i, 1] * x - sos[i, 4] * y + zi[i, 1]
        zi[i, 1] = sos[i, 2] * x - sos[i, 5] * y
        x = y
    return float(x)


def goertzel_window(x, k):
    """Amplitude 2*|X_k|/n of the length-n window ``x`` at integer bin k."""
    n = x.shape[0]
    w = 2.0 * math.pi * k / n
    coeff = 2.0 * math.cos(w)
    s1 = 0.0
    s2 = 0.0
    for j in range(n):
        s0 = x[j] + coeff * s1 - s2
        s2 = s1
        s1 = s0
    re = s1 - s2 * math.cos(w)
    im = s2 * math.sin(w)
    return 2.0 * math.sqrt(re * re + im * im) / n


def goertzel_ring(buf, head, k, axis):
    """goertzel_window over one axis of an (n, 3) ring buffer.

    ``head`` indexes the oldest row; rows are visited in push order so the
    result matches goertzel_window on the unrolled window.
    """
    n = buf.shape[0]
    w = 2.0 * math.pi * k / n
    coeff = 2.0 * math.cos(w)
    s1 = 0.0
    s2 = 0.0
    for j in range(n):
        idx = head + j
        if idx >= n:
            idx -= n
        s0 = buf[idx, axis] + coeff * s1 - s2
        s2 = s1
        s1 = s0
    re = s1 - s2 * math.cos(w)
    im = s2 * math.sin(w)
    return 2.0 * math.sqrt(re * re + im * im) / n


def solve_position(h20_sq, h30_sq, k20, k30, d, c20, c30, max_iter, tol):
    """Fixed-point iteration of the two-anchor localization loop.

    Each pass inverts the magnitude law for both radii at the current
    cos^2(theta) values, intersects the two circles (clamping y to 0 when
    they fail to meet), and refreshes the cos^2 terms from the new point.
    Exits early once the position moves less than ``tol`` between passes.

    Returns (x, y, r20, r30, c20, c30, iterations, delta, feasible) where
    c20/c30 are the post-update warm-start values, delta is the last
    position change (inf if only one pass ran), and feasible reflects the
    final pass's circle intersection.
    """
    x = 0.0
    y = 0.0
    r20 = 0.0
    r30 = 0.0
    px = 0.0
    py = 0.0
    delta = math.inf
    feasible = True
    iterations = 0
    for i in range(max_iter):
        r20 = (k20 * (3.0 * c20 + 1.0) / h20_sq) ** (1.0 / 6.0)
        r30 = (k30 * (3.0 * c30 + 1.0) / h30_sq) ** (1.0 / 6.0)
        x = (r20 * r20 - r30 * r30 + d * d) / (2.0 * d)
        y2 = r20 * r20 - x * x
        if y2 >= 0.0:
            y = math.sqrt(y2)
            feasible = True
        else:
            y = 0.0
            feasible = False
        den20 = x * x + y * y
        den30 = (d - x) * (d - x) + y * y
        c20 = (y * y / den20) if den20 > 0.0 else 0.0
        c30 = (y * y / den30) if den30 > 0.0 else 0.0
        iterations = i + 1
        if i > 0:
            delta = math.hypot(x - px, y - py)
            if delta < tol:
                break
        px = x
        py = y
    return (x, y, r20, r30, c20, c30, iterations, delta, feasible)
