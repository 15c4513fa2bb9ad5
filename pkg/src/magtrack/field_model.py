"""Closed-form magnetic dipole physics for in-plane 2D localization.

Conventions used throughout the package:

* Lengths are centimeters, flux densities are microtesla (uT), so the
  calibration constant K carries uT^2*cm^6.
* Each anchor is an AC-driven dipole whose axis points along +Y
  (perpendicular to the baseline, into the interaction half-plane).
* The source strength is the effective moment ``m_eff`` with
  ``K = m_eff**2``.  With that convention the squared magnitude of the
  in-plane field amplitude is

      |H|^2 = K * r**-6 * (3*cos(theta)**2 + 1)

  where r is the distance from the dipole center and theta the angle
  between the dipole axis and the line of sight.  The radial and
  tangential amplitude components are ``2*m_eff*cos(theta)/r**3`` and
  ``m_eff*sin(theta)/r**3``.
* The sensor is assumed to lie in the plane of the dipole centers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGeometry, DomainError, OutOfRange

UNIT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Vec2:
    """In-plane coordinates (cm) in the rig frame."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"Vec2 components must be finite, got ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Vec3:
    """One 3-axis flux-density reading (uT per sensor axis)."""

    hx: float
    hy: float
    hz: float

    def __post_init__(self):
        for name in ("hx", "hy", "hz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not all(math.isfinite(v) for v in (self.hx, self.hy, self.hz)):
            raise DomainError("Vec3 components must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.hx, self.hy, self.hz)

    def norm(self) -> float:
        return math.sqrt(self.hx**2 + self.hy**2 + self.hz**2)


@dataclass(frozen=True)
class DipoleSource:
    """An AC-driven dipole anchor.

    ``m_eff`` is the effective moment (uT*cm^3); the scalar magnitude law
    above holds with K = m_eff**2.  ``axis`` must be a unit vector.
    """

    position: Vec2
    axis: Vec2
    m_eff: float
    frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if abs(self.axis.norm() - 1.0) > UNIT_TOLERANCE:
            raise DomainError(f"axis must be a unit vector, |axis|={self.axis.norm()!r}")
        if self.m_eff <= 0:
            raise DomainError("m_eff must be positive")
        if self.frequency <= 0:
            raise DomainError("frequency must be positive")


@dataclass
class RigConfig:
    """Two-anchor geometry plus the signal constants of the rig.

    The anchors sit at (0, 0) and (baseline_d, 0) with their axes along
    +Y.  ``k20``/``k30`` are the calibrated magnitude constants for the
    low- and high-frequency anchor and stay None until calibration.
    ``buffer_len`` is the analysis window length; both tone frequencies
    must land on exact DFT bins of that window.
    """

    baseline_d: float = 10.0
    f20: float = 20.0
    f30: float = 30.0
    sample_rate: float = 100.0
    k20: float | None = None
    k30: float | None = None
    min_valid_distance: float = 0.25
    buffer_len: int = 50

    def __post_init__(self):
        if self.baseline_d <= 0:
            raise DomainError("baseline_d must be positive")
        if self.f20 == self.f30:
            raise DomainError("anchor frequencies must differ")
        nyquist = self.sample_rate / 2.0
        if not (0 < self.f20 < nyquist and 0 < self.f30 < nyquist):
            raise DomainError("both tone frequencies must lie below Nyquist")
        if self.buffer_len < 2:
            raise DomainError("buffer_len must be at least 2")
        for f in (self.f20, self.f30):
            cycles = self.buffer_len * f / self.sample_rate
            if abs(cycles - round(cycles)) > 1e-9:
                raise DomainError(
                    f"buffer_len={self.buffer_len} does not give an exact DFT bin "
                    f"for {f} Hz at fs={self.sample_rate} Hz"
                )
        for k in (self.k20, self.k30):
            if k is not None and k <= 0:
                raise DomainError("calibrated K must be positive")
        if self.min_valid_distance < 0:
            raise DomainError("min_valid_distance must be non-negative")

    @property
    def calibrated(self) -> bool:
        return self.k20 is not None and self.k30 is not None

    def anchor20(self) -> Vec2:
        return Vec2(0.0, 0.0)

    def anchor30(self) -> Vec2:
        return Vec2(self.baseline_d, 0.0)


def dipole_field_at(src: DipoleSource, sensor: Vec2) -> Vec2:
    """In-plane field amplitude vector of ``src`` at ``sensor``.

    Evaluates m_eff/r^3 * (3*(a.rhat)*rhat - a); the radial component of
    that vector is 2*m_eff*cos(theta)/r^3 and the tangential component is
    m_eff*sin(theta)/r^3.
    """
    d = sensor - src.position
    r = d.norm()
    if r == 0.0:
        raise DegenerateGeometry("sensor coincides with the dipole center")
    rhat = d * (1.0 / r)
    adot = src.axis.dot(rhat)
    scale = src.m_eff / r**3
    return Vec2(
        scale * (3.0 * adot * rhat.x - src.axis.x),
        scale * (3.0 * adot * rhat.y - src.axis.y),
    )


def field_magnitude_sq(k: float, r: float, cos2theta: float) -> float:
    """Squared total field amplitude k * r^-6 * (3*cos2theta + 1)."""
    _check_magnitude_args(k, cos2theta)
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    return k * r**-6 * (3.0 * cos2theta + 1.0)


def invert_radius(k: float, cos2theta: float, h_sq: float, noise_floor_sq: float = 0.0) -> float:
    """Radius from the magnitude law: (k*(3*cos2theta+1)/h_sq)**(1/6).

    Raises OutOfRange when ``h_sq`` does not exceed ``noise_floor_sq``
    (the sensor has left the trackable area).
    """
    _check_magnitude_args(k, cos2theta)
    if h_sq <= noise_floor_sq or h_sq <= 0.0:
        raise OutOfRange(f"h_sq={h_sq} is at or below the noise floor {noise_floor_sq}")
    return (k * (3.0 * cos2theta + 1.0) / h_sq) ** (1.0 / 6.0)


def _check_magnitude_args(k: float, cos2theta: float) -> None:
    if k <= 0:
        raise DomainError(f"k must be positive, got {k}")
    if not 0.0 <= cos2theta <= 1.0:
        raise DomainError(f"cos2theta must lie in [0, 1], got {cos2theta}")
