"""Antenna array geometry, propagation delays, and steering vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 3.0e8
"""Propagation speed used throughout, m/s."""


def _wrap_azimuth(phi: float) -> float:
    "Wrap an angle to [-pi, pi)."
    return (phi + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class Direction:
    """Direction a wavefront travels, as azimuth/elevation in radians.

    Azimuth is measured in the horizontal plane from +x and wrapped to
    [-pi, pi); elevation is measured from the horizontal plane, in
    [-pi/2, pi/2].
    """

    azimuth_rad: float
    elevation_rad: float

    def __post_init__(self):
        if not (math.isfinite(self.azimuth_rad) and math.isfinite(self.elevation_rad)):
            raise ValueError("direction angles must be finite")
        if abs(self.elevation_rad) > math.pi / 2 + 1e-12:
            raise ValueError("elevation must lie in [-pi/2, pi/2]")
        object.__setattr__(self, "azimuth_rad", _wrap_azimuth(self.azimuth_rad))

    @classmethod
    def from_degrees(cls, azimuth_deg: float, elevation_deg: float) -> "Direction":
        return cls(math.radians(azimuth_deg), math.radians(elevation_deg))

    def unit_vector(self) -> np.ndarray:
        "Unit (x, y, z) vector along the propagation direction."
        ce = math.cos(self.elevation_rad)
        return np.array(
            [
                ce * math.cos(self.azimuth_rad),
                ce * math.sin(self.azimuth_rad),
                math.sin(self.elevation_rad),
            ]
        )

    def reversed(self) -> "Direction":
        "The same ray travelled the opposite way."
        return Direction(self.azimuth_rad + math.pi, -self.elevation_rad)


@dataclass(frozen=True)
class ArrayGeometry:
    """Element positions of an antenna array, in meters.

    Element 1 is the phase reference: its relative delay is exactly zero
    for every direction.  Instances are treated as immutable.
    """

    elements: np.ndarray
    count: int

    def __post_init__(self):
        elements = np.asarray(self.elements, dtype=float)
        if elements.ndim != 2 or elements.shape[1] != 3:
            raise ValueError("elements must be an (n, 3) position array")
        if self.count < 1 or self.count != elements.shape[0]:
            raise ValueError("count must be >= 1 and equal the number of elements")
        if not np.all(np.isfinite(elements)):
            raise ValueError("element coordinates must be finite")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def uniform_linear(
        cls, count: int, spacing_m: float, axis=(0.0, 0.0, 1.0)
    ) -> "ArrayGeometry":
        "Uniform linear array along ``axis`` with the given element spacing."
        axis = np.asarray(axis, dtype=float)
        norm = np.linalg.norm(axis)
        if norm == 0.0 or not np.all(np.isfinite(axis)):
            raise ValueError("array axis must be a finite non-zero vector")
        positions = np.outer(np.arange(count) * spacing_m, axis / norm)
        return cls(elements=positions, count=count)


@dataclass(frozen=True)
class SteeringVector:
    """Array phase response toward one direction.

    Entries have unit modulus, with no 1/sqrt(N) prefactor: path amplitude
    lives entirely in the channel coefficient, and the N_t * N_r array
    factor shows up explicitly in the power gains.  Entry 1 is exactly 1.
    """

    entries: np.ndarray
    direction: Direction
    carrier_hz: float


def relative_delay(geometry: ArrayGeometry, direction: Direction, i: int) -> float:
    """Propagation delay of element ``i`` relative to element 1, in seconds.

    ``i`` is 1-based.  The delay is positive when element ``i`` sits
    farther along the propagation direction than the reference element.
    """
    if not 1 <= i <= geometry.count:
        raise IndexError(f"element index {i} out of range 1..{geometry.count}")
    u = direction.unit_vector()
    return float((geometry.elements[i - 1] - geometry.elements[0]) @ u) / SPEED_OF_LIGHT


def relative_delays(geometry: ArrayGeometry, direction: Direction) -> np.ndarray:
    "Relative delays of every element at once, seconds."
    u = direction.unit_vector()
    return (geometry.elements - geometry.elements[0]) @ u / SPEED_OF_LIGHT


def steering_vector(
    geometry: ArrayGeometry, direction: Direction, carrier_hz: float
) -> SteeringVector:
    """Steering vector exp(j 2 pi f tau_i) for the given direction.

    Args:
        geometry: array element positions.
        direction: propagation direction of the wavefront.
        carrier_hz: carrier frequency, > 0.
    """
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    tau = relative_delays(geometry, direction)
    entries = np.exp(2j * np.pi * carrier_hz * tau)
    # tau[0] == 0 by construction; pin the reference entry exactly
    entries[0] = 1.0
    return SteeringVector(entries=entries, direction=direction, carrier_hz=carrier_hz)


def steering_matrix(geometry, directions, carrier_hz) -> np.ndarray:
    "Steering vectors stacked as columns, one per direction."
    return np.stack(
        [steering_vector(geometry, d, carrier_hz).entries for d in directions], axis=1
    )
