"""Multipath geometry, blockage attenuation, and channel assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arraygeom import SPEED_OF_LIGHT, ArrayGeometry, Direction, steering_vector


def friis_path_loss_db(distance_m: float, carrier_hz: float) -> float:
    "Free-space path loss 20 log10(4 pi d f / c), in dB."
    if distance_m <= 0:
        raise ValueError("distance must be positive")
    if carrier_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return 20.0 * math.log10(4.0 * math.pi * distance_m * carrier_hz / SPEED_OF_LIGHT)


def base_gain(length_m: float, reflection_loss_db: float, carrier_hz: float) -> float:
    "Linear amplitude gain of a path: propagation loss plus reflection loss."
    pl_db = friis_path_loss_db(length_m, carrier_hz)
    return 10.0 ** (-(pl_db + reflection_loss_db) / 20.0)


def quantize_delay_chips(path_length_m: float, los_length_m: float, chip_s: float) -> int:
    """Excess delay of a path versus the LOS path, rounded to whole chips.

    Rounds half away from zero, so an excess of 6.21 chips gives 6 and an
    excess of 2.5 chips gives 3.
    """
    if path_length_m < los_length_m:
        raise ValueError("path cannot be shorter than the LOS path")
    if chip_s <= 0:
        raise ValueError("chip time must be positive")
    excess = (path_length_m - los_length_m) / SPEED_OF_LIGHT / chip_s
    return int(math.floor(excess + 0.5))


@dataclass(frozen=True)
class PathSpec:
    """Static description of one propagation path.

    ``tx_direction``/``rx_direction`` point from the respective array
    toward the reflector (toward the far end for the LOS path).  Path 1 is
    the LOS reference: zero reflection loss and zero chip delay.
    """

    index: int
    tx_direction: Direction
    rx_direction: Direction
    length_m: float
    reflection_loss_db: float
    delay_chips: int
    base_gain: float

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("path index is 1-based")
        if self.length_m <= 0:
            raise ValueError("path length must be positive")
        if self.reflection_loss_db < 0:
            raise ValueError("reflection loss cannot be negative")
        if self.delay_chips < 0:
            raise ValueError("chip delay cannot be negative")
        if self.base_gain <= 0:
            raise ValueError("base gain must be positive")
        if self.index == 1 and (self.reflection_loss_db != 0 or self.delay_chips != 0):
            raise ValueError("path 1 is the LOS reference: no reflection loss or delay")

    @classmethod
    def from_geometry(
        cls,
        index: int,
        tx_direction: Direction,
        rx_direction: Direction,
        length_m: float,
        reflection_loss_db: float,
        carrier_hz: float,
        chip_s: float,
        los_length_m: float | None = None,
    ) -> "PathSpec":
        "Build a path with gain and chip delay derived from its geometry."
        los = length_m if los_length_m is None else los_length_m
        return cls(
            index=index,
            tx_direction=tx_direction,
            rx_direction=rx_direction,
            length_m=length_m,
            reflection_loss_db=reflection_loss_db,
            delay_chips=quantize_delay_chips(length_m, los, chip_s),
            base_gain=base_gain(length_m, reflection_loss_db, carrier_hz),
        )

    def validate_against(self, carrier_hz: float, rel_tol: float = 1e-9) -> None:
        "Check that the stored base gain matches length and reflection loss."
        expected = base_gain(self.length_m, self.reflection_loss_db, carrier_hz)
        if not math.isclose(self.base_gain, expected, rel_tol=rel_tol):
            raise ValueError(
                f"path {self.index}: base gain {self.base_gain:.6e} inconsistent "
                f"with length/reflection loss (expected {expected:.6e})"
            )


@dataclass(frozen=True)
class ShadowingEvent:
    """One human-blockage episode on a path: a trapezoid in dB over time.

    Attenuation ramps linearly (in dB) from 0 to ``max_attenuation_db``
    over ``decay_s``, holds, then ramps back to 0 over the final
    ``rise_s``.  ``total_s`` covers the whole episode including both ramps.
    """

    path_index: int
    start_s: float
    decay_s: float = 0.0557
    total_s: float = 0.664
    rise_s: float = 0.0318
    max_attenuation_db: float = 23.3

    def __post_init__(self):
        if min(self.decay_s, self.total_s, self.rise_s) <= 0:
            raise ValueError("event durations must be positive")
        if self.decay_s + self.rise_s > self.total_s:
            raise ValueError("decay and rise ramps cannot exceed the total duration")
        if self.max_attenuation_db < 0:
            raise ValueError("attenuation cannot be negative")


def shadow_attenuation_db(event: ShadowingEvent, t: float) -> float:
    "Attenuation of the event at time t, in dB.  Continuous in t."
    dt = t - event.start_s
    if dt <= 0.0 or dt >= event.total_s:
        return 0.0
    if dt < event.decay_s:
        return event.max_attenuation_db * dt / event.decay_s
    if dt <= event.total_s - event.rise_s:
        return event.max_attenuation_db
    return event.max_attenuation_db * (event.total_s - dt) / event.rise_s


def instantaneous_gain(path: PathSpec, events, t: float) -> float:
    "Path amplitude at time t: base gain reduced by all active blockages."
    total_db = sum(
        shadow_attenuation_db(ev, t) for ev in events if ev.path_index == path.index
    )
    return path.base_gain * 10.0 ** (-total_db / 20.0)


@dataclass(frozen=True)
class ChannelSnapshot:
    """Channel state at one instant.

    ``matrices[l]`` is the rank-one per-path matrix lambda_l(t) * g_l h_l^T
    built from unit-modulus steering vectors, so its Frobenius norm is
    sqrt(N_t N_r) * lambda_l(t) and conjugate beamforming on path l yields
    the full lambda_l^2 N_t N_r array gain.
    """

    time_s: float
    gains: np.ndarray
    matrices: np.ndarray


def snapshot(
    paths,
    tx_geometry: ArrayGeometry,
    rx_geometry: ArrayGeometry,
    events,
    t: float,
    carrier_hz: float,
) -> ChannelSnapshot:
    """Assemble the per-path channel matrices at time t.

    The receive steering vector uses the propagation direction of the
    incoming wave, i.e. the stored look direction reversed.
    """
    paths = list(paths)
    if not paths:
        raise ValueError("at least one path is required")
    gains = np.array([instantaneous_gain(p, events, t) for p in paths])
    matrices = np.empty((len(paths), rx_geometry.count, tx_geometry.count), dtype=complex)
    for l, path in enumerate(paths):
        h = steering_vector(tx_geometry, path.tx_direction, carrier_hz).entries
        g = steering_vector(rx_geometry, path.rx_direction.reversed(), carrier_hz).entries
        matrices[l] = gains[l] * np.outer(g, h)
    return ChannelSnapshot(time_s=t, gains=gains, matrices=matrices)
