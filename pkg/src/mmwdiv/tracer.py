"""Shadowing-tracing state machine: path reselection and LOS probing.

The transceiver communicates on the strongest stored path, watches its gain
every packet, walks down the stored path list when the gain drops below the
next stored gain, and, while parked on a reflected path, briefly probes the
primary path every ``probe_period_s`` to detect the blocker moving away.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np


class TracerPhase(enum.Enum):
    INITIALIZE = "initialize"
    NORMAL = "normal"
    RESELECTION = "reselection"
    NLOS_COMM = "nlos_comm"


class ActionKind(enum.Enum):
    BEAM_TO = "beam_to"
    PROBE = "probe"
    RESTART_BEAMFORMING = "restart_beamforming"
    STAY = "stay"


class TracerContractError(RuntimeError):
    "A measurement was supplied for a path the tracer is not beamed to."


@dataclass(frozen=True)
class TracerConfig:
    """Timing knobs of the tracing procedure.

    ``dramatic_drop_threshold`` defaults to the weakest stored base gain;
    ``rebeamform_period_s`` of None disables periodic re-beamforming.
    """

    probe_period_s: float = 0.020
    beam_switch_s: float = 1.0e-4
    packet_duration_s: float = 2.097e-3
    rebeamform_period_s: float | None = None
    dramatic_drop_threshold: float | None = None
    restart_dead_time_s: float = 0.010

    def __post_init__(self):
        if min(self.probe_period_s, self.beam_switch_s, self.packet_duration_s) <= 0:
            raise ValueError("durations must be positive")
        if self.rebeamform_period_s is not None and self.rebeamform_period_s <= 0:
            raise ValueError("re-beamforming period must be positive when set")
        if self.restart_dead_time_s <= 0:
            raise ValueError("restart dead time must be positive")
        if self.beam_switch_s >= self.probe_period_s:
            raise ValueError("beam switch time must be below the probe period")


@dataclass(frozen=True)
class TracerAction:
    "One decision taken by the tracer, with the communication pause it cost."

    kind: ActionKind
    path: int | None
    cost_s: float

    def __post_init__(self):
        if self.cost_s < 0:
            raise ValueError("action cost cannot be negative")


STAY = TracerAction(kind=ActionKind.STAY, path=None, cost_s=0.0)


@dataclass(frozen=True)
class TracerState:
    """Tracer state between steps.

    ``k`` indexes the sorted order (1 = strongest stored path);
    ``original_indices[k-1]`` maps it back to the caller's path numbering.
    """

    phase: TracerPhase
    k: int
    sorted_base_gains: np.ndarray
    original_indices: tuple
    stored_tx_steering: np.ndarray
    stored_rx_steering: np.ndarray
    next_probe_s: float
    next_rebeamform_s: float

    @property
    def n_paths(self) -> int:
        return len(self.original_indices)

    @property
    def current_original_index(self) -> int:
        return self.original_indices[self.k - 1]


def tracer_init(base_gains, tx_steering, rx_steering, config: TracerConfig, t: float = 0.0) -> TracerState:
    """Store gains and steering vectors sorted by descending gain.

    Ties keep the original path order.  Starts in NORMAL on the strongest
    path with the probe and re-beamforming timers armed.
    """
    gains = np.asarray(base_gains, dtype=float)
    if gains.size < 1:
        raise ValueError("at least one path is required")
    if np.any(gains <= 0):
        raise ValueError("base gains must be positive")
    order = np.argsort(-gains, kind="stable")
    rebeam = math.inf if config.rebeamform_period_s is None else t + config.rebeamform_period_s
    return TracerState(
        phase=TracerPhase.NORMAL,
        k=1,
        sorted_base_gains=gains[order],
        original_indices=tuple(int(i) + 1 for i in order),
        stored_tx_steering=np.asarray(tx_steering)[:, order],
        stored_rx_steering=np.asarray(rx_steering)[:, order],
        next_probe_s=t + config.probe_period_s,
        next_rebeamform_s=rebeam,
    )


def _drop_threshold(state: TracerState, config: TracerConfig) -> float:
    if config.dramatic_drop_threshold is not None:
        return config.dramatic_drop_threshold
    return float(state.sorted_base_gains[-1])


def _restart(state: TracerState, config: TracerConfig):
    new = replace(state, phase=TracerPhase.INITIALIZE)
    action = TracerAction(
        kind=ActionKind.RESTART_BEAMFORMING, path=None, cost_s=config.restart_dead_time_s
    )
    return new, action


def tracer_step(
    state: TracerState,
    t: float,
    measured_gain: float,
    config: TracerConfig,
    probe_gain: float | None = None,
    measured_path: int | None = None,
):
    """Advance the state machine by one measurement.

    ``measured_gain`` is the gain of the path currently beamed to,
    estimated perfectly at a packet boundary (NORMAL / NLOS) or right
    after a beam switch (RESELECTION).  ``probe_gain`` carries the primary
    path's gain at probe epochs in NLOS communication.

    Returns the new state and the action taken.
    """
    if measured_path is not None and measured_path != state.current_original_index:
        raise TracerContractError(
            f"measurement is for path {measured_path}, but the tracer is beamed "
            f"to path {state.current_original_index}"
        )
    n = state.n_paths

    if state.phase is TracerPhase.INITIALIZE:
        raise ValueError("tracer must be re-initialized after a beamforming restart")

    if state.phase is TracerPhase.NORMAL:
        # drop below the second-strongest stored gain starts reselection
        threshold = state.sorted_base_gains[min(2, n) - 1]
        if measured_gain < threshold:
            k = min(2, n)
            new = replace(state, phase=TracerPhase.RESELECTION, k=k)
            return new, TracerAction(
                kind=ActionKind.BEAM_TO, path=k, cost_s=config.beam_switch_s
            )
        return state, STAY

    if state.phase is TracerPhase.RESELECTION:
        threshold = state.sorted_base_gains[min(state.k + 1, n) - 1]
        if measured_gain < threshold:
            if state.k < n:
                k = state.k + 1
                new = replace(state, k=k)
                return new, TracerAction(
                    kind=ActionKind.BEAM_TO, path=k, cost_s=config.beam_switch_s
                )
            return _restart(state, config)
        new = replace(state, phase=TracerPhase.NLOS_COMM, next_probe_s=t + config.probe_period_s)
        return new, STAY

    # NLOS communication
    if t >= state.next_rebeamform_s:
        return _restart(state, config)
    if measured_gain < _drop_threshold(state, config):
        return _restart(state, config)
    if probe_gain is not None:
        if t + 1e-12 < state.next_probe_s:
            raise TracerContractError("probe measurement supplied before the probe epoch")
        cost = 2.0 * config.beam_switch_s
        if probe_gain > state.sorted_base_gains[state.k - 1]:
            new = replace(state, phase=TracerPhase.NORMAL, k=1)
            return new, TracerAction(kind=ActionKind.BEAM_TO, path=1, cost_s=cost)
        new = replace(state, next_probe_s=state.next_probe_s + config.probe_period_s)
        return new, TracerAction(kind=ActionKind.PROBE, path=1, cost_s=cost)
    return state, STAY


def efficiency_degradation(t_bs: float, t_p: float) -> float:
    "Fraction of air time lost to probing: 2 T_BS / T_P."
    if t_bs <= 0 or t_p <= 0:
        raise ValueError("durations must be positive")
    if 2.0 * t_bs > t_p:
        raise ValueError("probe period must cover the round-trip beam switch")
    return 2.0 * t_bs / t_p
