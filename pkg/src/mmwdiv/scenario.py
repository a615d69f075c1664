"""Scenario configuration, experiment runners, and CSV/JSON emission."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .arraygeom import ArrayGeometry, Direction, steering_matrix
from .beamform import (
    Scheme,
    eg_awv_apc,
    eg_awv_pc,
    eg_gain_targets,
    ms_awv,
    non_diversity_awv,
    received_power_dbm,
    total_power_gain,
)
from .channel import (
    ChannelSnapshot,
    PathSpec,
    ShadowingEvent,
    instantaneous_gain,
    snapshot,
)
from .phy import compound_path_gains, equivalent_taps, ber_curve
from .tracer import (
    ActionKind,
    TracerConfig,
    TracerPhase,
    efficiency_degradation,
    tracer_init,
    tracer_step,
)

EXPERIMENTS = ("power_trace", "ber", "tracer_log")
BER_CASES = ("non_blocked", "blocked")

DEFAULT_CARRIER_HZ = 60e9
DEFAULT_CHIP_S = 0.57e-9
DEFAULT_P_TX_DBM = 10.0


@dataclass(frozen=True)
class ArraySpec:
    "Uniform linear array description: element count, spacing, axis."

    count: int = 20
    spacing_m: float = 2.5e-3
    axis: tuple = (0.0, 0.0, 1.0)

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry.uniform_linear(self.count, self.spacing_m, self.axis)


@dataclass(frozen=True)
class TimeGrid:
    start_s: float
    end_s: float
    step_s: float

    def __post_init__(self):
        if self.step_s <= 0 or self.end_s <= self.start_s:
            raise ValueError("time grid must be strictly increasing")

    def times(self) -> np.ndarray:
        n = int(math.floor((self.end_s - self.start_s) / self.step_s + 0.5)) + 1
        return self.start_s + self.step_s * np.arange(n)


@dataclass(frozen=True)
class Scenario:
    """Everything one experiment run needs.

    ``experiment`` selects which runner consumes the scenario; grids and
    options that other experiment kinds use may be absent.
    """

    experiment: str
    carrier_hz: float
    chip_s: float
    tx_array: ArraySpec
    rx_array: ArraySpec
    paths: tuple
    events: tuple
    schemes: tuple
    p_tx_dbm: float = DEFAULT_P_TX_DBM
    seed: int = 0
    time_grid: TimeGrid | None = None
    snr_grid_db: tuple = ()
    ber_options: dict = field(default_factory=dict)
    tracer: TracerConfig = field(default_factory=TracerConfig)
    eg_readapt_on_rebeamform: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if not self.paths:
            raise ValueError("at least one path is required")
        indices = [p.index for p in self.paths]
        if indices != list(range(1, len(indices) + 1)):
            raise ValueError("paths must be numbered 1..N in order")
        for ev in self.events:
            if ev.path_index not in indices:
                raise ValueError(f"event targets unknown path {ev.path_index}")
        for p in self.paths:
            p.validate_against(self.carrier_hz)

    @property
    def base_gains(self) -> np.ndarray:
        return np.array([p.base_gain for p in self.paths])


# --- output records -------------------------------------------------------

@dataclass(frozen=True)
class PowerTraceRecord:
    time_s: float
    scheme: str
    rx_power_dbm: float


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    scheme: str
    case: str
    bits: int
    errors: int
    ber: float
    low_confidence: bool


@dataclass(frozen=True)
class TracerLogRecord:
    time_s: float
    phase_before: str
    phase_after: str
    k: int
    action: str
    cost_s: float


COLUMNS = {
    PowerTraceRecord: ("time_s", "scheme", "rx_power_dbm"),
    BerRecord: ("snr_db", "scheme", "case", "bits", "errors", "ber", "low_confidence"),
    TracerLogRecord: ("time_s", "phase_before", "phase_after", "k", "action", "cost_s"),
}


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def emit_csv(records, stream) -> None:
    "Write records as CSV with the fixed per-experiment column schema."
    if not records:
        raise ValueError("nothing to emit")
    columns = COLUMNS[type(records[0])]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_cell(getattr(rec, c)) for c in columns])


def emit_json(records, stream) -> None:
    "Write records as a JSON list of row objects."
    if not records:
        raise ValueError("nothing to emit")
    stream.write(json.dumps([dataclasses.asdict(r) for r in records], indent=2))
    stream.write("\n")


# --- scenario construction ------------------------------------------------

def _direction_from_cfg(prefix: str, entry: dict) -> Direction:
    return Direction.from_degrees(
        float(entry[f"{prefix}_azimuth_deg"]), float(entry[f"{prefix}_elevation_deg"])
    )


def _array_from_cfg(entry: dict) -> ArraySpec:
    return ArraySpec(
        count=int(entry.get("count", 20)),
        spacing_m=float(entry.get("spacing_mm", 2.5)) * 1e-3,
        axis=tuple(float(x) for x in entry.get("axis", (0.0, 0.0, 1.0))),
    )


def scenario_from_dict(data: dict, experiment: str | None = None, seed_override: int | None = None) -> Scenario:
    """Build a scenario from parsed configuration data.

    ``experiment`` (e.g. from the CLI verb) wins over the file; a file that
    names a different experiment than the caller asked for is an error.
    """
    file_experiment = data.get("experiment")
    if experiment is None:
        experiment = file_experiment
    elif file_experiment is not None and file_experiment != experiment:
        raise ValueError(
            f"config is for experiment {file_experiment!r}, not {experiment!r}"
        )
    if experiment is None:
        raise ValueError("no experiment kind given")

    carrier_hz = float(data["carrier_hz"])
    chip_s = float(data.get("chip_s", DEFAULT_CHIP_S))
    raw_paths = data.get("paths", ())
    if not raw_paths:
        raise ValueError("config must define at least one path")
    los_length = float(raw_paths[0]["length_m"])
    paths = tuple(
        PathSpec.from_geometry(
            index=i + 1,
            tx_direction=_direction_from_cfg("tx", entry),
            rx_direction=_direction_from_cfg("rx", entry),
            length_m=float(entry["length_m"]),
            reflection_loss_db=float(entry.get("reflection_loss_db", 0.0)),
            carrier_hz=carrier_hz,
            chip_s=chip_s,
            los_length_m=los_length,
        )
        for i, entry in enumerate(raw_paths)
    )
    events = tuple(
        ShadowingEvent(
            path_index=int(ev["path_index"]),
            start_s=float(ev["start_s"]),
            decay_s=float(ev.get("decay_s", 0.0557)),
            total_s=float(ev.get("total_s", 0.664)),
            rise_s=float(ev.get("rise_s", 0.0318)),
            max_attenuation_db=float(ev.get("max_attenuation_db", 23.3)),
        )
        for ev in data.get("events", ())
    )
    try:
        schemes = tuple(Scheme(s) for s in data.get("schemes", ()))
    except ValueError as exc:
        raise ValueError(f"unknown scheme in config: {exc}") from None

    grid = None
    if "time_grid" in data:
        tg = data["time_grid"]
        grid = TimeGrid(float(tg["start_s"]), float(tg["end_s"]), float(tg["step_s"]))
    tracer_cfg = TracerConfig(**data.get("tracer", {}))
    seed = int(data.get("seed", 0)) if seed_override is None else int(seed_override)

    return Scenario(
        experiment=experiment,
        carrier_hz=carrier_hz,
        chip_s=chip_s,
        tx_array=_array_from_cfg(data.get("tx_array", {})),
        rx_array=_array_from_cfg(data.get("rx_array", {})),
        paths=paths,
        events=events,
        schemes=schemes,
        p_tx_dbm=float(data.get("p_tx_dbm", DEFAULT_P_TX_DBM)),
        seed=seed,
        time_grid=grid,
        snr_grid_db=tuple(float(s) for s in data.get("snr_grid_db", ())),
        ber_options=dict(data.get("ber", {})),
        tracer=tracer_cfg,
        eg_readapt_on_rebeamform=bool(data.get("eg_readapt_on_rebeamform", False)),
    )


def load_scenario(path, experiment: str | None = None, seed_override: int | None = None) -> Scenario:
    "Read a JSON configuration file and build the scenario."
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return scenario_from_dict(data, experiment=experiment, seed_override=seed_override)


LOS_LENGTH_M = 7.0
CEILING_HEIGHT_M = 2.0


def office_scenario(
    reflection_loss_db: float = 8.0,
    experiment: str = "power_trace",
    blockage_start_s: float = 0.4,
    schemes=("ms", "eg_pc", "eg_apc", "non_diversity"),
    seed: int = 1,
    time_grid: TimeGrid | None = None,
    snr_grid_db=(),
    ber_options: dict | None = None,
    tracer: TracerConfig | None = None,
    blockage: bool = True,
) -> Scenario:
    """Bundled default: a 7 m link with one ceiling bounce and one blocker.

    Two paths, 20-element vertical half-wavelength arrays at both ends,
    10 dBm transmit power, and a person crossing the LOS at
    ``blockage_start_s``.  The ceiling path's excess length puts it 6 chip
    intervals behind the LOS at the 0.57 ns chip time.
    """
    carrier = DEFAULT_CARRIER_HZ
    ceiling_len = 2.0 * math.hypot(LOS_LENGTH_M / 2.0, CEILING_HEIGHT_M)
    elev = math.degrees(math.atan2(CEILING_HEIGHT_M, LOS_LENGTH_M / 2.0))
    paths = (
        PathSpec.from_geometry(
            index=1,
            tx_direction=Direction.from_degrees(0.0, 0.0),
            rx_direction=Direction.from_degrees(180.0, 0.0),
            length_m=LOS_LENGTH_M,
            reflection_loss_db=0.0,
            carrier_hz=carrier,
            chip_s=DEFAULT_CHIP_S,
        ),
        PathSpec.from_geometry(
            index=2,
            tx_direction=Direction.from_degrees(0.0, elev),
            rx_direction=Direction.from_degrees(180.0, elev),
            length_m=ceiling_len,
            reflection_loss_db=reflection_loss_db,
            carrier_hz=carrier,
            chip_s=DEFAULT_CHIP_S,
            los_length_m=LOS_LENGTH_M,
        ),
    )
    events = (ShadowingEvent(path_index=1, start_s=blockage_start_s),) if blockage else ()
    return Scenario(
        experiment=experiment,
        carrier_hz=carrier,
        chip_s=DEFAULT_CHIP_S,
        tx_array=ArraySpec(),
        rx_array=ArraySpec(),
        paths=paths,
        events=events,
        schemes=tuple(Scheme(s) for s in schemes),
        seed=seed,
        time_grid=time_grid or TimeGrid(0.0, 1.5, 0.001),
        snr_grid_db=tuple(snr_grid_db),
        ber_options=dict(ber_options or {}),
        tracer=tracer or TracerConfig(),
    )


# --- tracer simulation ----------------------------------------------------

def _matrices(sc: Scenario):
    tx_geom = sc.tx_array.geometry()
    rx_geom = sc.rx_array.geometry()
    h_cols = steering_matrix(tx_geom, [p.tx_direction for p in sc.paths], sc.carrier_hz)
    g_cols = steering_matrix(
        rx_geom, [p.rx_direction.reversed() for p in sc.paths], sc.carrier_hz
    )
    return tx_geom, rx_geom, h_cols, g_cols


def _simulate_tracer(sc: Scenario, t_start: float, t_end: float):
    """Drive the tracer with true gains at packet and probe cadence.

    Returns (records, stats, schedule, reinits) where schedule maps time to
    the original index of the path beamed to (None while re-beamforming)
    and reinits lists (time, fresh_base_gains) for each restart.
    """
    cfg = sc.tracer
    _, _, h_cols, g_cols = _matrices(sc)
    by_index = {p.index: p for p in sc.paths}

    def gain_at(original_index: int, t: float) -> float:
        return instantaneous_gain(by_index[original_index], sc.events, t)

    state = tracer_init(sc.base_gains, h_cols, g_cols, cfg, t_start)
    records: list[TracerLogRecord] = []
    schedule = [(t_start, state.current_original_index)]
    reinits = []
    phase_time = {phase: 0.0 for phase in TracerPhase}
    phase_start = t_start
    probe_epochs = []
    total_pause = 0.0
    nlos_pause = 0.0
    next_packet = t_start + cfg.packet_duration_s
    pending_reselect_t = None

    def log(t, before, after, k, action):
        label = action.kind.value
        if action.path is not None:
            label = f"{label}({action.path})"
        records.append(
            TracerLogRecord(
                time_s=float(t),
                phase_before=before.value,
                phase_after=after.value,
                k=int(k),
                action=label,
                cost_s=float(action.cost_s),
            )
        )

    while True:
        if state.phase is TracerPhase.RESELECTION:
            t_next = pending_reselect_t
        else:
            t_next = next_packet
            if state.phase is TracerPhase.NLOS_COMM:
                t_next = min(t_next, state.next_probe_s)
        if t_next > t_end:
            break
        is_packet = (
            state.phase is not TracerPhase.RESELECTION
            and t_next >= next_packet - 1e-12
        )
        probe_gain = None
        if state.phase is TracerPhase.NLOS_COMM and t_next >= state.next_probe_s - 1e-12:
            probe_gain = gain_at(state.original_indices[0], t_next)
        measured = gain_at(state.current_original_index, t_next)

        before = state.phase
        new_state, action = tracer_step(
            state, t_next, measured, cfg, probe_gain=probe_gain
        )
        total_pause += action.cost_s
        if probe_gain is not None:
            probe_epochs.append(t_next)
            nlos_pause += action.cost_s
        if is_packet:
            next_packet += cfg.packet_duration_s

        if action.kind is ActionKind.RESTART_BEAMFORMING:
            log(t_next, before, new_state.phase, new_state.k, action)
            phase_time[before] += t_next - phase_start
            schedule.append((t_next, None))
            restart_done = t_next + cfg.restart_dead_time_s
            phase_start = t_next
            if restart_done > t_end:
                state = new_state
                break
            fresh = np.array([gain_at(p.index, restart_done) for p in sc.paths])
            state = tracer_init(fresh, h_cols, g_cols, cfg, restart_done)
            reinits.append((restart_done, fresh))
            phase_time[TracerPhase.INITIALIZE] += restart_done - phase_start
            phase_start = restart_done
            schedule.append((restart_done, state.current_original_index))
            log(
                restart_done,
                TracerPhase.INITIALIZE,
                state.phase,
                state.k,
                dataclasses.replace(action, kind=ActionKind.BEAM_TO, path=1, cost_s=0.0),
            )
            next_packet = restart_done + cfg.packet_duration_s
            pending_reselect_t = None
            continue

        pending_reselect_t = (
            t_next + cfg.beam_switch_s
            if new_state.phase is TracerPhase.RESELECTION
            else None
        )
        if action.kind is ActionKind.BEAM_TO:
            schedule.append((t_next, new_state.current_original_index))
        if action.kind is not ActionKind.STAY or new_state.phase is not before:
            log(t_next, before, new_state.phase, new_state.k, action)
        if new_state.phase is not before:
            phase_time[before] += t_next - phase_start
            phase_start = t_next
        state = new_state

    phase_time[state.phase] += t_end - phase_start
    nlos_s = phase_time[TracerPhase.NLOS_COMM]
    stats = {
        "time_per_phase_s": {ph.value: phase_time[ph] for ph in TracerPhase},
        "probe_count": len(probe_epochs),
        "probe_epochs_s": probe_epochs,
        "total_pause_s": total_pause,
        "nlos_pause_s": nlos_pause,
        "nlos_pause_fraction": (nlos_pause / nlos_s) if nlos_s > 0 else 0.0,
        "efficiency_eta": efficiency_degradation(cfg.beam_switch_s, cfg.probe_period_s),
    }
    return records, stats, schedule, reinits


# --- runners ---------------------------------------------------------------

def _require(condition, message: str):
    if not condition:
        raise ValueError(message)


def run_tracer_log(sc: Scenario):
    "Simulate the tracer over the time grid; returns (records, stats)."
    _require(sc.time_grid is not None, "tracer_log needs a time_grid")
    records, stats, _, _ = _simulate_tracer(sc, sc.time_grid.start_s, sc.time_grid.end_s)
    return records, stats


def _beam_lookup(schedule):
    "Turn the tracer schedule into a step function of time (holes held)."
    times = []
    beams = []
    current = schedule[0][1]
    for t, k in schedule:
        if k is None:
            k = current  # hold the previous beam while re-beamforming
        times.append(t)
        beams.append(k)
        current = k
    times = np.array(times)
    beams = np.array(beams)

    def lookup(t):
        idx = int(np.searchsorted(times, t + 1e-15, side="right") - 1)
        return int(beams[max(idx, 0)])

    return lookup


def run_power_trace(sc: Scenario) -> list[PowerTraceRecord]:
    """Received power of every configured scheme over the time grid.

    Equal-gain weights come from the stored base gains and stay frozen
    through blockage (they re-adapt only after a re-beamforming restart,
    and only when the scenario asks for that).  The strongest-path scheme
    follows an embedded tracer fed with true gains.
    """
    _require(sc.time_grid is not None, "power_trace needs a time_grid")
    tx_geom, rx_geom, h_cols, g_cols = _matrices(sc)
    n_t, n_r = sc.tx_array.count, sc.rx_array.count
    grid = sc.time_grid

    need_tracer = Scheme.MS in sc.schemes or sc.eg_readapt_on_rebeamform
    lookup = None
    reinits = []
    if need_tracer:
        _, _, schedule, reinits = _simulate_tracer(sc, grid.start_s, grid.end_s)
        lookup = _beam_lookup(schedule)

    def eg_pairs(base_gains):
        targets = eg_gain_targets(base_gains, n_t, n_r)
        return eg_awv_apc(h_cols, g_cols, targets), eg_awv_pc(h_cols, g_cols, targets)

    eg_segments = [(grid.start_s, *eg_pairs(sc.base_gains))]
    if sc.eg_readapt_on_rebeamform:
        for t_done, fresh in reinits:
            eg_segments.append((t_done, *eg_pairs(fresh)))

    nd_pair = non_diversity_awv(h_cols, g_cols)
    records = []
    for t in grid.times():
        snap = snapshot(sc.paths, tx_geom, rx_geom, sc.events, float(t), sc.carrier_hz)
        seg = max(
            (s for s in eg_segments if s[0] <= t + 1e-15),
            key=lambda s: s[0],
        )
        for scheme in sc.schemes:
            if scheme is Scheme.EG_APC:
                pair = seg[1]
            elif scheme is Scheme.EG_PC:
                pair = seg[2]
            elif scheme is Scheme.MS:
                pair = ms_awv(h_cols, g_cols, lookup(float(t)))
            else:
                pair = nd_pair
            gain = total_power_gain(pair.w_t, pair.w_r, snap)
            records.append(
                PowerTraceRecord(
                    time_s=float(t),
                    scheme=scheme.value,
                    rx_power_dbm=received_power_dbm(sc.p_tx_dbm, gain),
                )
            )
    return records


def _case_snapshot(sc: Scenario, case: str, h_cols, g_cols) -> ChannelSnapshot:
    "Channel snapshot for one BER case: LOS clear, or held at max attenuation."
    gains = sc.base_gains.copy()
    if case == "blocked":
        los_events = [ev for ev in sc.events if ev.path_index == 1]
        _require(los_events, "blocked BER case needs a blockage event on path 1")
        att = max(ev.max_attenuation_db for ev in los_events)
        gains[0] *= 10.0 ** (-att / 20.0)
    matrices = np.stack(
        [gains[l] * np.outer(g_cols[:, l], h_cols[:, l]) for l in range(len(sc.paths))]
    )
    return ChannelSnapshot(time_s=0.0, gains=gains, matrices=matrices)


def run_ber(sc: Scenario) -> list[BerRecord]:
    """Uncoded SC-FDE BER curves for every scheme and blockage case.

    Equal-gain weights are frozen at their beamforming-time values in both
    cases; the strongest-path scheme beams to whichever path is currently
    strongest.  Each (scheme, case) pair gets its own deterministic seed
    derived from the scenario seed.
    """
    _require(len(sc.snr_grid_db) > 0, "ber needs a non-empty snr_grid_db")
    _, _, h_cols, g_cols = _matrices(sc)
    n_t, n_r = sc.tx_array.count, sc.rx_array.count
    options = dict(sc.ber_options)
    cases = tuple(options.pop("cases", BER_CASES))
    for case in cases:
        _require(case in BER_CASES, f"unknown BER case {case!r}")
    block_len = int(options.pop("block_len", 512))
    cp_len = int(options.pop("cp_len", 64))
    stop_rule = {k: options[k] for k in ("min_errors", "max_bits") if k in options}

    targets = eg_gain_targets(sc.base_gains, n_t, n_r)
    delays = [p.delay_chips for p in sc.paths]
    records = []
    for si, scheme in enumerate(sc.schemes):
        for ci, case in enumerate(cases):
            snap = _case_snapshot(sc, case, h_cols, g_cols)
            if scheme is Scheme.EG_APC:
                pair = eg_awv_apc(h_cols, g_cols, targets)
            elif scheme is Scheme.EG_PC:
                pair = eg_awv_pc(h_cols, g_cols, targets)
            elif scheme is Scheme.MS:
                pair = ms_awv(h_cols, g_cols, int(np.argmax(snap.gains)) + 1)
            else:
                pair = non_diversity_awv(h_cols, g_cols)
            taps = equivalent_taps(
                compound_path_gains(snap, pair), delays, sc.chip_s, sc.carrier_hz
            )
            points = ber_curve(
                taps,
                sc.snr_grid_db,
                stop_rule=stop_rule or None,
                seed=[sc.seed, si, ci],
                block_len=block_len,
                cp_len=cp_len,
            )
            records.extend(
                BerRecord(
                    snr_db=p.snr_db,
                    scheme=scheme.value,
                    case=case,
                    bits=p.bits_sent,
                    errors=p.bit_errors,
                    ber=p.ber,
                    low_confidence=p.low_confidence,
                )
                for p in points
            )
    return records
