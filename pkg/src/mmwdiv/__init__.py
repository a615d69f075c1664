"""Link-level simulator for 60 GHz millimeter-wave spatial diversity.

Compares equal-gain multipath diversity (amplitude-and-phase or phase-only
weight control) against beamforming the single strongest path with
shadowing tracing, over a frequency-selective two-array channel with
human-induced blockage.
"""

from .arraygeom import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    Direction,
    SteeringVector,
    relative_delay,
    steering_matrix,
    steering_vector,
)
from .beamform import (
    AwvPair,
    DegenerateGeometryError,
    GainTargets,
    OptimalityReport,
    Scheme,
    eg_apc_gain_closed,
    eg_awv_apc,
    eg_awv_pc,
    eg_gain_targets,
    ms_awv,
    non_diversity_awv,
    phase_only,
    received_power_dbm,
    total_power_gain,
    verify_ms_optimality,
)
from .channel import (
    ChannelSnapshot,
    PathSpec,
    ShadowingEvent,
    base_gain,
    friis_path_loss_db,
    instantaneous_gain,
    quantize_delay_chips,
    shadow_attenuation_db,
    snapshot,
)
from .phy import (
    BerPoint,
    TapChannel,
    ber_curve,
    compound_path_gain,
    compound_path_gains,
    equivalent_taps,
    modulate_pi2bpsk,
    sc_fde_link,
)
from .scenario import (
    ArraySpec,
    BerRecord,
    PowerTraceRecord,
    Scenario,
    TimeGrid,
    TracerLogRecord,
    emit_csv,
    emit_json,
    load_scenario,
    office_scenario,
    run_ber,
    run_power_trace,
    run_tracer_log,
    scenario_from_dict,
)
from .tracer import (
    ActionKind,
    TracerAction,
    TracerConfig,
    TracerContractError,
    TracerPhase,
    TracerState,
    efficiency_degradation,
    tracer_init,
    tracer_step,
)

__version__ = "0.1.0"
