"""Weight vectors and total power gains for the four diversity schemes."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSnapshot

log = logging.getLogger(__name__)


class Scheme(enum.Enum):
    EG_APC = "eg_apc"
    EG_PC = "eg_pc"
    MS = "ms"
    NON_DIVERSITY = "non_diversity"


class DegenerateGeometryError(ValueError):
    "Steering matrix is rank deficient: two paths share a direction."


@dataclass(frozen=True)
class GainTargets:
    """Per-path antenna gain targets for the equal-gain scheme.

    alpha[l] * beta[l] * base_gain[l] is the same for every path, and
    alpha[l] / beta[l] == N_t / N_r.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.shape != beta.shape or alpha.ndim != 1:
            raise ValueError("alpha and beta must be 1-D vectors of equal length")
        if np.any(alpha <= 0) or np.any(beta <= 0):
            raise ValueError("gain targets must be positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class AwvPair:
    "Transmit and receive antenna weight vectors plus the scheme tag."

    w_t: np.ndarray
    w_r: np.ndarray
    scheme: Scheme
    k: int | None = None

    def __post_init__(self):
        if np.linalg.norm(self.w_t) == 0 or np.linalg.norm(self.w_r) == 0:
            raise ValueError("weight vectors must be non-zero")
        if self.scheme in (Scheme.MS, Scheme.NON_DIVERSITY):
            mods = np.concatenate([np.abs(self.w_t), np.abs(self.w_r)])
            if np.max(np.abs(mods - 1.0)) > 1e-9:
                raise ValueError(f"{self.scheme.value} weights must be unit modulus")


def eg_gain_targets(base_gains, n_t: int, n_r: int) -> GainTargets:
    """Targets that equalize the compound gain of every stored path.

    With lbar the mean base gain, alpha[l] = sqrt(lbar / gain[l] * N_t/N_r)
    and beta[l] = sqrt(lbar / gain[l] * N_r/N_t), so the compound amplitude
    alpha*beta*gain is lbar on every path.
    """
    gains = np.asarray(base_gains, dtype=float)
    if gains.size < 1:
        raise ValueError("at least one base gain is required")
    if np.any(gains <= 0):
        raise ValueError("base gains must be positive")
    lbar = gains.mean()
    alpha = np.sqrt(lbar / gains * n_t / n_r)
    beta = np.sqrt(lbar / gains * n_r / n_t)
    return GainTargets(alpha=alpha, beta=beta)


def _solve_targets(steering_cols: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Minimum-norm w with steering_cols.T @ w == targets.

    Uses an SVD with cutoff max(dim) * eps * sigma_max; a singular value at
    or below the cutoff means two paths are (numerically) coincident, which
    is a modeling error rather than something to truncate silently.
    """
    a = steering_cols.T
    n_paths, n_ant = a.shape
    if n_paths > n_ant:
        raise ValueError(f"cannot satisfy {n_paths} gain targets with {n_ant} antennas")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    cutoff = max(a.shape) * np.finfo(float).eps * s[0]
    if s[-1] <= cutoff:
        raise DegenerateGeometryError(
            "steering matrix is rank deficient (coincident path directions)"
        )
    return vh.conj().T @ ((u.conj().T @ targets) / s)


def eg_awv_apc(tx_steering: np.ndarray, rx_steering: np.ndarray, targets: GainTargets) -> AwvPair:
    """Amplitude-and-phase-controlled weights meeting the targets exactly.

    Minimum-norm pseudo-inverse solutions of h_l^T w_t = alpha_l and
    w_r^T g_l = beta_l.
    """
    w_t = _solve_targets(tx_steering, targets.alpha.astype(complex))
    w_r = _solve_targets(rx_steering, targets.beta.astype(complex))
    return AwvPair(w_t=w_t, w_r=w_r, scheme=Scheme.EG_APC)


def phase_only(w: np.ndarray) -> np.ndarray:
    """Project a weight vector onto unit-modulus entries, keeping phases.

    Entries that are exactly zero have undefined phase; they map
    deterministically to phase 0 and are reported once per call.
    """
    zeros = int(np.count_nonzero(w == 0))
    if zeros:
        log.warning("phase-only projection hit %d zero entries; using phase 0", zeros)
    return np.exp(1j * np.angle(w))


def eg_awv_pc(tx_steering, rx_steering, targets: GainTargets) -> AwvPair:
    "Phase-controlled weights: unit-modulus projection of the APC solution."
    apc = eg_awv_apc(tx_steering, rx_steering, targets)
    return AwvPair(w_t=phase_only(apc.w_t), w_r=phase_only(apc.w_r), scheme=Scheme.EG_PC)


def ms_awv(tx_steering: np.ndarray, rx_steering: np.ndarray, k: int) -> AwvPair:
    "Conjugate-match both arrays to path k (1-based column index)."
    n = tx_steering.shape[1]
    if not 1 <= k <= n:
        raise IndexError(f"path index {k} out of range 1..{n}")
    return AwvPair(
        w_t=np.conj(tx_steering[:, k - 1]),
        w_r=np.conj(rx_steering[:, k - 1]),
        scheme=Scheme.MS,
        k=k,
    )


def non_diversity_awv(tx_steering, rx_steering) -> AwvPair:
    "Beamform the LOS path and never switch."
    pair = ms_awv(tx_steering, rx_steering, 1)
    return AwvPair(w_t=pair.w_t, w_r=pair.w_r, scheme=Scheme.NON_DIVERSITY, k=1)


def total_power_gain(w_t: np.ndarray, w_r: np.ndarray, snap: ChannelSnapshot) -> float:
    """Receive power over transmit power: sum_l |w_r^T C_l w_t|^2 / (|w_t|^2 |w_r|^2).

    Invariant to non-zero complex scaling of either weight vector.
    """
    wt2 = np.vdot(w_t, w_t).real
    wr2 = np.vdot(w_r, w_r).real
    if wt2 == 0 or wr2 == 0:
        raise ValueError("weight vectors must be non-zero")
    num = sum(abs(w_r @ c @ w_t) ** 2 for c in snap.matrices)
    return float(num / (wt2 * wr2))


def eg_apc_gain_closed(
    base_gains, instantaneous_gains, awv: AwvPair, n_t: int, n_r: int
) -> float:
    """Closed-form total power gain for the equal-gain APC scheme.

    N_t N_r * sum_l |lbar / gain0_l * gain_l|^2 over the squared norms of
    the weight vectors expressed in the unit-norm steering convention
    (hence the explicit N_t N_r array factor).  Equals the general
    evaluation on the same snapshot.
    """
    if awv.scheme is not Scheme.EG_APC:
        raise ValueError("closed form requires amplitude-and-phase-controlled weights")
    gains0 = np.asarray(base_gains, dtype=float)
    gains = np.asarray(instantaneous_gains, dtype=float)
    lbar = gains0.mean()
    num = n_t * n_r * np.sum((lbar / gains0 * gains) ** 2)
    den = (n_t * np.vdot(awv.w_t, awv.w_t).real) * (n_r * np.vdot(awv.w_r, awv.w_r).real)
    return float(num / den)


def received_power_dbm(p_tx_dbm: float, gain_linear: float) -> float:
    "Transmit power plus total power gain, in dBm."
    if gain_linear <= 0:
        raise ValueError("gain must be positive")
    return p_tx_dbm + 10.0 * math.log10(gain_linear)


@dataclass(frozen=True)
class OptimalityReport:
    "Outcome of the strongest-path optimality search."

    best_gain: float
    selection_gain: float
    best_random_gain: float
    trials: int
    passed: bool


def verify_ms_optimality(base_gains, trials: int = 100_000, seed: int = 0) -> OptimalityReport:
    """Search gain allocations for anything beating strongest-path selection.

    Builds exactly orthogonal unit-norm steering sets (DFT columns), draws
    random allocations with sum alpha^2 = sum beta^2 = 1, and evaluates the
    receive-SNR objective sum_l gain_l^2 |beta_l|^2 |alpha_l|^2 through the
    steering algebra.  No allocation may exceed max_l gain_l^2 by more than
    1e-9, and putting everything on the strongest path must attain it.
    """
    gains = np.asarray(base_gains, dtype=float)
    n = gains.size
    n_ant = max(8, n)
    # unit-norm DFT columns: exactly orthogonal, constructed rather than geometric
    idx = np.arange(n_ant)
    h_cols = np.stack(
        [np.exp(-2j * np.pi * idx * l / n_ant) / math.sqrt(n_ant) for l in range(n)], axis=1
    )
    g_cols = h_cols.copy()
    cross_t = h_cols.T @ np.conj(h_cols)  # ~ identity
    cross_r = g_cols.T @ np.conj(g_cols)

    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    a = np.abs(rng.standard_normal((trials, n)))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = np.abs(rng.standard_normal((trials, n)))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    eff_a = np.abs(a @ cross_t.T) ** 2
    eff_b = np.abs(b @ cross_r.T) ** 2
    objectives = (eff_a * eff_b) @ gains**2

    best = float(gains.max() ** 2)
    sel = np.zeros(n)
    sel[int(np.argmax(gains))] = 1.0
    sel_obj = float(((np.abs(sel @ cross_t.T) ** 2) * (np.abs(sel @ cross_r.T) ** 2)) @ gains**2)
    best_random = float(objectives.max()) if trials else sel_obj
    passed = best_random <= best + 1e-9 and math.isclose(sel_obj, best, rel_tol=1e-9)
    return OptimalityReport(
        best_gain=best,
        selection_gain=sel_obj,
        best_random_gain=best_random,
        trials=trials,
        passed=passed,
    )
