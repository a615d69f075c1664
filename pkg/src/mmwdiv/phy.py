"""Equivalent baseband tap channel and single-carrier FDE bit-error simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .beamform import AwvPair
from .channel import ChannelSnapshot

DEFAULT_BLOCK_LEN = 512
DEFAULT_CP_LEN = 64
DEFAULT_STOP_RULE = {"min_errors": 100, "max_bits": 100_000_000}


@dataclass(frozen=True)
class TapChannel:
    "Unit-energy baseband channel, one complex tap per chip delay."

    taps: np.ndarray
    chip_s: float

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=complex)
        energy = float(np.sum(np.abs(taps) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ValueError(f"tap energy must be 1 (got {energy!r})")
        object.__setattr__(self, "taps", taps)


@dataclass(frozen=True)
class BerPoint:
    "One Monte Carlo bit-error-rate measurement."

    snr_db: float
    bits_sent: int
    bit_errors: int
    ber: float
    low_confidence: bool = False


def compound_path_gain(path_index: int, snap: ChannelSnapshot, awv: AwvPair) -> complex:
    """Scalar gain of one path through the weighted arrays (1-based index).

    Normalized by the weight norms so that the squared magnitudes sum to
    the total power gain.
    """
    wt2 = np.vdot(awv.w_t, awv.w_t).real
    wr2 = np.vdot(awv.w_r, awv.w_r).real
    if wt2 == 0 or wr2 == 0:
        raise ValueError("weight vectors must be non-zero")
    c = snap.matrices[path_index - 1]
    return complex(awv.w_r @ c @ awv.w_t / math.sqrt(wt2 * wr2))


def compound_path_gains(snap: ChannelSnapshot, awv: AwvPair) -> np.ndarray:
    "Compound gain of every path in the snapshot."
    return np.array(
        [compound_path_gain(l + 1, snap, awv) for l in range(len(snap.matrices))]
    )


def equivalent_taps(compound_gains, delays_chips, chip_s: float, carrier_hz: float) -> TapChannel:
    """Normalized tap vector from compound gains and chip delays.

    Each path adds gain * exp(-j 2 pi f delay_chips chip_s) at its chip
    index; the vector is then scaled to unit energy.  The first path must
    have zero delay and delays must be distinct.
    """
    gains = np.asarray(compound_gains, dtype=complex)
    delays = [int(d) for d in delays_chips]
    if len(delays) != gains.size:
        raise ValueError("one delay per compound gain is required")
    if delays[0] != 0:
        raise ValueError("the first (LOS) path must have zero delay")
    if len(set(delays)) != len(delays):
        raise ValueError("chip delays must be distinct")
    taps = np.zeros(max(delays) + 1, dtype=complex)
    for gain, delay in zip(gains, delays):
        taps[delay] = gain * np.exp(-2j * np.pi * carrier_hz * delay * chip_s)
    norm = np.linalg.norm(taps)
    if norm == 0:
        raise ValueError("all compound gains are zero")
    return TapChannel(taps=taps / norm, chip_s=chip_s)


def modulate_pi2bpsk(bits) -> np.ndarray:
    "Map bits to unit-power chips with a 90-degree rotation per chip."
    bits = np.asarray(bits)
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0 or 1")
    return (1.0 - 2.0 * bits) * 1j ** np.arange(bits.size)


def _check_block(taps: np.ndarray, block_len: int, cp_len: int) -> None:
    if block_len < 1 or block_len & (block_len - 1):
        raise ValueError("block length must be a power of two")
    if cp_len < len(taps) - 1:
        raise ValueError("cyclic prefix must cover the channel memory")


def _run_blocks(taps, snr_db, rng, n_blocks, block_len, cp_len):
    """Simulate n_blocks SC-FDE blocks; returns (bit_errors, bits_sent).

    Per block: modulate, prepend the cyclic prefix, convolve with the
    taps, strip the prefix, add circularly symmetric Gaussian noise at
    the per-chip SNR (the channel has unit energy, so signal power is 1),
    and equalize with the MMSE weights conj(H)/(|H|^2 + 1/snr).
    """
    snr_lin = 10.0 ** (snr_db / 10.0)
    sigma = math.sqrt(1.0 / snr_lin)
    rotation = 1j ** np.arange(block_len)
    h_f = np.fft.fft(taps, block_len)
    w_f = np.conj(h_f) / (np.abs(h_f) ** 2 + 1.0 / snr_lin)

    bits = rng.integers(0, 2, size=(n_blocks, block_len))
    chips = (1.0 - 2.0 * bits) * rotation
    tx = np.concatenate([chips[:, block_len - cp_len :], chips], axis=1)
    rx = fftconvolve(tx, taps[None, :], axes=1)[:, cp_len : cp_len + block_len]
    noise = rng.standard_normal(rx.shape) + 1j * rng.standard_normal(rx.shape)
    rx = rx + noise * (sigma / math.sqrt(2.0))
    eq = np.fft.ifft(np.fft.fft(rx, axis=1) * w_f, axis=1)
    detected = ((eq * np.conj(rotation)).real < 0).astype(bits.dtype)
    return int(np.count_nonzero(detected != bits)), bits.size


def sc_fde_link(
    taps: TapChannel,
    snr_db: float,
    n_blocks: int,
    block_len: int = DEFAULT_BLOCK_LEN,
    cp_len: int = DEFAULT_CP_LEN,
    seed: int = 0,
) -> BerPoint:
    "Run a fixed number of SC-FDE blocks and count bit errors."
    _check_block(taps.taps, block_len, cp_len)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    errors, bits = _run_blocks(taps.taps, snr_db, rng, n_blocks, block_len, cp_len)
    return BerPoint(snr_db=snr_db, bits_sent=bits, bit_errors=errors, ber=errors / bits)


def ber_curve(
    taps: TapChannel,
    snr_db_list,
    stop_rule: dict | None = None,
    seed=0,
    block_len: int = DEFAULT_BLOCK_LEN,
    cp_len: int = DEFAULT_CP_LEN,
) -> list[BerPoint]:
    """One BER point per SNR, each stopping at min_errors or max_bits.

    Every point draws from its own counter-based generator seeded from
    (seed, point index), so points are reproducible independently of how
    the list is split across workers.  ``seed`` may be an int or a
    sequence of ints.  Points that hit the bit budget before collecting
    min_errors are flagged low-confidence.
    """
    snrs = list(snr_db_list)
    if not snrs:
        raise ValueError("at least one SNR point is required")
    rule = dict(DEFAULT_STOP_RULE)
    if stop_rule:
        rule.update(stop_rule)
    min_errors = int(rule["min_errors"])
    max_bits = int(rule["max_bits"])
    _check_block(taps.taps, block_len, cp_len)
    entropy = [seed] if isinstance(seed, (int, np.integer)) else [int(s) for s in seed]

    points = []
    for index, snr_db in enumerate(snrs):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy + [index])))
        errors = 0
        bits_sent = 0
        batch = 256
        while errors < min_errors and bits_sent < max_bits:
            n_blocks = min(batch, max(1, (max_bits - bits_sent) // block_len))
            e, b = _run_blocks(taps.taps, snr_db, rng, n_blocks, block_len, cp_len)
            errors += e
            bits_sent += b
            batch = min(batch * 2, 4096)
        points.append(
            BerPoint(
                snr_db=float(snr_db),
                bits_sent=bits_sent,
                bit_errors=errors,
                ber=errors / bits_sent,
                low_confidence=errors < min_errors,
            )
        )
    return points
