"""Per-epoch received-signal synthesis.

Builds the length-1024 chip-domain vectors a tracking channel sees each
code period: the channel's own bipolar code scaled by bit and amplitude,
up to three delayed-replica interferers with independent bit streams,
and optional white Gaussian chip noise.  Everything is deterministic
given the configured seeds, so any epoch can be regenerated on any
worker without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import ChipSequence, cyclic_shift

__all__ = [
    "EPOCHS_PER_BIT",
    "ChannelParams",
    "InterfererSpec",
    "NoiseSpec",
    "EpochSignal",
    "nav_bit_stream",
    "oversample_to_pow2",
    "interference_component",
    "synthesize_epoch",
]

#: Code periods per navigation bit (1-ms epochs at 50 bps).
EPOCHS_PER_BIT = 20

#: Interferers simultaneously injected into one channel, at most.
MAX_INTERFERERS = 3


@dataclass(frozen=True)
class ChannelParams:
    """The tracked channel: its code, linear power and bit stream seed."""

    code: ChipSequence
    power: float
    bit_seed: int

    def __post_init__(self) -> None:
        if self.power <= 0:
            raise ValueError("channel power must be positive")


@dataclass(frozen=True)
class InterfererSpec:
    """One delayed-replica interferer.

    Parameters
    ----------
    delay : int
        Chip delay in [1, P-1]; zero (a co-phased copy) is not a
        meaningful interferer and is rejected.
    isr_db : float
        Interference-to-signal power ratio relative to the channel's
        power, in dB.
    polarity_seed : int
        Seed of the interferer's own ±1 bit stream.
    bit_epoch_offset : int
        Where the interferer's 20-epoch bit boundary sits relative to
        the channel's, in epochs; 0 (fully synchronized) is the worst
        case and the default.
    """

    delay: int
    isr_db: float
    polarity_seed: int
    bit_epoch_offset: int = 0

    def __post_init__(self) -> None:
        if self.delay == 0:
            raise ValueError("invalid delay: interferer delay must be nonzero")
        if self.delay < 0:
            raise ValueError(f"invalid delay: {self.delay}")
        if not 0 <= self.bit_epoch_offset < EPOCHS_PER_BIT:
            raise ValueError(
                f"bit epoch offset must lie in [0, {EPOCHS_PER_BIT})"
            )

    @property
    def amplitude_factor(self) -> float:
        """Amplitude relative to the channel amplitude, 10^(isr/20)."""
        return float(10.0 ** (self.isr_db / 20.0))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-chip white Gaussian noise with the given linear variance."""

    variance: float = 0.0

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError("noise variance must be nonnegative")


@dataclass(frozen=True)
class EpochSignal:
    """One received epoch: the power-of-two sample vector plus truth.

    GPS-scale epochs are 1024 samples; smaller toy families produce
    correspondingly shorter vectors.
    """

    r: np.ndarray
    epoch_index: int
    true_bit: int
    power: float

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=np.float64)
        n = r.shape[0] if r.ndim == 1 else 0
        if n < 8 or n & (n - 1):
            raise ValueError(
                "epoch vector must be a power-of-two length, got "
                f"{r.shape}"
            )
        r.setflags(write=False)
        object.__setattr__(self, "r", r)


def nav_bit_stream(seed, count: int) -> np.ndarray:
    """Deterministic ±1 navigation bit stream.

    Each bit spans 20 consecutive epochs; this returns only the bit
    values, one per bit period.

    Parameters
    ----------
    seed : int or numpy SeedSequence
    count : int
        Number of bits, at least 1.
    """
    if count < 1:
        raise ValueError("bit count must be at least 1")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=count, dtype=np.int64) * 2 - 1


def _bit_at(seed, bit_index: int) -> int:
    """The bit a deterministic stream produces at a given index."""
    return int(nav_bit_stream(seed, bit_index + 1)[bit_index])


def oversample_to_pow2(chips) -> np.ndarray:
    """Pad a period-(2^n - 1) chip vector to 2^n by repeating the last chip.

    Keeps group sizes that are powers of two dividing the vector evenly.
    The duplicated chip perturbs any correlation by at most one unit,
    and the same padding is applied to both the replica and the
    received signal, so the perturbation is shared.

    Parameters
    ----------
    chips : array_like or ChipSequence
        Length must be 2^n - 1 (1023 for GPS).

    Returns
    -------
    ndarray of float64, length 2^n.
    """
    if isinstance(chips, ChipSequence):
        chips = chips.chips
    arr = np.asarray(chips, dtype=np.float64)
    n = arr.size
    if arr.ndim != 1 or n < 7 or (n & (n + 1)) != 0:
        raise ValueError(
            f"expected 1023 chips (or another 2^n - 1 period), got {n}"
        )
    return np.concatenate([arr, arr[-1:]])


def interference_component(
    spec: InterfererSpec, code: ChipSequence, power: float, epoch_index: int
) -> np.ndarray:
    """The length-1024 contribution of one interferer at one epoch.

    A delayed replica of the channel's own code, scaled to
    sqrt(power * 10^(isr_db/10)) and signed by the interferer bit
    active at ``(epoch_index + bit_epoch_offset) // 20``.
    """
    if power <= 0:
        raise ValueError("channel power must be positive")
    if epoch_index < 0:
        raise ValueError("epoch index must be nonnegative")
    amp = np.sqrt(power) * spec.amplitude_factor
    bit_index = (epoch_index + spec.bit_epoch_offset) // EPOCHS_PER_BIT
    bit = _bit_at(spec.polarity_seed, bit_index)
    shifted = cyclic_shift(code, spec.delay)
    return amp * bit * oversample_to_pow2(shifted)


def synthesize_epoch(
    channel: ChannelParams,
    interferers: list[InterfererSpec],
    noise: NoiseSpec,
    epoch_index: int,
    rng=None,
) -> EpochSignal:
    """Synthesize one received epoch.

    r = b sqrt(p) * oversample(code) + sum_j interferer_j + n, with the
    channel bit b active at ``epoch_index // 20`` and n i.i.d. Gaussian
    per chip with the configured variance.

    Parameters
    ----------
    channel : ChannelParams
    interferers : list of InterfererSpec
        At most three.
    noise : NoiseSpec
    epoch_index : int
    rng : numpy Generator, int seed, or None
        Source for the noise draw.  An integer is combined with the
        epoch index into a per-epoch stream, which makes the synthesis
        a pure function of (seeds, epoch_index).  None is only valid
        for zero noise variance.
    """
    if len(interferers) > MAX_INTERFERERS:
        raise ValueError(
            f"interferer limit exceeded: {len(interferers)} > {MAX_INTERFERERS}"
        )
    if epoch_index < 0:
        raise ValueError("epoch index must be nonnegative")

    bit = _bit_at(channel.bit_seed, epoch_index // EPOCHS_PER_BIT)
    r = bit * np.sqrt(channel.power) * oversample_to_pow2(channel.code)
    for spec in interferers:
        r = r + interference_component(spec, channel.code, channel.power, epoch_index)

    if noise.variance > 0:
        if rng is None:
            raise ValueError("noise variance > 0 requires an rng or seed")
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(
                np.random.SeedSequence([int(rng), epoch_index])
            )
        r = r + rng.normal(0.0, np.sqrt(noise.variance), size=r.size)

    return EpochSignal(
        r=r, epoch_index=epoch_index, true_bit=bit, power=channel.power
    )
