"""Gold-code generation and correlation utilities.

Implements the classic dual-LFSR gold-code construction used by the GPS
L1 coarse/acquisition signal, plus the circular-correlation helpers the
rest of the testbed is built on.  Everything here works in the bipolar
chip domain: logical 0 maps to +1 and logical 1 maps to -1, so
correlation is a plain inner product of +/-1 sequences.

The generator is parameterised by register degree and tap sets, which
keeps small code families (degree 5 is handy for exhaustive checks)
first-class rather than GPS-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "GoldCodeSpec",
    "ChipSequence",
    "CorrelationProfile",
    "DelayEntry",
    "DelayTable",
    "GPS_CA",
    "generate_gold_code",
    "cyclic_shift",
    "circular_correlation",
    "max_crosscorr_magnitude",
    "build_delay_table",
]


# G2 phase-select taps for the 32 GPS PRN numbers.  The chip emitted for
# PRN k is g1[10] xor g2[i] xor g2[j] with (i, j) looked up here.
_GPS_PHASE_SELECT = {
    1: (2, 6), 2: (3, 7), 3: (4, 8), 4: (5, 9),
    5: (1, 9), 6: (2, 10), 7: (1, 8), 8: (2, 9),
    9: (3, 10), 10: (2, 3), 11: (3, 4), 12: (5, 6),
    13: (6, 7), 14: (7, 8), 15: (8, 9), 16: (9, 10),
    17: (1, 4), 18: (2, 5), 19: (3, 6), 20: (4, 7),
    21: (5, 8), 22: (6, 9), 23: (1, 3), 24: (4, 6),
    25: (5, 7), 26: (6, 8), 27: (7, 9), 28: (8, 10),
    29: (1, 6), 30: (2, 7), 31: (3, 8), 32: (4, 9),
}


@dataclass(frozen=True)
class GoldCodeSpec:
    """Parameters of a gold-code family.

    Parameters
    ----------
    degree : int
        Shift-register length ``n``; the code period is ``2**n - 1``.
    g1_taps : tuple of int
        Feedback taps (1-indexed stage numbers) of the first register.
    g2_taps : tuple of int
        Feedback taps of the second register.
    phase_select : dict
        Maps code id to the pair of G2 stages whose XOR is combined
        with the G1 output.  Code ids are arbitrary integer labels.
    """

    degree: int
    g1_taps: tuple[int, ...]
    g2_taps: tuple[int, ...]
    phase_select: dict[int, tuple[int, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.degree < 3:
            raise ValueError("invalid LFSR taps: degree must be at least 3")
        for taps in (self.g1_taps, self.g2_taps):
            if not taps or any(t < 1 or t > self.degree for t in taps):
                raise ValueError(
                    "invalid LFSR taps: stages must lie in 1..degree"
                )
        for code_id, (i, j) in self.phase_select.items():
            if not (1 <= i <= self.degree and 1 <= j <= self.degree) or i == j:
                raise ValueError(
                    f"invalid LFSR taps: bad phase select for code id {code_id}"
                )

    @property
    def period(self) -> int:
        """Code period ``2**degree - 1``."""
        return 2 ** self.degree - 1


@dataclass(frozen=True)
class ChipSequence:
    """A bipolar (+1/-1) chip sequence of one code period.

    Attributes
    ----------
    code_id : int
        Label of the code within its family.
    chips : ndarray of int
        The +/-1 chips; read-only, length equals the code period.
    """

    code_id: int
    chips: np.ndarray

    def __post_init__(self) -> None:
        chips = np.asarray(self.chips, dtype=np.int64)
        if chips.ndim != 1:
            raise ValueError("chip sequence must be one-dimensional")
        if not np.all(np.abs(chips) == 1):
            raise ValueError("chip sequence must be bipolar (+1/-1)")
        chips.setflags(write=False)
        object.__setattr__(self, "chips", chips)

    @property
    def period(self) -> int:
        return int(self.chips.size)

    def first_chips_octal(self, count: int = 10) -> int:
        """Digest of the first ``count`` chips read as an octal number.

        The conventional short identity check for C/A codes: chips are
        mapped back to bits (+1 -> 0, -1 -> 1) and the leading ``count``
        bits are printed in octal.
        """
        bits = (1 - self.chips[:count]) // 2
        return int(oct(int("".join(str(int(b)) for b in bits), 2))[2:])


@dataclass(frozen=True)
class CorrelationProfile:
    """Full-period circular correlation of two chip sequences.

    ``values[tau]`` holds ``sum_i a[i] * b[(i + tau) mod P]`` for
    ``tau = 0 .. P-1``.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.int64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def period(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.period

    def __getitem__(self, tau):
        return self.values[tau]

    def value_set(self) -> set[int]:
        """Distinct correlation values, handy for spectrum checks."""
        return set(int(v) for v in np.unique(self.values))


class DelayEntry(NamedTuple):
    delay: int
    corr: int


@dataclass(frozen=True)
class DelayTable:
    """Worst-case delay list for one code.

    Entries are the relative delays whose self-correlation magnitude is
    largest, sorted by descending magnitude with ascending delay as the
    tie-break.  These are the delays an aligned-replica interferer uses
    by default.
    """

    code_id: int
    entries: tuple[DelayEntry, ...]

    def delays(self, count: int | None = None) -> list[int]:
        picked = self.entries if count is None else self.entries[:count]
        return [e.delay for e in picked]


def _lfsr_sequence(degree: int, taps: tuple[int, ...]) -> np.ndarray:
    """Run one full period of an all-ones-seeded Fibonacci LFSR.

    Returns the per-step register contents as a (P, degree) bit array,
    so arbitrary stage taps can be read off afterwards.  Raises if the
    register revisits the seed state early, i.e. the taps do not give a
    maximal-length sequence.
    """
    period = 2 ** degree - 1
    state = [1] * degree
    states = np.empty((period, degree), dtype=np.uint8)
    for step in range(period):
        states[step] = state
        feedback = 0
        for t in taps:
            feedback ^= state[t - 1]
        state = [feedback] + state[:-1]
        if state == [1] * degree and step != period - 1:
            raise ValueError("invalid LFSR taps: sequence period is short")
    if state != [1] * degree:
        raise ValueError("invalid LFSR taps: register did not close its cycle")
    return states


def generate_gold_code(spec: GoldCodeSpec, code_id: int) -> ChipSequence:
    """Generate the bipolar gold code for one code id of a family.

    Both registers start from the all-ones state.  Each output chip is
    the XOR of the G1 output stage with the two phase-select stages of
    G2, mapped to the bipolar alphabet (0 -> +1, 1 -> -1).

    Parameters
    ----------
    spec : GoldCodeSpec
        Family parameters.
    code_id : int
        Key into ``spec.phase_select``.

    Returns
    -------
    ChipSequence
    """
    if code_id not in spec.phase_select:
        raise ValueError(f"unknown code id: {code_id}")
    sel_i, sel_j = spec.phase_select[code_id]
    g1 = _lfsr_sequence(spec.degree, spec.g1_taps)
    g2 = _lfsr_sequence(spec.degree, spec.g2_taps)
    bits = g1[:, spec.degree - 1] ^ g2[:, sel_i - 1] ^ g2[:, sel_j - 1]
    chips = 1 - 2 * bits.astype(np.int64)
    return ChipSequence(code_id=code_id, chips=chips)


def cyclic_shift(code: ChipSequence, delay: int) -> ChipSequence:
    """Delay a chip sequence circularly by ``delay`` chips.

    The delayed sequence satisfies ``out[i] == in[(i - delay) mod P]``,
    i.e. a positive delay moves the sequence later in time.

    Parameters
    ----------
    code : ChipSequence
    delay : int
        Must satisfy ``0 <= delay < P``.
    """
    if not 0 <= delay < code.period:
        raise ValueError(f"invalid delay: {delay} outside [0, {code.period})")
    return ChipSequence(code_id=code.code_id, chips=np.roll(code.chips, delay))


def _as_chip_array(seq) -> np.ndarray:
    chips = seq.chips if isinstance(seq, ChipSequence) else np.asarray(seq)
    return chips.astype(np.float64, copy=False)


def circular_correlation(a, b) -> CorrelationProfile:
    """Circular correlation of two equal-length chip sequences.

    Computed over the full period with an FFT, then rounded back to the
    exact integers (inputs are +/-1 so every lag is an integer).

    Parameters
    ----------
    a, b : ChipSequence or array_like
        Bipolar sequences of the same period.

    Returns
    -------
    CorrelationProfile
        ``values[tau] = sum_i a[i] * b[(i + tau) mod P]``.
    """
    ca = _as_chip_array(a)
    cb = _as_chip_array(b)
    if ca.shape != cb.shape:
        raise ValueError(
            f"incompatible code lengths: {ca.shape[0]} != {cb.shape[0]}"
        )
    fa = np.fft.rfft(ca)
    fb = np.fft.rfft(cb)
    raw = np.fft.irfft(np.conj(fa) * fb, n=ca.shape[0])
    return CorrelationProfile(values=np.rint(raw).astype(np.int64))


def max_crosscorr_magnitude(degree: int) -> int:
    """Largest cross-correlation magnitude of a gold family, ``t(n)``.

    For register degree ``n`` the preferred-pair bound is
    ``t(n) = 2**floor((n + 2) / 2) + 1``: 65 for the GPS degree-10
    family, 9 at degree 5, 17 at degree 6.
    """
    if degree < 3:
        raise ValueError("invalid LFSR taps: degree must be at least 3")
    return 2 ** ((degree + 2) // 2) + 1


def build_delay_table(
    spec: GoldCodeSpec, code_id: int, size: int
) -> DelayTable:
    """Rank the nonzero delays of a code by self-correlation magnitude.

    The table drives worst-case interferer placement: the top entry is
    the relative delay at which an aligned replica of the same code
    correlates most strongly with the original.

    Parameters
    ----------
    spec : GoldCodeSpec
    code_id : int
    size : int
        Number of entries to keep; ``1 <= size <= P - 1``.
    """
    if not 1 <= size <= spec.period - 1:
        raise ValueError(
            f"invalid table size: {size} outside [1, {spec.period - 1}]"
        )
    code = generate_gold_code(spec, code_id)
    profile = circular_correlation(code, code)
    taus = np.arange(1, code.period)
    vals = profile.values[1:]
    order = np.lexsort((taus, -np.abs(vals)))
    entries = tuple(
        DelayEntry(delay=int(taus[k]), corr=int(vals[k]))
        for k in order[:size]
    )
    return DelayTable(code_id=code_id, entries=entries)


#: The GPS L1 C/A family: degree-10 registers, G1 feedback from stages
#: 3 and 10, G2 feedback from stages 2, 3, 6, 8, 9 and 10.
GPS_CA = GoldCodeSpec(
    degree=10,
    g1_taps=(3, 10),
    g2_taps=(2, 3, 6, 8, 9, 10),
    phase_select=dict(_GPS_PHASE_SELECT),
)
