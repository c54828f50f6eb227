"""Monte-Carlo BER-vs-ISR sweeps, gain extraction, and throughput bench.

The harness simulates navigation bits (20 epochs each) through the
signal model and the correlator pipeline, counts post-warm-up bit
errors per (ISR, detector) point, and reports Wilson confidence
intervals.  Every random stream is keyed by
(master seed, ISR index, detector, role), so results are bit-identical
no matter how points are scheduled across worker threads.

For speed the harness synthesizes directly in the partial-correlation
domain: with bipolar codes, wiping off and group-summing a chip-domain
epoch r = b sqrt(p) s0 + sum_j a_j b_j s_aj + n gives exactly

    c = b sqrt(p) c0 + sum_j a_j b_j v_j + eta,

where c0 and v_j are the group sums of s0*s0 and s0*s_aj, and eta is
zero-mean Gaussian with covariance g sigma^2 I.  The c-domain draw has
the identical distribution at 1/64th the generation cost; exact
chip-domain synthesis stays available in the signal model and the two
are cross-checked in the tests.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.stats

from .codes import GPS_CA, build_delay_table, cyclic_shift, generate_gold_code
from .config import DETECTOR_MF, DETECTOR_MMSE, SimConfig
from .correlator import group_decision, solve_group_weights
from .kernels import run_epochs
from .synth import EPOCHS_PER_BIT, oversample_to_pow2
from .window import SlidingAutocorrelation

__all__ = [
    "BerPoint",
    "CurveCrossing",
    "GainReport",
    "run_point",
    "run_sweep",
    "gain_at_ber",
    "wilson_interval",
    "bench_throughput",
    "resolve_interferer_delays",
    "worker_threads",
]

#: Channel power; decisions are scale-invariant in p, so it is fixed.
CHANNEL_POWER = 1.0

#: RNG stream roles within one (seed, isr index, detector) task.
_ROLE_CHANNEL_BITS = 0
_ROLE_INTERFERER_BITS = 1  # + interferer index
_ROLE_NOISE = 8

_DETECTOR_CODES = {DETECTOR_MF: 0, DETECTOR_MMSE: 1}

_NOISE_CHUNK = 65536  # epochs per noise-fill slab


@dataclass(frozen=True)
class BerPoint:
    """One measured point of a BER curve."""

    isr_db: float
    detector: str
    g: int
    window_l: int
    n_interferers: int
    bits_counted: int
    errors: int
    ber: float
    ci_low: float
    ci_high: float
    seed: int


@dataclass(frozen=True)
class CurveCrossing:
    """Where (and whether) one curve attains the target BER.

    status is one of:

    - "interpolated": the curve crosses the target inside the grid;
      isr_at_target is the log-domain interpolation.
    - "left_censored": the first grid point is already at or above the
      target, so the true crossing lies at or before it;
      isr_at_target is clamped to the first grid ISR.
    - "not_reached": the curve never attains the target anywhere on
      the grid (always below); isr_at_target is None.
    """

    curve_id: str
    status: str
    isr_at_target: float | None


@dataclass(frozen=True)
class GainReport:
    """ISR advantage of curve b over curve a at a target BER."""

    target_ber: float
    curve_a: CurveCrossing
    curve_b: CurveCrossing
    gain_db: float | None

    @property
    def reached(self) -> bool:
        return self.gain_db is not None


def wilson_interval(errors: int, n: int, confidence: float = 0.95):
    """Wilson score interval for a binomial proportion.

    Parameters
    ----------
    errors : int
        Observed error count, 0 <= errors <= n.
    n : int
        Trials, at least 1.
    confidence : float
        Two-sided coverage, default 0.95.

    Returns
    -------
    (lo, hi) : tuple of float
    """
    if n < 1:
        raise ValueError("empty window")
    if not 0 <= errors <= n:
        raise ValueError("errors must lie in [0, n]")
    z = float(scipy.stats.norm.ppf((1.0 + confidence) / 2.0))
    phat = errors / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    # at the extremes the bound is exactly 0 or 1; avoid rounding dust
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == n else min(1.0, center + half)
    return lo, hi


def resolve_interferer_delays(config: SimConfig) -> tuple:
    """The delays a config actually simulates.

    "auto" takes the top-n_interferers worst-case entries of the SV's
    delay table; an explicit list is passed through unchanged.
    """
    if config.n_interferers == 0:
        return ()
    if config.interferer_delays == "auto":
        table = build_delay_table(GPS_CA, config.sv, config.n_interferers)
        return tuple(table.delays())
    return tuple(config.interferer_delays)


def _task_seed(config: SimConfig, isr_idx: int, detector: str, role: int):
    return np.random.SeedSequence(
        [config.seed, isr_idx, _DETECTOR_CODES[detector], role]
    )


def build_c_stream(config: SimConfig, isr_idx: int, detector: str):
    """Synthesize the partial-correlation stream for one sweep point.

    Returns
    -------
    (c_stream, bits) : ((n_bits*20, M) float64 array, (n_bits,) int array)
        The per-epoch partial correlations and the ground-truth
        channel bits.
    """
    isr_db = float(config.isr_db[isr_idx])
    g = config.g
    m = 1024 // g
    n_bits = config.n_bits
    n_epochs = n_bits * EPOCHS_PER_BIT

    code = generate_gold_code(GPS_CA, config.sv)
    s0 = oversample_to_pow2(code)
    c0 = (s0 * s0).reshape(m, g).sum(axis=1)

    rng_bits = np.random.default_rng(
        _task_seed(config, isr_idx, detector, _ROLE_CHANNEL_BITS)
    )
    bits = rng_bits.integers(0, 2, size=n_bits, dtype=np.int64) * 2 - 1

    coef = bits.astype(np.float64) * math.sqrt(CHANNEL_POWER)
    c_stream = np.repeat(np.outer(coef, c0), EPOCHS_PER_BIT, axis=0)

    delays = resolve_interferer_delays(config)
    offsets = config.offsets_for(len(delays))
    amp = math.sqrt(CHANNEL_POWER * 10.0 ** (isr_db / 10.0))
    epoch_idx = np.arange(n_epochs, dtype=np.int64)
    for j, (delay, offset) in enumerate(zip(delays, offsets)):
        sa = oversample_to_pow2(cyclic_shift(code, delay))
        vj = (s0 * sa).reshape(m, g).sum(axis=1)
        rng_j = np.random.default_rng(
            _task_seed(config, isr_idx, detector, _ROLE_INTERFERER_BITS + j)
        )
        # one spare bit covers offsets that push past the last boundary
        bj = rng_j.integers(0, 2, size=n_bits + 1, dtype=np.int64) * 2 - 1
        signs = bj[(epoch_idx + offset) // EPOCHS_PER_BIT].astype(np.float64)
        for lo in range(0, n_epochs, _NOISE_CHUNK):
            hi = min(lo + _NOISE_CHUNK, n_epochs)
            c_stream[lo:hi] += (amp * signs[lo:hi])[:, None] * vj[None, :]

    if config.noise_var > 0:
        rng_n = np.random.default_rng(
            _task_seed(config, isr_idx, detector, _ROLE_NOISE)
        )
        sigma = math.sqrt(g * config.noise_var)
        for lo in range(0, n_epochs, _NOISE_CHUNK):
            hi = min(lo + _NOISE_CHUNK, n_epochs)
            c_stream[lo:hi] += rng_n.normal(0.0, sigma, size=(hi - lo, m))

    return c_stream, bits


def _warmup_bits(config: SimConfig, detector: str) -> int:
    if detector == DETECTOR_MF:
        return 0
    return math.ceil(config.window_l / EPOCHS_PER_BIT)


def _run_stream_reference(c_stream, window_l, g, power, stride):
    """Plain-python mirror of kernels.run_epochs (test oracle).

    Same window, solve, and cadence semantics, built from the
    module-level pieces; used to cross-validate the compiled kernel.
    """
    n_epochs, m = c_stream.shape
    window = SlidingAutocorrelation(m, window_l)
    w = np.ones(m)
    d = np.zeros(n_epochs)
    since_solve = 0
    for e in range(n_epochs):
        c = c_stream[e]
        window.push(c)
        if window.is_ready:
            if since_solve % stride == 0:
                try:
                    solved = solve_group_weights(window.matrix, g, power)
                    w = solved.w
                except np.linalg.LinAlgError:
                    pass  # keep previous weights, as the kernel does
            since_solve += 1
            d[e] = group_decision(w, c)
        else:
            d[e] = float(c.sum())
    return d


def _decide_bits(d: np.ndarray, n_bits: int) -> np.ndarray:
    """Fold per-epoch decisions into ±1 bit decisions (ties to +1)."""
    sums = d.reshape(n_bits, EPOCHS_PER_BIT).sum(axis=1)
    return np.where(sums >= 0.0, 1, -1).astype(np.int64)


def run_point(config: SimConfig, isr_db: float, detector: str) -> BerPoint:
    """Simulate one (ISR, detector) point of a sweep.

    The ISR value must be a member of the config grid (streams are
    keyed by grid index).  Warm-up bits are excluded from the MMSE
    count; the matched filter has no warm-up.
    """
    if detector not in _DETECTOR_CODES:
        raise ValueError(f"detectors: unknown detector {detector!r}")
    try:
        isr_idx = list(config.isr_db).index(float(isr_db))
    except ValueError:
        raise ValueError(
            f"isr_db: {isr_db} is not on the configured grid"
        ) from None

    warmup = _warmup_bits(config, detector)
    if config.n_bits <= warmup:
        raise ValueError(
            f"n_bits: need more than {warmup} bits to cover warm-up "
            f"at window_l={config.window_l}"
        )

    c_stream, bits = build_c_stream(config, isr_idx, detector)
    if detector == DETECTOR_MF:
        d = c_stream.sum(axis=1)
    else:
        d, _n_reg, n_failed = run_epochs(
            c_stream,
            config.window_l,
            config.g,
            CHANNEL_POWER,
            config.solve_stride,
        )
        if n_failed:
            raise RuntimeError(
                f"unsolvable autocorrelation matrix in {n_failed} solves "
                f"(isr_db={isr_db}, detector={detector})"
            )

    decided = _decide_bits(d, config.n_bits)
    errors = int(np.sum(decided[warmup:] != bits[warmup:]))
    counted = config.n_bits - warmup
    lo, hi = wilson_interval(errors, counted)
    return BerPoint(
        isr_db=float(isr_db),
        detector=detector,
        g=config.g,
        window_l=config.window_l,
        n_interferers=config.n_interferers,
        bits_counted=counted,
        errors=errors,
        ber=errors / counted,
        ci_low=lo,
        ci_high=hi,
        seed=config.seed,
    )


def worker_threads(requested: int | None = None) -> int:
    """Worker-thread count: explicit argument, else GW_MMSE_THREADS.

    A value of 0 (or no setting anywhere) means auto (one worker per
    CPU).  Worker counts never affect results, only wall time.
    """
    if requested is None:
        env = os.environ.get("GW_MMSE_THREADS", "0").strip()
        try:
            requested = int(env)
        except ValueError:
            raise ValueError(
                f"GW_MMSE_THREADS: expected an integer, got {env!r}"
            ) from None
    if requested < 0:
        raise ValueError("thread count must be nonnegative")
    if requested == 0:
        return os.cpu_count() or 1
    return requested


def run_sweep(config: SimConfig, threads: int | None = None):
    """Run every (detector, ISR) point of a config.

    Points are independent tasks distributed over worker threads; the
    result list is ordered by (detector, isr_db) and is bit-identical
    for a given (config, seed) at any thread count.
    """
    tasks = [
        (det, float(isr))
        for det in config.detectors
        for isr in config.isr_db
    ]
    n_workers = min(worker_threads(threads), len(tasks))
    if n_workers <= 1:
        points = [run_point(config, isr, det) for det, isr in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            points = list(
                pool.map(lambda t: run_point(config, t[1], t[0]), tasks)
            )
    return sorted(points, key=lambda p: (p.detector, p.isr_db))


_BER_FLOOR_NUMERATOR = 0.5


def _crossing(points, target_ber: float, curve_id: str) -> CurveCrossing:
    pts = sorted(points, key=lambda p: p.isr_db)
    isr = np.array([p.isr_db for p in pts])
    # a zero count sits below any attainable target by definition; for
    # interpolation it is anchored at half an error per counted bit
    below = np.array([p.errors == 0 or p.ber < target_ber for p in pts])
    ber = np.array(
        [
            p.ber if p.errors > 0 else _BER_FLOOR_NUMERATOR / p.bits_counted
            for p in pts
        ]
    )
    log_t = math.log10(target_ber)
    log_b = np.log10(ber)
    if not below[0]:
        # already at/above target where the grid starts: the true
        # crossing is off-grid to the left, so report the grid edge
        return CurveCrossing(curve_id, "left_censored", float(isr[0]))
    for k in range(1, len(pts)):
        if not below[k]:
            rise = log_b[k] - log_b[k - 1]
            frac = (log_t - log_b[k - 1]) / rise if rise > 0 else 1.0
            frac = min(max(frac, 0.0), 1.0)
            at = isr[k - 1] + (isr[k] - isr[k - 1]) * frac
            return CurveCrossing(curve_id, "interpolated", float(at))
    return CurveCrossing(curve_id, "not_reached", None)


def gain_at_ber(curve_a, curve_b, target_ber: float) -> GainReport:
    """ISR gain of curve b over curve a at a target BER.

    Each curve is a list of BerPoint for a single detector.  The
    crossing ISR is found by linear interpolation in
    (isr_db, log10 ber); a curve already at or above the target at its
    first grid point is clamped there (left-censored), and a curve
    that never attains the target reports "not_reached", leaving the
    gain undefined.

    Parameters
    ----------
    curve_a, curve_b : lists of BerPoint
    target_ber : float
        Must be positive.
    """
    if target_ber <= 0:
        raise ValueError("target ber must be positive")
    if not curve_a or not curve_b:
        raise ValueError("empty window")
    ids = []
    for curve in (curve_a, curve_b):
        dets = {p.detector for p in curve}
        if len(dets) != 1:
            raise ValueError("each curve must hold a single detector")
        ids.append(
            f"{dets.pop()}(g={curve[0].g},L={curve[0].window_l})"
        )
    cross_a = _crossing(curve_a, target_ber, ids[0])
    cross_b = _crossing(curve_b, target_ber, ids[1])
    gain = None
    if cross_a.isr_at_target is not None and cross_b.isr_at_target is not None:
        gain = float(cross_b.isr_at_target - cross_a.isr_at_target)
    return GainReport(
        target_ber=target_ber,
        curve_a=cross_a,
        curve_b=cross_b,
        gain_db=gain,
    )


def bench_throughput(config: SimConfig, duration: float = 2.0,
                     detector: str = DETECTOR_MMSE) -> float:
    """Measure steady-state pipeline throughput in epochs per second.

    Repeatedly synthesizes partial-correlation streams and runs the
    selected detector over them until ``duration`` seconds of work are
    accumulated.  Synthesis is part of the measured pipeline.  One
    untimed warm-up pass absorbs JIT compilation.
    """
    if duration <= 0:
        raise ValueError("bench duration must be positive")
    bench_bits = 2000
    cfg = config.replace(n_bits=bench_bits, isr_db=(config.isr_db[0],))

    def one_pass() -> int:
        c_stream, _bits = build_c_stream(cfg, 0, detector)
        if detector == DETECTOR_MF:
            c_stream.sum(axis=1)
        else:
            run_epochs(
                c_stream, cfg.window_l, cfg.g, CHANNEL_POWER, cfg.solve_stride
            )
        return c_stream.shape[0]

    one_pass()  # warm-up: trigger compilation outside the timed region
    epochs_done = 0
    start = time.perf_counter()
    while True:
        epochs_done += one_pass()
        elapsed = time.perf_counter() - start
        if elapsed >= duration:
            return epochs_done / elapsed
