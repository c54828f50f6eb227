"""Epoch synthesis tests: oversampling, interferers, noise, bit streams."""

import numpy as np
import pytest

from gwmmse.codes import GPS_CA, cyclic_shift, generate_gold_code
from gwmmse.synth import (
    EPOCHS_PER_BIT,
    ChannelParams,
    InterfererSpec,
    NoiseSpec,
    interference_component,
    nav_bit_stream,
    oversample_to_pow2,
    synthesize_epoch,
)


@pytest.fixture()
def channel(sv1):
    return ChannelParams(code=sv1, power=1.0, bit_seed=42)


def test_oversample_duplicates_last_chip(sv1):
    s0 = oversample_to_pow2(sv1)
    assert s0.shape == (1024,)
    assert np.array_equal(s0[:1023], sv1.chips)
    assert s0[1023] == sv1.chips[1022]


def test_oversample_rejects_wrong_length():
    with pytest.raises(ValueError, match="expected 1023 chips"):
        oversample_to_pow2(np.ones(1000))


def test_oversample_dot_close_to_correlation(sv1, sv2):
    # duplicating one chip perturbs any cross product by at most 1
    a = oversample_to_pow2(sv1)
    b = oversample_to_pow2(sv2)
    exact = int(np.dot(sv1.chips, sv2.chips))
    assert abs(float(np.dot(a, b)) - exact) <= 1.0


def test_nav_bit_stream_deterministic_and_bipolar():
    a = nav_bit_stream(7, 1000)
    b = nav_bit_stream(7, 1000)
    assert np.array_equal(a, b)
    assert set(np.unique(a)) == {-1, 1}
    assert not np.array_equal(a, nav_bit_stream(8, 1000))


def test_nav_bit_stream_roughly_balanced():
    bits = nav_bit_stream(123, 100_000)
    assert abs(float(bits.mean())) < 0.05


def test_clean_epoch_is_scaled_code(channel, sv1):
    ep = synthesize_epoch(channel, [], NoiseSpec(variance=0.0), 0)
    s0 = oversample_to_pow2(sv1)
    assert ep.true_bit in (-1, 1)
    np.testing.assert_allclose(ep.r, ep.true_bit * s0, atol=1e-12)


def test_bit_spans_twenty_epochs(channel):
    noise = NoiseSpec(variance=0.0)
    bits = [
        synthesize_epoch(channel, [], noise, e).true_bit
        for e in range(3 * EPOCHS_PER_BIT)
    ]
    for k in range(3):
        segment = bits[k * EPOCHS_PER_BIT : (k + 1) * EPOCHS_PER_BIT]
        assert len(set(segment)) == 1


def test_interference_component_power(sv1):
    # an interferer at isr_db carries 10^(isr/10) * p * 1024 energy
    spec = InterfererSpec(delay=18, isr_db=10.0, polarity_seed=3)
    v = interference_component(spec, sv1, 1.0, epoch_index=0)
    np.testing.assert_allclose(float(np.dot(v, v)), 10.0 * 1024.0, rtol=1e-12)


def test_interference_component_is_delayed_replica(sv1):
    spec = InterfererSpec(delay=35, isr_db=0.0, polarity_seed=3)
    v = interference_component(spec, sv1, 1.0, epoch_index=0)
    expect = oversample_to_pow2(cyclic_shift(sv1, 35))
    sign = np.sign(np.dot(v, expect))
    np.testing.assert_allclose(v, sign * expect, atol=1e-12)


def test_interferer_bit_epoch_offset_shifts_boundary(sv1):
    spec = InterfererSpec(
        delay=18, isr_db=0.0, polarity_seed=99, bit_epoch_offset=5
    )
    vals = [
        interference_component(spec, sv1, 1.0, e)[0]
        for e in range(3 * EPOCHS_PER_BIT)
    ]
    # polarity may only change where (epoch + 5) crosses a multiple of 20
    changes = [
        e for e in range(1, len(vals)) if vals[e] != vals[e - 1]
    ]
    for e in changes:
        assert (e + 5) % EPOCHS_PER_BIT == 0


def test_superposition(channel, sv1):
    noise = NoiseSpec(variance=0.0)
    spec1 = InterfererSpec(delay=18, isr_db=6.0, polarity_seed=1)
    spec2 = InterfererSpec(delay=32, isr_db=3.0, polarity_seed=2)
    lone = synthesize_epoch(channel, [], noise, 4).r
    both = synthesize_epoch(channel, [spec1, spec2], noise, 4).r
    v1 = interference_component(spec1, sv1, 1.0, 4)
    v2 = interference_component(spec2, sv1, 1.0, 4)
    np.testing.assert_allclose(both, lone + v1 + v2, atol=1e-12)


def test_interferer_limit(channel):
    specs = [
        InterfererSpec(delay=d, isr_db=0.0, polarity_seed=d)
        for d in (18, 32, 35, 46)
    ]
    with pytest.raises(ValueError, match="interferer limit exceeded"):
        synthesize_epoch(channel, specs, NoiseSpec(variance=0.0), 0)


def test_interferer_delay_must_be_nonzero():
    with pytest.raises(ValueError, match="invalid delay"):
        InterfererSpec(delay=0, isr_db=10.0, polarity_seed=1)


def test_noise_requires_rng(channel):
    with pytest.raises(ValueError):
        synthesize_epoch(channel, [], NoiseSpec(variance=1.0), 0, rng=None)


def test_noise_seeded_reproducibly(channel):
    noise = NoiseSpec(variance=4.0)
    a = synthesize_epoch(channel, [], noise, 9, rng=5).r
    b = synthesize_epoch(channel, [], noise, 9, rng=5).r
    c = synthesize_epoch(channel, [], noise, 9, rng=6).r
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_noise_moments(channel, sv1):
    noise = NoiseSpec(variance=9.0)
    s0 = oversample_to_pow2(sv1)
    resid = np.concatenate(
        [
            synthesize_epoch(channel, [], noise, e, rng=11).r
            - synthesize_epoch(channel, [], NoiseSpec(0.0), e).r
            for e in range(100)
        ]
    )
    assert abs(float(resid.mean())) < 0.05
    np.testing.assert_allclose(float(resid.var()), 9.0, rtol=0.05)


def test_power_scales_amplitude(sv1):
    strong = ChannelParams(code=sv1, power=4.0, bit_seed=42)
    weak = ChannelParams(code=sv1, power=1.0, bit_seed=42)
    noise = NoiseSpec(variance=0.0)
    r4 = synthesize_epoch(strong, [], noise, 0).r
    r1 = synthesize_epoch(weak, [], noise, 0).r
    np.testing.assert_allclose(r4, 2.0 * r1, atol=1e-12)
