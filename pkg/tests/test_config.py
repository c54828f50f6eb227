"""Simulation-config parsing and validation tests."""

import pytest

from gwmmse.config import (
    SimConfig,
    from_mapping,
    parse_config_text,
    read_mapping_text,
)


def test_defaults():
    cfg = SimConfig()
    assert cfg.seed == 12345
    assert cfg.sv == 1
    assert cfg.g == 64
    assert cfg.window_l == 300
    assert cfg.detectors == ("mf", "mmse")
    assert cfg.isr_db == (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0)
    assert cfg.n_bits == 100_000
    assert cfg.n_interferers == 1
    assert cfg.interferer_delays == "auto"
    assert cfg.bit_epoch_offsets == ()
    assert cfg.noise_var == 0.0
    assert cfg.solve_stride == 1


def test_replace_keeps_validation():
    cfg = SimConfig().replace(g=16, window_l=500)
    assert cfg.g == 16
    with pytest.raises(ValueError, match="g:"):
        cfg.replace(g=48)


def test_unknown_key_rejected():
    with pytest.raises(ValueError, match="unknown config key: bogus"):
        from_mapping({"bogus": "1"})


def test_group_must_divide_epoch():
    with pytest.raises(ValueError, match="does not divide"):
        SimConfig().replace(g=100)


def test_sv_range():
    with pytest.raises(ValueError, match="sv:"):
        SimConfig().replace(sv=0)
    with pytest.raises(ValueError, match="sv:"):
        SimConfig().replace(sv=33)


def test_interferer_count_range():
    with pytest.raises(ValueError, match="n_interferers:"):
        SimConfig().replace(n_interferers=4)
    cfg = SimConfig().replace(n_interferers=0, interferer_delays=())
    assert cfg.n_interferers == 0


def test_explicit_delays_must_match_count():
    cfg = SimConfig().replace(n_interferers=2, interferer_delays=(18, 32))
    assert cfg.interferer_delays == (18, 32)
    with pytest.raises(ValueError, match="interferer_delays"):
        SimConfig().replace(n_interferers=2, interferer_delays=(18,))


def test_delay_bounds():
    with pytest.raises(ValueError, match="interferer_delays"):
        SimConfig().replace(interferer_delays=(0,))
    with pytest.raises(ValueError, match="interferer_delays"):
        SimConfig().replace(interferer_delays=(1023,))


def test_bit_epoch_offsets_validation():
    cfg = SimConfig().replace(
        n_interferers=3, interferer_delays=(18, 32, 35),
        bit_epoch_offsets=(0, 5, 19),
    )
    assert cfg.offsets_for(3) == (0, 5, 19)
    with pytest.raises(ValueError, match="bit_epoch_offsets"):
        SimConfig().replace(bit_epoch_offsets=(20,))
    with pytest.raises(ValueError, match="bit_epoch_offsets"):
        SimConfig().replace(
            n_interferers=3, interferer_delays=(18, 32, 35),
            bit_epoch_offsets=(1, 2),
        )


def test_offsets_broadcast():
    assert SimConfig().offsets_for(3) == (0, 0, 0)
    one = SimConfig().replace(
        n_interferers=3, interferer_delays=(18, 32, 35),
        bit_epoch_offsets=(7,),
    )
    assert one.offsets_for(3) == (7, 7, 7)


def test_noise_var_nonnegative():
    with pytest.raises(ValueError, match="noise_var"):
        SimConfig().replace(noise_var=-1.0)


def test_mapping_round_trip():
    cfg = SimConfig().replace(noise_var=600.0, isr_db=(10.0, 20.0))
    assert from_mapping(cfg.to_mapping()) == cfg


def test_text_style_round_trip():
    cfg = SimConfig().replace(noise_var=600.0, isr_db=(10.0, 20.0))
    text = {}
    for k, v in cfg.to_mapping().items():
        text[k] = ",".join(str(x) for x in v) if isinstance(v, list) else str(v)
    assert from_mapping(text) == cfg


CONFIG_TEXT = """\
# sweep setup
seed = 99
sv = 3
g = 32
window_l = 600
detectors = mf,mmse
isr_db = 10,20,30
n_bits = 5000
n_interferers = 2
interferer_delays = 18,32
noise_var = 450.0
solve_stride = 2
"""


def test_parse_config_text():
    cfg = parse_config_text(CONFIG_TEXT)
    assert cfg.seed == 99
    assert cfg.sv == 3
    assert cfg.g == 32
    assert cfg.window_l == 600
    assert cfg.isr_db == (10.0, 20.0, 30.0)
    assert cfg.interferer_delays == (18, 32)
    assert cfg.noise_var == 450.0
    assert cfg.solve_stride == 2


def test_parse_config_auto_delays():
    cfg = parse_config_text("interferer_delays = auto\n")
    assert cfg.interferer_delays == "auto"


def test_duplicate_key_rejected():
    with pytest.raises(ValueError, match="duplicate config key"):
        read_mapping_text("seed = 1\nseed = 2\n")


def test_malformed_line_rejected():
    with pytest.raises(ValueError):
        read_mapping_text("this is not a key value pair\n")


def test_read_mapping_skips_comments_and_blanks():
    mapping = read_mapping_text("\n# note\nseed = 4\n\n")
    assert mapping == {"seed": "4"}
