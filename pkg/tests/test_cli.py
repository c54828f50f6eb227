"""CLI tests, run in-process through the main() entry point."""

import json

import pytest

from gwmmse.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_codes_octal_check(capsys):
    assert run_cli("codes", "--sv", "1", "--format", "octal-check") == 0
    assert capsys.readouterr().out == "sv=1 octal=1440\n"


def test_codes_all_octal_check(capsys):
    assert run_cli("codes", "--all", "--format", "octal-check") == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 32
    assert lines[0] == "sv=1 octal=1440"
    assert lines[31] == "sv=32 octal=1712"


def test_codes_bipolar_payload(capsys):
    assert run_cli("codes", "--sv", "2") == 0
    out = capsys.readouterr().out.strip()
    fields = out.split(",")
    assert fields[0] == "2"
    assert len(fields) == 1 + 1023
    assert set(fields[1:]) <= {"1", "-1"}


def test_codes_unknown_sv_fails(capsys):
    assert run_cli("codes", "--sv", "33", "--format", "octal-check") == 2
    assert "unknown code id" in capsys.readouterr().err


def test_codes_requires_target(capsys):
    assert run_cli("codes") == 2


def test_xcorr_writes_table(tmp_path, capsys):
    out = tmp_path / "table.json"
    assert run_cli("xcorr", "--sv", "1", "--count", "3",
                   "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["sv"] == 1
    assert [e["delay"] for e in doc["entries"]] == [18, 32, 35]


def test_xcorr_reruns_byte_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run_cli("xcorr", "--sv", "5", "--count", "4", "--out", str(a))
    run_cli("xcorr", "--sv", "5", "--count", "4", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


SIM_ARGS = [
    "simulate", "--n-bits", "200", "--isr", "10,20", "--noise-var", "300",
    "--detectors", "mf,mmse",
]


def test_simulate_writes_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run_cli(*SIM_ARGS, "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("isr_db,detector,")
    assert len(lines) == 1 + 4


def test_simulate_rerun_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_cli(*SIM_ARGS, "--out", str(a))
    run_cli(*SIM_ARGS, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_simulate_reads_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "n_bits = 100\nisr_db = 10\nnoise_var = 0\ndetectors = mf\n"
    )
    out = tmp_path / "sweep.csv"
    assert run_cli("simulate", "--config", str(cfg), "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert ",mf," in lines[1]


def test_simulate_flag_overrides_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_bits = 100\nisr_db = 10\nnoise_var = 0\n")
    out = tmp_path / "sweep.csv"
    assert run_cli("simulate", "--config", str(cfg), "--detectors", "mf",
                   "--out", str(out)) == 0
    assert len(out.read_text().splitlines()) == 2


def test_simulate_plot_data(tmp_path):
    out = tmp_path / "sweep.csv"
    plot = tmp_path / "sweep.dat"
    assert run_cli("simulate", "--n-bits", "100", "--isr", "10",
                   "--noise-var", "0", "--detectors", "mf",
                   "--out", str(out), "--plot-data", str(plot)) == 0
    lines = plot.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert len(lines) == 2


def test_simulate_rejects_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 1\n")
    assert run_cli("simulate", "--config", str(cfg)) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_simulate_rejects_bad_value(capsys):
    assert run_cli("simulate", "--n-bits", "100", "--g", "48") == 2
    err = capsys.readouterr().err
    assert "g" in err


@pytest.fixture()
def two_curves(tmp_path):
    a = tmp_path / "mf.csv"
    b = tmp_path / "mmse.csv"
    run_cli("simulate", "--n-bits", "400", "--isr", "10,20,30",
            "--noise-var", "600", "--detectors", "mf", "--out", str(a))
    run_cli("simulate", "--n-bits", "400", "--isr", "10,20,30",
            "--noise-var", "600", "--detectors", "mmse", "--out", str(b))
    return a, b


def test_gain_same_curve_is_zero_or_not_reached(two_curves, capsys):
    a, _ = two_curves
    assert run_cli("gain", "--a", str(a), "--b", str(a)) == 0
    out = capsys.readouterr().out
    assert out.startswith("gain_db=")


def test_gain_writes_json(two_curves, tmp_path, capsys):
    a, b = two_curves
    out = tmp_path / "gain.json"
    assert run_cli("gain", "--a", str(a), "--b", str(b),
                   "--target-ber", "1e-3", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert doc["target_ber"] == 1e-3
    assert "gain_db" in doc


def test_gain_multi_detector_csv_needs_selector(tmp_path, capsys):
    mixed = tmp_path / "mixed.csv"
    run_cli("simulate", "--n-bits", "100", "--isr", "10", "--noise-var", "0",
            "--out", str(mixed))
    assert run_cli("gain", "--a", str(mixed), "--b", str(mixed)) == 2
    assert "detector" in capsys.readouterr().err
    assert run_cli("gain", "--a", str(mixed), "--b", str(mixed),
                   "--detector-a", "mf", "--detector-b", "mmse") == 0


def test_bench_prints_throughput(capsys):
    assert run_cli("bench", "--seconds", "0.2") == 0
    out = capsys.readouterr().out
    assert "epochs_per_second=" in out
    assert "channels_realtime=" in out


def test_missing_file_is_diagnostic_not_traceback(capsys):
    assert run_cli("gain", "--a", "/nope/a.csv", "--b", "/nope/b.csv") == 2
    assert "error:" in capsys.readouterr().err
