"""Simulation configuration: schema, defaults, and the flat file format.

Config files are plain ``key = value`` lines (``#`` comments allowed).
The schema is flat and closed: unknown keys are rejected by name, and
every validation diagnostic names the offending key so a bad sweep
fails before any simulation time is spent.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

__all__ = [
    "SimConfig",
    "from_mapping",
    "parse_config",
    "parse_config_text",
    "read_mapping_text",
    "CONFIG_KEYS",
]

#: Detector identifiers accepted in configs and printed in CSV rows.
DETECTOR_MF = "mf"
DETECTOR_MMSE = "mmse"

#: Known-good (group size, window length) pairings, kept as
#: documentation-grade guidance; only g | 1024 is enforced.
RECOMMENDED_G_L = (
    (1, 1500),
    (2, 1000),
    (4, 1000),
    (8, 1000),
    (16, 500),
    (32, 600),
    (64, 300),
)

_DEFAULTS = {
    "seed": 12345,
    "sv": 1,
    "g": 64,
    "window_l": 300,
    "detectors": (DETECTOR_MF, DETECTOR_MMSE),
    "isr_db": (5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0),
    "n_bits": 100_000,
    "n_interferers": 1,
    "interferer_delays": "auto",
    "bit_epoch_offsets": (),
    "noise_var": 0.0,
    "solve_stride": 1,
}

CONFIG_KEYS = tuple(_DEFAULTS)


def _as_int(key: str, value) -> int:
    try:
        out = int(str(value).strip())
    except ValueError:
        raise ValueError(f"{key}: expected an integer, got {value!r}") from None
    return out


def _as_float(key: str, value) -> float:
    try:
        return float(str(value).strip())
    except ValueError:
        raise ValueError(f"{key}: expected a number, got {value!r}") from None


def _as_seq(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    parts = [p.strip() for p in str(value).split(",")]
    return [p for p in parts if p]


@dataclass(frozen=True)
class SimConfig:
    """One sweep's worth of simulation parameters.

    Field names match the config-file keys one for one.
    """

    seed: int = _DEFAULTS["seed"]
    sv: int = _DEFAULTS["sv"]
    g: int = _DEFAULTS["g"]
    window_l: int = _DEFAULTS["window_l"]
    detectors: tuple = _DEFAULTS["detectors"]
    isr_db: tuple = _DEFAULTS["isr_db"]
    n_bits: int = _DEFAULTS["n_bits"]
    n_interferers: int = _DEFAULTS["n_interferers"]
    interferer_delays: object = _DEFAULTS["interferer_delays"]
    bit_epoch_offsets: tuple = _DEFAULTS["bit_epoch_offsets"]
    noise_var: float = _DEFAULTS["noise_var"]
    solve_stride: int = _DEFAULTS["solve_stride"]

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed: must be nonnegative")
        if not 1 <= self.sv <= 32:
            raise ValueError(f"sv: {self.sv} outside 1..32")
        if self.g < 1 or 1024 % self.g != 0:
            raise ValueError(f"g: {self.g} does not divide 1024")
        if self.window_l < 1:
            raise ValueError("window_l: must be at least 1")
        if not self.detectors:
            raise ValueError("detectors: at least one detector required")
        for det in self.detectors:
            if det not in (DETECTOR_MF, DETECTOR_MMSE):
                raise ValueError(
                    f"detectors: unknown detector {det!r} "
                    f"(expected {DETECTOR_MF} or {DETECTOR_MMSE})"
                )
        if len(set(self.detectors)) != len(self.detectors):
            raise ValueError("detectors: duplicate entries")
        if not self.isr_db:
            raise ValueError("isr_db: at least one grid value required")
        if self.n_bits < 1:
            raise ValueError("n_bits: must be at least 1")
        if not 0 <= self.n_interferers <= 3:
            raise ValueError(
                f"n_interferers: {self.n_interferers} outside 0..3"
            )
        if self.interferer_delays != "auto":
            delays = tuple(self.interferer_delays)
            if len(delays) != self.n_interferers:
                raise ValueError(
                    "interferer_delays: expected "
                    f"{self.n_interferers} delays, got {len(delays)}"
                )
            for d in delays:
                if not 1 <= d <= 1022:
                    raise ValueError(
                        f"interferer_delays: invalid delay {d} (must be 1..1022)"
                    )
            object.__setattr__(self, "interferer_delays", delays)
        offs = tuple(self.bit_epoch_offsets)
        if len(offs) not in (0, 1, self.n_interferers):
            raise ValueError(
                "bit_epoch_offsets: expected none, one, or "
                f"{self.n_interferers} entries, got {len(offs)}"
            )
        for o in offs:
            if not 0 <= o < 20:
                raise ValueError(
                    f"bit_epoch_offsets: offset {o} outside [0, 20)"
                )
        object.__setattr__(self, "bit_epoch_offsets", offs)
        if self.noise_var < 0:
            raise ValueError("noise_var: must be nonnegative")
        if self.solve_stride < 1:
            raise ValueError("solve_stride: must be at least 1")

    def offsets_for(self, n: int) -> tuple:
        """Per-interferer bit-epoch offsets, broadcast to n entries."""
        offs = self.bit_epoch_offsets
        if len(offs) == 0:
            return (0,) * n
        if len(offs) == 1:
            return offs * n
        return offs[:n]

    def replace(self, **updates) -> "SimConfig":
        fields = asdict(self)
        fields.update(updates)
        return from_mapping(fields)

    def to_mapping(self) -> dict:
        out = asdict(self)
        out["detectors"] = list(self.detectors)
        out["isr_db"] = list(self.isr_db)
        if self.interferer_delays != "auto":
            out["interferer_delays"] = list(self.interferer_delays)
        out["bit_epoch_offsets"] = list(self.bit_epoch_offsets)
        return out


def from_mapping(mapping: dict) -> SimConfig:
    """Build a SimConfig from a mapping, coercing string values.

    Unknown keys are rejected by name; every coercion or invariant
    failure names the key it came from.
    """
    values = dict(_DEFAULTS)
    for key, raw in mapping.items():
        if key not in _DEFAULTS:
            raise ValueError(f"unknown config key: {key}")
        if raw is None:
            continue
        if key in ("seed", "sv", "g", "window_l", "n_bits",
                   "n_interferers", "solve_stride"):
            values[key] = _as_int(key, raw)
        elif key == "noise_var":
            values[key] = _as_float(key, raw)
        elif key == "detectors":
            values[key] = tuple(d.strip().lower() for d in _as_seq(raw))
        elif key == "isr_db":
            values[key] = tuple(_as_float(key, v) for v in _as_seq(raw))
        elif key == "interferer_delays":
            if isinstance(raw, str) and raw.strip().lower() == "auto":
                values[key] = "auto"
            else:
                values[key] = tuple(_as_int(key, v) for v in _as_seq(raw))
        elif key == "bit_epoch_offsets":
            values[key] = tuple(_as_int(key, v) for v in _as_seq(raw))
    return SimConfig(**values)


def read_mapping_text(text: str) -> dict:
    """Split the flat ``key = value`` format into a raw string mapping."""
    mapping: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(
                f"line {lineno}: expected 'key = value', got {stripped!r}"
            )
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in mapping:
            raise ValueError(f"duplicate config key: {key}")
        mapping[key] = value.strip()
    return mapping


def parse_config_text(text: str) -> SimConfig:
    """Parse the flat ``key = value`` config format from a string."""
    return from_mapping(read_mapping_text(text))


def parse_config(path) -> SimConfig:
    """Parse a config file; empty file means full defaults."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
