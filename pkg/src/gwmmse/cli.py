"""Command-line interface.

A thin client over the HTTP service: every subcommand maps to one
endpoint.  By default the app is mounted in-process (no server needed);
``--server http://host:port`` targets a running instance instead, and
``gwmmse serve`` starts one.

Subcommands: codes, xcorr, simulate, gain, bench, serve.
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from .config import CONFIG_KEYS, read_mapping_text
from .formats import (
    ber_points_to_csv,
    ber_points_to_plot_data,
    read_ber_csv,
    write_ber_csv,
    write_plot_data,
)
from .harness import BerPoint


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # No server given: mount the app in-process behind a sync portal so
    # every subcommand still goes through the exact HTTP interface.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import app  # deferred: fastapi import is not free

    return TestClient(app, base_url="http://gwmmse.local")


class CliError(Exception):
    pass


def _request(client: httpx.Client, method: str, path: str, **kwargs) -> dict:
    reply = client.request(method, path, **kwargs)
    if reply.status_code >= 400:
        try:
            detail = reply.json().get("detail", reply.text)
        except ValueError:
            detail = reply.text
        raise CliError(f"{path}: {detail}")
    return reply.json()


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- codes

def _chips_to_binary(chips) -> str:
    return "".join("0" if c > 0 else "1" for c in chips)


def cmd_codes(args, client: httpx.Client) -> int:
    if args.all:
        doc = _request(
            client, "GET", "/codes",
            params={"include_chips": args.format != "octal-check"},
        )
        entries = doc["codes"]
    else:
        if args.sv is None:
            raise CliError("codes: provide --sv N or --all")
        doc = _request(
            client, "GET", f"/codes/{args.sv}",
            params={"include_chips": args.format != "octal-check"},
        )
        entries = [doc]
    lines = []
    for entry in entries:
        if args.format == "octal-check":
            lines.append(f"sv={entry['sv']} octal={entry['octal']}")
        elif args.format == "binary":
            lines.append(f"{entry['sv']} {_chips_to_binary(entry['chips'])}")
        else:  # bipolar CSV: sv id, then the 1023 chips
            chips = ",".join(str(c) for c in entry["chips"])
            lines.append(f"{entry['sv']},{chips}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------- xcorr

def cmd_xcorr(args, client: httpx.Client) -> int:
    doc = _request(
        client, "POST", "/xcorr", json={"sv": args.sv, "count": args.count}
    )
    text = json.dumps(doc, indent=2) + "\n"
    _write_or_print(text, args.out)
    return 0


# ------------------------------------------------------------- simulate

def _collect_overrides(args) -> dict:
    overrides = {
        "seed": args.seed,
        "sv": args.sv,
        "g": args.g,
        "window_l": args.window_l,
        "detectors": args.detectors,
        "isr_db": args.isr,
        "n_bits": args.n_bits,
        "n_interferers": args.n_interferers,
        "interferer_delays": args.delays,
        "bit_epoch_offsets": args.offsets,
        "noise_var": args.noise_var,
        "solve_stride": args.solve_stride,
    }
    return {k: v for k, v in overrides.items() if v is not None}


def _simulate_request_body(args) -> dict:
    mapping: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            mapping.update(read_mapping_text(fh.read()))
    mapping.update(_collect_overrides(args))
    for key in mapping:
        if key not in CONFIG_KEYS:
            raise CliError(f"unknown config key: {key}")
    # the service model carries lists for these;
    # comma strings from files/flags pass through the same coercion
    body: dict = {}
    for key, value in mapping.items():
        if key in ("detectors", "isr_db", "interferer_delays",
                   "bit_epoch_offsets"):
            if isinstance(value, str) and not (
                key == "interferer_delays" and value.strip() == "auto"
            ):
                parts = [p.strip() for p in value.split(",") if p.strip()]
                if key == "isr_db":
                    value = [float(p) for p in parts]
                elif key == "detectors":
                    value = parts
                else:
                    value = [int(p) for p in parts]
            body[key] = value
        else:
            body[key] = value
    return body


def _points_from_doc(doc: dict) -> list[BerPoint]:
    return [BerPoint(**row) for row in doc["points"]]


def cmd_simulate(args, client: httpx.Client) -> int:
    try:
        body = _simulate_request_body(args)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    doc = _request(client, "POST", "/simulate", json=body)
    points = _points_from_doc(doc)
    if args.out:
        write_ber_csv(points, args.out)
    else:
        sys.stdout.write(ber_points_to_csv(points))
    if args.plot_data:
        write_plot_data(points, args.plot_data)
    return 0


# ----------------------------------------------------------------- gain

def _point_payload(p: BerPoint) -> dict:
    return {
        "isr_db": p.isr_db,
        "detector": p.detector,
        "g": p.g,
        "window_l": p.window_l,
        "n_interferers": p.n_interferers,
        "bits_counted": p.bits_counted,
        "errors": p.errors,
        "ber": p.ber,
        "ci_low": p.ci_low,
        "ci_high": p.ci_high,
        "seed": p.seed,
    }


def _load_curve(path: str, detector: str | None) -> list[BerPoint]:
    points = read_ber_csv(path)
    detectors = sorted({p.detector for p in points})
    if detector is None:
        if len(detectors) != 1:
            raise CliError(
                f"{path}: holds detectors {detectors}; pick one with "
                "--detector-a/--detector-b"
            )
        detector = detectors[0]
    picked = [p for p in points if p.detector == detector]
    if not picked:
        raise CliError(f"{path}: no rows for detector {detector!r}")
    return picked


def cmd_gain(args, client: httpx.Client) -> int:
    try:
        curve_a = _load_curve(args.a, args.detector_a)
        curve_b = _load_curve(args.b, args.detector_b)
    except ValueError as exc:
        raise CliError(f"malformed CSV: {exc}") from None
    doc = _request(
        client,
        "POST",
        "/gain",
        json={
            "points_a": [_point_payload(p) for p in curve_a],
            "points_b": [_point_payload(p) for p in curve_b],
            "target_ber": args.target_ber,
        },
    )
    gain = doc["gain_db"]
    print(f"gain_db={gain if doc['reached'] else 'not_reached'}")
    if args.out:
        mirror = {
            "target_ber": doc["target_ber"],
            "curve_a": doc["curve_a"],
            "curve_b": doc["curve_b"],
            "gain_db": gain if doc["reached"] else "not_reached",
        }
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(mirror, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------- bench

def cmd_bench(args, client: httpx.Client) -> int:
    body: dict = {"seconds": args.seconds, "detector": args.detector}
    if args.g is not None:
        body["g"] = args.g
    if args.window_l is not None:
        body["window_l"] = args.window_l
    if args.noise_var is not None:
        body["noise_var"] = args.noise_var
    if args.n_interferers is not None:
        body["n_interferers"] = args.n_interferers
    doc = _request(client, "POST", "/bench", json=body)
    print(f"detector={doc['detector']}")
    print(f"epochs_per_second={doc['epochs_per_second']:.1f}")
    print(f"channels_realtime={doc['channels_realtime']}")
    return 0


# ---------------------------------------------------------------- serve

def cmd_serve(args, _client) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwmmse",
        description="Group-weighting MMSE correlator testbed",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service (default: in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codes", help="emit gold codes")
    p.add_argument("--sv", type=int, default=None)
    p.add_argument("--all", action="store_true")
    p.add_argument(
        "--format",
        choices=["bipolar", "binary", "octal-check"],
        default="bipolar",
    )
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_codes)

    p = sub.add_parser("xcorr", help="build a worst-case delay table")
    p.add_argument("--sv", type=int, default=1)
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_xcorr)

    p = sub.add_parser("simulate", help="run a BER-vs-ISR sweep")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sv", type=int, default=None)
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--window-l", type=int, default=None, dest="window_l")
    p.add_argument("--detectors", default=None, help="e.g. mf,mmse")
    p.add_argument("--isr", default=None, help="dB grid, e.g. 10,20,30")
    p.add_argument("--n-bits", type=int, default=None, dest="n_bits")
    p.add_argument(
        "--n-interferers", type=int, default=None, dest="n_interferers"
    )
    p.add_argument("--delays", default=None, help="chip delays or 'auto'")
    p.add_argument("--offsets", default=None, help="bit-epoch offsets")
    p.add_argument("--noise-var", type=float, default=None, dest="noise_var")
    p.add_argument(
        "--solve-stride", type=int, default=None, dest="solve_stride"
    )
    p.add_argument("--out", default=None, help="results CSV path")
    p.add_argument(
        "--plot-data", default=None, dest="plot_data",
        help="also write a whitespace plot-data file",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gain", help="gain between two measured curves")
    p.add_argument("--a", required=True, help="baseline curve CSV")
    p.add_argument("--b", required=True, help="comparison curve CSV")
    p.add_argument(
        "--target-ber", type=float, default=1e-3, dest="target_ber"
    )
    p.add_argument("--detector-a", default=None, dest="detector_a")
    p.add_argument("--detector-b", default=None, dest="detector_b")
    p.add_argument("--out", default=None, help="JSON mirror path")
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("bench", help="measure pipeline throughput")
    p.add_argument("--seconds", type=float, default=2.0)
    p.add_argument("--detector", choices=["mf", "mmse"], default="mmse")
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--window-l", type=int, default=None, dest="window_l")
    p.add_argument("--noise-var", type=float, default=None, dest="noise_var")
    p.add_argument(
        "--n-interferers", type=int, default=None, dest="n_interferers"
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return cmd_serve(args, None)
        with _client(args.server) as client:
            return args.func(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
