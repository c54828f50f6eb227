"""Persistent artifact formats: delay tables, BER curves, gain reports.

Every writer here is a deterministic function of its inputs — fixed
column order, fixed float formatting (shortest round-trip repr), fixed
line endings — so identical runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json

from .codes import DelayEntry, DelayTable
from .harness import BerPoint, GainReport

__all__ = [
    "CSV_HEADER",
    "delay_table_to_json",
    "write_delay_table",
    "read_delay_table",
    "ber_points_to_csv",
    "write_ber_csv",
    "read_ber_csv",
    "ber_points_to_plot_data",
    "write_plot_data",
    "gain_report_to_dict",
    "write_gain_json",
]

CSV_HEADER = (
    "isr_db,detector,g,window_l,n_interferers,"
    "bits,errors,ber,ci_low,ci_high,seed"
)

_CSV_FIELDS = CSV_HEADER.split(",")


def delay_table_to_json(table: DelayTable) -> str:
    """Serialize a delay table to its canonical JSON form."""
    doc = {
        "sv": table.code_id,
        "entries": [
            {"delay": e.delay, "corr": e.corr} for e in table.entries
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def write_delay_table(table: DelayTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delay_table_to_json(table))


def read_delay_table(path) -> DelayTable:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    entries = tuple(
        DelayEntry(delay=int(e["delay"]), corr=int(e["corr"]))
        for e in doc["entries"]
    )
    return DelayTable(code_id=int(doc["sv"]), entries=entries)


def _point_row(point: BerPoint) -> list[str]:
    return [
        repr(float(point.isr_db)),
        point.detector,
        str(point.g),
        str(point.window_l),
        str(point.n_interferers),
        str(point.bits_counted),
        str(point.errors),
        repr(float(point.ber)),
        repr(float(point.ci_low)),
        repr(float(point.ci_high)),
        str(point.seed),
    ]


def ber_points_to_csv(points) -> str:
    """Render BER points as CSV text with the fixed column schema."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_FIELDS)
    for p in points:
        writer.writerow(_point_row(p))
    return buf.getvalue()


def write_ber_csv(points, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(ber_points_to_csv(points))


def read_ber_csv(path) -> list[BerPoint]:
    """Parse a results CSV back into BER points (lossless round-trip)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or rows[0] != _CSV_FIELDS:
        raise ValueError(
            f"malformed CSV: expected header {CSV_HEADER!r}"
        )
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(_CSV_FIELDS):
            raise ValueError(
                f"malformed CSV: line {lineno} has {len(row)} fields"
            )
        try:
            points.append(
                BerPoint(
                    isr_db=float(row[0]),
                    detector=row[1],
                    g=int(row[2]),
                    window_l=int(row[3]),
                    n_interferers=int(row[4]),
                    bits_counted=int(row[5]),
                    errors=int(row[6]),
                    ber=float(row[7]),
                    ci_low=float(row[8]),
                    ci_high=float(row[9]),
                    seed=int(row[10]),
                )
            )
        except ValueError as exc:
            raise ValueError(f"malformed CSV: line {lineno}: {exc}") from None
    return points


def ber_points_to_plot_data(points) -> str:
    """Same rows as the CSV in gnuplot-friendly whitespace columns."""
    lines = ["# " + " ".join(_CSV_FIELDS)]
    for p in points:
        lines.append(" ".join(_point_row(p)))
    return "\n".join(lines) + "\n"


def write_plot_data(points, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ber_points_to_plot_data(points))


def _crossing_dict(crossing) -> dict:
    return {
        "curve": crossing.curve_id,
        "status": crossing.status,
        "isr_at_target": crossing.isr_at_target,
    }


def gain_report_to_dict(report: GainReport) -> dict:
    """JSON-ready mirror of a gain report."""
    return {
        "target_ber": report.target_ber,
        "curve_a": _crossing_dict(report.curve_a),
        "curve_b": _crossing_dict(report.curve_b),
        "gain_db": report.gain_db if report.reached else "not_reached",
    }


def write_gain_json(report: GainReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(gain_report_to_dict(report), indent=2) + "\n")
