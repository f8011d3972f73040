"""
Per-image text/CSV reports and the sweep waterfall table.
"""

import csv
from dataclasses import dataclass, fields
from pathlib import Path


def format_sci(value):
    """Four significant digits, bare exponent: 0 -> '0.000e0', 0.0123 -> '1.230e-2'."""
    mantissa, exponent = f"{value:.3e}".split("e")
    return f"{mantissa}e{int(exponent)}"


@dataclass(frozen=True)
class ImageReport:
    image: str
    resolution: str
    pixel_count: int
    channels: int
    total_bits: int
    packet_count: int
    N: int
    K: int
    rate: float
    design_snr_db: float
    snr_db: float
    decoder: str
    ber: float
    fer: float
    elapsed_time_s: float
    seed: int

    def formatted(self):
        """Field name -> rendered string, in schema order."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("ber", "fer"):
                value = format_sci(value)
            elif f.name == "elapsed_time_s":
                value = f"{value:.3f}"
            elif isinstance(value, float):
                value = repr(value)
            out[f.name] = str(value)
        return out


REPORT_FIELDS = [f.name for f in fields(ImageReport)]
WATERFALL_FIELDS = ["snr_db", "N", "K", "rate", "frames", "ber", "fer"]


def render_report(report):
    return "".join(f"{k}: {v}\n" for k, v in report.formatted().items()) + "\n"


def append_report(report, path):
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(render_report(report))


def _append_row(path, header, row):
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    try:
        with open(path, "a", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            if fresh:
                writer.writerow(header)
            writer.writerow(row)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def append_csv(report, csv_path):
    _append_row(csv_path, REPORT_FIELDS, list(report.formatted().values()))


def append_waterfall_row(csv_path, snr_db, code, stats):
    _append_row(csv_path, WATERFALL_FIELDS,
                [repr(float(snr_db)), code.N, code.K, repr(code.rate), stats.frames,
                 repr(stats.ber), repr(stats.fer)])
