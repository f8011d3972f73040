"""
Command-line driver: image transmission over an SNR grid, or a random-payload
BER/FER sweep.

    polarlink --mode image --n 512 --k 256 --snr-min 1 --snr-max 4 \\
        --input maps/ --output out/
    polarlink --mode sweep --n 256 --k 128 --snr-min 1 --snr-max 4 --output out/
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .channel import ChannelParams
from .construction import ConfigurationError, build_code, format_construction, is_power_of_two
from .codec import CHECK_NODES
from .image import IMAGE_SUFFIXES, ImageFormatError, load_image, save_image, transmit_image
from .link import StoppingRule, monte_carlo_point
from .reporting import ImageReport, append_csv, append_report, append_waterfall_row, format_sci

log = logging.getLogger("polarlink")

SNR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RunConfig:
    mode: str
    n_bits: int
    k_bits: int
    min_snr_db: float
    max_snr_db: float
    snr_step_db: float
    design_snr_db: float
    input_dir: Path | None
    output_dir: Path
    seed: int
    decoder: str
    stop: StoppingRule
    verbose: bool = False
    dump_construction: Path | None = None

    @property
    def rate(self):
        return self.k_bits / self.n_bits

    def snr_grid(self):
        """min, min+step, ... up to and including max (within 1e-9)."""
        grid = []
        i = 0
        while True:
            value = self.min_snr_db + i * self.snr_step_db
            if value > self.max_snr_db + SNR_TOLERANCE:
                return grid
            grid.append(round(value, 9))
            i += 1


def build_parser():
    p = argparse.ArgumentParser(prog="polarlink",
                                description="Polar-coded BPSK/AWGN image link simulator.")
    p.add_argument("--mode", choices=("image", "sweep"), default="image")
    p.add_argument("--n", type=int, required=True, help="codeword length N (power of two)")
    p.add_argument("--k", type=int, required=True, help="information bits per frame K")
    p.add_argument("--snr-min", type=float, required=True, help="first Eb/N0 point in dB")
    p.add_argument("--snr-max", type=float, required=True, help="last Eb/N0 point in dB (inclusive)")
    p.add_argument("--snr-step", type=float, default=1.0, help="Eb/N0 step in dB (default: 1)")
    p.add_argument("--design-snr", type=float, default=2.0,
                   help="Eb/N0 used for code construction (default: 2.0)")
    p.add_argument("--input", type=Path, help="directory of PNG images (image mode)")
    p.add_argument("--output", type=Path, required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decoder", choices=CHECK_NODES, default="exact",
                   help="SC check-node rule (default: exact)")
    p.add_argument("--min-frame-errors", type=int, default=100,
                   help="sweep stop: frame errors per SNR point (default: 100)")
    p.add_argument("--max-frames", type=int, default=100_000,
                   help="sweep stop: frame budget per SNR point (default: 100000)")
    p.add_argument("--dump-construction", type=Path, metavar="PATH",
                   help="write per-channel reliabilities and frozen flags to PATH")
    p.add_argument("-v", "--verbose", action="store_true", help="log every packet")
    return p


def parse_args(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    if not is_power_of_two(a.n) or a.n < 2:
        parser.error(f"--n: N must be a power of two >= 2, got {a.n}")
    if not 1 <= a.k <= a.n:
        parser.error(f"--k: K must satisfy 1 <= K <= N={a.n}, got {a.k}")
    if a.snr_step <= 0:
        parser.error(f"--snr-step: must be > 0, got {a.snr_step}")
    if a.snr_min > a.snr_max:
        parser.error(f"--snr-min ({a.snr_min}) must not exceed --snr-max ({a.snr_max})")
    if a.mode == "image" and a.input is None:
        parser.error("--input is required in image mode")
    if a.min_frame_errors < 1:
        parser.error(f"--min-frame-errors: must be >= 1, got {a.min_frame_errors}")
    if a.max_frames < 1:
        parser.error(f"--max-frames: must be >= 1, got {a.max_frames}")
    return RunConfig(
        mode=a.mode, n_bits=a.n, k_bits=a.k,
        min_snr_db=a.snr_min, max_snr_db=a.snr_max, snr_step_db=a.snr_step,
        design_snr_db=a.design_snr, input_dir=a.input, output_dir=a.output,
        seed=a.seed, decoder=a.decoder,
        stop=StoppingRule(a.min_frame_errors, a.max_frames),
        verbose=a.verbose, dump_construction=a.dump_construction,
    )


def snr_dirname(snr_db):
    return f"snr_{snr_db:g}"


def _fresh(path):
    path.unlink(missing_ok=True)
    return path


def run_image_mode(config, workers=None):
    """SNR loop outside, images (lexicographic) inside. Returns an exit status."""
    code = build_code(config.n_bits, config.k_bits, config.design_snr_db)
    if config.dump_construction:
        config.dump_construction.write_text(format_construction(code))
    if not config.input_dir.is_dir():
        log.error("input directory %s does not exist", config.input_dir)
        return 1
    paths = sorted(p for p in config.input_dir.iterdir()
                   if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)
    if not paths:
        log.error("no PNG images in %s", config.input_dir)
        return 1

    jobs = {}
    for path in paths:
        try:
            jobs[path] = load_image(path)
        except ImageFormatError as exc:
            log.warning("skipping %s", exc)
    if not jobs:
        log.error("none of the %d images in %s could be read", len(paths), config.input_dir)
        return 1

    config.output_dir.mkdir(parents=True, exist_ok=True)
    report_path = _fresh(config.output_dir / "report.txt")
    csv_path = _fresh(config.output_dir / "results.csv")
    failures = len(paths) - len(jobs)

    for snr_index, snr_db in enumerate(config.snr_grid()):
        params = ChannelParams(snr_db=snr_db, rate=code.rate, seed=config.seed)
        out_dir = config.output_dir / snr_dirname(snr_db)
        out_dir.mkdir(exist_ok=True)
        for image_index, path in enumerate(paths):
            job = jobs.get(path)
            if job is None:
                continue
            try:
                degraded, stats, elapsed = transmit_image(
                    job, code, params, config.decoder, image_index=image_index,
                    snr_index=snr_index, workers=workers)
                save_image(degraded, out_dir / path.name)
            except (OSError, ValueError) as exc:
                log.error("%s at %s dB failed: %s", path.name, snr_db, exc)
                failures += 1
                continue
            report = ImageReport(
                image=path.name, resolution=f"{job.width}x{job.height}",
                pixel_count=job.pixel_count, channels=job.channels,
                total_bits=job.payload_bits, packet_count=stats.frames,
                N=code.N, K=code.K, rate=code.rate, design_snr_db=config.design_snr_db,
                snr_db=snr_db, decoder=config.decoder, ber=stats.ber, fer=stats.fer,
                elapsed_time_s=elapsed, seed=config.seed)
            append_report(report, report_path)
            append_csv(report, csv_path)
            log.info("%s snr=%g dB ber=%s fer=%s (%.1f s)", path.name, snr_db,
                     format_sci(stats.ber), format_sci(stats.fer), elapsed)
    return 0 if failures == 0 else 1


def run_sweep_mode(config, workers=None):
    code = build_code(config.n_bits, config.k_bits, config.design_snr_db)
    if config.dump_construction:
        config.dump_construction.write_text(format_construction(code))
    config.output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = _fresh(config.output_dir / "waterfall.csv")
    print("snr_db,N,K,rate,frames,ber,fer")
    for snr_index, snr_db in enumerate(config.snr_grid()):
        params = ChannelParams(snr_db=snr_db, rate=code.rate, seed=config.seed)
        stats = monte_carlo_point(code, params, config.stop, config.decoder,
                                  snr_index=snr_index, workers=workers)
        append_waterfall_row(csv_path, snr_db, code, stats)
        print(f"{snr_db:g},{code.N},{code.K},{code.rate:g},{stats.frames},"
              f"{format_sci(stats.ber)},{format_sci(stats.fer)}", flush=True)
    return 0


def main(argv=None):
    config = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if config.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        if config.mode == "image":
            return run_image_mode(config)
        return run_sweep_mode(config)
    except ConfigurationError as exc:
        log.error("invalid configuration: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
