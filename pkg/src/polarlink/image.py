"""
Image serialization, packetization and per-image transmission.

Pixels are serialized row-major from the top-left, channels interleaved per
pixel (R, G, B), each 8-bit sample most significant bit first.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .link import IMAGE_STREAM, LinkStats, resolve_workers, transmit_batch

log = logging.getLogger(__name__)

SUPPORTED_MODES = {"L": 1, "RGB": 3}
IMAGE_SUFFIXES = (".png",)


class ImageFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ImageJob:
    path: str
    width: int
    height: int
    channels: int
    pixels: np.ndarray = field(repr=False, compare=False)
    bit_depth: int = 8

    @property
    def pixel_count(self):
        return self.width * self.height

    @property
    def payload_bits(self):
        return self.width * self.height * self.channels * self.bit_depth

    @classmethod
    def from_array(cls, pixels, path="<array>"):
        pixels = np.asarray(pixels)
        if pixels.dtype != np.uint8:
            raise ImageFormatError(f"{path}: expected 8-bit samples, got dtype {pixels.dtype}")
        if pixels.ndim == 2:
            channels = 1
        elif pixels.ndim == 3 and pixels.shape[2] == 3:
            channels = 3
        else:
            raise ImageFormatError(f"{path}: unsupported pixel array shape {pixels.shape}")
        height, width = pixels.shape[:2]
        return cls(path=str(path), width=width, height=height, channels=channels, pixels=pixels)


@dataclass(frozen=True)
class ImageBitstream:
    payload: np.ndarray = field(repr=False)
    K: int

    @property
    def payload_length(self):
        return int(self.payload.size)

    @property
    def packet_count(self):
        return math.ceil(self.payload_length / self.K)

    @property
    def padded_length(self):
        return self.packet_count * self.K


def load_image(path):
    """Read an 8-bit grayscale or RGB PNG into an ImageJob."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode not in SUPPORTED_MODES:
                raise ImageFormatError(f"{path}: unsupported image mode {mode!r} "
                                       f"(need 8-bit grayscale 'L' or 'RGB')")
            pixels = np.asarray(img, dtype=np.uint8).copy()
    except OSError as exc:
        raise ImageFormatError(f"{path}: cannot read image ({exc})") from exc
    return ImageJob.from_array(pixels, path)


def save_image(pixels, path):
    mode = "L" if pixels.ndim == 2 else "RGB"
    Image.fromarray(pixels, mode=mode).save(path, format="PNG")


def image_to_bits(job):
    return np.unpackbits(job.pixels.reshape(-1))


def packetize(bits, K):
    """Split ``bits`` into K-bit rows, zero-padding the last one."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    bits = np.asarray(bits, dtype=np.uint8)
    count = math.ceil(bits.size / K)
    padded = np.zeros(count * K, dtype=np.uint8)
    padded[:bits.size] = bits
    return padded.reshape(count, K)


def bits_to_image(payload, job):
    """Rebuild pixels shaped like ``job`` from the leading bits of ``payload``."""
    payload = np.asarray(payload, dtype=np.uint8).reshape(-1)
    need = job.payload_bits
    if payload.size < need:
        raise ValueError(f"{job.path}: payload has {payload.size} bits, image needs {need}")
    shape = (job.height, job.width) if job.channels == 1 else (job.height, job.width, job.channels)
    return np.packbits(payload[:need]).reshape(shape)


def transmit_image(job, code, params, check_node="exact", image_index=0, snr_index=0,
                   workers=None, batch_size=1024):
    """
    Push one image through the coded channel.

    Packet ``p`` uses the noise substream ``(image_index, snr_index, p)``,
    so the degraded image is independent of ``workers`` and ``batch_size``.

    Returns
    -------
    degraded : ndarray
        Reconstructed pixels, same shape as ``job.pixels``.
    stats : LinkStats
    elapsed : float
        Wall-clock seconds.
    """
    t0 = time.perf_counter()
    packets = packetize(image_to_bits(job), code.K)
    count = packets.shape[0]

    def run(span):
        lo, hi = span
        keys = [(IMAGE_STREAM, image_index, snr_index, p) for p in range(lo, hi)]
        return transmit_batch(code, packets[lo:hi], params, keys, check_node)

    spans = [(lo, min(lo + batch_size, count)) for lo in range(0, count, batch_size)]
    decoded = np.empty_like(packets)
    errors = np.empty(count, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=resolve_workers(workers)) as pool:
        for (lo, hi), (dec, err) in zip(spans, pool.map(run, spans)):
            decoded[lo:hi] = dec
            errors[lo:hi] = err
    if log.isEnabledFor(logging.DEBUG):
        for p in range(count):
            log.debug("%s snr=%s packet=%d bit_errors=%d", job.path, params.snr_db, p, errors[p])
    degraded = bits_to_image(decoded, job)
    stats = LinkStats.from_bit_errors(errors, code.K)
    return degraded, stats, time.perf_counter() - t0
