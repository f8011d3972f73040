"""
Per-packet transmit/receive chain and BER/FER bookkeeping.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import awgn, bpsk_modulate, llr_demap, noiseless_llrs, substream
from .codec import encode, sc_decode_batch

# Substream key tags, so image packets and sweep frames never share noise.
IMAGE_STREAM = 0
SWEEP_STREAM = 1


@dataclass(frozen=True)
class PacketResult:
    decoded: np.ndarray
    bit_errors: int

    @property
    def frame_error(self):
        return self.bit_errors > 0


@dataclass(frozen=True)
class LinkStats:
    frames: int = 0
    payload_bits: int = 0
    bit_errors: int = 0
    frame_errors: int = 0
    stopped_by: str | None = None

    @property
    def ber(self):
        return self.bit_errors / self.payload_bits if self.payload_bits else 0.0

    @property
    def fer(self):
        return self.frame_errors / self.frames if self.frames else 0.0

    def __add__(self, other):
        return LinkStats(
            frames=self.frames + other.frames,
            payload_bits=self.payload_bits + other.payload_bits,
            bit_errors=self.bit_errors + other.bit_errors,
            frame_errors=self.frame_errors + other.frame_errors,
        )

    @classmethod
    def from_bit_errors(cls, bit_errors, K):
        bit_errors = np.asarray(bit_errors)
        return cls(frames=int(bit_errors.size), payload_bits=int(bit_errors.size) * K,
                   bit_errors=int(bit_errors.sum()), frame_errors=int(np.count_nonzero(bit_errors)))


def accumulate(stats, result, K):
    return stats + LinkStats(frames=1, payload_bits=K, bit_errors=int(result.bit_errors),
                             frame_errors=int(result.frame_error))


@dataclass(frozen=True)
class StoppingRule:
    min_frame_errors: int = 100
    max_frames: int = 100_000


def resolve_workers(workers=None):
    """Worker count: explicit value, else POLARLINK_THREADS, else CPU count."""
    if workers is None:
        env = os.environ.get("POLARLINK_THREADS", "").strip()
        workers = int(env) if env else 0
    if workers <= 0:
        workers = os.cpu_count() or 1
    return workers


def _channel_llrs(codewords, params, noise):
    """LLRs for ``codewords`` given unit-variance ``noise`` of the same shape."""
    if params.sigma == 0:
        return noiseless_llrs(codewords)
    received = bpsk_modulate(codewords) + params.sigma * noise
    return llr_demap(received, params.sigma)


def transmit_batch(code, msgs, params, keys, check_node="exact"):
    """
    Run encode -> BPSK -> AWGN -> demap -> SC decode for a batch of packets.

    Row ``i`` of ``msgs`` gets its noise from ``substream(params.seed, *keys[i])``.

    Returns
    -------
    decoded : ndarray of uint8, shape (packets, K)
    bit_errors : ndarray of int, shape (packets,)
    """
    msgs = np.asarray(msgs, dtype=np.uint8).reshape(-1, code.K)
    codewords = encode(code, msgs)
    if params.sigma == 0:
        noise = None
    else:
        noise = np.empty(codewords.shape)
        for i, key in enumerate(keys):
            noise[i] = substream(params.seed, *key).standard_normal(code.N)
    llrs = _channel_llrs(codewords, params, noise)
    decoded, _ = sc_decode_batch(code, llrs, check_node)
    return decoded, np.count_nonzero(decoded != msgs, axis=1)


def transmit_packet(code, msg, params, substream_id=(), check_node="exact", noise_source=None):
    """Send one K-bit packet through the full chain.

    ``noise_source`` overrides the derived substream generator (any object with
    ``standard_normal``).
    """
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape != (code.K,):
        raise ValueError(f"message length {msg.size} does not match K={code.K}")
    rng = noise_source if noise_source is not None else substream(params.seed, *substream_id)
    codeword = encode(code, msg)
    if params.sigma == 0:
        llrs = noiseless_llrs(codeword)
    else:
        llrs = llr_demap(awgn(bpsk_modulate(codeword), params.sigma, rng), params.sigma)
    decoded, _ = sc_decode_batch(code, llrs[None, :], check_node)
    decoded = decoded[0]
    return PacketResult(decoded=decoded, bit_errors=int(np.count_nonzero(decoded != msg)))


def random_frames(code, seed, keys):
    """Uniform random messages and unit noise, both drawn from each key's substream."""
    msgs = np.empty((len(keys), code.K), dtype=np.uint8)
    noise = np.empty((len(keys), code.N))
    for i, key in enumerate(keys):
        rng = substream(seed, *key)
        msgs[i] = rng.integers(0, 2, code.K, dtype=np.uint8)
        noise[i] = rng.standard_normal(code.N)
    return msgs, noise


def _sweep_batch(code, params, check_node, snr_index, start, stop):
    keys = [(SWEEP_STREAM, snr_index, i) for i in range(start, stop)]
    msgs, noise = random_frames(code, params.seed, keys)
    llrs = _channel_llrs(encode(code, msgs), params, noise)
    decoded, _ = sc_decode_batch(code, llrs, check_node)
    return np.count_nonzero(decoded != msgs, axis=1)


def monte_carlo_point(code, params, stop=StoppingRule(), check_node="exact", snr_index=0,
                      batch_size=512, workers=None):
    """
    Estimate BER/FER at one SNR with random payloads.

    Frames are simulated until ``stop.min_frame_errors`` frame errors have
    been seen or ``stop.max_frames`` frames are spent. Frame ``i`` always uses
    the same substream, and the stopping point is located at frame
    granularity, so the result does not depend on ``batch_size`` or
    ``workers``.

    Returns
    -------
    LinkStats
        ``stopped_by`` is ``'min_frame_errors'`` or ``'max_frames'``.
    """
    workers = resolve_workers(workers)
    errors = []
    frame_errors = 0
    done = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while done < stop.max_frames and frame_errors < stop.min_frame_errors:
            spans = []
            start = done
            for _ in range(workers):
                if start >= stop.max_frames:
                    break
                end = min(start + batch_size, stop.max_frames)
                spans.append((start, end))
                start = end
            for result in pool.map(lambda s: _sweep_batch(code, params, check_node, snr_index, *s), spans):
                errors.append(result)
                frame_errors += int(np.count_nonzero(result))
            done = start
    bit_errors = np.concatenate(errors) if errors else np.zeros(0, dtype=int)
    cumulative = np.cumsum(bit_errors > 0)
    hit = np.flatnonzero(cumulative >= stop.min_frame_errors)
    if hit.size:
        bit_errors = bit_errors[:hit[0] + 1]
        reason = "min_frame_errors"
    else:
        reason = "max_frames"
    stats = LinkStats.from_bit_errors(bit_errors, code.K)
    return LinkStats(stats.frames, stats.payload_bits, stats.bit_errors, stats.frame_errors,
                     stopped_by=reason)
