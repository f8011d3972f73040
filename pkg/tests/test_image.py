import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from polarlink.channel import ChannelParams, llr_demap, substream
from polarlink.codec import check_node_exact
from polarlink.construction import build_code
from polarlink.image import (ImageBitstream, ImageFormatError, ImageJob, bits_to_image,
                             image_to_bits, load_image, packetize, save_image, transmit_image)

from oracles import kronecker_generator, scalar_sc_decode


def bits(text):
    return np.array([int(c) for c in text.replace(" ", "")], dtype=np.uint8)


def test_serialization_examples():
    gray = ImageJob.from_array(np.array([[0]], dtype=np.uint8))
    np.testing.assert_array_equal(image_to_bits(gray), np.zeros(8))
    rgb = ImageJob.from_array(np.array([[[255, 0, 255]]], dtype=np.uint8))
    np.testing.assert_array_equal(image_to_bits(rgb), bits("11111111 00000000 11111111"))
    two = ImageJob.from_array(np.array([[1, 2]], dtype=np.uint8))
    np.testing.assert_array_equal(image_to_bits(two), bits("00000001 00000010"))


def test_row_major_channel_interleaved_order():
    px = np.array([[[1, 2, 3], [4, 5, 6]], [[7, 8, 9], [10, 11, 12]]], dtype=np.uint8)
    job = ImageJob.from_array(px)
    values = np.packbits(image_to_bits(job))
    np.testing.assert_array_equal(values, np.arange(1, 13))
    assert job.payload_bits == 2 * 2 * 3 * 8 and job.pixel_count == 4


def test_bits_to_image_examples():
    job = ImageJob.from_array(np.zeros((1, 1), dtype=np.uint8))
    assert bits_to_image(bits("00000011"), job)[0, 0] == 3
    with pytest.raises(ValueError):
        bits_to_image(bits("0000"), job)


def test_padding_region_ignored():
    px = np.array([[7, 200, 13]], dtype=np.uint8)
    job = ImageJob.from_array(px)
    padded = packetize(image_to_bits(job), 10).reshape(-1)
    padded[job.payload_bits:] = 1
    np.testing.assert_array_equal(bits_to_image(padded, job), px)


@settings(max_examples=40)
@given(st.one_of(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))),
                 arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9), st.just(3)))))
def test_serialization_round_trip(px):
    job = ImageJob.from_array(px)
    np.testing.assert_array_equal(bits_to_image(image_to_bits(job), job), px)


@pytest.mark.parametrize("length, K, count", [(300_000, 250, 1200), (5, 4, 2), (8, 8, 1), (9, 8, 2)])
def test_packet_counts(length, K, count):
    payload = np.ones(length, dtype=np.uint8)
    packets = packetize(payload, K)
    assert packets.shape == (count, K)
    stream = ImageBitstream(payload, K)
    assert stream.packet_count == count and stream.padded_length == count * K
    assert stream.padded_length >= length > (count - 1) * K


def test_packetize_pads_with_zeros():
    packets = packetize(bits("10111"), 4)
    np.testing.assert_array_equal(packets, [[1, 0, 1, 1], [1, 0, 0, 0]])
    with pytest.raises(ValueError):
        packetize(bits("1"), 0)


def test_png_io_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for name, px in [("g.png", rng.integers(0, 256, (5, 7), dtype=np.uint8)),
                     ("c.png", rng.integers(0, 256, (4, 3, 3), dtype=np.uint8))]:
        save_image(px, tmp_path / name)
        job = load_image(tmp_path / name)
        np.testing.assert_array_equal(job.pixels, px)
        assert (job.height, job.width) == px.shape[:2]


def test_unsupported_images_rejected(tmp_path):
    Image.new("RGBA", (2, 2)).save(tmp_path / "a.png")
    Image.new("I;16", (2, 2)).save(tmp_path / "b.png")
    (tmp_path / "c.png").write_bytes(b"not a png")
    for name in ("a.png", "b.png", "c.png"):
        with pytest.raises(ImageFormatError, match=name):
            load_image(tmp_path / name)


@pytest.mark.parametrize("N, K", [(8, 4), (64, 32), (128, 100), (256, 256)])
def test_noiseless_transmission_lossless(N, K):
    px = np.random.default_rng(N).integers(0, 256, (6, 5, 3), dtype=np.uint8)
    job = ImageJob.from_array(px)
    code = build_code(N, K)
    for params in (ChannelParams(100.0, code.rate), ChannelParams(0.0, code.rate, sigma=0.0)):
        degraded, stats, elapsed = transmit_image(job, code, params)
        np.testing.assert_array_equal(degraded, px)
        assert degraded.shape == px.shape
        assert stats.ber == 0 and stats.fer == 0
        assert stats.frames == -(-job.payload_bits // K)
        assert elapsed >= 0


def straight_line_transmit(px, N, K, snr_db, seed, image_index, snr_index):
    """Serialize, run each packet through its own chain, deserialize; no library batching."""
    code = build_code(N, K)
    G = kronecker_generator(N)
    frozen = code.frozen_mask
    stream = []
    for value in px.reshape(-1):
        stream += [(int(value) >> (7 - b)) & 1 for b in range(8)]
    sigma = np.sqrt(1 / (2 * (K / N) * 10 ** (snr_db / 10)))
    out = []
    for p, start in enumerate(range(0, len(stream), K)):
        msg = stream[start:start + K]
        msg = msg + [0] * (K - len(msg))
        u = np.zeros(N, dtype=np.int64)
        u[code.info_set] = msg
        x = u @ G % 2
        rng = substream(seed, 0, image_index, snr_index, p)
        y = (1.0 - 2.0 * x) + sigma * rng.standard_normal(N)
        u_hat = scalar_sc_decode(llr_demap(y, sigma), frozen, lambda a, b: float(check_node_exact(a, b)))
        out += list(u_hat[code.info_set])
    values = [int("".join(map(str, out[i:i + 8])), 2) for i in range(0, px.size * 8, 8)]
    return np.array(values, dtype=np.uint8).reshape(px.shape)


def test_transmit_image_matches_straight_line_oracle():
    px = np.random.default_rng(44).integers(0, 256, (4, 4), dtype=np.uint8)
    job = ImageJob.from_array(px)
    code = build_code(8, 4)
    params = ChannelParams(3.0, code.rate, seed=99)
    degraded, stats, _ = transmit_image(job, code, params, image_index=2, snr_index=1,
                                        workers=2, batch_size=5)
    expected = straight_line_transmit(px, 8, 4, 3.0, 99, 2, 1)
    np.testing.assert_array_equal(degraded, expected)
    assert stats.frames == 32
    # at 3 dB with 32 packets the channel should leave some damage to compare against
    assert stats.frame_errors > 0


def test_transmit_image_independent_of_parallelism():
    px = np.random.default_rng(5).integers(0, 256, (8, 8, 3), dtype=np.uint8)
    job = ImageJob.from_array(px)
    code = build_code(64, 32)
    params = ChannelParams(1.0, code.rate, seed=3)
    ref, ref_stats, _ = transmit_image(job, code, params, workers=1, batch_size=1024)
    for workers, batch in [(3, 1), (2, 17)]:
        out, stats, _ = transmit_image(job, code, params, workers=workers, batch_size=batch)
        np.testing.assert_array_equal(out, ref)
        assert stats == ref_stats
