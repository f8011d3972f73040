"""
Polar encoder (butterfly) and successive-cancellation decoder.

The kernel is [[1, 0], [1, 1]] with x = u . kernel^{(x)n} over GF(2), all
vectors in natural index order. The decoder works on a batch of frames at
once: LLR arrays are shaped ``(frames, N)`` and every tree node is processed
for all frames with one numpy call.
"""

import numpy as np

from .construction import ConfigurationError, is_power_of_two

KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)

# Check-node inputs are clamped to this magnitude; demapped LLRs use it too.
L_MAX = 40.0

CHECK_NODES = ("exact", "min_sum")


def _as_bits(bits):
    arr = np.asarray(bits)
    if arr.dtype != np.uint8:
        arr = arr.astype(np.uint8)
    return arr


def encode_full(u):
    """
    Multiply ``u`` by kernel^{(x)n} in place-style butterflies.

    Accepts a single vector of length N or a ``(frames, N)`` array.
    """
    x = _as_bits(u).copy()
    N = x.shape[-1]
    if not is_power_of_two(N):
        raise ConfigurationError("N", f"length must be a power of two, got {N}")
    half = 1
    while half < N:
        # view as (..., blocks, 2, half): first half of each block ^= second half
        v = x.reshape(x.shape[:-1] + (N // (2 * half), 2, half))
        v[..., 0, :] ^= v[..., 1, :]
        half *= 2
    return x


def encode(code, msg):
    """Scatter ``msg`` into the information set (frozen bits are 0) and encode.

    ``msg`` may be a length-K vector or a ``(frames, K)`` array.
    """
    msg = _as_bits(msg)
    if msg.shape[-1] != code.K:
        raise ValueError(f"message length {msg.shape[-1]} does not match K={code.K}")
    u = np.zeros(msg.shape[:-1] + (code.N,), dtype=np.uint8)
    u[..., code.info_set] = msg
    return encode_full(u)


def check_node_min_sum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def check_node_exact(a, b):
    """2 atanh(tanh(a/2) tanh(b/2)) with inputs clamped to +-L_MAX.

    Evaluated as the min-sum term plus its two log1p corrections, which is the
    same function without the catastrophic rounding of atanh near 1.
    """
    a = np.clip(a, -L_MAX, L_MAX)
    b = np.clip(b, -L_MAX, L_MAX)
    return (np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
            + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b))))


def _check_node(name):
    if name == "exact":
        return check_node_exact
    if name == "min_sum":
        return check_node_min_sum
    raise ConfigurationError("decoder", f"unknown check node {name!r}, expected one of {CHECK_NODES}")


def sc_decode_batch(code, llrs, check_node="exact"):
    """
    Successive-cancellation decoding of many frames.

    Parameters
    ----------
    code : PolarCode
    llrs : ndarray, shape (frames, N)
        Channel LLRs, positive favouring bit 0.
    check_node : {'exact', 'min_sum'}

    Returns
    -------
    msg : ndarray of uint8, shape (frames, K)
    u_hat : ndarray of uint8, shape (frames, N)
    """
    f = _check_node(check_node)
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.ndim != 2 or llrs.shape[1] != code.N:
        raise ValueError(f"expected LLRs of shape (frames, {code.N}), got {llrs.shape}")
    if not np.all(np.isfinite(llrs)):
        raise ValueError("LLRs must be finite")
    frozen_prefix = np.concatenate([[0], np.cumsum(code.frozen_mask)])
    frames = llrs.shape[0]
    u_hat = np.zeros((frames, code.N), dtype=np.uint8)

    def decode_node(alpha, lo):
        # alpha: (frames, size) LLRs entering the node; returns its codeword bits
        size = alpha.shape[1]
        if frozen_prefix[lo + size] - frozen_prefix[lo] == size:
            return np.zeros((frames, size), dtype=np.uint8)
        if size == 1:
            bit = (alpha < 0).astype(np.uint8)
            u_hat[:, lo] = bit[:, 0]
            return bit
        half = size // 2
        left, right = alpha[:, :half], alpha[:, half:]
        beta_l = decode_node(f(left, right), lo)
        beta_r = decode_node(right + (1.0 - 2.0 * beta_l) * left, lo + half)
        return np.concatenate([beta_l ^ beta_r, beta_r], axis=1)

    decode_node(llrs, 0)
    return u_hat[:, code.info_set], u_hat


def sc_decode(code, llrs, check_node="exact"):
    """Decode one frame; returns ``(msg, u_hat)`` as uint8 vectors."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape != (code.N,):
        raise ValueError(f"expected {code.N} LLRs, got shape {llrs.shape}")
    msg, u_hat = sc_decode_batch(code, llrs[None, :], check_node)
    return msg[0], u_hat[0]
