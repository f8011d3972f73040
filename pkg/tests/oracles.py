"""Slow, obviously-correct reference computations used as test oracles."""

import functools
import itertools

import numpy as np


def bhattacharyya_by_index(n, z0):
    """z for each index by walking its bits, MSB = first polarization step."""
    out = []
    for i in range(2 ** n):
        z = z0
        for level in range(n - 1, -1, -1):
            z = z * z if (i >> level) & 1 else 2 * z - z * z
        out.append(z)
    return np.array(out)


def kronecker_generator(N):
    """kernel^{(x)n} built by repeated np.kron, entries mod 2."""
    kernel = np.array([[1, 0], [1, 1]], dtype=np.int64)
    G = np.array([[1]], dtype=np.int64)
    while G.shape[0] < N:
        G = np.kron(G, kernel) % 2
    return G


def matrix_encode(u, G):
    return (np.asarray(u, dtype=np.int64) @ G) % 2


@functools.lru_cache(maxsize=None)
def _codebook(N):
    all_u = np.array(list(itertools.product((0, 1), repeat=N)), dtype=np.int64)
    return all_u, all_u @ kronecker_generator(N) % 2


def sequential_posterior_decode(llrs, frozen_mask):
    """
    Bit-by-bit MAP given previous decisions, summing over every completion of
    the later input bits. Ties and frozen positions decide 0.
    """
    llrs = np.asarray(llrs, dtype=np.float64)
    N = llrs.size
    all_u, codewords = _codebook(N)
    loglik = ((1 - 2 * codewords) * llrs / 2).sum(axis=1)
    u_hat = np.zeros(N, dtype=np.int64)
    consistent = np.ones(len(all_u), dtype=bool)
    for i in range(N):
        if not frozen_mask[i]:
            lp = [np.logaddexp.reduce(loglik[consistent & (all_u[:, i] == b)]) for b in (0, 1)]
            u_hat[i] = 1 if lp[1] > lp[0] else 0
        consistent &= all_u[:, i] == u_hat[i]
    return u_hat


def scalar_sc_decode(llrs, frozen_mask, f):
    """Plain recursive single-frame SC with Python floats, for cross-checks."""
    u_hat = []

    def node(alpha):
        if len(alpha) == 1:
            i = len(u_hat)
            bit = 0 if frozen_mask[i] or alpha[0] >= 0 else 1
            u_hat.append(bit)
            return [bit]
        h = len(alpha) // 2
        a, b = alpha[:h], alpha[h:]
        left = node([f(x, y) for x, y in zip(a, b)])
        right = node([y + (1 - 2 * c) * x for x, y, c in zip(a, b, left)])
        return [l ^ r for l, r in zip(left, right)] + right

    node(list(map(float, llrs)))
    return np.array(u_hat, dtype=np.uint8)
