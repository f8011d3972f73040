"""
BPSK over AWGN: mapping, noise injection, LLR demapping, and seed substreams.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .codec import L_MAX
from .construction import ConfigurationError


def sigma_from_snr(snr_db, rate):
    """Noise std per real dimension for Eb/N0 ``snr_db`` at code rate ``rate``
    with unit symbol energy."""
    if not 0 < rate <= 1:
        raise ConfigurationError("rate", f"must lie in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10 ** (snr_db / 10)))


@dataclass(frozen=True)
class ChannelParams:
    """One SNR operating point.

    ``sigma`` is derived from ``snr_db`` and ``rate`` unless given explicitly;
    an explicit ``sigma=0`` selects the noiseless path.
    """

    snr_db: float
    rate: float
    seed: int = 0
    sigma: float = field(default=None)

    def __post_init__(self):
        if self.sigma is None:
            object.__setattr__(self, "sigma", sigma_from_snr(self.snr_db, self.rate))
        elif self.sigma < 0 or not math.isfinite(self.sigma):
            raise ConfigurationError("sigma", f"must be finite and >= 0, got {self.sigma}")


def substream(seed, *key):
    """Independent generator for ``key`` under master ``seed``.

    The mapping is stateless, so a packet's noise depends only on
    (seed, key) and never on processing order or worker count.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def bpsk_modulate(bits):
    """0 -> +1.0, 1 -> -1.0."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def awgn(symbols, sigma, noise_source):
    symbols = np.asarray(symbols, dtype=np.float64)
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return symbols.copy()
    return symbols + sigma * noise_source.standard_normal(symbols.shape)


def llr_demap(received, sigma):
    """LLRs 2y/sigma**2, clamped to +-L_MAX."""
    if not sigma > 0:
        raise ValueError(f"cannot demap with sigma={sigma}; use the noiseless path")
    llr = 2.0 * np.asarray(received, dtype=np.float64) / (sigma * sigma)
    return np.clip(llr, -L_MAX, L_MAX)


def noiseless_llrs(codeword):
    return L_MAX * bpsk_modulate(codeword)
