"""
Polar code construction by the Bhattacharyya recurrence.
"""

from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Invalid code or channel configuration.

    ``param`` names the offending parameter so CLI messages can point at it.
    """

    def __init__(self, param, message):
        super().__init__(f"{param}: {message}")
        self.param = param


def is_power_of_two(value):
    return isinstance(value, (int, np.integer)) and value >= 1 and (value & (value - 1)) == 0


@dataclass(frozen=True)
class ReliabilityProfile:
    design_snr_db: float
    z: np.ndarray = field(repr=False)

    @property
    def n(self):
        return int(self.z.size).bit_length() - 1


@dataclass(frozen=True)
class PolarCode:
    """A polar code P(N, K) in natural bit order.

    ``info_set`` and ``frozen_set`` are sorted index arrays that partition
    ``range(N)``.
    """

    N: int
    K: int
    info_set: np.ndarray = field(repr=False)
    frozen_set: np.ndarray = field(repr=False)
    design_snr_db: float = 2.0
    profile: ReliabilityProfile | None = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return self.N.bit_length() - 1

    @property
    def rate(self):
        return self.K / self.N

    @property
    def frozen_mask(self):
        mask = np.ones(self.N, dtype=bool)
        mask[self.info_set] = False
        return mask

    def __eq__(self, other):
        if not isinstance(other, PolarCode):
            return NotImplemented
        return (self.N == other.N and self.K == other.K
                and np.array_equal(self.info_set, other.info_set))

    def __hash__(self):
        return hash((self.N, self.K, self.info_set.tobytes()))


def bhattacharyya_profile(n, design_snr_db, rate, z0=None):
    """
    Bhattacharyya parameters of the 2**n synthetic channels.

    Parameters
    ----------
    n : int
        Recursion depth (code length is 2**n).
    design_snr_db : float
        Design Eb/N0 in dB.
    rate : float
        Code rate in (0, 1]; scales Eb/N0 to Es/N0 for the starting value.
    z0 : float, optional
        Override for the starting parameter ``exp(-rate * Eb/N0)``.

    Returns
    -------
    ReliabilityProfile
        ``z[i]`` for input index ``i`` in natural order. The most significant
        index bit selects the first polarization step (0 -> degraded channel
        ``2z - z**2``, 1 -> upgraded channel ``z**2``).
    """
    if n < 0:
        raise ConfigurationError("n", f"must be non-negative, got {n}")
    if not 0 < rate <= 1:
        raise ConfigurationError("rate", f"must lie in (0, 1], got {rate}")
    if z0 is None:
        z0 = np.exp(-rate * 10 ** (design_snr_db / 10))
    z = np.array([z0], dtype=np.float64)
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return ReliabilityProfile(design_snr_db=design_snr_db, z=z)


def select_info_set(z, K):
    """Indices of the K smallest entries of z, ties going to the higher index."""
    order = np.lexsort((-np.arange(z.size), z))
    return np.sort(order[:K])


def build_code(N, K, design_snr_db=2.0):
    """Construct P(N, K) with the information set picked by Bhattacharyya
    reliability at ``design_snr_db`` (Eb/N0)."""
    if not is_power_of_two(N) or N < 2:
        raise ConfigurationError("N", f"must be a power of two >= 2, got {N}")
    if not isinstance(K, (int, np.integer)) or not 1 <= K <= N:
        raise ConfigurationError("K", f"must satisfy 1 <= K <= N={N}, got {K}")
    N, K = int(N), int(K)
    profile = bhattacharyya_profile(N.bit_length() - 1, design_snr_db, K / N)
    info = select_info_set(profile.z, K)
    frozen = np.setdiff1d(np.arange(N), info)
    return PolarCode(N=N, K=K, info_set=info, frozen_set=frozen,
                     design_snr_db=design_snr_db, profile=profile)


def format_construction(code):
    """Diagnostic listing: one ``index z frozen`` line per synthetic channel."""
    z = code.profile.z if code.profile is not None else np.full(code.N, np.nan)
    mask = code.frozen_mask
    lines = [f"# P({code.N},{code.K}) design_snr_db={code.design_snr_db}",
             "# index z frozen"]
    lines += [f"{i} {z[i]:.17g} {int(mask[i])}" for i in range(code.N)]
    return "\n".join(lines) + "\n"
