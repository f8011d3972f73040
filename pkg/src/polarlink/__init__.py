"""Polar-coded BPSK/AWGN link simulator for image transmission."""

from .channel import ChannelParams, awgn, bpsk_modulate, llr_demap, sigma_from_snr, substream
from .codec import (L_MAX, check_node_exact, check_node_min_sum, encode, encode_full,
                    sc_decode, sc_decode_batch)
from .construction import (ConfigurationError, PolarCode, ReliabilityProfile,
                           bhattacharyya_profile, build_code)
from .image import (ImageBitstream, ImageJob, bits_to_image, image_to_bits, load_image,
                    packetize, save_image, transmit_image)
from .link import (LinkStats, PacketResult, StoppingRule, accumulate, monte_carlo_point,
                   transmit_batch, transmit_packet)
from .reporting import ImageReport, append_csv, render_report

__version__ = "0.1.0"
