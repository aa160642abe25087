"""Secure SWIPT beamforming with artificial noise in a two-tier network.

The optimiser runs successive convex approximation over second-order cone
programs, which an embedded interior-point solver handles.
"""

__version__ = "0.1.0"
