"""Finite-size certified-randomness rates for a single-device protocol.

Subpackages: numerics (optimizers), quantum (exact oracle), bound
(single-round entropy bounds), devices (simulated devices), eat (tradeoff
functions and accumulation), protocol (round-by-round simulator), verify
(randomized property suites), cli (command-line surface).
"""

from .bound import USING_COMPILED_KERNELS

__version__ = "0.1.0"

__all__ = ["USING_COMPILED_KERNELS", "__version__"]
