"""Unit production under partial observability.

Error-function-network solving scored with Rank Dependent Utility, an
opponent model, a minimalist RTS simulator and a tournament harness.
"""
from phantomrts.kernels import BACKEND

__version__ = "0.1.0"
