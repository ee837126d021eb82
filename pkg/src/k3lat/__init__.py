"""Exact lattice, elliptic-fibration and point-hunting computations for K3 surfaces."""

__version__ = "0.1.0"
