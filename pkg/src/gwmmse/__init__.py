"""Chip-domain GPS L1 testbed for group-weighted MMSE interference mitigation."""

__version__ = "0.1.0"
