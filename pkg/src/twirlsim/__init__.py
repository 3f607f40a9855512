"""Pauli-twirled error models checked against exact density-matrix simulation."""

__version__ = "0.1.0"
