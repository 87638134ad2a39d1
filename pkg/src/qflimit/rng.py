"""Reproducible random streams.

All randomness flows through :func:`stream`, which keys a Philox
(counter-based) bit generator with a 128-bit BLAKE2b digest of
``(master seed, purpose tag, index)``.  A replication's stream therefore
depends only on its own index, never on which worker ran it or when.
"""
from __future__ import annotations

import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def child_key(seed: int, tag: str, index: int = 0) -> int:
    """128-bit Philox key for the ``index``-th stream under ``tag``."""
    if not 0 <= int(seed) <= SEED_MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    payload = f"qflimit|{int(seed)}|{tag}|{int(index)}".encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=16).digest(), "little")


def stream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=child_key(seed, tag, index)))


def child_seed(seed: int, tag: str, index: int = 0) -> int:
    """A derived 64-bit seed, for handing a sub-task its own master seed."""
    return child_key(seed, tag, index) & SEED_MASK
