from typing import Union

import numpy as np

from prefsample.utils.logger import get_logger

SeedLike = Union[int, np.random.Generator]


def get_generator(seed: SeedLike) -> np.random.Generator:
    """
    Returns a numpy Generator for the given seed.
    A Generator passed in is returned unchanged, so callers can share one stream.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or int(seed) < 0:
        raise ValueError(f"Seed must be a non-negative integer, got {seed}")
    return np.random.default_rng(int(seed))


def derive_seed(seed: int, *stream) -> int:
    """
    Derive an independent child seed from a parent seed and a stream key.
    Stream keys may be ints or strings (hashed deterministically, not with hash()).
    """
    entropy = [int(seed)]
    for key in stream:
        if isinstance(key, str):
            entropy.append(int.from_bytes(key.encode("utf-8"), "little") % (2 ** 63))
        else:
            entropy.append(int(key))
    child = int(np.random.SeedSequence(entropy).generate_state(1)[0])
    get_logger().debug(f"derive_seed: {seed} {stream} -> {child}")
    return child


def replication_seed(base_seed: int, replication: int, attempt: int = 0) -> int:
    """
    Seed used by a replication. Attempt 0 is base_seed + replication;
    each retry moves to a disjoint seed range.
    """
    return int(base_seed) + int(replication) + 1_000_000 * int(attempt)
