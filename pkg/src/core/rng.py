"""Splittable seeding: child streams keyed by (master seed, purpose, indices)."""
from typing import Tuple

import numpy as np

# Stream purposes; stable integers so child seeds never depend on iteration order.
TRIAL = 1
NOISE = 2
COUPLING = 3
SPLIT = 4
TRAIN = 5
PERMUTE = 6
SWEEP = 7
BOOTSTRAP = 8
DRIFT = 9

def _sequence(master_seed: int, keys: Tuple[int, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in keys))

def child_seed(master_seed: int, *keys: int) -> int:
    """Derive a 63-bit integer seed for the stream identified by ``keys``."""
    state = _sequence(master_seed, keys).generate_state(2, dtype=np.uint32)
    return int((int(state[0]) << 32 | int(state[1])) & (2**63 - 1))

def child_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent PCG64 generator for the stream identified by ``keys``."""
    return np.random.Generator(np.random.PCG64(_sequence(master_seed, keys)))
