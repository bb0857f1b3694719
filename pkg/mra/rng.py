import zlib

import numpy as np


def _entropy(parts):
    words = []
    for part in parts:
        if isinstance(part, str):
            part = zlib.crc32(part.encode('utf-8'))
        words.append(int(part) % 2 ** 63)
    return words


def make_rng(*keys):
    """Counter-based Philox generator keyed by an integer (or string) tuple."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_entropy(keys))))


def derive_seed(*keys):
    """Collapse a key tuple such as (seed, method, tau_index, run_index) into one seed."""
    return int(np.random.SeedSequence(_entropy(keys)).generate_state(1, np.uint64)[0] % 2 ** 63)
