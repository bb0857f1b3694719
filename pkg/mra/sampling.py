import logging

import numpy as np

from .exceptions import InvalidSignalError
from .rng import make_rng
from .signal_core import SampleSet, as_signal, shift_rows

logger = logging.getLogger(__name__)

# Samples are drawn in fixed blocks, each from its own keyed stream, so sample i
# is the same whatever N is.
BLOCK_SIZE = 256


def generate_samples(x, tau, n_samples, seed):
    """Draw (SampleSet, true_shifts) from xi_i = sigma_{r_i}(x) + eps_i."""
    x = as_signal(x)
    if n_samples < 1:
        raise InvalidSignalError(f'need at least one sample, got {n_samples}')
    if tau < 0:
        raise InvalidSignalError(f'noise level must be nonnegative, got {tau}')
    length = x.size
    shifts = np.empty(n_samples, dtype=np.int64)
    noise = np.empty((n_samples, length))
    for block, lo in enumerate(range(0, n_samples, BLOCK_SIZE)):
        hi = min(lo + BLOCK_SIZE, n_samples)
        rng = make_rng(seed, block)
        block_shifts = rng.integers(0, length, size=BLOCK_SIZE)
        block_noise = rng.standard_normal((BLOCK_SIZE, length))
        shifts[lo:hi] = block_shifts[:hi - lo]
        noise[lo:hi] = block_noise[:hi - lo]
    clean = shift_rows(np.broadcast_to(x, (n_samples, length)), shifts)
    return SampleSet(clean + tau * noise, tau), shifts
