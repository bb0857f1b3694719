import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .exceptions import InvalidSignalError
from .signal_core import (
    CirculantRotation,
    apply_rotation,
    as_signal,
    circular_shift,
    dft,
    idft,
    sample_array,
    shift_rows,
)

logger = logging.getLogger(__name__)

# Correlation values within this fraction of |z|*|xi| of the maximum are ties.
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class AlignmentOutcome:
    shifts: np.ndarray
    average: np.ndarray
    tied_template: bool = False


def cross_correlation(z, samples):
    """c[i, r] = <z, circular_shift(samples[i], r)> for every row, via FFT."""
    spectra = sfft.fft(samples, axis=-1)
    return sfft.ifft(np.conj(spectra) * sfft.fft(z), axis=-1).real


def _is_constant(z):
    return bool(np.all(z == z[0]))


def _checked(z, X):
    z = as_signal(z)
    data = sample_array(X)
    if data.shape[-1] != z.size:
        raise InvalidSignalError(f'template of length {z.size} aligned with samples of length {data.shape[-1]}')
    return z, data


def first_argmax(values, tol):
    """Row-wise argmax where entries within tol of the top tie and the smallest index wins."""
    top = values.max(axis=-1, keepdims=True)
    return np.argmax(values >= top - tol, axis=-1)


def best_shifts(z, X):
    """Best shift per sample and whether the template was constant (all shifts tied)."""
    z, data = _checked(z, X)
    if _is_constant(z):
        logger.warning('Constant template: every shift ties, using shift 0')
        return np.zeros(data.shape[0], dtype=np.int64), True
    corr = cross_correlation(z, data)
    tol = TIE_RTOL * np.linalg.norm(z) * np.linalg.norm(data, axis=1, keepdims=True)
    return first_argmax(corr, tol).astype(np.int64), False


def best_shift(z, xi):
    shifts, _ = best_shifts(z, np.atleast_2d(xi))
    return int(shifts[0])


def align_sample(z, xi):
    return circular_shift(xi, best_shift(z, xi))


def aligned_samples(z, X):
    shifts, tied = best_shifts(z, X)
    return shift_rows(sample_array(X), shifts), shifts, tied


def averaged_align(z, X):
    aligned, shifts, tied = aligned_samples(z, X)
    return AlignmentOutcome(shifts=shifts, average=aligned.mean(axis=0), tied_template=tied)


def empirical_loss(z, X):
    z = as_signal(z)
    aligned, _, _ = aligned_samples(z, X)
    return float(0.5 * np.mean(np.sum((z - aligned) ** 2, axis=1)))


def _tangent_directions(z, profile):
    """Supported frequencies and the unit phase directions i*z_hat[k]/|z_hat[k]|."""
    z = as_signal(z)
    if z.size != profile.length:
        raise InvalidSignalError(f'signal of length {z.size} does not match profile of length {profile.length}')
    spectrum = dft(z)
    k = profile.support
    modulus = np.abs(spectrum[k])
    k = k[modulus > 0]
    return k, 1j * spectrum[k] / np.abs(spectrum[k])


def tangent_projection(v, z, profile):
    """Orthogonal projection of an ambient vector onto the manifold's tangent space at z.

    Only interior supported frequencies carry tangent directions; DC, the even-L
    Nyquist bin and unsupported bins are dropped.
    """
    length = profile.length
    k, direction = _tangent_directions(z, profile)
    coeffs = dft(as_signal(v))
    out = np.zeros(length, dtype=np.complex128)
    out[k] = np.real(np.conj(direction) * coeffs[k]) * direction
    out[length - k] = np.conj(out[k])
    return idft(out)


def tangent_gradient(z, X, profile):
    return tangent_projection(z - averaged_align(z, X).average, z, profile)


def tangent_vector(z, direction_phases):
    """Velocity of geodesic_step(z, direction_phases, t) at t = 0."""
    z = as_signal(z)
    length = z.size
    theta = np.asarray(direction_phases, dtype=np.float64)
    k = np.arange(1, (length - 1) // 2 + 1)
    spectrum = np.zeros(length, dtype=np.complex128)
    spectrum[k] = 1j * theta * dft(z)[k]
    spectrum[length - k] = np.conj(spectrum[k])
    return idft(spectrum)


def geodesic_step(z, direction_phases, t):
    """Move along the torus by rotating interior phase k through t * direction_phases[k-1]."""
    z = as_signal(z)
    theta = t * np.asarray(direction_phases, dtype=np.float64)
    return apply_rotation(CirculantRotation(theta, z.size), z)
