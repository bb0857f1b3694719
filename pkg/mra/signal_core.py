"""Signals, spectra, shifts, moments and the phase-manifold projection.

Transforms follow the positive-exponent convention

    x_hat[m] = sum_n x[n] * exp(+2j*pi*n*m/L)

so a circular shift by r multiplies coefficient m by exp(+2j*pi*r*m/L).
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.linalg import circulant

from .exceptions import ConfigurationError, InvalidSignalError, ZeroReferenceError
from .rng import make_rng

logger = logging.getLogger(__name__)

NOISE_BIAS_CHOICES = ('L', 'unit')

# Fourier coefficients below this fraction of the largest one count as zero.
ZERO_COEFF_RTOL = 1e-13


def as_signal(values):
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidSignalError(f'signal must be one-dimensional, got shape {x.shape}')
    if x.size < 2:
        raise InvalidSignalError(f'signal length must be at least 2, got {x.size}')
    if not np.all(np.isfinite(x)):
        raise InvalidSignalError('signal contains non-finite values')
    return x


def dft(x):
    """Unnormalised forward transform along the last axis."""
    return sfft.ifft(np.asarray(x), axis=-1, norm='forward')


def idft(spectrum):
    """Exact inverse of dft; the real part is returned."""
    return sfft.fft(np.asarray(spectrum), axis=-1, norm='forward').real


def circular_shift(x, r):
    x = np.asarray(x, dtype=np.float64)
    return np.roll(x, int(r) % x.shape[-1], axis=-1)


def shift_rows(samples, shifts):
    """Row i of the output is circular_shift(samples[i], shifts[i])."""
    samples = np.asarray(samples, dtype=np.float64)
    n, length = samples.shape
    shifts = np.asarray(shifts, dtype=np.int64).reshape(n, 1)
    index = (np.arange(length)[None, :] - shifts) % length
    return samples[np.arange(n)[:, None], index]


def flip(x):
    x = np.asarray(x, dtype=np.float64)
    return x[..., (-np.arange(x.shape[-1])) % x.shape[-1]]


def m1(x):
    return float(np.mean(as_signal(x)))


def m2(x):
    """Autocorrelation with the 1/L normalisation; dft(m2(x)) == |dft(x)|**2 / L."""
    x = as_signal(x)
    return np.array([x @ np.roll(x, lag) for lag in range(x.size)]) / x.size


def power_spectrum(x):
    """|dft(x)|**2 along the last axis, so a stack of samples gives one spectrum per row."""
    return np.abs(dft(np.asarray(x, dtype=np.float64))) ** 2


def phases(x):
    return np.angle(dft(x))


def angular_distance(a, b):
    """Wrapped absolute difference of angles, in [0, pi]."""
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


def square_wave(length, width, height=1.0):
    if not 1 <= width <= length:
        raise InvalidSignalError(f'square wave width must lie in [1, {length}], got {width}')
    x = np.zeros(length)
    x[:width] = height
    return as_signal(x)


def sinusoid(length, k, c=1.0):
    if k % length == 0:
        raise InvalidSignalError('sinusoid frequency must be nonzero modulo the length')
    n = np.arange(length)
    return as_signal(c * np.cos(2 * np.pi * k * n / length))


def _half(length):
    return (length - 1) // 2


@dataclass(frozen=True, eq=False)
class AmplitudeProfile:
    """Target Fourier amplitudes plus the pinned DC coefficient."""

    amps: np.ndarray
    mean_coeff: float

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.float64)
        if amps.ndim != 1 or amps.size < 2:
            raise InvalidSignalError(f'amplitude profile needs a 1-D array of length >= 2, got {amps.shape}')
        if not np.all(np.isfinite(amps)) or np.any(amps < 0):
            raise InvalidSignalError('amplitudes must be finite and nonnegative')
        mirrored = amps[(-np.arange(amps.size)) % amps.size]
        if not np.allclose(amps, mirrored, rtol=1e-9, atol=1e-12 * max(1.0, amps.max())):
            raise InvalidSignalError('amplitudes must satisfy amps[k] == amps[L - k]')
        if not np.isfinite(self.mean_coeff):
            raise InvalidSignalError('mean coefficient must be finite')
        object.__setattr__(self, 'amps', amps)
        object.__setattr__(self, 'mean_coeff', float(self.mean_coeff))

    @classmethod
    def from_signal(cls, x):
        spectrum = dft(as_signal(x))
        return cls(np.abs(spectrum), spectrum[0].real)

    @property
    def length(self):
        return self.amps.size

    @property
    def floor(self):
        """Amplitudes at or below this count as zero."""
        return ZERO_COEFF_RTOL * float(self.amps.max())

    @property
    def support(self):
        k = np.arange(1, _half(self.length) + 1)
        return k[self.amps[k] > self.floor]

    @property
    def dimension(self):
        return int(self.support.size)

    @property
    def nyquist_supported(self):
        return self.length % 2 == 0 and self.amps[self.length // 2] > self.floor

    @property
    def is_degenerate(self):
        return not np.any(self.amps[1:] > self.floor)


@dataclass(frozen=True, eq=False)
class SampleSet:
    samples: np.ndarray
    tau: float = 0.0

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise InvalidSignalError(f'samples must be an (N, L) array, got shape {samples.shape}')
        if samples.shape[0] < 1:
            raise InvalidSignalError('sample set must contain at least one sample')
        if samples.shape[1] < 2:
            raise InvalidSignalError(f'signal length must be at least 2, got {samples.shape[1]}')
        if not np.all(np.isfinite(samples)):
            raise InvalidSignalError('samples contain non-finite values')
        if not np.isfinite(self.tau) or self.tau < 0:
            raise InvalidSignalError(f'noise level must be finite and nonnegative, got {self.tau}')
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'tau', float(self.tau))

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def length(self):
        return self.samples.shape[1]


def sample_array(X):
    """Rows of a SampleSet or of a plain (N, L) / (L,) array."""
    if isinstance(X, SampleSet):
        return X.samples
    data = np.asarray(X, dtype=np.float64)
    return data.reshape(1, -1) if data.ndim == 1 else data


@dataclass(frozen=True, eq=False)
class CirculantRotation:
    """Per-frequency phase rotation.

    ``phases`` holds one angle per interior frequency 1..(L-1)//2; for even L the
    Nyquist coefficient is multiplied by ``nyquist_sign`` instead.
    """

    phases: np.ndarray
    length: int
    nyquist_sign: int = 1

    def __post_init__(self):
        angles = np.asarray(self.phases, dtype=np.float64).reshape(-1)
        if self.length < 2:
            raise InvalidSignalError(f'rotation length must be at least 2, got {self.length}')
        if angles.size != _half(self.length):
            raise InvalidSignalError(
                f'rotation of length {self.length} needs {_half(self.length)} phases, got {angles.size}'
            )
        if self.nyquist_sign not in (1, -1):
            raise InvalidSignalError('nyquist_sign must be +1 or -1')
        object.__setattr__(self, 'phases', angles)

    @classmethod
    def random(cls, length, rng):
        angles = rng.uniform(0.0, 2 * np.pi, size=_half(length))
        sign = int(rng.choice((1, -1))) if length % 2 == 0 else 1
        return cls(angles, length, sign)

    @classmethod
    def from_shift(cls, length, r):
        """The linear ramp 2*pi*k*r/L; applying it equals circular_shift(x, r)."""
        k = np.arange(1, _half(length) + 1)
        return cls(2 * np.pi * k * r / length, length, 1 if r % 2 == 0 else -1)


def apply_rotation(C, x):
    x = np.asarray(x, dtype=np.float64)
    length = x.shape[-1]
    if length != C.length:
        raise InvalidSignalError(f'rotation of length {C.length} applied to signal of length {length}')
    spectrum = dft(x)
    k = np.arange(1, _half(length) + 1)
    factor = np.exp(1j * C.phases)
    spectrum[..., k] *= factor
    spectrum[..., length - k] *= np.conj(factor)
    if length % 2 == 0:
        spectrum[..., length // 2] *= C.nyquist_sign
    return idft(spectrum)


def rotate_samples(C, X):
    return SampleSet(apply_rotation(C, X.samples), X.tau)


def estimate_mean(X):
    return float(np.mean(sample_array(X)))


def _noise_bias_factor(noise_bias, length):
    if noise_bias == 'L':
        return float(length)
    if noise_bias == 'unit':
        return 1.0
    raise ConfigurationError(f"noise_bias must be one of {NOISE_BIAS_CHOICES}, got {noise_bias!r}")


def estimate_raw_power(X, noise_bias='L'):
    """Per-bin power estimate before clamping, with the noise bias removed."""
    data = X.samples
    bias = _noise_bias_factor(noise_bias, X.length) * X.tau ** 2
    return np.mean(power_spectrum(data), axis=0) - bias


def estimate_power_spectrum(X, noise_bias='L'):
    raw = estimate_raw_power(X, noise_bias)
    amps = np.sqrt(np.maximum(raw, 0.0))
    # average mirrored bins so rounding never breaks the realness symmetry
    amps = 0.5 * (amps + amps[(-np.arange(amps.size)) % amps.size])
    mean_coeff = X.length * estimate_mean(X)
    amps[0] = abs(mean_coeff)
    return AmplitudeProfile(amps, mean_coeff)


def _unit_phases(spectrum):
    modulus = np.abs(spectrum)
    nonzero = modulus > ZERO_COEFF_RTOL * max(1.0, float(modulus.max()))
    unit = np.ones_like(spectrum)
    unit[nonzero] = spectrum[nonzero] / modulus[nonzero]
    return unit, nonzero


def project_to_manifold(z, profile):
    z = as_signal(z)
    if z.size != profile.length:
        raise InvalidSignalError(f'signal of length {z.size} projected onto profile of length {profile.length}')
    spectrum = dft(z)
    unit, nonzero = _unit_phases(spectrum)
    out = profile.amps * unit
    out[0] = profile.mean_coeff
    if z.size % 2 == 0:
        h = z.size // 2
        negative = nonzero[h] and spectrum[h].real < 0
        out[h] = -profile.amps[h] if negative else profile.amps[h]
    return idft(out)


def random_manifold_point(profile, seed, samples=None, mode='sample'):
    length = profile.length
    if profile.is_degenerate:
        logger.warning('Degenerate amplitude profile, returning the constant mean signal')
        return np.full(length, profile.mean_coeff / length)
    rng = make_rng(seed)
    if mode == 'sample':
        if samples is None:
            raise ConfigurationError("init mode 'sample' needs the sample set")
        data = sample_array(samples)
        start = data[rng.integers(data.shape[0])]
    elif mode == 'random-phase':
        flat = idft(profile.amps.astype(np.complex128))
        start = apply_rotation(CirculantRotation.random(length, rng), flat)
    else:
        raise ConfigurationError(f"unknown init mode {mode!r}")
    return project_to_manifold(start, profile)


def nrmse(z, x):
    """Shift-minimised relative error, evaluated over all L shifts directly."""
    z = as_signal(z)
    x = as_signal(x)
    if z.size != x.size:
        raise InvalidSignalError(f'length mismatch: {z.size} vs {x.size}')
    reference = np.linalg.norm(x)
    if reference == 0:
        raise ZeroReferenceError()
    distances = np.linalg.norm(z[None, :] - circulant(x).T, axis=1)
    return float(distances.min() / reference)
