"""Numerical checks of the loss landscape on the phase manifold.

Expected alignments and losses are Monte Carlo averages over Gaussian noise
drawn as ``tau * standard_normal``, so two calls with the same seed see the same
draws (common random numbers) and nearby points can be compared pairwise.
"""
import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import circulant
from scipy.ndimage import uniform_filter
from scipy.stats import norm

from .alignment import aligned_samples, averaged_align, tangent_projection
from .exceptions import (
    DegenerateDiscriminantError,
    InvalidSignalError,
    TorusDimensionError,
)
from .rng import make_rng
from .sampling import generate_samples
from .signal_core import (
    AmplitudeProfile,
    CirculantRotation,
    angular_distance,
    apply_rotation,
    as_signal,
    dft,
    idft,
    m1,
    sinusoid,
)

logger = logging.getLogger(__name__)

MC_CHUNK = 65536


def _noisy_chunks(x, tau, M, seed):
    rng = make_rng(seed)
    for lo in range(0, M, MC_CHUNK):
        n = min(MC_CHUNK, M - lo)
        yield x + tau * rng.standard_normal((n, x.size))


def mc_expected_align(z, x, tau, M, seed):
    z = as_signal(z)
    x = as_signal(x)
    if M < 1:
        raise InvalidSignalError(f'need at least one Monte Carlo draw, got {M}')
    total = np.zeros(x.size)
    for noisy in _noisy_chunks(x, tau, M, seed):
        total += averaged_align(z, noisy).average * noisy.shape[0]
    return total / M


def mc_sample_losses(z, x, tau, M, seed):
    """Per-draw losses 0.5 * |z - align(z, x + eps_m)|^2 for m = 1..M."""
    z = as_signal(z)
    x = as_signal(x)
    losses = []
    for noisy in _noisy_chunks(x, tau, M, seed):
        aligned, _, _ = aligned_samples(z, noisy)
        losses.append(0.5 * np.sum((z - aligned) ** 2, axis=1))
    return np.concatenate(losses)


def mc_expected_loss(z, x, tau, M, seed):
    return float(np.mean(mc_sample_losses(z, x, tau, M, seed)))


def paired_margin(losses_a, losses_b, n_se=3.0):
    """mean(a - b) minus n_se standard errors of the paired difference."""
    diff = losses_a - losses_b
    return float(np.mean(diff) - n_se * np.std(diff, ddof=1) / np.sqrt(diff.size))


def expected_max_gaussian(L, quad_points=200):
    """E[max of L standard normals] by adaptive quadrature over [-10, 10]."""
    if L < 1:
        raise InvalidSignalError(f'L must be at least 1, got {L}')
    if L == 1:
        return 0.0

    def integrand(t):
        return t * norm.cdf(t) ** (L - 1) * norm.pdf(t)

    value, _ = quad(integrand, -10.0, 10.0, epsabs=1e-8, limit=quad_points)
    return float(L * value)


# Sign critical points

@dataclass
class CriticalCandidate:
    sign_mask: tuple
    signal: np.ndarray
    tangent_grad_norm: float = float('nan')
    classification: str = 'unresolved'


def _mask_frequencies(profile):
    freqs = [int(k) for k in profile.support]
    if profile.nyquist_supported:
        freqs.append(profile.length // 2)
    return freqs


def _apply_signs(spectrum, freqs, mask):
    out = spectrum.copy()
    length = out.size
    for sign, k in zip(mask, freqs):
        out[k] *= sign
        if k != length - k:
            out[length - k] *= sign
    return out


def enumerate_sign_criticals(x):
    """All 2^d signals whose supported Fourier coefficients are those of x up to sign.

    For even L the Nyquist coefficient is the last mask entry when it is supported.
    """
    x = as_signal(x)
    profile = AmplitudeProfile.from_signal(x)
    freqs = _mask_frequencies(profile)
    spectrum = dft(x)
    return [
        CriticalCandidate(sign_mask=mask, signal=idft(_apply_signs(spectrum, freqs, mask)))
        for mask in itertools.product((1, -1), repeat=len(freqs))
    ]


def critical_bound(tau, L, M):
    return 5.0 * tau * np.sqrt(L / M)


def verify_critical(c, x, tau, M, seed):
    """Tangent norm of c - E[align(c, x + eps)]; O(M^-1/2) at a true critical point."""
    profile = AmplitudeProfile.from_signal(x)
    expected = mc_expected_align(c.signal, x, tau, M, seed)
    value = float(np.linalg.norm(tangent_projection(c.signal - expected, c.signal, profile)))
    c.tangent_grad_norm = value
    return value


def classify_critical(c, x, tau, M, seed, theta=0.1):
    """Step the loss along each phase axis with paired draws: min, saddle, max or unresolved."""
    profile = AmplitudeProfile.from_signal(x)
    length = profile.length
    base = mc_sample_losses(c.signal, x, tau, M, seed)
    curvatures = []
    for k in profile.support:
        verdicts = set()
        for sign in (1, -1):
            angles = np.zeros((length - 1) // 2)
            angles[k - 1] = sign * theta
            stepped = apply_rotation(CirculantRotation(angles, length), c.signal)
            losses = mc_sample_losses(stepped, x, tau, M, seed)
            if paired_margin(losses, base) > 0:
                verdicts.add('up')
            elif paired_margin(base, losses) > 0:
                verdicts.add('down')
            else:
                verdicts.add('flat')
        curvatures.append(verdicts.pop() if len(verdicts) == 1 else 'flat')

    if 'flat' in curvatures:
        c.classification = 'unresolved'
    elif all(v == 'up' for v in curvatures):
        c.classification = 'min'
    elif all(v == 'down' for v in curvatures):
        c.classification = 'max'
    else:
        c.classification = 'saddle'
    return c.classification


# Discriminant geometry

def shift_distances(t, z):
    """|t - sigma_i(z)| for i = 0..L-1."""
    return np.linalg.norm(as_signal(t)[None, :] - circulant(as_signal(z)).T, axis=1)


def _sign_vector(length, sign_mask):
    half = (length - 1) // 2
    expected = half + (1 if length % 2 == 0 else 0)
    mask = np.asarray(sign_mask, dtype=np.float64).reshape(-1)
    if mask.size != expected or not np.all(np.abs(mask) == 1):
        raise InvalidSignalError(f'sign mask for length {length} needs {expected} entries of +-1')
    u = np.ones(length)
    k = np.arange(1, half + 1)
    u[k] = mask[:half]
    u[length - k] = mask[:half]
    if length % 2 == 0:
        u[length // 2] = mask[-1]
    return u


def sign_flipped(z, sign_mask):
    """z_u: the Fourier coefficients of z multiplied by the circularly symmetric signs."""
    z = as_signal(z)
    return idft(_sign_vector(z.size, sign_mask) * dft(z))


def equidistance_check(z, sign_mask):
    """max_i | |z_u - sigma_i(z)| - |z_u - sigma_-i(z)| |."""
    z = as_signal(z)
    distances = shift_distances(sign_flipped(z, sign_mask), z)
    i = np.arange(1, z.size)
    return float(np.max(np.abs(distances[i] - distances[(-i) % z.size])))


@dataclass(frozen=True, eq=False)
class DihedralAngles:
    pairs: list
    cosines: np.ndarray

    @property
    def degrees(self):
        return np.degrees(np.arccos(np.clip(self.cosines, 0.0, 1.0)))


def dihedral_angles(z):
    """|cos| between every pair of discriminant normals sigma_i(z) - sigma_j(z), i < j.

    Uses only the Gram matrix of the shifts of z.
    """
    z = as_signal(z)
    length = z.size
    autocorr = np.array([z @ np.roll(z, m) for m in range(length)])
    gram = autocorr[(np.arange(length)[None, :] - np.arange(length)[:, None]) % length]
    pairs = list(itertools.combinations(range(length), 2))
    i = np.array([p[0] for p in pairs])
    j = np.array([p[1] for p in pairs])
    products = (
        gram[np.ix_(i, i)] - gram[np.ix_(i, j)] - gram[np.ix_(j, i)] + gram[np.ix_(j, j)]
    )
    norms_sq = np.diag(products)
    if np.any(norms_sq <= 1e-12 * autocorr[0]):
        raise DegenerateDiscriminantError()
    norms = np.sqrt(norms_sq)
    return DihedralAngles(pairs=pairs, cosines=np.abs(products) / np.outer(norms, norms))


# Loss on the 2-torus

@dataclass(frozen=True, eq=False)
class TorusGrid:
    freqs: tuple
    resolution: int
    amplitudes: tuple
    mean_coeff: float
    loss: np.ndarray
    grad_norm: np.ndarray

    @property
    def phis(self):
        return 2 * np.pi * np.arange(self.resolution) / self.resolution


def _torus_setup(x):
    profile = AmplitudeProfile.from_signal(x)
    if profile.dimension != 2 or profile.nyquist_supported:
        raise TorusDimensionError()
    freqs = tuple(int(k) for k in profile.support)
    amplitudes = tuple(float(profile.amps[k]) for k in freqs)
    return freqs, amplitudes, profile.mean_coeff


def torus_point(length, freqs, amplitudes, mean_coeff, phi1, phi2):
    spectrum = np.zeros(length, dtype=np.complex128)
    spectrum[0] = mean_coeff
    for k, a, phi in zip(freqs, amplitudes, (phi1, phi2)):
        spectrum[k] = a * np.exp(1j * phi)
        spectrum[length - k] = np.conj(spectrum[k])
    return idft(spectrum)


def _correlation_coefficients(data, freqs, amplitudes, mean_coeff):
    """A[i, r] with <z(phi), sigma_r(xi_i)> = A[i, r] . (cos phi1, sin phi1, cos phi2, sin phi2, 1)."""
    n, length = data.shape
    spectra = dft(data)
    r = np.arange(length)
    A = np.empty((n, length, 5))
    for j, (k, a) in enumerate(zip(freqs, amplitudes)):
        w = spectra[:, k][:, None] * np.exp(2j * np.pi * r * k / length)[None, :]
        A[:, :, 2 * j] = 2 * a * w.real / length
        A[:, :, 2 * j + 1] = 2 * a * w.imag / length
    A[:, :, 4] = (mean_coeff * spectra[:, 0].real / length)[:, None]
    return A


def _torus_chunk(by_shift, constant, tangent_scale, phi):
    """Losses and tangent-gradient norms for one block of torus points."""
    V = np.stack([np.cos(phi[:, 0]), np.sin(phi[:, 0]), np.cos(phi[:, 1]), np.sin(phi[:, 1]),
                  np.ones(len(phi))])
    best_value = V.T @ by_shift[0].T
    best_index = np.zeros(best_value.shape, dtype=np.int64)
    for r in range(1, len(by_shift)):
        corr = V.T @ by_shift[r].T
        better = corr > best_value
        best_value = np.where(better, corr, best_value)
        best_index[better] = r
    n = best_value.shape[1]
    # envelope theorem: d loss / d phi only sees the maximising shift
    S = sum((best_index == r).astype(np.float64) @ coeffs for r, coeffs in enumerate(by_shift)) / n
    d1 = -(-S[:, 0] * np.sin(phi[:, 0]) + S[:, 1] * np.cos(phi[:, 0]))
    d2 = -(-S[:, 2] * np.sin(phi[:, 1]) + S[:, 3] * np.cos(phi[:, 1]))
    return constant - best_value.mean(axis=1), np.sqrt(d1 ** 2 * tangent_scale[0] + d2 ** 2 * tangent_scale[1])


def torus_loss_values(x, X, points, chunk_size=32, threads=None):
    """Empirical loss and tangent-gradient norm at torus points (phi1, phi2).

    On the torus |z| is fixed, so the loss is
    0.5 * (|z|^2 + mean |xi|^2) - mean_i max_r <z, sigma_r(xi_i)>, and the correlation
    is linear in (cos phi_j, sin phi_j). Blocks of chunk_size points are spread over
    a thread pool; threads=None uses one worker per CPU.
    """
    freqs, amplitudes, mean_coeff = _torus_setup(x)
    data = X.samples
    n, length = data.shape
    A = _correlation_coefficients(data, freqs, amplitudes, mean_coeff)
    by_shift = np.ascontiguousarray(A.transpose(1, 0, 2))
    z0 = torus_point(length, freqs, amplitudes, mean_coeff, 0.0, 0.0)
    constant = 0.5 * (z0 @ z0 + np.sum(data ** 2) / n)
    tangent_scale = np.array([length / (2 * a ** 2) for a in amplitudes])

    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    starts = range(0, len(points), chunk_size)
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as pool:
        blocks = list(pool.map(
            lambda lo: _torus_chunk(by_shift, constant, tangent_scale, points[lo:lo + chunk_size]), starts))
    losses = np.concatenate([b[0] for b in blocks])
    grad_norms = np.concatenate([b[1] for b in blocks])
    return losses, grad_norms


def torus_loss_grid(x, tau, N, resolution=256, seed=0, threads=None):
    x = as_signal(x)
    freqs, amplitudes, mean_coeff = _torus_setup(x)
    X, _ = generate_samples(x, tau, N, seed)
    phis = 2 * np.pi * np.arange(resolution) / resolution
    p1, p2 = np.meshgrid(phis, phis, indexing='ij')
    losses, grad_norms = torus_loss_values(x, X, np.column_stack([p1.ravel(), p2.ravel()]), threads=threads)
    logger.info(f'Torus grid {resolution}x{resolution} evaluated on {N} samples at tau={tau}')
    return TorusGrid(
        freqs=freqs,
        resolution=resolution,
        amplitudes=amplitudes,
        mean_coeff=mean_coeff,
        loss=losses.reshape(resolution, resolution),
        grad_norm=grad_norms.reshape(resolution, resolution),
    )


# Morse census

@dataclass(frozen=True)
class MorseCensus:
    minima: int
    saddles: int
    maxima: int
    unresolved: int
    smoothing: int
    neighborhood: int

    @property
    def euler(self):
        return self.minima - self.saddles + self.maxima

    def as_dict(self):
        return {
            'minima': self.minima,
            'saddles': self.saddles,
            'maxima': self.maxima,
            'unresolved': self.unresolved,
            'euler': self.euler,
            'smoothing': self.smoothing,
            'neighborhood': self.neighborhood,
        }


# neighbour offsets (row, column) listed in cyclic order around a cell
RING_8 = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))
RING_6 = ((0, 1), (1, 1), (1, 0), (0, -1), (-1, -1), (-1, 0))


def morse_census(grid, smoothing=3, neighborhood=6):
    values = grid.loss if isinstance(grid, TorusGrid) else np.asarray(grid, dtype=np.float64)
    if smoothing and smoothing > 1:
        values = uniform_filter(values, size=smoothing, mode='wrap')
    if neighborhood == 8:
        ring = RING_8
    elif neighborhood == 6:
        ring = RING_6
    else:
        raise InvalidSignalError(f'neighborhood must be 6 or 8, got {neighborhood}')

    diffs = np.stack([np.roll(values, (-di, -dj), axis=(0, 1)) - values for di, dj in ring])
    tied = np.any(diffs == 0, axis=0)
    signs = np.sign(diffs)
    changes = np.sum(signs != np.roll(signs, -1, axis=0), axis=0)
    resolved = ~tied
    minima = resolved & np.all(signs > 0, axis=0)
    maxima = resolved & np.all(signs < 0, axis=0)
    saddle_multiplicity = np.where(resolved & (changes >= 4), changes // 2 - 1, 0)
    census = MorseCensus(
        minima=int(minima.sum()),
        saddles=int(saddle_multiplicity.sum()),
        maxima=int(maxima.sum()),
        unresolved=int(tied.sum()),
        smoothing=int(smoothing or 0),
        neighborhood=neighborhood,
    )
    if census.unresolved == 0 and census.euler != 0:
        logger.warning(f'Morse census has nonzero alternating sum: {census.as_dict()}')
    return census


def morse_census_report(grid, smoothing=3, neighborhood=6):
    """Counts before and after smoothing, as a JSON-ready dict."""
    return {
        'raw': morse_census(grid, smoothing=0, neighborhood=neighborhood).as_dict(),
        'smoothed': morse_census(grid, smoothing=smoothing, neighborhood=neighborhood).as_dict(),
    }


# Alignment of pure noise

@dataclass(frozen=True, eq=False)
class NoisePhaseReport:
    max_phase_error: float
    mean: float
    mean_bound: float
    phase_errors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    average: np.ndarray = field(default_factory=lambda: np.zeros(0))


def noise_phase_alignment(z, tau, N, seed):
    """Align N pure-noise samples to z and compare the average's phases with z's."""
    z = as_signal(z)
    length = z.size
    total = np.zeros(length)
    for noisy in _noisy_chunks(np.zeros(length), tau, N, seed):
        total += averaged_align(z, noisy).average * noisy.shape[0]
    average = total / N

    template = dft(z)
    k = np.arange(1, (length - 1) // 2 + 1)
    k = k[np.abs(template[k]) > 1e-12 * np.abs(template).max()]
    errors = angular_distance(np.angle(dft(average)[k]), np.angle(template[k]))
    return NoisePhaseReport(
        max_phase_error=float(errors.max()) if errors.size else 0.0,
        mean=m1(average),
        mean_bound=4.0 * tau / np.sqrt(length * N),
        phase_errors=errors,
        average=average,
    )


# Sinusoid local minimum

@dataclass(frozen=True)
class SinusoidCheck:
    is_local_min: bool
    antipode_is_max: bool
    losses: dict
    margins: dict

    def __bool__(self):
        return self.is_local_min


def sinusoid_local_min_check(L, k, c=1.0, tau=0.5, M=1_000_000, n_directions=2, seed=0):
    """Paired Monte Carlo test that x = c*cos(2*pi*k*n/L) is a local minimum of the expected loss.

    Rotations by +-0.05*j rad (j = 1..n_directions) along the sinusoid's circle are
    compared with x; the antipode -x is compared with x and the quarter rotations.
    """
    if L % 2 == 0:
        raise InvalidSignalError(f'sinusoid check needs odd L, got {L}')
    x = sinusoid(L, k, c)
    frequency = min(k % L, L - k % L)

    def rotated(theta):
        angles = np.zeros((L - 1) // 2)
        angles[frequency - 1] = theta
        return apply_rotation(CirculantRotation(angles, L), x)

    def losses_at(signal):
        return mc_sample_losses(signal, x, tau, M, seed)

    base = losses_at(x)
    losses = {'x': float(base.mean())}
    margins = {}
    for j in range(1, n_directions + 1):
        for sign in (1, -1):
            theta = sign * 0.05 * j
            nearby = losses_at(rotated(theta))
            losses[f'{theta:+.2f}'] = float(nearby.mean())
            margins[f'{theta:+.2f}'] = paired_margin(nearby, base)

    antipode = losses_at(-x)
    losses['-x'] = float(antipode.mean())
    antipode_margins = [paired_margin(antipode, base)]
    for name, theta in (('+quarter', np.pi / 2), ('-quarter', -np.pi / 2)):
        nearby = losses_at(rotated(theta))
        losses[name] = float(nearby.mean())
        antipode_margins.append(paired_margin(antipode, nearby))
    margins['antipode'] = min(antipode_margins)

    is_local_min = all(v > 0 for key, v in margins.items() if key != 'antipode')
    return SinusoidCheck(
        is_local_min=is_local_min,
        antipode_is_max=margins['antipode'] > 0,
        losses=losses,
        margins=margins,
    )
