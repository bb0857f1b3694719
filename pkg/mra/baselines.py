import logging
import time
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft
from scipy.special import logsumexp

from .alignment import averaged_align, cross_correlation
from .exceptions import ConfigurationError, InsufficientSignalError, InvalidSignalError
from .mca import MCAConfig, ReconstructionResult, mca_reconstruct
from .rng import make_rng
from .signal_core import (
    SampleSet,
    dft,
    estimate_power_spectrum,
    estimate_raw_power,
    idft,
    sample_array,
    shift_rows,
)

logger = logging.getLogger(__name__)

METHODS = ('mca', 'em', 'bispectrum', 'template', 'oracle')


# Expectation-maximization

@dataclass(frozen=True)
class EMConfig:
    tol: float = 1e-6
    max_iter: int = 5000
    warm_start_iters: int = 3000
    warm_start_batch: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigurationError(f'tol must be positive, got {self.tol}')
        if self.max_iter < 1:
            raise ConfigurationError(f'max_iter must be at least 1, got {self.max_iter}')
        if self.warm_start_iters < 0:
            raise ConfigurationError('warm_start_iters must be nonnegative')
        if self.warm_start_batch < 1:
            raise ConfigurationError('warm_start_batch must be at least 1')


def _em_update(z, data, tau):
    """One EM iteration; returns (z_next, mean log-likelihood of z)."""
    if tau == 0:
        return averaged_align(z, data).average, np.nan
    n, length = data.shape
    # log-weight of aligning shift s is <z, sigma_s(xi)> / tau^2
    logits = cross_correlation(z, data) / tau ** 2
    norm = logsumexp(logits, axis=1, keepdims=True)
    weights = np.exp(logits - norm)
    # sum_s w[s] * sigma_s(xi) is a circular convolution of w with xi
    z_next = sfft.ifft(np.sum(sfft.fft(weights, axis=1) * sfft.fft(data, axis=1), axis=0)).real / n
    log_likelihood = (
        np.mean(norm[:, 0])
        - np.log(length)
        - (np.sum(data ** 2) / n + z @ z) / (2 * tau ** 2)
        - 0.5 * length * np.log(2 * np.pi * tau ** 2)
    )
    return z_next, float(log_likelihood)


def em_step(z, X):
    return _em_update(np.asarray(z, dtype=np.float64), sample_array(X), X.tau)[0]


def em_log_likelihood(z, X):
    """Mean marginal log-likelihood per sample under a uniform shift prior."""
    return _em_update(np.asarray(z, dtype=np.float64), sample_array(X), X.tau)[1]


def em_reconstruct(X, cfg=None, initial=None):
    cfg = cfg or EMConfig()
    started = time.perf_counter()
    data = X.samples
    n = data.shape[0]
    rng = make_rng(cfg.seed)
    batch = data[rng.choice(n, size=min(cfg.warm_start_batch, n), replace=False)]
    if initial is None:
        z = batch[rng.integers(batch.shape[0])].copy()
    else:
        z = np.asarray(initial, dtype=np.float64).copy()

    for _ in range(cfg.warm_start_iters):
        z_next, _ = _em_update(z, batch, X.tau)
        step = np.linalg.norm(z_next - z)
        z = z_next
        if step <= cfg.tol:
            break

    trace = []
    converged = False
    iterations = 0
    while iterations < cfg.max_iter:
        iterations += 1
        z_next, log_likelihood = _em_update(z, data, X.tau)
        trace.append(log_likelihood)
        step = np.linalg.norm(z_next - z)
        z = z_next
        if step <= cfg.tol:
            converged = True
            break

    warnings = ()
    if not converged:
        warnings = ('maximum iterations reached',)
        logger.warning(f'EM stopped at max_iter={cfg.max_iter} without converging')
    else:
        logger.info(f'EM converged after {iterations} full-data iterations')
    trace = np.asarray(trace)
    return ReconstructionResult(
        signal=z,
        iterations=iterations,
        converged=converged,
        method='em',
        wall_time_seconds=time.perf_counter() - started,
        warnings=warnings,
        log_likelihood_trace=trace[np.isfinite(trace)],
    )


# Bispectrum inversion

@dataclass(frozen=True, eq=False)
class Bispectrum:
    values: np.ndarray

    @property
    def length(self):
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class PhaseSyncResult:
    phases: np.ndarray
    iterations: int
    converged: bool


def _difference_index(length):
    """idx[k1, k2] = (k2 - k1) mod L."""
    k = np.arange(length)
    return (k[None, :] - k[:, None]) % length


def estimate_bispectrum(X, debias=True, noise_bias='L', chunk_size=1024):
    """Average of xi_hat[k1] * conj(xi_hat[k2]) * xi_hat[k2 - k1] over samples.

    With ``debias`` the DC-involving entries (k1 = 0, k2 = 0, k1 = k2) are rebuilt
    from the bias-corrected power spectrum and the sample mean.
    """
    data = sample_array(X)
    n, length = data.shape
    index = _difference_index(length)
    values = np.zeros((length, length), dtype=np.complex128)
    for lo in range(0, n, chunk_size):
        spectra = dft(data[lo:lo + chunk_size])
        values += np.einsum('ja,jb,jab->ab', spectra, np.conj(spectra), spectra[:, index])
    values /= n

    if debias:
        sample_set = X if isinstance(X, SampleSet) else SampleSet(data)
        raw = estimate_raw_power(sample_set, noise_bias)
        mean_coeff = length * float(np.mean(data))
        diagonal = mean_coeff * raw
        values[0, :] = diagonal
        values[:, 0] = diagonal
        values[np.arange(length), np.arange(length)] = diagonal
    return Bispectrum(values)


def _symmetrize(u, dc_sign):
    length = u.size
    mirrored = np.conj(u[(-np.arange(length)) % length])
    out = u + mirrored
    modulus = np.abs(out)
    out = np.where(modulus > 0, out / np.where(modulus > 0, modulus, 1.0), 1.0 + 0j)
    out[0] = dc_sign
    if length % 2 == 0:
        h = length // 2
        out[h] = -1.0 if out[h].real < 0 else 1.0
    return out


def _fix_shift_gauge(u):
    """Apply the integer ramp that brings arg u[1] into [-pi/L, pi/L).

    Shifts act on real signals as integer ramps only, so u[1] can be pinned to
    within pi/L of 1 but not to 1 itself.
    """
    length = u.size
    r = int(np.round(np.angle(u[1]) * length / (2 * np.pi))) % length
    return u * np.exp(-2j * np.pi * r * np.arange(length) / length)


def _sync_objective(H, u, index):
    return float(np.real(np.conj(u) @ ((H * np.conj(u)[index]) @ u)))


def _marching_phases(B, H, index, dc_sign, grid=256):
    """Phase recursion along the first bispectrum row, then a search over the residual ramp."""
    length = B.shape[0]
    half = (length - 1) // 2
    angles = np.zeros(length)
    for k in range(2, half + 1):
        angles[k] = angles[k - 1] - np.angle(B[1, k])
    k = np.arange(1, half + 1)
    base = np.zeros(length, dtype=np.complex128)
    base[0] = dc_sign
    best, best_value = None, -np.inf
    for theta in np.arange(grid) * (2 * np.pi / length) / grid:
        u = base.copy()
        u[k] = np.exp(1j * (angles[k] + k * theta))
        u[length - k] = np.conj(u[k])
        if length % 2 == 0:
            u[length // 2] = 1.0
        value = _sync_objective(H, u, index)
        if value > best_value:
            best, best_value = u, value
    return best


def synchronize_phases(B, tol=1e-8, max_iter=2000, seed=0, init='marching'):
    values = B.values if isinstance(B, Bispectrum) else np.asarray(B, dtype=np.complex128)
    length = values.shape[0]
    modulus = np.abs(values)
    scale = modulus.max()
    for k in range(1, length):
        partners = np.delete(modulus[k], [0, k])
        if scale == 0 or (partners.size and np.all(partners < 1e-10 * scale)):
            raise InsufficientSignalError()

    H = np.where(modulus > 0, values / np.where(modulus > 0, modulus, 1.0), 0.0)
    index = _difference_index(length)
    dc_sign = -1.0 if values[0, 0].real < 0 else 1.0

    if init == 'marching':
        u = _marching_phases(values, H, index, dc_sign)
    elif init == 'random':
        rng = make_rng(seed)
        u = np.exp(2j * np.pi * rng.random(length))
    else:
        raise ConfigurationError(f"unknown phase initialisation {init!r}")
    u = _fix_shift_gauge(_symmetrize(u, dc_sign))

    converged = False
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        s = (H * np.conj(u)[index]) @ u
        u_next = _fix_shift_gauge(_symmetrize(s, dc_sign))
        change = np.max(np.abs(u_next - u))
        u = u_next
        if change <= tol:
            converged = True
            break
    if not converged:
        logger.warning(f'Phase synchronization did not converge in {max_iter} iterations')
    return PhaseSyncResult(phases=u, iterations=iterations, converged=converged)


def bispectrum_reconstruct(X, tol=1e-6, max_iter=5000, seed=0, noise_bias='L'):
    started = time.perf_counter()
    profile = estimate_power_spectrum(X, noise_bias)
    bispectrum = estimate_bispectrum(X, noise_bias=noise_bias)
    sync = synchronize_phases(bispectrum, tol=tol, max_iter=max_iter, seed=seed)
    spectrum = profile.amps * sync.phases
    spectrum[0] = profile.mean_coeff
    warnings = () if sync.converged else ('phase synchronization did not converge',)
    return ReconstructionResult(
        signal=idft(spectrum),
        iterations=sync.iterations,
        converged=sync.converged,
        method='bispectrum',
        wall_time_seconds=time.perf_counter() - started,
        warnings=warnings,
    )


# Single-pass methods

def oracle_average(X, true_shifts):
    data = sample_array(X)
    true_shifts = np.asarray(true_shifts, dtype=np.int64)
    if true_shifts.shape != (data.shape[0],):
        raise InvalidSignalError(f'expected {data.shape[0]} shifts, got {true_shifts.size}')
    return shift_rows(data, -true_shifts).mean(axis=0)


def template_reconstruct(X, template):
    return averaged_align(template, X).average


def reconstruct(method, X, *, tol=1e-6, max_iter=5000, seed=0, template=None, true_shifts=None,
                profile=None, track_loss=True, noise_bias='L', init_mode='sample',
                warm_start_iters=3000, warm_start_batch=1000):
    """Run one reconstruction method and wrap the outcome in a ReconstructionResult."""
    if method == 'mca':
        cfg = MCAConfig(delta=tol, max_iter=max_iter, init_seed=seed, init_mode=init_mode,
                        track_loss=track_loss, noise_bias=noise_bias)
        return mca_reconstruct(X, cfg, profile)
    if method == 'em':
        cfg = EMConfig(tol=tol, max_iter=max_iter, warm_start_iters=warm_start_iters,
                       warm_start_batch=warm_start_batch, seed=seed)
        return em_reconstruct(X, cfg)
    if method == 'bispectrum':
        return bispectrum_reconstruct(X, tol=tol, max_iter=max_iter, seed=seed, noise_bias=noise_bias)

    started = time.perf_counter()
    if method == 'template':
        if template is None:
            raise ConfigurationError('template method needs a template signal')
        signal = template_reconstruct(X, template)
    elif method == 'oracle':
        if true_shifts is None:
            raise ConfigurationError('oracle method needs the true shifts')
        signal = oracle_average(X, true_shifts)
    else:
        raise ConfigurationError(f'unknown method {method!r}, expected one of {METHODS}')
    return ReconstructionResult(
        signal=signal,
        iterations=1,
        converged=True,
        method=method,
        wall_time_seconds=time.perf_counter() - started,
    )
