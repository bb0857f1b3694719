"""Moment-constrained alignment.

Each iteration aligns every sample to the current template, averages, and
projects the (optionally damped) average back onto the manifold of signals
sharing the estimated power spectrum.
"""
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .alignment import averaged_align, empirical_loss
from .exceptions import ConfigurationError
from .signal_core import (
    NOISE_BIAS_CHOICES,
    estimate_power_spectrum,
    project_to_manifold,
    random_manifold_point,
)

logger = logging.getLogger(__name__)

INIT_MODES = ('sample', 'random-phase')


@dataclass(frozen=True)
class MCAConfig:
    delta: float = 1e-6
    alpha: float = 1.0
    max_iter: int = 5000
    init_seed: int = 0
    init_mode: str = 'sample'
    track_loss: bool = True
    noise_bias: str = 'L'

    def __post_init__(self):
        if not self.delta > 0:
            raise ConfigurationError(f'delta must be positive, got {self.delta}')
        if not 0 < self.alpha <= 1:
            raise ConfigurationError(f'alpha must lie in (0, 1], got {self.alpha}')
        if self.max_iter < 1:
            raise ConfigurationError(f'max_iter must be at least 1, got {self.max_iter}')
        if self.init_mode not in INIT_MODES:
            raise ConfigurationError(f'init_mode must be one of {INIT_MODES}, got {self.init_mode!r}')
        if self.noise_bias not in NOISE_BIAS_CHOICES:
            raise ConfigurationError(f'noise_bias must be one of {NOISE_BIAS_CHOICES}, got {self.noise_bias!r}')


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    signal: np.ndarray
    iterations: int
    converged: bool
    method: str = 'mca'
    loss_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    wall_time_seconds: float = 0.0
    warnings: tuple = ()
    log_likelihood_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))


def mca_step(z, X, profile, alpha=1.0):
    average = averaged_align(z, X).average
    return project_to_manifold((1.0 - alpha) * z + alpha * average, profile)


def mca_reconstruct(X, cfg=None, profile=None):
    cfg = cfg or MCAConfig()
    started = time.perf_counter()
    if profile is None:
        profile = estimate_power_spectrum(X, cfg.noise_bias)

    if profile.is_degenerate:
        message = 'degenerate amplitude profile'
        logger.warning(f'MCA: {message}, returning the constant mean signal')
        return ReconstructionResult(
            signal=np.full(profile.length, profile.mean_coeff / profile.length),
            iterations=0,
            converged=True,
            wall_time_seconds=time.perf_counter() - started,
            warnings=(message,),
        )

    z = random_manifold_point(profile, cfg.init_seed, samples=X, mode=cfg.init_mode)
    losses = []
    warnings = []
    converged = False
    iterations = 0
    while iterations < cfg.max_iter:
        iterations += 1
        z_next = mca_step(z, X, profile, cfg.alpha)
        step = np.linalg.norm(z_next - z)
        z = z_next
        if cfg.track_loss:
            losses.append(empirical_loss(z, X))
        if step <= cfg.delta:
            converged = True
            break

    if converged:
        logger.info(f'MCA converged after {iterations} iterations')
    else:
        warnings.append('maximum iterations reached')
        logger.warning(f'MCA stopped at max_iter={cfg.max_iter} without converging')
    return ReconstructionResult(
        signal=z,
        iterations=iterations,
        converged=converged,
        loss_trace=np.asarray(losses),
        wall_time_seconds=time.perf_counter() - started,
        warnings=tuple(warnings),
    )
