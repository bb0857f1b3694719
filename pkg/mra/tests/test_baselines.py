import numpy as np
from numpy.testing import assert_allclose
from django.test import SimpleTestCase, tag

from mra.alignment import averaged_align
from mra.baselines import (
    EMConfig,
    _difference_index,
    _fix_shift_gauge,
    bispectrum_reconstruct,
    em_log_likelihood,
    em_reconstruct,
    em_step,
    estimate_bispectrum,
    oracle_average,
    reconstruct,
    synchronize_phases,
    template_reconstruct,
)
from mra.exceptions import ConfigurationError, InsufficientSignalError, InvalidSignalError
from mra.mca import MCAConfig, mca_reconstruct
from mra.rng import make_rng
from mra.sampling import generate_samples
from mra.signal_core import SampleSet, angular_distance, dft, idft, nrmse, square_wave


def exact_bispectrum(x):
    spectrum = dft(x)
    index = _difference_index(x.size)
    return spectrum[:, None] * np.conj(spectrum)[None, :] * spectrum[index]


class EMTests(SimpleTestCase):
    def test_zero_noise_step_is_hard_assignment(self):
        rng = make_rng(1)
        z = rng.standard_normal(8)
        X = SampleSet(rng.standard_normal((20, 8)), 0.0)
        assert_allclose(em_step(z, X), averaged_align(z, X).average, atol=1e-14)

    def test_small_noise_weights_become_one_hot(self):
        rng = make_rng(2)
        z = rng.standard_normal(8)
        data = rng.standard_normal((20, 8))
        assert_allclose(em_step(z, SampleSet(data, 1e-4)), averaged_align(z, data).average, atol=1e-10)

    def test_log_likelihood_does_not_decrease(self):
        X, _ = generate_samples(square_wave(12, 5), 1.0, 500, seed=3)
        result = em_reconstruct(X, EMConfig(max_iter=40, warm_start_iters=0, tol=1e-12))
        trace = result.log_likelihood_trace
        self.assertEqual(len(trace), result.iterations)
        self.assertTrue(np.all(np.diff(trace) >= -1e-9))

    def test_log_likelihood_is_finite(self):
        X, _ = generate_samples(square_wave(12, 5), 1.0, 50, seed=4)
        self.assertTrue(np.isfinite(em_log_likelihood(np.zeros(12), X)))

    def test_low_noise_recovery(self):
        x = square_wave(41, 21)
        errors = []
        for seed in range(3):
            X, _ = generate_samples(x, 0.01, 1000, seed=seed)
            errors.append(nrmse(em_reconstruct(X, EMConfig(seed=seed)).signal, x))
        self.assertLessEqual(np.median(errors), 0.05)

    def test_config_validation(self):
        with self.assertRaises(ConfigurationError):
            EMConfig(tol=0)
        with self.assertRaises(ConfigurationError):
            EMConfig(warm_start_batch=0)

    def test_update_matches_direct_summation(self):
        rng = make_rng(14)
        for length in (5, 6):
            z = rng.standard_normal(length)
            data = rng.standard_normal((12, length))
            tau = 0.7
            X = SampleSet(data, tau)
            expected = np.zeros(length)
            log_likelihood = 0.0
            for xi in data:
                shifted = [np.roll(xi, s) for s in range(length)]
                weights = np.exp([z @ c / tau ** 2 for c in shifted])
                expected += sum(w * c for w, c in zip(weights, shifted)) / weights.sum()
                densities = [np.exp(-np.sum((c - z) ** 2) / (2 * tau ** 2)) for c in shifted]
                log_likelihood += np.log(np.mean(densities)) - 0.5 * length * np.log(2 * np.pi * tau ** 2)
            assert_allclose(em_step(z, X), expected / len(data), atol=1e-12)
            self.assertAlmostEqual(em_log_likelihood(z, X), log_likelihood / len(data), places=10)

    def test_full_batch_warm_start_continues_the_same_trace(self):
        X, _ = generate_samples(square_wave(12, 5), 1.0, 300, seed=15)
        warm = em_reconstruct(X, EMConfig(warm_start_iters=5, warm_start_batch=300, max_iter=20, tol=1e-15))
        cold = em_reconstruct(X, EMConfig(warm_start_iters=0, warm_start_batch=300, max_iter=25, tol=1e-15))
        self.assertEqual((warm.iterations, cold.iterations), (20, 25))
        assert_allclose(cold.log_likelihood_trace[5:], warm.log_likelihood_trace, rtol=1e-10)
        assert_allclose(cold.signal, warm.signal, atol=1e-10)


class BispectrumTests(SimpleTestCase):
    def test_single_noiseless_sample(self):
        x = make_rng(5).standard_normal(7)
        B = estimate_bispectrum(SampleSet(x[None, :]))
        assert_allclose(B.values, exact_bispectrum(x), atol=1e-10)

    def test_shift_invariance(self):
        x = make_rng(6).standard_normal(7)
        X, _ = generate_samples(x, 0.0, 40, seed=6)
        assert_allclose(estimate_bispectrum(X).values, exact_bispectrum(x), atol=1e-10)

    def test_pure_noise_vanishes(self):
        X, _ = generate_samples(np.zeros(5), 1.0, 100_000, seed=7)
        B = estimate_bispectrum(X, debias=False)
        self.assertLessEqual(np.abs(B.values).max(), 5 * np.sqrt(15 * 5 ** 3 / 100_000))

    def test_symmetric_signal_has_trivial_phases(self):
        x = idft(np.array([3.0, 1.0, 0.5, 0.5, 1.0]))
        result = synchronize_phases(exact_bispectrum(x))
        self.assertTrue(result.converged)
        assert_allclose(result.phases, np.ones(5), atol=1e-8)

    def test_square_wave_phases_up_to_a_ramp(self):
        x = square_wave(41, 21)
        result = synchronize_phases(exact_bispectrum(x))
        target = np.angle(dft(x))
        k = np.arange(41)
        # the recovered phases may differ from the truth by a global shift
        errors = [
            angular_distance(np.angle(result.phases), target + 2 * np.pi * r * k / 41).max()
            for r in range(41)
        ]
        self.assertLessEqual(min(errors), 1e-6)

    def test_noiseless_reconstruction(self):
        x = square_wave(41, 21)
        X, _ = generate_samples(x, 0.0, 100, seed=8)
        self.assertLessEqual(nrmse(bispectrum_reconstruct(X).signal, x), 1e-6)

    def test_missing_frequency_is_insufficient_signal(self):
        x = idft(np.array([1.0, 1.0, 0.0, 0.0, 1.0]))
        X, _ = generate_samples(x, 0.0, 20, seed=9)
        with self.assertRaisesMessage(InsufficientSignalError, 'insufficient signal'):
            bispectrum_reconstruct(X)

    def test_unknown_initialisation(self):
        with self.assertRaises(ConfigurationError):
            synchronize_phases(exact_bispectrum(square_wave(9, 4)), init='spectral')

    def test_shift_gauge_uses_an_integer_ramp(self):
        rng = make_rng(17)
        for length in (7, 8):
            u = np.exp(2j * np.pi * rng.random(length))
            fixed = _fix_shift_gauge(u)
            self.assertLessEqual(abs(np.angle(fixed[1])), np.pi / length + 1e-12)
            ramp = fixed / u
            r = np.angle(ramp[1]) * length / (2 * np.pi)
            self.assertAlmostEqual(r, round(r), places=10)
            assert_allclose(ramp, np.exp(2j * np.pi * round(r) * np.arange(length) / length), atol=1e-12)

    @tag('slow')
    def test_mca_no_worse_than_bispectrum_at_moderate_noise(self):
        x = square_wave(41, 21)
        mca_errors, bispectrum_errors = [], []
        for seed in range(10):
            X, _ = generate_samples(x, 1.0, 10_000, seed=100 + seed)
            mca_errors.append(nrmse(mca_reconstruct(X, MCAConfig(init_seed=seed)).signal, x))
            bispectrum_errors.append(nrmse(bispectrum_reconstruct(X, seed=seed).signal, x))
        self.assertTrue(np.isfinite(bispectrum_errors).all())
        self.assertLessEqual(np.median(mca_errors), np.median(bispectrum_errors))


class SinglePassTests(SimpleTestCase):
    def test_oracle_is_exact_without_noise(self):
        x = square_wave(41, 21)
        X, shifts = generate_samples(x, 0.0, 30, seed=10)
        assert_allclose(oracle_average(X, shifts), x, atol=1e-14)

    def test_oracle_length_mismatch(self):
        X, shifts = generate_samples(square_wave(10, 3), 0.0, 30, seed=11)
        with self.assertRaises(InvalidSignalError):
            oracle_average(X, shifts[:-1])

    def test_oracle_error_matches_averaging_statistics(self):
        x = square_wave(41, 21)
        expected = np.sqrt(41 / 10_000) / np.linalg.norm(x)
        errors = []
        for seed in range(10):
            X, shifts = generate_samples(x, 1.0, 10_000, seed=seed)
            errors.append(nrmse(oracle_average(X, shifts), x))
        self.assertGreaterEqual(np.median(errors), 0.5 * expected)
        self.assertLessEqual(np.median(errors), 2 * expected)

    def test_template_without_noise(self):
        x = square_wave(41, 21)
        X, _ = generate_samples(x, 0.0, 30, seed=12)
        assert_allclose(template_reconstruct(X, x), x, atol=1e-14)

    def test_template_alignment_to_the_truth_is_biased(self):
        x = square_wave(41, 21)
        X, _ = generate_samples(x, 1.0, 10_000, seed=16)
        self.assertGreater(nrmse(template_reconstruct(X, x), x), 2 * np.sqrt(41 / 10_000) / np.linalg.norm(x))

    @tag('slow')
    def test_method_ordering_at_unit_noise(self):
        x = square_wave(41, 21)
        errors = {method: [] for method in ('oracle', 'em', 'mca', 'bispectrum', 'template')}
        for seed in range(5):
            X, shifts = generate_samples(x, 1.0, 10_000, seed=200 + seed)
            for method in errors:
                result = reconstruct(method, X, seed=seed, template=x, true_shifts=shifts)
                errors[method].append(nrmse(result.signal, x))
        medians = {method: np.median(values) for method, values in errors.items()}
        self.assertLessEqual(medians['oracle'], medians['em'])
        self.assertLessEqual(medians['em'], medians['mca'])
        self.assertLessEqual(medians['mca'], medians['bispectrum'])
        self.assertGreater(medians['template'], medians['mca'])
        self.assertLessEqual(medians['oracle'], medians['template'])


class DispatchTests(SimpleTestCase):
    def setUp(self):
        self.x = square_wave(41, 21)
        self.X, self.shifts = generate_samples(self.x, 0.0, 100, seed=13)

    def test_every_method_recovers_noiseless_signal(self):
        for method in ('mca', 'bispectrum', 'template', 'oracle'):
            with self.subTest(method=method):
                result = reconstruct(method, self.X, tol=1e-10, template=self.x, true_shifts=self.shifts)
                self.assertEqual(result.method, method)
                self.assertLessEqual(nrmse(result.signal, self.x), 1e-6)

    def test_missing_inputs(self):
        with self.assertRaises(ConfigurationError):
            reconstruct('template', self.X)
        with self.assertRaises(ConfigurationError):
            reconstruct('oracle', self.X)
        with self.assertRaises(ConfigurationError):
            reconstruct('gradient', self.X)
