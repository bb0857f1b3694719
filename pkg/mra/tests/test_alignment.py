import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
from django.test import SimpleTestCase

from mra.alignment import (
    aligned_samples,
    align_sample,
    averaged_align,
    best_shift,
    best_shifts,
    cross_correlation,
    empirical_loss,
    geodesic_step,
    tangent_gradient,
    tangent_projection,
    tangent_vector,
)
from mra.exceptions import InvalidSignalError
from mra.rng import make_rng
from mra.sampling import generate_samples
from mra.signal_core import (
    AmplitudeProfile,
    CirculantRotation,
    SampleSet,
    apply_rotation,
    circular_shift,
    dft,
    estimate_mean,
    m1,
    rotate_samples,
)


class CrossCorrelationTests(SimpleTestCase):
    def test_matches_direct_inner_products(self):
        rng = make_rng(1)
        z = rng.standard_normal(8)
        samples = rng.standard_normal((4, 8))
        expected = np.array([[z @ np.roll(xi, r) for r in range(8)] for xi in samples])
        assert_allclose(cross_correlation(z, samples), expected, atol=1e-12)


class BestShiftTests(SimpleTestCase):
    def test_noiseless_alignment_recovers_signal(self):
        x = make_rng(2).standard_normal(11)
        for r in range(11):
            assert_allclose(align_sample(x, circular_shift(x, r)), x, atol=1e-14)

    def test_matches_exhaustive_search(self):
        rng = make_rng(3)
        for _ in range(500):
            length = int(rng.integers(2, 13))
            z, xi = rng.standard_normal(length), rng.standard_normal(length)
            brute = int(np.argmax([z @ np.roll(xi, r) for r in range(length)]))
            self.assertEqual(best_shift(z, xi), brute)

    def test_integer_ties_match_exhaustive_search(self):
        rng = make_rng(13)
        tied = 0
        for _ in range(500):
            length = int(rng.integers(3, 10))
            z = rng.integers(-2, 3, size=length).astype(float)
            if np.all(z == z[0]):
                continue
            xi = rng.integers(-2, 3, size=length).astype(float)
            products = [z @ np.roll(xi, r) for r in range(length)]
            tied += products.count(max(products)) > 1
            self.assertEqual(best_shift(z, xi), int(np.argmax(products)))
        self.assertGreater(tied, 50)

    def test_shift_equivariance(self):
        rng = make_rng(14)
        z, data = rng.standard_normal(10), rng.standard_normal((20, 10))
        shifts, _ = best_shifts(z, data)
        for s in (1, 4, 9):
            moved_data, _ = best_shifts(z, np.stack([circular_shift(xi, s) for xi in data]))
            assert_array_equal(moved_data, (shifts - s) % 10)
            moved_template, _ = best_shifts(circular_shift(z, s), data)
            assert_array_equal(moved_template, (shifts + s) % 10)

    def test_constant_template_ties_to_zero(self):
        with self.assertLogs('mra.alignment', level='WARNING'):
            shifts, tied = best_shifts(np.ones(5), np.ones((2, 5)))
        assert_array_equal(shifts, [0, 0])
        self.assertTrue(tied)

    def test_exact_ties_take_smallest_index(self):
        # xi is 2-periodic, so shifts 1 and 3 give the same correlation
        z = np.array([0.0, 1.0, 0.0, 0.0])
        xi = np.array([1.0, 0.0, 1.0, 0.0])
        self.assertEqual(best_shift(z, xi), 1)

    def test_aligning_with_itself(self):
        z = make_rng(4).standard_normal(7)
        assert_array_equal(align_sample(z, z), z)
        assert_allclose(align_sample(z, circular_shift(z, 3)), z, atol=1e-14)

    def test_length_mismatch(self):
        with self.assertRaises(InvalidSignalError):
            best_shift(np.ones(4), np.arange(5.0))


class AveragedAlignTests(SimpleTestCase):
    def test_average_of_shifted_copies(self):
        z = make_rng(5).standard_normal(6)
        X = SampleSet(np.stack([circular_shift(z, 1), circular_shift(z, 2)]))
        assert_allclose(averaged_align(z, X).average, z, atol=1e-14)

    def test_aligned_rows_use_reported_shifts(self):
        rng = make_rng(6)
        z = rng.standard_normal(9)
        data = rng.standard_normal((5, 9))
        aligned, shifts, _ = aligned_samples(z, data)
        for row, xi, r in zip(aligned, data, shifts):
            assert_array_equal(row, circular_shift(xi, r))

    def test_scale_invariance(self):
        rng = make_rng(15)
        z = rng.standard_normal(8)
        X = SampleSet(rng.standard_normal((30, 8)))
        outcome = averaged_align(z, X)
        rescaled_template = averaged_align(4.0 * z, X)
        assert_array_equal(rescaled_template.shifts, outcome.shifts)
        assert_allclose(rescaled_template.average, outcome.average, atol=1e-14)
        rescaled_data = averaged_align(z, SampleSet(2.5 * X.samples))
        assert_allclose(rescaled_data.average, 2.5 * outcome.average, atol=1e-13)

    def test_mean_is_preserved(self):
        rng = make_rng(16)
        X = SampleSet(rng.standard_normal((40, 11)) + 0.3)
        outcome = averaged_align(rng.standard_normal(11), X)
        self.assertAlmostEqual(m1(outcome.average), estimate_mean(X), places=13)


class EmpiricalLossTests(SimpleTestCase):
    def test_zero_at_shifts_of_template(self):
        z = make_rng(7).standard_normal(7)
        self.assertAlmostEqual(empirical_loss(z, SampleSet(z[None, :])), 0.0)
        self.assertAlmostEqual(empirical_loss(z, SampleSet(circular_shift(z, 4)[None, :])), 0.0)

    def test_matches_brute_force(self):
        rng = make_rng(8)
        z = rng.standard_normal(9)
        data = rng.standard_normal((50, 9))
        brute = np.mean([min(np.sum((z - np.roll(xi, r)) ** 2) for r in range(9)) for xi in data]) / 2
        self.assertAlmostEqual(empirical_loss(z, SampleSet(data)), brute, places=10)

    def test_rotation_invariance(self):
        rng = make_rng(17)
        for length in (7, 8):
            z = rng.standard_normal(length)
            X = SampleSet(rng.standard_normal((40, length)), 1.0)
            C = CirculantRotation.random(length, rng)
            self.assertAlmostEqual(
                empirical_loss(apply_rotation(C, z), rotate_samples(C, X)), empirical_loss(z, X), places=10
            )


class TangentTests(SimpleTestCase):
    def setUp(self):
        self.z = make_rng(9).standard_normal(9)
        self.profile = AmplitudeProfile.from_signal(self.z)

    def test_gradient_vanishes_on_own_sample(self):
        gradient = tangent_gradient(self.z, SampleSet(self.z[None, :]), self.profile)
        assert_allclose(gradient, np.zeros(9), atol=1e-12)

    def test_projection_keeps_tangent_vectors(self):
        v = tangent_vector(self.z, make_rng(10).standard_normal(4))
        assert_allclose(tangent_projection(v, self.z, self.profile), v, atol=1e-12)

    def test_projection_drops_radial_direction(self):
        assert_allclose(tangent_projection(self.z, self.z, self.profile), np.zeros(9), atol=1e-12)

    def test_geodesic_stays_on_manifold(self):
        moved = geodesic_step(self.z, make_rng(11).standard_normal(4), 0.3)
        assert_allclose(np.abs(dft(moved)), self.profile.amps, atol=1e-12)

    def test_geodesic_velocity(self):
        theta = make_rng(12).standard_normal(4)
        h = 1e-6
        numeric = (geodesic_step(self.z, theta, h) - geodesic_step(self.z, theta, -h)) / (2 * h)
        assert_allclose(numeric, tangent_vector(self.z, theta), atol=1e-6)

    def test_gradient_matches_finite_differences(self):
        rng = make_rng(18)
        x = rng.standard_normal(7)
        profile = AmplitudeProfile.from_signal(x)
        X, _ = generate_samples(x, 0.5, 2000, seed=18)
        z = geodesic_step(x, rng.standard_normal(3), 1.0)
        gradient = tangent_gradient(z, X, profile)
        h = 1e-7 * np.linalg.norm(z)
        for _ in range(5):
            theta = rng.standard_normal(3)
            numeric = (empirical_loss(geodesic_step(z, theta, h), X)
                       - empirical_loss(geodesic_step(z, theta, -h), X)) / (2 * h)
            self.assertAlmostEqual(numeric, gradient @ tangent_vector(z, theta), delta=1e-4)
