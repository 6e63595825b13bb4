import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from polarbc.auxiliary import AuxiliaryStructure
from polarbc.channel_synthesis import SynthesisBudget, erasure_recursion
from polarbc.channels import erasure_broadcast, erasure_rows
from polarbc.exceptions import BudgetExceededError, ConfigError
from polarbc.polarized_sets import (
    METHOD_AUTO,
    METHOD_EXACT,
    METHOD_MONTE_CARLO,
    IndexSet,
    PolarizationProfile,
    Threshold,
    channel_profile,
    conditional_profile,
    high_set,
    low_set,
    monte_carlo_profile,
    profile_rows,
    source_profile,
    unpolarized_set,
)
from polarbc.quantum_core import ClassicalChannelTable


class IndexSetTests(SimpleTestCase):
    def test_set_algebra(self):
        a = IndexSet(8, (1, 3, 5))
        b = IndexSet(8, (3, 4))
        self.assertEqual((a & b).indices, (3,))
        self.assertEqual((a | b).indices, (1, 3, 4, 5))
        self.assertEqual((a - b).indices, (1, 5))
        self.assertEqual(a.one_based(), [2, 4, 6])
        self.assertIn(5, a)
        assert_array_equal(IndexSet.from_mask(a.mask()).indices, a.indices)

    def test_blocklength_mismatch(self):
        with self.assertRaises(ConfigError):
            IndexSet(8, (1,)) & IndexSet(4, (1,))
        with self.assertRaises(ValueError):
            IndexSet(4, (4,))

    def test_ordered_by_breaks_ties_by_position(self):
        s = IndexSet(4, (0, 1, 2, 3))
        self.assertEqual(s.ordered_by(np.array([0.5, 0.1, 0.5, 0.1])), (1, 3, 0, 2))


class ThresholdTests(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(ConfigError):
            Threshold(0.6, 0.4)
        with self.assertRaises(ConfigError):
            Threshold(0.0, 0.9)

    def test_sets_partition_the_block(self):
        profile = PolarizationProfile(np.array([0.0, 0.005, 0.5, 0.995, 1.0, 0.2, 0.99, 0.01]))
        t = Threshold(0.01, 0.99)
        high, low, middle = high_set(profile, t), low_set(profile, t), unpolarized_set(profile, t)
        self.assertEqual(high.indices, (3, 4, 6))
        self.assertEqual(low.indices, (0, 1, 7))
        self.assertEqual(middle.indices, (2, 5))
        self.assertEqual(len(high) + len(low) + len(middle), 8)


class ProfileTests(SimpleTestCase):
    def test_channel_profile_of_erasure(self):
        profile = channel_profile(ClassicalChannelTable(erasure_rows(0.5)), 256)
        self.assertEqual(profile.method, METHOD_EXACT)
        assert_allclose(profile.z, erasure_recursion(0.5, 256), atol=1e-10)

    def test_source_profile_extremes(self):
        assert_allclose(source_profile(0.5, 16).z, np.ones(16), atol=1e-12)
        assert_allclose(source_profile(0.0, 16).z, np.zeros(16), atol=1e-12)

    def test_monte_carlo_estimate_tracks_exact(self):
        rows = erasure_rows(0.5)
        joint = 0.5 * rows
        profile = monte_carlo_profile(joint, 16, 4000, seed=3)
        self.assertEqual(profile.method, METHOD_MONTE_CARLO)
        exact = erasure_recursion(0.5, 16)
        self.assertTrue(np.all(np.abs(profile.z - exact) <= 4 * profile.half_width + 1e-3))

    def test_half_width_floor(self):
        joint = 0.5 * np.eye(2)
        profile = monte_carlo_profile(joint, 4, 50, seed=0)
        assert_allclose(profile.z, np.zeros(4), atol=1e-12)
        assert_allclose(profile.half_width, np.full(4, 1 / 50))

    def test_monte_carlo_is_seeded(self):
        joint = 0.5 * erasure_rows(0.3)
        a = monte_carlo_profile(joint, 8, 100, seed=[1, 2])
        b = monte_carlo_profile(joint, 8, 100, seed=[1, 2])
        assert_array_equal(a.z, b.z)

    def test_auto_falls_back_to_monte_carlo(self):
        rows = np.random.default_rng(0).dirichlet(np.ones(6), size=2)
        tight = SynthesisBudget(max_dimension=4, max_branches=4)
        with self.assertRaises(BudgetExceededError):
            channel_profile(ClassicalChannelTable(rows), 32, budget=tight, method=METHOD_EXACT)
        profile = channel_profile(ClassicalChannelTable(rows), 32, budget=tight, method=METHOD_AUTO, samples=64)
        self.assertEqual(profile.method, METHOD_MONTE_CARLO)
        self.assertEqual(profile.samples, 64)

    def test_profile_rows_are_one_based(self):
        rows = profile_rows(PolarizationProfile(np.array([0.25, 0.75])))
        self.assertEqual(rows, [(1, 0.25, METHOD_EXACT, 0.0), (2, 0.75, METHOD_EXACT, 0.0)])


class ConditionalProfileTests(SimpleTestCase):
    def aux(self, p_v1_given_v_v2, p_v2_given_v=(0.5, 0.5)):
        return AuxiliaryStructure(0.5, p_v2_given_v, p_v1_given_v_v2, (0, 0, 0, 0, 1, 1, 1, 1))

    def test_cloud_center_through_erasure_output(self):
        aux = self.aux(((0.0, 0.0), (0.0, 0.0)), (0.0, 0.0))
        profile = conditional_profile(erasure_broadcast(0.2, 0.4), aux, "V", (), 1, 16)
        self.assertEqual(profile.method, METHOD_EXACT)
        assert_allclose(profile.z, erasure_recursion(0.2, 16), atol=1e-10)

    def test_independent_layer_matches_source(self):
        aux = self.aux(((0.11, 0.11), (0.11, 0.11)))
        profile = conditional_profile(erasure_broadcast(0.2, 0.4), aux, "V1", ("V", "V2"), None, 16)
        assert_allclose(profile.z, source_profile(0.11, 16).z, atol=1e-10)

    def test_determined_layer_is_fully_polarized(self):
        # V1 = V2
        aux = self.aux(((0.0, 1.0), (0.0, 1.0)))
        profile = conditional_profile(erasure_broadcast(0.2, 0.4), aux, "V1", ("V", "V2"), None, 16)
        assert_allclose(profile.z, np.zeros(16), atol=1e-10)
