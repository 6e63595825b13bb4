from functools import reduce
from itertools import product

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from polarbc.polar_transform import bit_reversal_permutation, log2_length, polar_decode_inverse, polar_encode


def dense_generator(n: int) -> np.ndarray:
    kernel = np.array([[1, 0], [1, 1]], dtype=np.int64)
    power = reduce(np.kron, [kernel] * log2_length(n))
    return power[bit_reversal_permutation(n)] % 2


class PolarTransformTests(SimpleTestCase):
    def test_length_must_be_power_of_two(self):
        self.assertEqual(log2_length(1024), 10)
        with self.assertRaises(ValueError):
            log2_length(6)
        with self.assertRaises(ValueError):
            polar_encode(np.zeros(12, dtype=np.uint8))

    def test_bit_reversal(self):
        assert_array_equal(bit_reversal_permutation(8), [0, 4, 2, 6, 1, 5, 3, 7])

    def test_involution_exhaustive_small_lengths(self):
        for n in (1, 2, 4, 8, 16):
            u = np.array(list(product((0, 1), repeat=n)), dtype=np.uint8)
            assert_array_equal(polar_decode_inverse(polar_encode(u)), u)

    def test_involution_random_long_vectors(self):
        rng = np.random.default_rng(11)
        u = rng.integers(0, 2, (200, 1 << 16), dtype=np.uint8)
        assert_array_equal(polar_encode(polar_encode(u)), u)

    def test_matches_dense_matrix(self):
        g = dense_generator(8)
        u = np.array(list(product((0, 1), repeat=8)), dtype=np.int64)
        assert_array_equal(polar_encode(u), (u @ g) % 2)

    def test_batch_and_vector_agree(self):
        rng = np.random.default_rng(1)
        u = rng.integers(0, 2, (5, 32), dtype=np.uint8)
        assert_array_equal(polar_encode(u)[3], polar_encode(u[3]))
