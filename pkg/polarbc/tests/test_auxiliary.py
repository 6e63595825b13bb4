import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from polarbc.auxiliary import AuxiliaryStructure, BroadcastChannelSpec, induced_cq_channel, letter_table
from polarbc.channel_synthesis import CLASSICAL, QUANTUM, channel_I
from polarbc.channels import erasure_broadcast, pure_state_qubit_broadcast
from polarbc.exceptions import ConfigError, InvalidStateError

# V uniform, V1 ~ Bern(0.11) independent, V2 constant, X = V xor V1
XOR_PHI = (0, 0, 1, 1, 1, 1, 0, 0)


def xor_aux():
    return AuxiliaryStructure(0.5, (0.0, 0.0), ((0.11, 0.11), (0.11, 0.11)), XOR_PHI)


class AuxiliaryStructureTests(SimpleTestCase):
    def test_joint_and_input(self):
        aux = xor_aux()
        joint = aux.joint()
        self.assertAlmostEqual(joint.sum(), 1.0, places=12)
        self.assertAlmostEqual(joint[:, :, 1].sum(), 0.0, places=12)
        assert_allclose(aux.input_distribution(), [0.5, 0.5], atol=1e-12)

    def test_from_joint_round_trip(self):
        aux = AuxiliaryStructure(0.3, (0.2, 0.7), ((0.1, 0.4), (0.6, 0.9)), XOR_PHI)
        again = AuxiliaryStructure.from_joint(aux.joint(), aux.phi)
        assert_allclose(again.joint(), aux.joint(), atol=1e-12)

    def test_swapped_exchanges_layers(self):
        aux = AuxiliaryStructure(0.3, (0.2, 0.7), ((0.1, 0.4), (0.6, 0.9)), XOR_PHI)
        swapped = aux.swapped()
        assert_allclose(swapped.joint(), aux.joint().transpose(0, 2, 1), atol=1e-12)
        assert_array_equal(swapped.x_map(), aux.x_map().transpose(0, 2, 1))

    def test_validation(self):
        with self.assertRaises(InvalidStateError):
            AuxiliaryStructure(1.5, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), XOR_PHI)
        with self.assertRaises(InvalidStateError):
            AuxiliaryStructure(0.5, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), (0, 1, 2, 0, 0, 0, 0, 0))


class ChannelSpecTests(SimpleTestCase):
    def test_marginals_and_swap(self):
        spec = erasure_broadcast(0.3, 0.5)
        assert_allclose(spec.marginal_rows(1)[0], [0.7, 0.0, 0.3])
        assert_allclose(spec.swapped().marginal_rows(1), spec.marginal_rows(2))
        with self.assertRaises(ConfigError):
            spec.marginal_rows(3)

    def test_table_must_be_stochastic(self):
        with self.assertRaises(InvalidStateError):
            BroadcastChannelSpec(CLASSICAL, table=np.ones((2, 2, 2)))

    def test_quantum_swap_exchanges_marginals(self):
        spec = pure_state_qubit_broadcast(0.4, 1.1)
        swapped = spec.swapped()
        for a, b in zip(swapped.marginal_states(1), spec.marginal_states(2)):
            assert_allclose(a.entries, b.entries, atol=1e-12)

    def test_transmit_is_reproducible(self):
        spec = erasure_broadcast(0.3, 0.5)
        x = np.random.default_rng(0).integers(0, 2, 64)
        y1a, y2a = spec.transmit(x, np.random.default_rng(9))
        y1b, y2b = spec.transmit(x, np.random.default_rng(9))
        assert_array_equal(y1a, y1b)
        assert_array_equal(y2a, y2b)
        # erasure outputs either match the input or are erased
        self.assertTrue(np.all((y1a == x) | (y1a == 2)))

    def test_noiseless_transmit(self):
        spec = erasure_broadcast(0.0, 0.0)
        x = np.array([0, 1, 1, 0])
        y1, y2 = spec.transmit(x, np.random.default_rng(1))
        assert_array_equal(y1, x)
        assert_array_equal(y2, x)


class InducedChannelTests(SimpleTestCase):
    def test_layer_rules(self):
        spec, aux = erasure_broadcast(0.3, 0.5), xor_aux()
        with self.assertRaises(ConfigError):
            letter_table(spec, aux, "V", ("V1",), 1)
        with self.assertRaises(ConfigError):
            letter_table(spec, aux, "V1", (), 1)
        with self.assertRaises(ConfigError):
            letter_table(spec, aux, "V2", ("V", "V1"), None)

    def test_letter_table_mass(self):
        masses = letter_table(erasure_broadcast(0.3, 0.5), xor_aux(), "V1", ("V",), 1)
        self.assertEqual(masses.shape, (2, 2, 3))
        self.assertAlmostEqual(masses.sum(), 1.0, places=12)
        self.assertAlmostEqual(masses[1].sum(), 0.11, places=12)

    def test_superposition_information(self):
        # I(V;B1) = (1 - ε1)(1 - h(0.11)) for V behind a BSC(0.11) then BEC(ε1)
        spec, aux = erasure_broadcast(0.3, 0.5), xor_aux()
        h = -(0.11 * np.log2(0.11) + 0.89 * np.log2(0.89))
        self.assertAlmostEqual(channel_I(induced_cq_channel(spec, aux, "V", 1)), 0.7 * (1 - h), places=10)
        self.assertAlmostEqual(channel_I(induced_cq_channel(spec, aux, "V", 2)), 0.5 * (1 - h), places=10)

    def test_quantum_channel_branches_by_conditioning(self):
        spec = pure_state_qubit_broadcast(0.6, 0.6)
        aux = AuxiliaryStructure(0.5, (0.5, 0.5), ((0.5, 0.5), (0.5, 0.5)), XOR_PHI)
        w = induced_cq_channel(spec, aux, "V2", 2, ("V",))
        self.assertEqual(w.kind, QUANTUM)
        self.assertEqual(len(w.branches), 2)
