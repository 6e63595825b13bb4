import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from polarbc.channels import build_channel, builtin_channels
from polarbc.exceptions import ConfigError, UnknownChannelError
from polarbc.quantum_core import CqEnsemble, bhattacharyya_Z, classical_mutual_information


class CatalogTests(SimpleTestCase):
    def test_catalog_names(self):
        self.assertTrue({
            "erasure-broadcast",
            "symmetric-flip-broadcast",
            "pure-state-qubit-broadcast",
            "amplitude-damping-qubit-broadcast",
        } <= set(builtin_channels()))

    def test_unknown_name_and_arity(self):
        with self.assertRaises(UnknownChannelError):
            build_channel("no-such-channel", [])
        with self.assertRaises(ConfigError):
            build_channel("erasure-broadcast", [0.1])
        with self.assertRaises(ConfigError):
            build_channel("symmetric-flip-broadcast", [0.1, 1.5])

    def test_noiseless_and_useless_erasure(self):
        noiseless = build_channel("erasure-broadcast", [0, 0])
        useless = build_channel("erasure-broadcast", [1, 1])
        for receiver in (1, 2):
            rows = noiseless.marginal_rows(receiver)
            self.assertAlmostEqual(classical_mutual_information((0.5, 0.5), rows), 1.0, places=12)
            rows = useless.marginal_rows(receiver)
            self.assertAlmostEqual(classical_mutual_information((0.5, 0.5), rows), 0.0, places=12)

    def test_pure_state_base_bhattacharyya(self):
        spec = build_channel("pure-state-qubit-broadcast", [np.pi / 4, np.pi / 4])
        self.assertFalse(spec.is_classical)
        for receiver in (1, 2):
            z = bhattacharyya_Z(CqEnsemble.uniform(*spec.marginal_states(receiver)))
            self.assertAlmostEqual(z, np.cos(np.pi / 4), places=6)

    def test_amplitude_damping_states(self):
        spec = build_channel("amplitude-damping-qubit-broadcast", [0.0, 1.0])
        rho0, rho1 = spec.marginal_states(1)
        assert_allclose(rho0.entries, 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-12)
        # full damping sends both inputs to |0>
        sigma0, sigma1 = spec.marginal_states(2)
        assert_allclose(sigma0.entries, sigma1.entries, atol=1e-12)
