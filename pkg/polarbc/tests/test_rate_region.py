import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

from polarbc.auxiliary import AuxiliaryStructure
from polarbc.channels import erasure_broadcast, symmetric_flip_broadcast
from polarbc.quantum_core import DensityMatrix
from polarbc.rate_region import (
    CORNER_OFFSET,
    CORNER_PRINTED,
    MixtureEntropy,
    RatePoint,
    aux_from_parameters,
    batched_quantities,
    corner_arrays,
    corner_points,
    effective_resolution,
    evaluate_common_region,
    evaluate_private_region,
    information_quantities,
    phi_from_code,
    search_auxiliaries,
)

SUPERPOSITION_PHI = (0, 0, 0, 0, 1, 1, 1, 1)


def entropy_bits(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_information(joint_ab):
    """I(A;B) of a 2-D joint table."""
    return entropy_bits(joint_ab.sum(axis=1)) + entropy_bits(joint_ab.sum(axis=0)) - entropy_bits(joint_ab)


def brute_force_quantities(spec, aux):
    joint, x_map = aux.joint(), aux.x_map()
    i_v_b, i_vvl_b = [], []
    for receiver in (1, 2):
        rows = spec.marginal_rows(receiver)
        full = joint[..., None] * rows[x_map]                     # [v, v1, v2, y]
        by_v = full.sum(axis=(1, 2))
        by_pair = full.sum(axis=2 if receiver == 1 else 1).reshape(4, -1)
        i_v_b.append(mutual_information(by_v))
        i_vvl_b.append(mutual_information(by_pair))
    cmi = (entropy_bits(joint.sum(axis=2)) + entropy_bits(joint.sum(axis=1))
           - entropy_bits(joint.sum(axis=(1, 2))) - entropy_bits(joint))
    return i_v_b, i_vvl_b, cmi


def random_aux(rng):
    params = rng.random(7)
    return aux_from_parameters(params, int(rng.integers(0, 256)))


class InformationQuantityTests(SimpleTestCase):
    def test_matches_classical_enumeration(self):
        rng = np.random.default_rng(12)
        spec = erasure_broadcast(0.25, 0.6)
        for _ in range(50):
            aux = random_aux(rng)
            q = information_quantities(spec, aux)
            i_v_b, i_vvl_b, cmi = brute_force_quantities(spec, aux)
            assert_allclose(q.i_v_b, i_v_b, atol=1e-9)
            assert_allclose(q.i_vvl_b, i_vvl_b, atol=1e-9)
            self.assertAlmostEqual(q.cmi, max(cmi, 0.0), delta=1e-9)

    def test_batched_matches_single(self):
        rng = np.random.default_rng(5)
        spec = symmetric_flip_broadcast(0.1, 0.3)
        entropies = [MixtureEntropy(*spec.marginal_states(r)) for r in (1, 2)]
        for phi_code in (60, 0b11110000, 201):
            params = rng.random((8, 7))
            joints = np.stack([aux_from_parameters(p, phi_code).joint() for p in params])
            x_map = np.asarray(phi_from_code(phi_code), dtype=np.uint8).reshape(2, 2, 2)
            batch = batched_quantities(joints, x_map, entropies)
            for index, p in enumerate(params):
                q = information_quantities(spec, aux_from_parameters(p, phi_code))
                self.assertAlmostEqual(batch["i_v_b1"][index], q.i_v_b[0], delta=1e-8)
                self.assertAlmostEqual(batch["i_vvl_b2"][index], q.i_vvl_b[1], delta=1e-8)
                self.assertAlmostEqual(batch["cmi"][index], q.cmi, delta=1e-8)

    def test_mixture_entropy_of_orthogonal_states(self):
        entropy = MixtureEntropy(DensityMatrix.pure([1, 0]), DensityMatrix.pure([0, 1]))
        assert_allclose(entropy(np.array([0.0, 0.5, 1.0])), [0.0, 1.0, 0.0], atol=1e-12)


class RegionTests(SimpleTestCase):
    def test_noiseless_superposition_bounds(self):
        spec = erasure_broadcast(0.0, 0.0)
        aux = AuxiliaryStructure(0.5, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), SUPERPOSITION_PHI)
        private = evaluate_private_region(spec, aux)
        self.assertAlmostEqual(private.values["R1"], 1.0, places=10)
        self.assertAlmostEqual(private.values["R1+R2 (a)"], 1.0, places=10)
        common = evaluate_common_region(spec, aux)
        self.assertAlmostEqual(common.values["R0"], 1.0, places=10)
        self.assertTrue(common.contains(RatePoint(1.0, 0.0, 0.0)))
        self.assertFalse(common.contains(RatePoint(0.6, 0.3, 0.3)))

    def test_degraded_superposition_corner(self):
        spec = erasure_broadcast(0.2, 0.5)
        aux = AuxiliaryStructure(0.5, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), SUPERPOSITION_PHI)
        corners = corner_points(spec, aux)
        self.assertTrue(corners.swapped)
        self.assertAlmostEqual(corners.b.r2, 0.5, places=10)
        self.assertAlmostEqual(corners.b.r1, 0.0, places=10)

    def test_printed_corners_lie_in_private_region(self):
        rng = np.random.default_rng(8)
        spec = erasure_broadcast(0.15, 0.45)
        for _ in range(60):
            aux = random_aux(rng)
            region = evaluate_private_region(spec, aux)
            corners = corner_points(spec, aux, CORNER_PRINTED)
            self.assertTrue(region.contains(corners.a, tol=1e-9))
            self.assertTrue(region.contains(corners.b, tol=1e-9))

    def test_common_region_matches_classical_enumeration(self):
        rng = np.random.default_rng(17)
        spec = symmetric_flip_broadcast(0.1, 0.3)
        for _ in range(50):
            aux = random_aux(rng)
            i_v_b, i_vvl_b, cmi = brute_force_quantities(spec, aux)
            cmi = max(cmi, 0.0)
            c1, c2 = (max(full - v, 0.0) for full, v in zip(i_vvl_b, i_v_b))
            expected = {
                "R0": min(i_v_b),
                "R0+R1": i_vvl_b[0],
                "R0+R2": i_vvl_b[1],
                "R0+R1+R2 (a)": i_vvl_b[0] + c2 - cmi,
                "R0+R1+R2 (b)": c1 + i_vvl_b[1] - cmi,
            }
            values = evaluate_common_region(spec, aux).values
            self.assertEqual(set(values), set(expected))
            for name, bound in expected.items():
                self.assertAlmostEqual(values[name], max(bound, 0.0), delta=1e-9)

    def test_corners_are_clamped_into_the_region(self):
        # corner A of the weak receiver goes negative: 0.5 - 0.3 - 0.7
        corners = corner_arrays(0.4, 0.7, 0.5, 0.95, 0.3)
        self.assertTrue(bool(corners["A_clamped"]))
        self.assertEqual(float(corners["A_r1"]), 0.0)
        rng = np.random.default_rng(30)
        i_v = rng.random((2, 200))
        i_full = i_v + rng.random((2, 200))
        cmi = 0.5 * rng.random(200)
        for variant in (CORNER_PRINTED, CORNER_OFFSET):
            c = corner_arrays(i_v[0], i_v[1], i_full[0], i_full[1], cmi, variant)
            for name in ("A", "B"):
                r1, r2 = c[f"{name}_r1"], c[f"{name}_r2"]
                self.assertTrue(np.all(r1 >= 0) and np.all(r2 >= 0))
                self.assertTrue(np.all(r1 <= i_full[0] + 1e-12) and np.all(r2 <= i_full[1] + 1e-12))
        printed = corner_arrays(i_v[0], i_v[1], i_full[0], i_full[1], cmi, CORNER_PRINTED)
        c1, c2 = i_full - i_v
        sum_bound = np.maximum(np.minimum(i_full[0] + c2 - cmi, c1 + i_full[1] - cmi), 0.0)
        for name in ("A", "B"):
            self.assertTrue(np.all(printed[f"{name}_r1"] + printed[f"{name}_r2"] <= sum_bound + 1e-12))

    def test_corner_variants(self):
        offset = corner_arrays(0.4, 0.7, 0.9, 0.95, 0.0, CORNER_OFFSET)
        printed = corner_arrays(0.4, 0.7, 0.9, 0.95, 0.0, CORNER_PRINTED)
        self.assertGreaterEqual(float(offset["A_r1"]), float(printed["A_r1"]))
        with self.assertRaises(ValueError):
            corner_arrays(0.4, 0.7, 0.9, 0.95, 0.0, "unknown")

    def test_rate_point_rejects_negative_rates(self):
        with self.assertRaises(ValueError):
            RatePoint(0.0, -0.1, 0.0)


class SearchTests(SimpleTestCase):
    def test_phi_codes(self):
        self.assertEqual(phi_from_code(60), (0, 0, 1, 1, 1, 1, 0, 0))
        aux = aux_from_parameters([0.5, 0, 0, 0.1, 0.1, 0.1, 0.1], 60)
        self.assertEqual(aux.phi, (0, 0, 1, 1, 1, 1, 0, 0))
        self.assertEqual(aux.p_v1_given_v_v2, ((0.1, 0.1), (0.1, 0.1)))

    @override_settings(POLARBC_SEARCH_RESOLUTION=6, POLARBC_SEARCH_RESOLUTION_CAP=4)
    def test_resolution_is_clamped(self):
        with self.assertLogs("polarbc.rate_region", "WARNING"):
            self.assertEqual(effective_resolution(), 4)
        self.assertEqual(effective_resolution(3), 3)
        with self.assertRaises(ValueError):
            effective_resolution(1)

    def test_search_beats_grid_point_baseline(self):
        spec = erasure_broadcast(0.2, 0.5)
        baseline_aux = AuxiliaryStructure(0.5, (0.0, 0.0), ((0.0, 0.0), (0.0, 0.0)), SUPERPOSITION_PHI)
        corners = corner_points(spec, baseline_aux)
        baseline = max(corners.a.r1 + corners.a.r2, corners.b.r1 + corners.b.r2)
        result = search_auxiliaries(spec, resolution=3)
        self.assertEqual(result.resolution, 3)
        self.assertEqual(result.evaluated, 256 * 3 ** 7)
        self.assertGreaterEqual(result.objective, baseline - 1e-9)
        found = corner_points(spec, result.aux)
        best = found.a if result.corner == "A" else found.b
        self.assertAlmostEqual(best.r1 + best.r2, result.objective, delta=1e-8)
