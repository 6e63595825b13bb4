from fractions import Fraction
from math import ceil

import numpy as np
from django.test import SimpleTestCase

from polarbc.alignment_chaining import (
    BACKWARD,
    BIN_SET_PRINTED,
    FORWARD,
    ChainingSchedule,
    SetBundle,
    align_pairwise,
    build_schedule,
    derive_set_bundle,
    rate_accounting,
)
from polarbc.channel_synthesis import erasure_recursion
from polarbc.exceptions import ConfigError, InfeasibleScheduleError
from polarbc.polarized_sets import PROFILE_SPECS, IndexSet, PolarizationProfile, Threshold


def bundle(n, i_sup2=(), i_v1=(), i_bin2=(), i_1=(), f_1=(), bound_1=(), reliability=None):
    return SetBundle(
        IndexSet(n, i_sup2), IndexSet(n, i_v1), IndexSet(n, i_bin2), IndexSet(n, i_1), IndexSet(n, f_1),
        IndexSet(n, bound_1), reliability,
    )


def constant_profiles(n, **overrides):
    profiles = {key: PolarizationProfile(np.full(n, 0.5)) for key in PROFILE_SPECS}
    for key, z in overrides.items():
        profiles[key.replace("_given_", "|").replace("__", ",")] = PolarizationProfile(np.asarray(z, dtype=float))
    return profiles


class SetBundleTests(SimpleTestCase):
    def test_superposition_sets(self):
        n = 8
        profiles = constant_profiles(
            n,
            V=np.ones(n),
            V_given_B2=np.r_[np.zeros(n // 2), np.ones(n // 2)],
            V_given_B1=np.ones(n),
        )
        sets = derive_set_bundle(profiles, Threshold())
        self.assertEqual(sets.i_sup2.indices, (0, 1, 2, 3))
        self.assertEqual(len(sets.i_v1), 0)

    def test_bin_set_variants(self):
        n = 4
        profiles = constant_profiles(
            n,
            V2_given_V=np.ones(n),
            V2_given_V__B2=[0.0, 0.0, 1.0, 1.0],
            V_given_B2=[1.0, 0.0, 0.0, 1.0],
        )
        self.assertEqual(derive_set_bundle(profiles, Threshold()).i_bin2.indices, (0, 1))
        self.assertEqual(derive_set_bundle(profiles, Threshold(), BIN_SET_PRINTED).i_bin2.indices, (1, 2))

    def test_bound_positions(self):
        n = 4
        profiles = constant_profiles(
            n,
            V1_given_V=np.ones(n),
            V1_given_V__B1=np.zeros(n),
            V1_given_V__V2=[1.0, 1.0, 0.0, 0.5],
        )
        sets = derive_set_bundle(profiles, Threshold())
        self.assertEqual(sets.i_1.indices, (0, 1, 2, 3))
        self.assertEqual(sets.bound_1.indices, (2, 3))
        self.assertEqual(sets.free_1.indices, (0, 1))

    def test_mismatched_lengths(self):
        profiles = constant_profiles(8)
        profiles["V"] = PolarizationProfile(np.zeros(4))
        with self.assertRaises(ConfigError):
            derive_set_bundle(profiles, Threshold())

    def test_erasure_profiles_give_hand_computed_sets(self):
        n = 16
        z_good, z_bad = erasure_recursion(0.2, n), erasure_recursion(0.6, n)
        profiles = constant_profiles(n, V=np.ones(n), V_given_B2=z_good, V_given_B1=z_bad)
        sets = derive_set_bundle(profiles, Threshold(0.05, 0.95))
        self.assertEqual(sets.i_sup2.indices, tuple(int(i) for i in np.flatnonzero(z_good <= 0.05)))
        self.assertEqual(sets.i_v1.indices, tuple(int(i) for i in np.flatnonzero(z_bad <= 0.05)))


class ScheduleTests(SimpleTestCase):
    def test_counting_example(self):
        sets = bundle(16, i_sup2=(10, 11, 12), i_1=range(10), f_1=(13, 14))
        schedule = build_schedule(sets, k=4)
        self.assertEqual(len(schedule.b1), 3)
        self.assertEqual(len(schedule.rbin), 2)
        self.assertEqual(len(schedule.b1 & schedule.rbin), 0)
        self.assertEqual(schedule.encode_directions, {"U0": FORWARD, "U2": FORWARD, "U1": BACKWARD})
        self.assertEqual(schedule.decode_directions[2]["U0"], BACKWARD)
        self.assertEqual(rate_accounting(sets, schedule, 4, 16).r1, Fraction(5, 16))

    def test_lowest_z_positions_chosen_first(self):
        reliability = np.linspace(1.0, 0.0, 8)
        sets = bundle(8, i_sup2=(7,), i_1=(0, 1, 2, 3), f_1=(6,), reliability=reliability)
        schedule = build_schedule(sets, k=2)
        self.assertEqual(schedule.b1.indices, (3,))
        self.assertEqual(schedule.rbin.indices, (2,))
        self.assertEqual(schedule.b1_pairs(), [(3, 7)])

    def test_no_chaining_allows_single_block(self):
        sets = bundle(8, i_sup2=(1, 2), i_v1=(1, 2), i_1=(3, 4))
        schedule = build_schedule(sets, k=1)
        self.assertFalse(schedule.chained)
        accounting = rate_accounting(sets, schedule, 1, 8)
        self.assertEqual(accounting.r1, Fraction(2, 8))
        self.assertEqual(accounting.r2, Fraction(2, 8))

    def test_chaining_needs_two_blocks(self):
        with self.assertRaises(ConfigError):
            build_schedule(bundle(8, i_sup2=(5,), i_1=(0, 1)), k=1)

    def test_infeasible_deficit(self):
        sets = bundle(16, i_sup2=(10, 11, 12), i_1=(0, 1, 2, 3), f_1=(13, 14))
        with self.assertRaises(InfeasibleScheduleError) as ctx:
            build_schedule(sets, k=2)
        self.assertEqual(ctx.exception.deficit, 1)

    def test_randomized_bundles(self):
        rng = np.random.default_rng(21)
        n = 32
        for _ in range(100):
            draw = lambda p: tuple(np.flatnonzero(rng.random(n) < p))  # noqa: E731
            sets = bundle(n, i_sup2=draw(0.3), i_v1=draw(0.3), i_bin2=draw(0.2), i_1=draw(0.5), f_1=draw(0.1),
                          reliability=rng.random(n))
            need = len(sets.i_sup2 - sets.i_v1) + len(sets.f_1)
            if need > len(sets.free_1):
                with self.assertRaises(InfeasibleScheduleError) as ctx:
                    build_schedule(sets, k=3)
                self.assertEqual(ctx.exception.deficit, need - len(sets.free_1))
                continue
            schedule = build_schedule(sets, k=3)
            self.assertEqual(len(schedule.b1), len(schedule.b2))
            self.assertEqual(len(schedule.rbin), len(schedule.f1))
            self.assertEqual(len(schedule.b1 & schedule.rbin), 0)
            self.assertEqual(len((schedule.b1 | schedule.rbin) - sets.i_1), 0)

    def test_schedule_rejects_unpaired_sets(self):
        with self.assertRaises(ConfigError):
            ChainingSchedule(2, IndexSet(4, (0,)), IndexSet(4), IndexSet(4), IndexSet(4))

    def test_edge_factor(self):
        sets = bundle(16, i_sup2=(10, 11, 12), i_1=range(10), f_1=(13, 14))
        accounting = rate_accounting(sets, build_schedule(sets, k=4), 4, 16)
        self.assertEqual(accounting.edge_factor, Fraction(3, 4))
        self.assertEqual(accounting.r2 - accounting.r2_edge, Fraction(3, 16) / 4)

    def test_first_binning_block_is_lost_with_f1(self):
        sets = bundle(16, i_sup2=(10,), i_bin2=(5, 6), i_1=range(5), f_1=(13,))
        accounting = rate_accounting(sets, build_schedule(sets, k=2), 2, 16)
        self.assertEqual(accounting.r2, Fraction(3, 16))
        self.assertEqual(accounting.r2 - accounting.r2_edge, Fraction(3, 16) / 2)
        no_f1 = bundle(16, i_sup2=(10,), i_bin2=(5, 6), i_1=range(5))
        accounting = rate_accounting(no_f1, build_schedule(no_f1, k=2), 2, 16)
        self.assertEqual(accounting.r2 - accounting.r2_edge, Fraction(1, 16) / 2)


class PairwiseAlignmentTests(SimpleTestCase):
    def test_halving(self):
        n = 64
        good_a = IndexSet(n, range(0, 40))
        good_b = IndexSet(n, range(20, 64))
        initial = 20
        for rounds in range(6):
            alignment = align_pairwise(good_a, good_b, rounds)
            self.assertEqual(alignment.history[0], initial)
            self.assertLessEqual(alignment.unpaired, ceil(initial / 2 ** rounds))
        alignment = align_pairwise(good_a, good_b, 3)
        self.assertEqual(len(alignment.surplus_b), 4)
        self.assertEqual(len(alignment.surplus_a), 0)

    def test_negative_rounds(self):
        with self.assertRaises(ConfigError):
            align_pairwise(IndexSet(4), IndexSet(4), -1)
