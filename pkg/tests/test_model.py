from __future__ import absolute_import, division, print_function

import math
import unittest

import numpy as np

from mobcache.model import (Capacities, CodedPlacement, DiscretePlacement,
                            InvalidParameter, check_capacity, check_shape,
                            head_mass, make_rng, mpc_placement,
                            sample_request, sample_requests, zipf_pmf)


class TestZipfPopularity(unittest.TestCase):

    def test_uniform_when_gamma_is_zero(self):
        pop = zipf_pmf(3, 0.0)
        np.testing.assert_allclose(pop.pmf, [1 / 3.0] * 3)
        self.assertEqual(pop.num_files, 3)

    def test_rank_skew(self):
        pop = zipf_pmf(3, 1.0)
        total = 1 + 1 / 2.0 + 1 / 3.0
        np.testing.assert_allclose(pop.pmf, [1 / total, 0.5 / total,
                                             (1 / 3.0) / total])
        self.assertAlmostEqual(pop.cdf[-1], 1.0, places=12)

    def test_single_file(self):
        np.testing.assert_array_equal(zipf_pmf(1, 2.0).pmf, [1.0])

    def test_rejects_bad_parameters(self):
        for num_files, gamma in [(0, 1.0), (-1, 1.0), (2.5, 1.0),
                                 (3, -0.1), (3, float("nan")),
                                 (3, float("inf"))]:
            with self.assertRaises(InvalidParameter):
                zipf_pmf(num_files, gamma)

    def test_pmf_is_read_only(self):
        pop = zipf_pmf(4, 1.0)
        with self.assertRaises(ValueError):
            pop.pmf[0] = 0.5

    def test_log_pmf(self):
        pop = zipf_pmf(5, 0.7)
        np.testing.assert_allclose(pop.log_pmf(), np.log(pop.pmf))
        extreme = zipf_pmf(10, 2000.0).log_pmf()
        self.assertTrue(np.all(np.isfinite(extreme)))
        self.assertAlmostEqual(extreme[0], 0.0, places=12)

    def test_head_mass(self):
        pop = zipf_pmf(10, 0.8)
        self.assertAlmostEqual(head_mass(pop, 3), pop.pmf[:3].sum(),
                               places=15)
        self.assertEqual(head_mass(pop, 0), 0.0)


class TestSampling(unittest.TestCase):

    def test_sample_request_is_seeded(self):
        pop = zipf_pmf(50, 0.8)
        self.assertEqual(sample_request(pop, 7), sample_request(pop, 7))
        for seed in range(20):
            self.assertTrue(0 <= sample_request(pop, seed) < 50)

    def test_sample_request_accepts_generator(self):
        pop = zipf_pmf(5, 1.0)
        rng = np.random.default_rng(1)
        self.assertIs(make_rng(rng), rng)
        draws = [sample_request(pop, rng) for _ in range(10)]
        self.assertTrue(all(0 <= d < 5 for d in draws))

    def test_sample_requests_follow_pmf(self):
        pop = zipf_pmf(4, 1.2)
        draws = sample_requests(pop, 100000, 3)
        frequency = np.bincount(draws, minlength=4) / len(draws)
        np.testing.assert_allclose(frequency, pop.pmf, atol=0.01)

    def test_single_file_always_requested(self):
        pop = zipf_pmf(1, 0.0)
        self.assertTrue(np.all(sample_requests(pop, 100, 0) == 0))


class TestPlacements(unittest.TestCase):

    def test_capacities(self):
        caps = Capacities.uniform(2, 3)
        self.assertEqual(len(caps), 3)
        self.assertTrue(caps.is_integral)
        np.testing.assert_array_equal(caps.as_int(), [2, 2, 2])
        with self.assertRaises(InvalidParameter):
            Capacities([1, -1])
        with self.assertRaises(InvalidParameter):
            Capacities([0.5, 1]).as_int()

    def test_coded_placement_validation(self):
        with self.assertRaises(InvalidParameter):
            CodedPlacement([[0.5, 1.2]])
        with self.assertRaises(InvalidParameter):
            CodedPlacement([0.5, 0.2])
        with self.assertRaises(InvalidParameter):
            CodedPlacement([[0.7, 0.7]], Capacities([1.0]))
        placement = CodedPlacement([[0.5, 0.5 + 1e-12]], Capacities([1.0]))
        self.assertEqual((placement.num_nodes, placement.num_files), (1, 2))

    def test_discrete_placement(self):
        placement = DiscretePlacement.from_items(2, 3, [(1, 2), (0, 0)])
        self.assertEqual(placement.items(), [(0, 0), (1, 2)])
        grown = placement.with_item(1, 0)
        self.assertEqual(grown.items(), [(0, 0), (1, 0), (1, 2)])
        self.assertEqual(placement.items(), [(0, 0), (1, 2)])
        self.assertEqual(placement,
                         DiscretePlacement.from_items(2, 3, [(0, 0), (1, 2)]))
        self.assertNotEqual(placement, grown)
        self.assertEqual(len(set([placement, DiscretePlacement(
            placement.stored.copy())])), 1)
        np.testing.assert_array_equal(
            CodedPlacement.from_discrete(placement).x,
            [[1, 0, 0], [0, 0, 1]])

    def test_check_capacity(self):
        placement = DiscretePlacement.from_items(2, 3, [(0, 0), (0, 1)])
        check_capacity(placement, Capacities([2, 0]))
        with self.assertRaises(InvalidParameter):
            check_capacity(placement, Capacities([1, 1]))
        with self.assertRaises(InvalidParameter):
            check_capacity(placement, Capacities([2, 2, 2]))

    def test_check_shape(self):
        placement = DiscretePlacement.empty(2, 3)
        check_shape(placement, 2, 3)
        with self.assertRaises(InvalidParameter):
            check_shape(placement, 3, 2)


class TestMostPopularContent(unittest.TestCase):

    def test_every_node_caches_the_head(self):
        pop = zipf_pmf(5, 1.0)
        placement = mpc_placement(pop, Capacities([2, 1, 0]), 3)
        self.assertEqual(placement.items(), [(0, 0), (0, 1), (1, 0)])

    def test_ties_go_to_lower_index(self):
        placement = mpc_placement(zipf_pmf(4, 0.0), Capacities([2]), 1)
        self.assertEqual(placement.items(), [(0, 0), (0, 1)])

    def test_capacity_beyond_library(self):
        placement = mpc_placement(zipf_pmf(2, 1.0), Capacities([5]), 1)
        self.assertEqual(placement.items(), [(0, 0), (0, 1)])

    def test_rejects_mismatch_and_fractions(self):
        pop = zipf_pmf(3, 1.0)
        with self.assertRaises(InvalidParameter):
            mpc_placement(pop, Capacities([1, 1]), 3)
        with self.assertRaises(InvalidParameter):
            mpc_placement(pop, Capacities([1.5]), 1)

    def test_head_mass_matches_mpc_share(self):
        pop = zipf_pmf(6, 0.9)
        placement = mpc_placement(pop, Capacities([2]), 1)
        self.assertAlmostEqual(
            placement.fractions()[0].dot(pop.pmf), head_mass(pop, 2),
            places=15)
        self.assertFalse(math.isnan(head_mass(pop, 10)))


if __name__ == "__main__":
    unittest.main()
