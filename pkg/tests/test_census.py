import math
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
import yaml

from primcensus.core.census import (
    brun_titchmarsh_check,
    count_pr_primes,
    count_primes_ap,
    dyadic_census,
    error_term_bound_check,
    interval_decomposition,
    totient_over_p_sum,
    totient_ratio_sum,
)
from primcensus.core.density import empirical_density, log_integral, truncated_Aq
from primcensus.core.models import ResidueClass
from primcensus.exceptions import DomainError
from primcensus.utils.config_loader import ConfigLoader

ODD = ResidueClass.build(2, 1)
ALL = ResidueClass.build(1, 0)


class SmallSegments:
    """Context manager that points ConfigLoader at a copy of the config with a tiny segment size."""

    def __init__(self, segment_size):
        self.segment_size = segment_size

    def __enter__(self):
        config = dict(ConfigLoader.load_config())
        config['census_config'] = dict(config.get('census_config', {}), segment_size=self.segment_size)
        self._dir = tempfile.TemporaryDirectory()
        path = Path(self._dir.name) / 'Config.yml'
        path.write_text(yaml.safe_dump(config), encoding='utf-8')
        ConfigLoader.set_config_path(path)
        return self

    def __exit__(self, *exc):
        ConfigLoader._config_path = None
        ConfigLoader.clear_cache()
        self._dir.cleanup()


class TestResidueClass(unittest.TestCase):
    def test_build_reduces(self):
        cls = ResidueClass.build(4, 7)
        self.assertEqual((cls.q, cls.a), (4, 3))
        self.assertTrue(cls.contains(11))

    def test_rejects_common_factor(self):
        with self.assertRaises(DomainError):
            ResidueClass.build(4, 2)

    def test_trivial_modulus(self):
        self.assertEqual(ResidueClass.build(1, 5).a, 0)


class TestCounts(unittest.TestCase):
    def test_count_primes_ap(self):
        self.assertEqual(count_primes_ap(100, ResidueClass.build(4, 1)), 11)
        self.assertEqual(count_primes_ap(100, ALL), 25)
        self.assertEqual(count_primes_ap(10, ResidueClass.build(3, 1)), 1)

    def test_count_rejects_small_x(self):
        with self.assertRaises(DomainError):
            count_primes_ap(1, ALL)

    def test_census_ground_truth(self):
        result = count_pr_primes(100, ODD, 2)
        self.assertEqual(result.pi, 24)
        self.assertEqual(result.pi_u, 12)
        self.assertEqual(result.skipped, 0)
        self.assertEqual(count_pr_primes(100, ResidueClass.build(4, 1), 2).pi_u, 6)

    def test_primes_dividing_u_are_skipped(self):
        result = count_pr_primes(100, ALL, 2)
        self.assertEqual(result.pi, 25)
        self.assertEqual(result.skipped, 1)
        self.assertEqual(result.pi_u, 12)

    def test_square_base_warns_and_counts_nothing(self):
        with self.assertLogs('primcensus.core.census', level='WARNING'):
            result = count_pr_primes(100, ODD, 4)
        self.assertEqual(result.pi_u, 0)

    def test_negative_base(self):
        result = count_pr_primes(1000, ODD, -3)
        self.assertLessEqual(result.pi_u + result.skipped, result.pi)
        self.assertEqual(result.skipped, 1)

    def test_zero_base_rejected(self):
        with self.assertRaises(DomainError):
            count_pr_primes(100, ODD, 0)

    def test_pi_u_never_exceeds_class_count(self):
        for q, a in ((1, 0), (3, 1), (3, 2), (5, 2), (8, 7)):
            cls = ResidueClass.build(q, a)
            for u in (2, 3, -2, 5, 10):
                self.assertLessEqual(count_pr_primes(3000, cls, u).pi_u, count_primes_ap(3000, cls))

    def test_partition_over_classes(self):
        x = 10 ** 4
        total = count_primes_ap(x, ALL)
        for q in range(2, 13):
            summed = sum(count_primes_ap(x, ResidueClass.build(q, a)) for a in range(q) if math.gcd(a, q) == 1)
            dividing = sum(1 for p in (2, 3, 5, 7, 11) if q % p == 0)
            self.assertEqual(summed, total - dividing, q)


class TestTotientSums(unittest.TestCase):
    def test_examples(self):
        self.assertAlmostEqual(totient_ratio_sum(10, ODD), 1 / 2 + 1 / 2 + 1 / 3, places=12)
        self.assertAlmostEqual(totient_over_p_sum(10, ODD), 1 / 3 + 2 / 5 + 2 / 7, places=12)
        self.assertEqual(totient_ratio_sum(2, ODD), 0.0)
        self.assertEqual(totient_over_p_sum(2, ODD), 0.0)

    def test_census_carries_the_same_sums(self):
        result = count_pr_primes(5000, ODD, 2)
        self.assertEqual(result.sum_phi_ratio, totient_ratio_sum(5000, ODD))
        self.assertEqual(result.sum_phi_over_p, totient_over_p_sum(5000, ODD))

    def test_difference_is_small(self):
        x = 10 ** 5
        difference = totient_ratio_sum(x, ODD) - totient_over_p_sum(x, ODD)
        self.assertGreater(difference, 0)
        self.assertLess(difference, 2 * math.log(math.log(x)))

    def test_ratio_sum_near_prediction(self):
        x = 10 ** 5
        predicted = truncated_Aq(2, 1).value * log_integral(x)
        self.assertLess(abs(totient_ratio_sum(x, ODD) - predicted) / predicted, 0.05)


class TestDecomposition(unittest.TestCase):
    def test_identity_and_ground_truth(self):
        d = interval_decomposition(100, ODD, 2, exact=True)
        # 101, 107, 131, 139, 149, 163, 173, 179, 181, 197
        self.assertEqual(d.psi_sum, 10)
        self.assertEqual(d.prime_count, 21)
        self.assertLess(abs(d.residual), 1e-9)
        self.assertEqual(d.main_term_exact + d.error_term_exact, d.psi_sum)

    def test_square_base(self):
        d = interval_decomposition(500, ODD, 4)
        self.assertEqual(d.psi_sum, 0)
        self.assertAlmostEqual(d.error_term, -d.main_term, places=9)

    def test_rejects_zero_base(self):
        with self.assertRaises(DomainError):
            interval_decomposition(100, ODD, 0)

    def test_randomized_identity(self):
        rng = np.random.default_rng(20240101)
        done = 0
        while done < 50:
            x = int(rng.integers(2, 10 ** 4 + 1))
            q = int(rng.integers(1, 11))
            a = int(rng.integers(0, q))
            u = int(rng.integers(-50, 51))
            if u == 0 or (q > 1 and math.gcd(a, q) != 1):
                continue
            d = interval_decomposition(x, ResidueClass.build(q, a), u, exact=True)
            self.assertLess(abs(d.psi_sum - d.main_term - d.error_term), 1e-9, (x, q, a, u))
            self.assertEqual(d.main_term_exact + d.error_term_exact, d.psi_sum)
            self.assertLessEqual(d.psi_sum, d.prime_count)
            done += 1

    def test_dyadic_blocks_partition(self):
        blocks = dyadic_census(100, 3, ODD, 2)
        self.assertEqual([b.x for b in blocks], [100, 200, 400])
        self.assertEqual(
            sum(b.prime_count for b in blocks),
            count_primes_ap(800, ODD) - count_primes_ap(100, ODD),
        )
        self.assertEqual(
            sum(b.psi_sum for b in blocks),
            count_pr_primes(800, ODD, 2).pi_u - count_pr_primes(100, ODD, 2).pi_u,
        )

    def test_interval_matches_difference_of_counts(self):
        cls = ResidueClass.build(3, 2)
        d = interval_decomposition(1000, cls, 5)
        expected = count_primes_ap(2000, cls) - count_primes_ap(1000, cls)
        self.assertEqual(d.prime_count, expected)


class TestBounds(unittest.TestCase):
    def test_brun_titchmarsh(self):
        self.assertTrue(brun_titchmarsh_check(1000, ResidueClass.build(3, 1)).satisfied)
        self.assertTrue(brun_titchmarsh_check(10 ** 5, ResidueClass.build(4, 3)).satisfied)
        check = brun_titchmarsh_check(10 ** 4, ALL)
        self.assertEqual(check.lhs, count_primes_ap(2 * 10 ** 4, ALL) - count_primes_ap(10 ** 4, ALL))
        self.assertAlmostEqual(check.rhs, 3 * 10 ** 4 / math.log(10 ** 4), places=9)

    def test_brun_titchmarsh_sweep(self):
        for x in (10 ** 3, 10 ** 4):
            for q in (1, 3, 4, 5):
                for a in range(q):
                    if q > 1 and math.gcd(a, q) != 1:
                        continue
                    self.assertTrue(brun_titchmarsh_check(x, ResidueClass.build(q, a)).satisfied, (x, q, a))

    def test_brun_titchmarsh_needs_x_at_least_three(self):
        with self.assertRaises(DomainError):
            brun_titchmarsh_check(2, ALL)

    def test_error_term_bound_check(self):
        check = error_term_bound_check(1000, ODD, 2, epsilon=0.05)
        d = interval_decomposition(1000, ODD, 2)
        self.assertEqual(check.observed, abs(d.error_term))
        self.assertEqual(check.trivial_bound, d.main_term)
        self.assertAlmostEqual(check.claimed_bound, 1000 ** 0.95 / math.log(1000), places=9)
        self.assertEqual(check.satisfied, check.ratio <= 1)


class TestDeterminism(unittest.TestCase):
    def test_workers_do_not_change_census(self):
        with SmallSegments(2000):
            single = count_pr_primes(30000, ODD, 2, workers=1)
            pooled = count_pr_primes(30000, ODD, 2, workers=3)
        self.assertEqual(single, pooled)

    def test_segment_size_does_not_change_counts(self):
        reference = count_pr_primes(30000, ResidueClass.build(3, 2), 5)
        with SmallSegments(777):
            segmented = count_pr_primes(30000, ResidueClass.build(3, 2), 5)
        self.assertEqual((segmented.pi, segmented.pi_u, segmented.skipped),
                         (reference.pi, reference.pi_u, reference.skipped))
        self.assertAlmostEqual(segmented.sum_phi_ratio, reference.sum_phi_ratio, places=9)


@unittest.skipUnless(os.getenv("PRIMCENSUS_SLOW"), "set PRIMCENSUS_SLOW=1 for million-scale censuses")
class TestMillionScale(unittest.TestCase):
    def test_artin_density(self):
        result = count_pr_primes(10 ** 6, ODD, 2)
        self.assertLess(abs(result.pi_u / result.pi - truncated_Aq(2, 1).value), 0.01)
        self.assertLess(abs(empirical_density(result).delta_hat - 0.374), 0.01)

    def test_workers_byte_identical(self):
        reference = count_pr_primes(10 ** 6, ODD, 2, workers=1).model_dump_json()
        for workers in (4, 8):
            self.assertEqual(count_pr_primes(10 ** 6, ODD, 2, workers=workers).model_dump_json(), reference)

    def test_totient_over_p_trend(self):
        for q, a in ((2, 1), (3, 1), (3, 2)):
            cls = ResidueClass.build(q, a)
            errors = []
            for x in (10 ** 4, 10 ** 6):
                predicted = truncated_Aq(q, a).value * log_integral(x) / (q - 1)
                errors.append(abs(totient_over_p_sum(x, cls) - predicted) / predicted)
            self.assertLess(errors[1], 0.05, (q, a))
            self.assertLess(errors[1], errors[0], (q, a))


if __name__ == '__main__':
    unittest.main()
