import math
import os
import unittest
from unittest.mock import patch

import numpy as np

from primcensus.core import ntheory
from primcensus.core.models import Factorization
from primcensus.core.ntheory import (
    SmallestFactorSieve,
    euler_phi,
    factorize,
    is_primitive_root,
    is_probable_prime,
    mobius,
    multiplicative_order,
    pow_mod,
    prime_record,
    prime_table,
    primes_between,
    primitive_roots,
    sieve_primes,
    smallest_primitive_root,
)
from primcensus.exceptions import DomainError


def brute_force_phi(n):
    return sum(1 for m in range(1, n + 1) if math.gcd(m, n) == 1)


def totient_sieve(limit):
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


class TestSieve(unittest.TestCase):
    def test_small_limits(self):
        self.assertEqual(sieve_primes(10).tolist(), [2, 3, 5, 7])
        self.assertEqual(sieve_primes(2).tolist(), [2])
        self.assertEqual(len(sieve_primes(100)), 25)

    def test_segment_hint_does_not_change_output(self):
        self.assertEqual(sieve_primes(10000, segment_hint=97).tolist(), sieve_primes(10000).tolist())

    def test_matches_trial_division(self):
        expected = [n for n in range(2, 3000) if all(n % d for d in range(2, math.isqrt(n) + 1))]
        self.assertEqual(sieve_primes(2999).tolist(), expected)

    def test_limit_below_two_rejected(self):
        with self.assertRaises(DomainError):
            sieve_primes(1)

    def test_primes_between_is_half_open(self):
        self.assertEqual(primes_between(10, 30).tolist(), [11, 13, 17, 19, 23, 29])
        self.assertEqual(primes_between(11, 13).tolist(), [13])
        self.assertEqual(len(primes_between(7, 7)), 0)


class TestFactorize(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(factorize(1).factors, ())
        self.assertEqual(factorize(40).as_dict(), {2: 3, 5: 1})
        self.assertEqual(factorize(720720).as_dict(), {2: 4, 3: 2, 5: 1, 7: 1, 11: 1, 13: 1})

    def test_zero_rejected(self):
        with self.assertRaises(DomainError):
            factorize(0)

    def test_semiprime_beyond_trial_division(self):
        self.assertEqual(factorize(1000003 * 1000033).as_dict(), {1000003: 1, 1000033: 1})

    def test_top_of_64_bit_range(self):
        f = factorize(2 ** 64 - 1)
        self.assertEqual(f.primes, [3, 5, 17, 257, 641, 65537, 6700417])
        with self.assertRaises(DomainError):
            factorize(2 ** 64)

    def test_left_inverse_of_product(self):
        for n in range(1, 3000):
            self.assertEqual(factorize(n).value, n)

    @unittest.skipUnless(os.getenv("PRIMCENSUS_SLOW"), "set PRIMCENSUS_SLOW=1 for the full sweep")
    def test_left_inverse_to_one_million(self):
        for n in range(1, 10 ** 6 + 1):
            self.assertEqual(factorize(n).value, n)

    def test_trial_division_limit_comes_from_config(self):
        def small_limit(section, key, default):
            return 50 if key == 'trial_division_limit' else default

        with patch.object(ntheory, 'config_value', side_effect=small_limit), \
                patch.object(ntheory, '_trial_primes', wraps=ntheory._trial_primes) as trial:
            self.assertEqual(factorize(101 * 103 * 4).as_dict(), {2: 2, 101: 1, 103: 1})
            self.assertEqual(factorize(1000003 * 1000033).as_dict(), {1000003: 1, 1000033: 1})
        trial.assert_called_with(50)

    def test_factorization_rejects_composite_primes(self):
        with self.assertRaises(ValueError):
            Factorization(factors=((4, 1),))
        with self.assertRaises(ValueError):
            Factorization(factors=((3, 1), (2, 1)))


class TestArithmeticFunctions(unittest.TestCase):
    def test_euler_phi_examples(self):
        self.assertEqual(euler_phi(factorize(1)), 1)
        self.assertEqual(euler_phi(factorize(40)), 16)
        self.assertEqual(euler_phi(factorize(100)), 40)

    def test_euler_phi_brute_force(self):
        for n in range(1, 600):
            self.assertEqual(euler_phi(factorize(n)), brute_force_phi(n), n)

    def test_euler_phi_matches_totient_sieve(self):
        phi = totient_sieve(20000)
        for n in range(1, 20001):
            self.assertEqual(euler_phi(factorize(n)), int(phi[n]), n)

    @unittest.skipUnless(os.getenv("PRIMCENSUS_SLOW"), "set PRIMCENSUS_SLOW=1 for the full sweep")
    def test_euler_phi_to_one_hundred_thousand(self):
        phi = totient_sieve(10 ** 5)
        for n in range(1, 10 ** 5 + 1):
            self.assertEqual(euler_phi(factorize(n)), int(phi[n]), n)

    def test_mobius(self):
        self.assertEqual(mobius(factorize(1)), 1)
        self.assertEqual(mobius(factorize(12)), 0)
        self.assertEqual(mobius(factorize(30)), -1)
        self.assertEqual(mobius(factorize(6)), 1)

    def test_pow_mod(self):
        self.assertEqual(pow_mod(2, 10, 1024), 0)
        self.assertEqual(pow_mod(3, 6, 7), 1)
        self.assertEqual(pow_mod(5, 0, 13), 1)
        with self.assertRaises(DomainError):
            pow_mod(2, 3, 1)
        with self.assertRaises(DomainError):
            pow_mod(2, -1, 7)

    def test_probable_prime(self):
        self.assertTrue(is_probable_prime(2 ** 61 - 1))
        self.assertFalse(is_probable_prime(561))
        self.assertFalse(is_probable_prime(3215031751))
        self.assertFalse(is_probable_prime(1))


class TestPrimitiveRoots(unittest.TestCase):
    def test_multiplicative_order(self):
        self.assertEqual(multiplicative_order(2, 7), 3)
        self.assertEqual(multiplicative_order(1, 13), 1)
        self.assertEqual(multiplicative_order(3, 7), 6)
        self.assertEqual(multiplicative_order(-1, 13), 2)

    def test_order_rejects_multiples_of_p(self):
        with self.assertRaises(DomainError):
            multiplicative_order(14, 7)

    def test_order_rejects_composite_modulus(self):
        with self.assertRaises(DomainError):
            multiplicative_order(2, 15)

    def test_is_primitive_root(self):
        self.assertTrue(is_primitive_root(2, 11))
        self.assertFalse(is_primitive_root(2, 7))
        self.assertFalse(is_primitive_root(1, 13))
        self.assertFalse(is_primitive_root(0, 7))
        self.assertTrue(is_primitive_root(1, 2))

    def test_smallest_primitive_root(self):
        self.assertEqual(smallest_primitive_root(7), 3)
        self.assertEqual(smallest_primitive_root(41), 6)
        self.assertEqual(smallest_primitive_root(2), 1)

    def test_primitive_roots_list(self):
        self.assertEqual(primitive_roots(7), [3, 5])
        self.assertEqual(len(primitive_roots(101)), 40)

    def _check_equivalence(self, limit):
        for p in sieve_primes(limit).tolist():
            roots = 0
            for u in range(1, p):
                by_order = multiplicative_order(u, p) == p - 1
                self.assertEqual(is_primitive_root(u, p), by_order, (u, p))
                roots += by_order
            self.assertEqual(roots, euler_phi(factorize(p - 1)), p)

    def test_order_and_divisor_test_agree(self):
        self._check_equivalence(300)

    @unittest.skipUnless(os.getenv("PRIMCENSUS_SLOW"), "set PRIMCENSUS_SLOW=1 for the full sweep")
    def test_order_and_divisor_test_agree_to_2000(self):
        self._check_equivalence(2000)


class TestPrimeRecords(unittest.TestCase):
    def test_prime_record(self):
        record = prime_record(41)
        self.assertEqual(record.tau, 6)
        self.assertEqual(record.phi_p_minus_1, 16)
        self.assertEqual(record.p_minus_1_factors.as_dict(), {2: 3, 5: 1})

    def test_prime_table(self):
        table = prime_table(30)
        self.assertEqual([r.p for r in table], [2, 3, 5, 7, 11, 13, 17, 19, 23, 29])
        self.assertEqual(table[0].tau, 1)

    def test_smallest_factor_sieve(self):
        spf = SmallestFactorSieve(100)
        self.assertEqual(spf.factor(84).as_dict(), {2: 2, 3: 1, 7: 1})
        self.assertEqual(spf.factor(97).as_dict(), {97: 1})
        self.assertEqual(spf.factor(1).factors, ())
        with self.assertRaises(DomainError):
            spf.factor(101)

    def test_smallest_factor_sieve_matches_factorize(self):
        spf = SmallestFactorSieve(5000)
        for n in range(1, 5001):
            self.assertEqual(spf.factor(n), factorize(n))


if __name__ == '__main__':
    unittest.main()
