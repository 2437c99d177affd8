import cmath
import math
import unittest

from primcensus.core.expsums import (
    coprime_unity_sum,
    exp_sum_coprime,
    exp_sum_prefix,
    lagrange_resolvent,
    primitive_root_image,
    probe_lemma31,
    probe_lemma32,
    probe_lemma33,
    probe_thm32,
    ramanujan_sum,
    resolvent_inversion,
    stride_samples,
    unity_sum_mobius,
)
from primcensus.core.models import ProbeKind, ProbeReport
from primcensus.core.ntheory import euler_phi, factorize, primitive_roots, sieve_primes, smallest_primitive_root
from primcensus.exceptions import DomainError


def brute_force_ramanujan(m, t):
    total = sum(cmath.exp(2j * math.pi * t * n / m) for n in range(1, m + 1) if math.gcd(n, m) == 1)
    return round(total.real)


class TestEvaluators(unittest.TestCase):
    def test_coprime_sum_at_zero_is_phi(self):
        z = exp_sum_coprime(0, 7, 3)
        self.assertAlmostEqual(z.re, 2.0, places=12)
        self.assertAlmostEqual(z.im, 0.0, places=12)

    def test_coprime_sum_example(self):
        z = exp_sum_coprime(1, 7, 3)
        self.assertAlmostEqual(z.re, -1.1235, delta=1e-4)
        self.assertAlmostEqual(z.im, -0.5410, delta=1e-4)

    def test_coprime_sum_magnitude_bounded_by_phi(self):
        for s in range(101):
            self.assertLessEqual(exp_sum_coprime(s, 101, 2).magnitude, 40 + 1e-9)

    def test_coprime_sum_rejects_non_primitive_tau(self):
        with self.assertRaises(DomainError):
            exp_sum_coprime(1, 7, 2)

    def test_prefix_example(self):
        z = exp_sum_prefix(1, 5, 2, 2)
        self.assertAlmostEqual(z.re, -0.5, places=9)
        self.assertAlmostEqual(z.im, -0.3633, delta=1e-4)

    def test_prefix_single_term(self):
        z = complex(exp_sum_prefix(3, 11, 2, 1))
        expected = cmath.exp(2j * math.pi * 6 / 11)
        self.assertAlmostEqual(abs(z - expected), 0.0, places=12)

    def test_prefix_rejects_x_out_of_range(self):
        with self.assertRaises(DomainError):
            exp_sum_prefix(1, 5, 2, 0)
        with self.assertRaises(DomainError):
            exp_sum_prefix(1, 5, 2, 5)

    def test_complete_sum_is_minus_one(self):
        for p in sieve_primes(53).tolist()[1:]:
            tau = smallest_primitive_root(p)
            for s in range(1, p):
                z = complex(exp_sum_prefix(s, p, tau, p - 1))
                self.assertLess(abs(z + 1), 1e-9, (s, p))

    def test_resolvent_at_zero(self):
        z = lagrange_resolvent(0, 1, 7, 3)
        self.assertAlmostEqual(z.re, -1.0, places=9)
        self.assertAlmostEqual(z.im, 0.0, places=9)

    def test_resolvent_magnitudes(self):
        self.assertAlmostEqual(lagrange_resolvent(1, 1, 7, 3).magnitude, math.sqrt(7), delta=1e-6)
        self.assertAlmostEqual(lagrange_resolvent(2, 3, 11, 2).magnitude, math.sqrt(11), delta=1e-6)

    def test_gauss_magnitude_sweep(self):
        for p in [5, 7, 11, 13, 17, 19, 23, 29, 31]:
            tau = smallest_primitive_root(p)
            for t in range(1, p - 1):
                for s in range(1, p):
                    self.assertAlmostEqual(lagrange_resolvent(t, s, p, tau).magnitude, math.sqrt(p), delta=1e-6)

    def test_resolvent_rejects_out_of_range(self):
        with self.assertRaises(DomainError):
            lagrange_resolvent(6, 1, 7, 3)
        with self.assertRaises(DomainError):
            lagrange_resolvent(1, 0, 7, 3)

    def test_resolvent_inversion(self):
        for p, s, n in [(7, 1, 1), (11, 3, 4), (13, 5, 12), (31, 7, 10)]:
            lhs, rhs = resolvent_inversion(s, n, p, smallest_primitive_root(p))
            self.assertAlmostEqual(lhs.real, rhs.real, delta=1e-6)
            self.assertAlmostEqual(lhs.imag, rhs.imag, delta=1e-6)


class TestUnitySums(unittest.TestCase):
    def test_examples(self):
        self.assertAlmostEqual(coprime_unity_sum(0, 31).re, 8.0, places=9)
        self.assertAlmostEqual(coprime_unity_sum(2, 5).re, -2.0, places=9)
        self.assertAlmostEqual(coprime_unity_sum(15, 31).re, -8.0, places=9)

    def test_ramanujan_examples(self):
        self.assertEqual(ramanujan_sum(4, 2), -2)
        self.assertEqual(ramanujan_sum(12, 0), 4)
        self.assertEqual(ramanujan_sum(30, 15), -8)
        self.assertEqual(ramanujan_sum(12, 6), -4)

    def test_ramanujan_against_brute_force(self):
        for m in range(1, 60):
            for t in range(0, 2 * m):
                self.assertEqual(ramanujan_sum(m, t), brute_force_ramanujan(m, t), (m, t))

    def test_ramanujan_rejects_bad_modulus(self):
        with self.assertRaises(DomainError):
            ramanujan_sum(0, 1)

    def test_closed_form_matches_sum(self):
        for p in sieve_primes(200).tolist()[1:]:
            for t in range(p - 1):
                z = coprime_unity_sum(t, p)
                self.assertLess(abs(z.im), 1e-9)
                self.assertEqual(round(z.re), ramanujan_sum(p - 1, t), (t, p))

    def test_mobius_form_agrees(self):
        for p in sieve_primes(60).tolist()[1:]:
            for t in range(p - 1):
                a = complex(coprime_unity_sum(t, p))
                b = complex(unity_sum_mobius(t, p))
                self.assertLess(abs(a - b), 1e-9, (t, p))

    def test_unity_sum_rejects_t_out_of_range(self):
        with self.assertRaises(DomainError):
            coprime_unity_sum(30, 31)


class TestPrimitiveRootImage(unittest.TestCase):
    def test_image_has_phi_elements(self):
        p = 13
        tau = smallest_primitive_root(p)
        for s in range(1, p):
            image = primitive_root_image(s, p, tau)
            self.assertEqual(len(set(image)), euler_phi(factorize(p - 1)))

    def test_unit_image_is_the_primitive_roots(self):
        self.assertEqual(primitive_root_image(1, 41, 6), primitive_roots(41))

    def test_zero_rejected(self):
        with self.assertRaises(DomainError):
            primitive_root_image(13, 13, 2)


class TestProbes(unittest.TestCase):
    def test_unity_sum_probe_flags_large_gcd(self):
        report = probe_lemma33(31)
        self.assertIn((15,), report.violations)
        sample = next(s for s in report.samples if s.params == (15,))
        self.assertAlmostEqual(sample.observed, 8.0, places=9)
        self.assertAlmostEqual(sample.bound, 30 * math.log(31) / 15, places=9)
        self.assertGreater(report.max_ratio, 1)

    def test_unity_sum_probe_clean_case(self):
        report = probe_lemma33(13)
        self.assertEqual(report.violations, ())
        sample = next(s for s in report.samples if s.params == (6,))
        self.assertAlmostEqual(sample.observed, 4.0, places=9)

    def test_unity_sum_probe_needs_p_at_least_five(self):
        with self.assertRaises(DomainError):
            probe_lemma33(3)

    def test_coprime_probe(self):
        epsilon = 1 / 16 - 1e-3
        report = probe_lemma31(101, 2, epsilon)
        self.assertEqual(report.kind, ProbeKind.LEMMA31)
        self.assertEqual(report.epsilon, epsilon)
        self.assertEqual(len(report.samples), 40)
        for sample in report.samples:
            self.assertLessEqual(sample.observed, 40 + 1e-9)
            self.assertLess(sample.ratio, 101 ** epsilon)
        self.assertEqual(report.max_ratio, max(s.ratio for s in report.samples))

    def test_coprime_probe_rejects_bad_epsilon(self):
        with self.assertRaises(DomainError):
            probe_lemma31(101, 2, 1.5)

    def test_difference_probe(self):
        report = probe_lemma32(13, 2)
        self.assertEqual(len(report.samples), 12)
        self.assertEqual(report.samples[0].params, (1,))
        self.assertAlmostEqual(report.samples[0].observed, 0.0, places=12)
        for sample in report.samples:
            self.assertLessEqual(sample.observed, 2 * 4 + 1e-9)
        self.assertIsNone(report.epsilon)

    def test_prefix_probe(self):
        report = probe_thm32(101, 2, s_samples=10)
        self.assertEqual(len(report.samples), 10)
        for sample in report.samples:
            s, x = sample.params
            self.assertTrue(1 <= x <= 100)
            self.assertLessEqual(sample.observed, x + 1e-9)
            z = exp_sum_prefix(s, 101, 2, x)
            self.assertAlmostEqual(sample.observed, z.magnitude, places=9)

    def test_stride_samples(self):
        self.assertEqual(stride_samples(11, 20), list(range(1, 11)))
        self.assertEqual(stride_samples(101, 4), [1, 26, 51, 76])

    def test_merge_is_order_independent(self):
        full = probe_lemma32(31, 3)
        head = ProbeReport.from_samples(31, ProbeKind.LEMMA32, list(full.samples[:10]))
        tail = ProbeReport.from_samples(31, ProbeKind.LEMMA32, list(full.samples[10:]))
        self.assertEqual(head.merge(tail), full)
        self.assertEqual(tail.merge(head), full)

    def test_merge_rejects_other_prime(self):
        with self.assertRaises(DomainError):
            probe_lemma33(13).merge(probe_lemma33(31))

    def test_workers_do_not_change_report(self):
        tau = smallest_primitive_root(211)
        self.assertEqual(probe_lemma32(211, tau, workers=2), probe_lemma32(211, tau, workers=1))


if __name__ == '__main__':
    unittest.main()
