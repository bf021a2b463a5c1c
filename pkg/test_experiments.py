"""
Test Suite for experiments
Element builders, criterion audits, the pi(p) study and the log_A scans.
"""

import math
import os
import sys
import unittest
from fractions import Fraction

from sympy import n_order, primerange

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from adele_lab.adele import IntPolynomial, constant
from adele_lab.core import PrimeWindow
from adele_lab.errors import CapacityError, DomainError
from adele_lab.experiments import (
    af_criterion_audit,
    factorize,
    floor_log_element,
    floor_sqrt_element,
    growth_audit,
    index_element,
    largest_prime_factor,
    log_rational_disproof,
    lz1_partition_count,
    lz2_audit,
    phi_ell_analysis,
    pi_linear_audit,
    pi_p_element,
    quadratic_roots_mod,
    root_equidist,
    sequence_element,
    sequence_values,
    smooth_scan,
    t_pi_element,
    t_sequence,
    wieferich_scan,
)
from adele_lab.reports import CONSISTENT, INCONCLUSIVE, INCONSISTENT

X_SQUARED_PLUS_ONE = IntPolynomial.parse('1,0,1')


class TestBuilders(unittest.TestCase):

    def test_t_sequence(self):
        self.assertEqual([t_sequence(n) for n in range(1, 11)], [1, 1, 2, 1, 2, 3, 1, 2, 3, 4])
        self.assertEqual(t_sequence(5), 2)
        with self.assertRaises(DomainError):
            t_sequence(0)

    def test_elements(self):
        window = PrimeWindow(2, 50)
        self.assertEqual(floor_log_element(window).residue(7).value, 1)
        self.assertEqual(floor_sqrt_element(window).residue(47).value, 6)
        self.assertEqual(pi_p_element(window).residue(11).value, 5)
        # pi(11) = 5 and t_5 = 2
        self.assertEqual(t_pi_element(window).residue(11).value, 2)
        index2 = index_element(2, window)
        self.assertEqual(index2.bad_primes, [2])
        self.assertEqual(index2.residue(7).value, 2)
        self.assertEqual(sequence_element('index2', window).values, index2.values)

    def test_sequence_values(self):
        values = sequence_values('index2', PrimeWindow(2, 20))
        self.assertNotIn(2, values)
        self.assertEqual(values[17], 2)
        with self.assertRaises(DomainError):
            sequence_values('unknown', PrimeWindow(2, 20))


class TestCriterionAudits(unittest.TestCase):

    def test_af_constant_is_inconsistent(self):
        report = af_criterion_audit(constant(PrimeWindow(2, 200), 5), [1, 2, 3])
        self.assertEqual([m['value'] for m in report.measurements], [1, 1, 0])
        self.assertEqual(report.verdict, INCONSISTENT)

    def test_af_floor_log_is_consistent(self):
        report = af_criterion_audit(floor_log_element(PrimeWindow(2, 10000)), [3, 4, 5])
        self.assertEqual(report.verdict, CONSISTENT)
        self.assertEqual(report.measurements[0]['first_primes'][0], 23)
        with self.assertRaises(DomainError):
            af_criterion_audit(constant(PrimeWindow(2, 50), 5), [2, 2])

    def test_growth_floor_log(self):
        report = growth_audit(sequence_values('floorlog', PrimeWindow(2, 10000)), 4)
        self.assertEqual(report.verdict, CONSISTENT)
        maxima = [m['value'] for m in report.measurements if m['quantity'] == 'max_a']
        self.assertEqual(maxima, [4, 6, 9])
        quartic = [m['value'] for m in report.measurements if m['quantity'] == 'max_a^4/p']
        self.assertAlmostEqual(quartic[0], 256 / 59)
        self.assertAlmostEqual(quartic[1], 625 / 149)
        self.assertAlmostEqual(quartic[2], 2401 / 1097)

    def test_growth_constant_and_sparse(self):
        constant_values = sequence_values('constant', PrimeWindow(2, 10000))
        self.assertEqual(growth_audit(constant_values, 2).verdict, INCONSISTENT)
        sparse = sequence_values('floorlog', PrimeWindow(2, 50))
        self.assertEqual(growth_audit(sparse, 2).verdict, INCONCLUSIVE)

    def test_lz2_floor_sqrt(self):
        from math import isqrt
        report = lz2_audit(lambda p: True, isqrt, 0.6, 0.8, 100000)
        self.assertEqual(report.verdict, CONSISTENT)
        ratios = [m['value'] for m in report.measurements if m['quantity'] == 'count/X^eps_prime']
        self.assertAlmostEqual(ratios[-1], 9592 / 100000 ** 0.8)

    def test_lz2_unbounded_and_short(self):
        self.assertEqual(lz2_audit(lambda p: True, lambda p: p, 0.6, 0.8, 100000).verdict, INCONSISTENT)
        self.assertEqual(lz2_audit(lambda p: True, lambda p: 1, 0.6, 0.8, 5000).verdict, INCONCLUSIVE)

    def test_lz1_configuration(self):
        report = lz1_partition_count(2, 3, 4, 5, 10000)
        self.assertEqual(report.verdict, CONSISTENT)
        counts = {m['quantity']: m['value'] for m in report.measurements}
        self.assertGreater(counts['P'], 0)
        self.assertEqual(counts['five_divides_ord'], 0)
        self.assertEqual(counts['P1_and_P2'], 0)
        self.assertGreaterEqual(counts['P1+P2+P3'], counts['P'])

    def test_lz1_counts_match_sympy_orders(self):
        X = 3000
        threshold = math.sqrt(X) / math.log(X)
        expected = {'P': 0, 'P1': 0, 'P2': 0, 'P3': 0}
        for p in primerange(X, 2 * X + 1):
            if p % 3 != 1 or p % 5 != 4:
                continue
            order = n_order(2, p)
            if ((p - 1) // 3) % order:
                continue
            expected['P'] += 1
            expected['P1'] += order <= threshold
            expected['P2'] += (p - 1) // order <= threshold
            expected['P3'] += order > threshold and (p - 1) // order > threshold
        counts = {m['quantity']: m['value'] for m in lz1_partition_count(2, 3, 4, 5, X).measurements}
        for key, value in expected.items():
            self.assertEqual(counts[key], value, key)

    def test_lz1_domain(self):
        with self.assertRaises(DomainError):
            lz1_partition_count(2, 2, 4, 5, 1000)
        with self.assertRaises(DomainError):
            lz1_partition_count(2, 3, 5, 5, 1000)
        with self.assertRaises(DomainError):
            lz1_partition_count(2, 5, 4, 5, 1000)
        with self.assertRaises(DomainError):
            lz1_partition_count(2, 3, 4, 5, 2)
        with self.assertRaises(CapacityError):
            lz1_partition_count(2, 3, 4, 5, 10 ** 6)


class TestPiStudy(unittest.TestCase):

    def test_linear_relations_never_in_range(self):
        result = pi_linear_audit(PrimeWindow(2, 1000), 10, 3)
        self.assertEqual(result['in_range'], 0)
        self.assertIn(2, result['solutions'][(1, 1)])
        self.assertIn(3, result['solutions'][(2, 1)])

    def test_quadratic_roots(self):
        self.assertEqual(quadratic_roots_mod(X_SQUARED_PLUS_ONE, 5), [2, 3])
        self.assertEqual(quadratic_roots_mod(X_SQUARED_PLUS_ONE, 7), [])
        self.assertEqual(quadratic_roots_mod(X_SQUARED_PLUS_ONE, 2), [1])

    def test_root_equidist(self):
        half = root_equidist(X_SQUARED_PLUS_ONE, 100000, 0, Fraction(1, 2))
        self.assertTrue(0.45 <= half.ratio <= 0.55)
        whole = root_equidist(X_SQUARED_PLUS_ONE, 100000, 0, 1)
        self.assertTrue(0.95 <= whole.ratio <= 1.05)
        self.assertEqual(root_equidist(X_SQUARED_PLUS_ONE, 1000, 0.3, 0.3).count, 0)
        self.assertEqual(half.to_dict()['beta'], '1/2')

    def test_root_equidist_domain(self):
        with self.assertRaises(DomainError):
            root_equidist(IntPolynomial.parse('1,0,-1'), 100, 0, 1)
        with self.assertRaises(DomainError):
            root_equidist(IntPolynomial.parse('1,1'), 100, 0, 1)
        with self.assertRaises(DomainError):
            root_equidist(X_SQUARED_PLUS_ONE, 100, 0.7, 0.2)

    def test_smooth_scan(self):
        self.assertIn(7, smooth_scan(X_SQUARED_PLUS_ONE, 0.99, 20))
        self.assertEqual(smooth_scan(IntPolynomial.parse('1,0'), 0.5, 10), [1, 4, 8, 9])
        self.assertEqual(largest_prime_factor(50), 5)
        with self.assertRaises(DomainError):
            smooth_scan(X_SQUARED_PLUS_ONE, 1.0, 20)
        with self.assertRaises(CapacityError):
            smooth_scan(X_SQUARED_PLUS_ONE, 0.5, 10 ** 6)


class TestLogA(unittest.TestCase):

    def test_wieferich(self):
        self.assertEqual(wieferich_scan(2, 0, 4000), [1093, 3511])
        self.assertEqual(wieferich_scan(2, 1, 4000), [3, 29, 37, 3373])
        with self.assertRaises(CapacityError):
            wieferich_scan(2, 0, 10 ** 8)

    def test_disproof(self):
        self.assertEqual(log_rational_disproof(2, 1, 1, 100).witness, 5)
        self.assertEqual(log_rational_disproof(2, 0, 1, 100).witness, 3)
        exhausted = log_rational_disproof(2, 1, 1, 3)
        self.assertTrue(exhausted.exhausted)
        self.assertEqual(exhausted.checked, 1)
        with self.assertRaises(DomainError):
            log_rational_disproof(1, 1, 1, 100)
        with self.assertRaises(DomainError):
            log_rational_disproof(2, 2, 4, 100)

    def test_factorize(self):
        self.assertEqual(factorize(2047), ([(23, 1), (89, 1)], True))
        self.assertEqual(factorize(8191), ([(8191, 1)], True))

    def test_phi_ell_small(self):
        report = phi_ell_analysis(2, 1, 5, 1, 1)
        self.assertEqual(report.value, 31)
        self.assertEqual(report.T_ell, 6)
        self.assertEqual(report.contra_residues, {31: 6})
        self.assertEqual(report.to_dict()['value'], '31')

    def test_phi_ell_structure(self):
        for ell in (5, 7, 11, 13):
            report = phi_ell_analysis(2, 1, ell, 1, 1)
            self.assertEqual(report.value, 2 ** ell - 1)
            self.assertTrue(report.complete)
            self.assertTrue(report.reconstructs)
            self.assertTrue(report.factors_one_mod_ell)
            self.assertTrue(report.squarefree)
            self.assertTrue(report.consistent_mod_u_minus_v)
            self.assertTrue(all(report.log_identity.values()))
        self.assertEqual(phi_ell_analysis(2, 1, 11, 1, 1).prime_factors, [23, 89])

    def test_phi_ell_domain(self):
        with self.assertRaises(DomainError):
            phi_ell_analysis(2, 2, 5, 1, 1)
        with self.assertRaises(DomainError):
            phi_ell_analysis(2, 1, 9, 1, 1)
        with self.assertRaises(DomainError):
            phi_ell_analysis(3, 1, 5, 7, 1)


if __name__ == '__main__':
    unittest.main()
