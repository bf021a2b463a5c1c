"""
Test Suite for class numbers
Both class number algorithms, the Cauchy / Carlitz congruences and the
bounds and growth summaries.
"""

import os
import sys
import unittest

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from adele_lab.classnum import (
    class_number,
    class_number_bounds,
    class_number_charsum,
    class_number_forms,
    class_number_growth,
    fundamental_discriminants,
    is_fundamental,
    kronecker_table,
    sweep_carlitz,
    sweep_cauchy,
    verify_carlitz,
    verify_cauchy,
)
from adele_lab.core import PrimeWindow
from adele_lab.errors import CapacityError, DomainError
from adele_lab.reports import OK, SKIP, VIOLATION, summarize_congruences

KNOWN = {-3: 1, -4: 1, -7: 1, -8: 1, -20: 2, -23: 3, -47: 5, -52: 2, -163: 1, -84: 4}


class TestClassNumbers(unittest.TestCase):

    def test_known_values(self):
        for D, h in KNOWN.items():
            self.assertEqual(class_number_forms(D), h, D)
            self.assertEqual(class_number(D), h, D)

    def test_charsum_matches_known(self):
        for D, h in KNOWN.items():
            if D < -4:
                self.assertEqual(class_number_charsum(D), h, D)

    def test_fundamental(self):
        self.assertEqual(fundamental_discriminants(-20, 0), [-19, -15, -11, -8, -7, -4, -3])
        self.assertFalse(is_fundamental(-12))
        self.assertFalse(is_fundamental(-1))
        self.assertTrue(is_fundamental(-4 * 13))

    def test_domain(self):
        with self.assertRaises(DomainError):
            class_number(-12)
        with self.assertRaises(DomainError):
            class_number(5)
        with self.assertRaises(CapacityError):
            class_number(-1000003)

    def test_kronecker_table(self):
        chi = kronecker_table(-20, 10)
        # chi_{-20}: 0 at 2 and 5, (-20/3) = 1, (-20/7) = 1
        self.assertEqual(chi[0], 0)
        self.assertEqual(chi[1], 1)
        self.assertEqual(chi[2], 0)
        self.assertEqual(chi[3], 1)
        self.assertEqual(chi[5], 0)
        self.assertEqual(chi[7], 1)
        self.assertEqual(chi[9], 1)

    @pytest.mark.slow
    def test_two_algorithms_agree(self):
        for D in fundamental_discriminants(-10000, -4):
            self.assertEqual(class_number_charsum(D), class_number_forms(D), D)


class TestCongruences(unittest.TestCase):

    def test_cauchy_examples(self):
        report = verify_cauchy(7)
        self.assertEqual(report.verdict, OK)
        self.assertEqual(report.rhs, 1)
        self.assertEqual(verify_cauchy(23).rhs, 3)
        self.assertEqual(verify_cauchy(13).verdict, SKIP)
        self.assertEqual(verify_cauchy(3).verdict, SKIP)

    def test_carlitz_examples(self):
        self.assertEqual(verify_carlitz(5).rhs, 2)
        self.assertEqual(verify_carlitz(5).verdict, OK)
        self.assertEqual(verify_carlitz(13).rhs, 2)
        self.assertEqual(verify_carlitz(7).verdict, SKIP)

    def test_short_sweeps(self):
        window = PrimeWindow(5, 300)
        self.assertEqual(summarize_congruences(sweep_cauchy(window))[VIOLATION], 0)
        self.assertEqual(summarize_congruences(sweep_carlitz(window))[VIOLATION], 0)

    @pytest.mark.slow
    def test_sweeps(self):
        window = PrimeWindow(5, 1500)
        cauchy = summarize_congruences(sweep_cauchy(window))
        carlitz = summarize_congruences(sweep_carlitz(window))
        self.assertEqual(cauchy[VIOLATION], 0)
        self.assertEqual(carlitz[VIOLATION], 0)
        self.assertEqual(cauchy[OK] + carlitz[OK], len(window))


class TestSummaries(unittest.TestCase):

    def test_bounds(self):
        self.assertEqual(class_number_bounds(PrimeWindow(5, 1000)), {'h(-p)': [], 'h(-4p)': []})

    def test_growth(self):
        growth = class_number_growth([100, 1000])
        self.assertEqual([r['X'] for r in growth['rows']], [100, 1000])
        self.assertGreater(growth['rows'][1]['max_h'], growth['rows'][0]['max_h'])
        self.assertGreater(growth['slope'], 0)
        self.assertEqual(growth['constant'], max(r['ratio'] for r in growth['rows']))
        self.assertEqual(growth['exponent'], 0.6)


if __name__ == '__main__':
    unittest.main()
