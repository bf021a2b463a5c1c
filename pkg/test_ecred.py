"""
Test Suite for elliptic curves modulo p
Frobenius traces against an exhaustive point count, Sato-Tate statistics
and quadratic twists.
"""

import math
import os
import sys
import unittest

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from adele_lab.adele import relation_scan, relation_scan2
from adele_lab.core import PrimeWindow
from adele_lab.ecred import (
    ShortWeierstrassCurve,
    alpha_E,
    angle_fraction,
    ap_trace,
    good_reduction,
    hasse_band_density,
    histogram_from_traces,
    point_count_exhaustive,
    quadratic_twist,
    sato_tate_histogram,
    theta,
    trace_sweep,
    twist_trace_check,
)
from adele_lab.errors import BadPrimeError, CapacityError, DomainError
from adele_lab.reports import SKIP, VIOLATION, summarize_congruences

CM_CURVE = ShortWeierstrassCurve(1, 0)
GENERIC_CURVE = ShortWeierstrassCurve(-1, 1)


class TestCurves(unittest.TestCase):

    def test_parse(self):
        self.assertEqual(ShortWeierstrassCurve.parse('-1,1'), GENERIC_CURVE)
        self.assertEqual(str(GENERIC_CURVE), '(-1,1)')
        with self.assertRaises(DomainError):
            ShortWeierstrassCurve.parse('1')
        with self.assertRaises(DomainError):
            ShortWeierstrassCurve.parse('a,b')

    def test_singular_curve(self):
        with self.assertRaises(DomainError):
            ShortWeierstrassCurve(0, 0)
        with self.assertRaises(DomainError):
            ShortWeierstrassCurve(-3, 2)

    def test_good_reduction(self):
        self.assertTrue(good_reduction(CM_CURVE, 5))
        self.assertFalse(good_reduction(CM_CURVE, 2))
        self.assertFalse(good_reduction(CM_CURVE, 3))
        # 4(-1)^3 + 27 = 23
        self.assertFalse(good_reduction(GENERIC_CURVE, 23))


class TestTraces(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(ap_trace(CM_CURVE, 5), 2)
        self.assertEqual(ap_trace(CM_CURVE, 7), 0)
        with self.assertRaises(BadPrimeError):
            ap_trace(GENERIC_CURVE, 23)

    def test_exhaustive_oracle(self):
        for E in (CM_CURVE, GENERIC_CURVE, ShortWeierstrassCurve(2, 3)):
            for p in PrimeWindow(5, 100):
                if good_reduction(E, p):
                    self.assertEqual(ap_trace(E, p), p + 1 - point_count_exhaustive(E, p), (str(E), p))

    def test_hasse_bound(self):
        records, _ = trace_sweep(GENERIC_CURVE, 5000)
        for r in records:
            self.assertLessEqual(r.ap * r.ap, 4 * r.p)
            self.assertTrue(0 <= r.theta <= math.pi)

    def test_cm_vanishing(self):
        records, bad = trace_sweep(CM_CURVE, 2000)
        self.assertEqual(bad, [2, 3])
        for r in records:
            if r.p % 4 == 3:
                self.assertEqual(r.ap, 0)
        for p in PrimeWindow(5, 500):
            if p % 3 == 2:
                self.assertEqual(ap_trace(ShortWeierstrassCurve(0, 1), p), 0)

    @pytest.mark.slow
    def test_full_range_sweeps(self):
        for E in (CM_CURVE, GENERIC_CURVE):
            records, _ = trace_sweep(E, 100000)
            self.assertTrue(all(r.ap * r.ap <= 4 * r.p for r in records), str(E))
            if E == CM_CURVE:
                self.assertEqual([r.p for r in records if r.p % 4 == 3 and r.ap != 0], [])

    def test_theta(self):
        self.assertAlmostEqual(theta(0, 7), math.pi / 2)
        self.assertAlmostEqual(theta(4, 4), 0.0)

    def test_sweep_cap(self):
        with self.assertRaises(CapacityError):
            trace_sweep(CM_CURVE, 10 ** 7)

    def test_alpha_E(self):
        element = alpha_E(GENERIC_CURVE, PrimeWindow(2, 100))
        self.assertIn(23, element.bad_primes)
        self.assertEqual(element.bad_primes, [2, 3, 23])
        self.assertEqual(alpha_E(CM_CURVE, PrimeWindow(5, 5)).values, (2,))


class TestSatoTate(unittest.TestCase):

    def test_histogram_is_a_distribution(self):
        records, _ = trace_sweep(GENERIC_CURVE, 20000)
        hist = histogram_from_traces(records, 20)
        self.assertAlmostEqual(sum(hist.empirical), 1.0)
        self.assertAlmostEqual(sum(hist.non_cm), 1.0, places=6)
        self.assertAlmostEqual(sum(hist.cm), 1.0, places=6)
        self.assertEqual(len(hist.rows()), 20)
        self.assertEqual(hist.to_dict()['count'], len(records))

    def test_cm_curve_concentrates_at_half_pi(self):
        hist = sato_tate_histogram(CM_CURVE, 20000, 101)
        self.assertGreater(hist.empirical[50], 0.45)
        self.assertEqual(hist.closer, 'cm')

    def test_bins_guardrail(self):
        records, _ = trace_sweep(CM_CURVE, 100)
        with self.assertRaises(DomainError):
            histogram_from_traces(records, 2)
        with self.assertRaises(DomainError):
            histogram_from_traces([], 10)

    def test_angle_fraction(self):
        self.assertEqual(angle_fraction([], 0, 1), 0.0)

    @pytest.mark.slow
    def test_non_cm_middle_third(self):
        records, _ = trace_sweep(GENERIC_CURVE, 100000)
        fraction = angle_fraction(records, math.pi / 3, 2 * math.pi / 3)
        self.assertAlmostEqual(fraction, 0.609, delta=0.03)
        self.assertEqual(histogram_from_traces(records, 30).closer, 'non_cm')

    def test_hasse_band(self):
        self.assertEqual(hasse_band_density(GENERIC_CURVE, 3000, -1, 1), 1.0)
        with self.assertRaises(DomainError):
            hasse_band_density(GENERIC_CURVE, 3000, 0.5, 0.2)


class TestTwists(unittest.TestCase):

    def test_twist_coefficients(self):
        self.assertEqual(quadratic_twist(GENERIC_CURVE, 2), ShortWeierstrassCurve(-4, 8))
        with self.assertRaises(DomainError):
            quadratic_twist(GENERIC_CURVE, 4)
        with self.assertRaises(DomainError):
            quadratic_twist(GENERIC_CURVE, 0)

    def test_twist_traces(self):
        window = PrimeWindow(5, 500)
        for d in (-1, 2, -3, 5):
            reports = twist_trace_check(GENERIC_CURVE, d, window)
            counts = summarize_congruences(reports)
            self.assertEqual(counts[VIOLATION], 0, d)
            self.assertTrue(all(r.skip_reason for r in reports if r.verdict == SKIP))

    def test_twist_relation_scan(self):
        window = PrimeWindow(7, 300)
        base = alpha_E(GENERIC_CURVE, window)
        twisted = alpha_E(quadratic_twist(GENERIC_CURVE, -1), window)
        report = relation_scan2(base, twisted, total_degree=2, h_max=1, max_exceptions=0)
        self.assertIn('x^2-y^2', [str(h.polynomial) for h in report.hits])
        self.assertEqual(report.bad_primes, [23])


class TestRelations(unittest.TestCase):

    def test_alpha_E_has_no_small_relation(self):
        element = alpha_E(GENERIC_CURVE, PrimeWindow(7, 500))
        report = relation_scan(element, d_max=3, h_max=10, max_exceptions=3)
        self.assertEqual(report.hits, [])


if __name__ == '__main__':
    unittest.main()
