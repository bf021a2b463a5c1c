"""
Property-based checks
Randomized identities over Fermat quotients, q-series paths, element
arithmetic and the Phi_ell factor structure.
"""

import os
import sys
import unittest
from math import gcd

from hypothesis import assume, given, settings, strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from adele_lab.adele import from_values
from adele_lab.core import PrimeWindow, fermat_quotient_value, primes_in
from adele_lab.experiments import phi_ell_analysis
from adele_lab.qpoly import QContext, bressoud, q_binomial_row

ODD_PRIMES = primes_in(PrimeWindow(3, 2000))
WINDOW = PrimeWindow(2, 60)

primes = st.sampled_from(ODD_PRIMES)
window_values = st.lists(st.integers(min_value=0, max_value=10 ** 6),
                         min_size=len(WINDOW), max_size=len(WINDOW))


class TestFermatQuotientProperties(unittest.TestCase):

    @given(a=st.integers(min_value=2, max_value=10 ** 6), b=st.integers(min_value=2, max_value=10 ** 6), p=primes)
    def test_additive(self, a, b, p):
        assume(a % p and b % p)
        lhs = fermat_quotient_value(a * b, p)
        rhs = (fermat_quotient_value(a, p) + fermat_quotient_value(b, p)) % p
        self.assertEqual(lhs, rhs)

    @given(a=st.integers(min_value=2, max_value=10 ** 4), k=st.integers(min_value=1, max_value=20), p=primes)
    def test_powers_scale(self, a, k, p):
        assume(a % p)
        self.assertEqual(fermat_quotient_value(a ** k, p), k * fermat_quotient_value(a, p) % p)

    @given(p=primes)
    def test_minus_one(self, p):
        self.assertEqual(fermat_quotient_value(-1, p), 0)


class TestQSeriesProperties(unittest.TestCase):

    @settings(max_examples=50, deadline=None)
    @given(q=st.integers(min_value=2, max_value=50), p=primes, n=st.integers(min_value=0, max_value=40))
    def test_binomial_symmetry(self, q, p, n):
        assume(q % p)
        row = q_binomial_row(n, QContext.make(q, p)).tolist()
        self.assertEqual(row, row[::-1])

    @settings(max_examples=50, deadline=None)
    @given(q=st.integers(min_value=2, max_value=50), p=primes, n=st.integers(min_value=0, max_value=40))
    def test_bressoud_paths(self, q, p, n):
        assume(q % p)
        rec, summed = bressoud(n, QContext.make(q, p))
        self.assertEqual(rec, summed)


class TestElementProperties(unittest.TestCase):

    @given(a=window_values, b=window_values, c=window_values)
    def test_distributive(self, a, b, c):
        alpha, beta, gamma = (from_values(WINDOW, v) for v in (a, b, c))
        self.assertEqual(((alpha + beta) * gamma).values, (alpha * gamma + beta * gamma).values)

    @given(a=window_values)
    def test_additive_inverse(self, a):
        alpha = from_values(WINDOW, a)
        self.assertTrue(all(v == 0 for v in (alpha + (-alpha)).values))


class TestPhiEllProperties(unittest.TestCase):

    @settings(max_examples=30, deadline=None)
    @given(u=st.integers(min_value=2, max_value=6), v=st.integers(min_value=1, max_value=5),
           ell=st.sampled_from([7, 11, 13]))
    def test_factor_structure(self, u, v, ell):
        assume(u > v and gcd(u, v) == 1)
        report = phi_ell_analysis(u, v, ell, 1, 1)
        self.assertTrue(report.complete)
        self.assertTrue(report.reconstructs)
        self.assertTrue(report.factors_one_mod_ell)
        self.assertTrue(report.consistent_mod_u_minus_v)
        self.assertTrue(all(report.log_identity.values()))
        for p, t in report.t_values.items():
            expected = ((u - v) * t + ell * v ** ell) % p
            self.assertEqual(report.contra_residues[p], expected)


if __name__ == '__main__':
    unittest.main()
