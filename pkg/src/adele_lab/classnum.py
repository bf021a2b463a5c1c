"""
Class numbers of imaginary quadratic fields

Two independent algorithms for h(D), D < 0 fundamental:
  * counting reduced primitive forms ax^2 + bxy + cy^2, b^2 - 4ac = D
  * the character sum h(D) = (2 - chi_D(2))^(-1) sum_{1<=a<=(|D|-1)/2} chi_D(a), D < -4
and the Cauchy / Carlitz congruences tying h(-p), h(-4p) to B_{(p+1)/2}
and E_{(p-1)/2}.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, List, Sequence

import numpy as np
from scipy import stats

from .core import PrimeWindow, is_prime, is_squarefree, primes_in
from .errors import CapacityError, DomainError
from .reports import CongruenceReport, compare, skipped
from .settings import parameter
from .specialnums import bernoulli_mod, euler_mod

logger = logging.getLogger(__name__)


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def _check_discriminant(D: int) -> None:
    if D >= 0:
        raise DomainError(f"expected a negative discriminant, got {D}")
    if -D > parameter('classnum', 'max_abs_discriminant'):
        raise CapacityError(f"|D| = {-D} exceeds the class number cap")
    if not is_fundamental(D):
        raise DomainError(f"{D} is not a fundamental discriminant")


def class_number_forms(D: int) -> int:
    """
    Count reduced primitive positive definite forms of discriminant D.

    Reduced means |b| <= a <= c. The forms (a, b, c) and (a, -b, c) are
    equivalent exactly when b = 0, |b| = a or a = c; in those cases only
    b >= 0 is kept, otherwise both signs are counted.
    """
    _check_discriminant(D)
    h = 0
    b = D % 2
    b_max = math.isqrt(-D // 3)
    while b <= b_max:
        four_ac = b * b - D
        a = max(b, 1)
        while a * a <= four_ac // 4:
            if four_ac % (4 * a) == 0:
                c = four_ac // (4 * a)
                if c >= a and math.gcd(math.gcd(a, b), c) == 1:
                    h += 1 if (b == 0 or b == a or a == c) else 2
            a += 1
        b += 2
    return h


# ---------------------------------------------------------------------------
# Character sum
# ---------------------------------------------------------------------------

def _powmod_vec(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    result = np.ones_like(base)
    b = base % mod
    e = exp.copy()
    while e.any():
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * b % mod, result)
        b = b * b % mod
        e >>= 1
    return result


@lru_cache(maxsize=4)
def _factor_table(limit: int):
    """
    Prime index table and, for every a <= limit, the indices of its prime
    factors with multiplicity (index 0 is a padding slot whose character value is 1).
    """
    primes = np.array(primes_in(PrimeWindow(2, max(limit, 2))), dtype=np.int64)
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes.tolist():
        if p * p > limit:
            break
        block = spf[p * p::p]
        block[block == 0] = p
    unset = spf == 0
    spf[unset] = np.arange(limit + 1)[unset]
    spf[:2] = 1

    position = np.zeros(limit + 1, dtype=np.int64)
    position[primes] = np.arange(1, len(primes) + 1)

    columns = []
    current = np.arange(limit + 1, dtype=np.int64)
    while (current > 1).any():
        f = np.where(current > 1, spf[current], 1)
        columns.append(np.where(current > 1, position[f], 0))
        current = current // f
    factor_idx = np.stack(columns, axis=1).astype(np.int32) if columns else np.zeros((limit + 1, 1), dtype=np.int32)
    return primes, factor_idx


def kronecker_table(D: int, n: int) -> np.ndarray:
    """chi_D(a) for a = 0..n by complete multiplicativity from its prime values."""
    limit = max(n, 2)
    size = 1 << (limit - 1).bit_length()
    primes, factor_idx = _factor_table(size)
    chi_p = np.ones(len(primes) + 1, dtype=np.int64)
    odd = primes[1:]
    euler = _powmod_vec(np.full(len(odd), D, dtype=np.int64) % odd, (odd - 1) // 2, odd)
    chi_odd = np.where(euler == odd - 1, -1, euler)
    chi_p[2:] = chi_odd
    if D % 2 == 0:
        chi_p[1] = 0
    else:
        chi_p[1] = 1 if D % 8 == 1 else -1
    chi = chi_p[factor_idx[:n + 1]].prod(axis=1)
    chi[0] = 0
    return chi


def _legendre_table(p: int) -> np.ndarray:
    """(a/p) for a = 0..p-1"""
    squares = np.zeros(p, dtype=bool)
    squares[(np.arange(1, p, dtype=np.int64) ** 2) % p] = True
    table = np.where(squares, 1, -1)
    table[0] = 0
    return table


def class_number_charsum(D: int) -> int:
    """h(D) for D < -4 from the half-range character sum; D >= -4 uses forms."""
    if D >= -4:
        return class_number_forms(D)
    _check_discriminant(D)
    half = (-D - 1) // 2
    if D % 4 == 1 and is_prime(-D):
        # chi_{-p} is the Legendre symbol mod p for p = 3 mod 4
        chi = _legendre_table(-D)[:half + 1]
    else:
        chi = kronecker_table(D, half)
    chi2 = 0 if D % 2 == 0 else (1 if D % 8 == 1 else -1)
    total = int(chi[1:half + 1].sum())
    h, rem = divmod(total, 2 - chi2)
    if rem or h <= 0:
        raise DomainError(f"character sum {total} for D={D} is not a valid class number")
    return h


def class_number(D: int) -> int:
    return class_number_charsum(D) if D < -4 else class_number_forms(D)


# ---------------------------------------------------------------------------
# Congruences
# ---------------------------------------------------------------------------

def verify_cauchy(p: int) -> CongruenceReport:
    """-2 B_{(p+1)/2} == h(-p) (mod p) for p > 3, p == 3 mod 4"""
    if p <= 3 or p % 4 != 3:
        return skipped('cauchy', p, 'needs p > 3 with p = 3 mod 4')
    lhs = -2 * bernoulli_mod((p + 1) // 2, p)
    return compare('cauchy', p, lhs, class_number_forms(-p))


def verify_carlitz(p: int) -> CongruenceReport:
    """E_{(p-1)/2} / 2 == h(-4p) (mod p) for p == 1 mod 4"""
    if p % 4 != 1:
        return skipped('carlitz', p, 'needs p = 1 mod 4')
    lhs = euler_mod((p - 1) // 2, p) * pow(2, -1, p)
    return compare('carlitz', p, lhs, class_number_forms(-4 * p))


def sweep_cauchy(window: PrimeWindow) -> List[CongruenceReport]:
    return [verify_cauchy(p) for p in window]


def sweep_carlitz(window: PrimeWindow) -> List[CongruenceReport]:
    return [verify_carlitz(p) for p in window]


def class_number_bounds(window: PrimeWindow) -> Dict[str, List[int]]:
    """Primes where 0 < h(-p) < p (p = 3 mod 4) or 0 < h(-4p) < p (p = 1 mod 4) fails."""
    failures: Dict[str, List[int]] = {'h(-p)': [], 'h(-4p)': []}
    for p in window:
        if p > 3 and p % 4 == 3:
            h = class_number(-p)
            if not 0 < h < p:
                failures['h(-p)'].append(p)
        elif p % 4 == 1:
            h = class_number(-4 * p)
            if not 0 < h < p:
                failures['h(-4p)'].append(p)
    return failures


def fundamental_discriminants(lo: int, hi: int) -> List[int]:
    """Negative fundamental discriminants D with lo < D < hi (lo < hi <= 0)."""
    return [D for D in range(lo + 1, hi) if is_fundamental(D)]


def class_number_growth(scales: Sequence[int], exponent: float = None) -> Dict:
    """
    max h(D) over fundamental -X < D < 0 for each X, the constant
    C = max_X maxh / X^exponent, and the fitted log-log slope.
    """
    exponent = parameter('classnum', 'growth_exponent') if exponent is None else exponent
    rows = []
    for X in scales:
        best = max(class_number(D) for D in fundamental_discriminants(-X, 0))
        rows.append({'X': X, 'max_h': best, 'ratio': best / X ** exponent})
    constant = max(r['ratio'] for r in rows)
    fit = stats.linregress(np.log([r['X'] for r in rows]), np.log([r['max_h'] for r in rows])) if len(rows) > 1 else None
    slope = float(fit.slope) if fit is not None else None
    logger.info(f"class number growth: C={constant:.4f}, slope={slope}")
    return {'exponent': exponent, 'constant': constant, 'slope': slope, 'rows': rows}
