"""
Special numbers
Bernoulli, Euler and Gregory numbers: exact rational oracles for small
indices and mod-p recurrences for sweeps, plus the elements Z_A(k), B, E
and the two-path G_A(k; x).

Conventions follow the generating functions
    t e^t / (e^t - 1) = sum B_n t^n / n!      (so B_1 = +1/2)
    sech t            = sum E_n t^n / n!
    t (1+t)^x / log(1+t) = sum G_n(x) t^n,  G_n = G_n(0)
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import NamedTuple, Tuple

import numpy as np

from .adele import TruncatedAdele, build
from .core import PrimeWindow, RationalLike, as_rational, fermat_quotient_value
from .errors import CapacityError, DomainError, PoleError
from .settings import parameter

logger = logging.getLogger(__name__)

KINDS = ('bernoulli', 'euler', 'gregory')


class ExactRationalSeq(NamedTuple):
    """Exact values indexed from 0"""
    kind: str
    values: Tuple[Fraction, ...]


def _check_exact_index(n: int) -> None:
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    cap = parameter('specialnums', 'exact_cap')
    if n > cap:
        raise CapacityError(f"exact oracle limited to n <= {cap}, got {n}")


@lru_cache(maxsize=None)
def _bernoulli_table(n_max: int) -> Tuple[Fraction, ...]:
    # sum_{j=0}^{m} binom(m+1, j) B_j = m + 1
    values = [Fraction(1)]
    for m in range(1, n_max + 1):
        s = sum(comb(m + 1, j) * values[j] for j in range(m))
        values.append((m + 1 - s) / (m + 1))
    return tuple(values)


@lru_cache(maxsize=None)
def _euler_table(n_max: int) -> Tuple[int, ...]:
    # sum_{j even <= n} binom(n, j) E_j = 0 for even n >= 2
    values = [1]
    for m in range(1, n_max + 1):
        if m % 2:
            values.append(0)
        else:
            values.append(-sum(comb(m, j) * values[j] for j in range(0, m, 2)))
    return tuple(values)


@lru_cache(maxsize=None)
def _gregory_table(n_max: int) -> Tuple[Fraction, ...]:
    # (t / log(1+t)) * (log(1+t) / t) = 1
    values = [Fraction(1)]
    for n in range(1, n_max + 1):
        s = sum(values[k] * Fraction((-1) ** (n - k), n - k + 1) for k in range(n))
        values.append(-s)
    return tuple(values)


def bernoulli_exact(n: int) -> Fraction:
    _check_exact_index(n)
    return _bernoulli_table(parameter('specialnums', 'exact_cap'))[n]


def euler_exact(n: int) -> int:
    _check_exact_index(n)
    return _euler_table(parameter('specialnums', 'exact_cap'))[n]


def gregory_exact(n: int) -> Fraction:
    _check_exact_index(n)
    return _gregory_table(parameter('specialnums', 'exact_cap'))[n]


def exact_sequence(kind: str, n: int) -> ExactRationalSeq:
    """Values 0..n of one family"""
    oracle = {'bernoulli': bernoulli_exact, 'euler': euler_exact, 'gregory': gregory_exact}
    if kind not in oracle:
        raise DomainError(f"unknown family {kind!r}; expected one of {KINDS}")
    return ExactRationalSeq(kind, tuple(Fraction(oracle[kind](i)) for i in range(n + 1)))


def gregory_poly_exact(n: int, x: int) -> Fraction:
    """G_n(x) = sum_m G_m binom(x, n-m)"""
    total = Fraction(0)
    for m in range(n + 1):
        total += gregory_exact(m) * _binom_general(x, n - m)
    return total


def _binom_general(x: int, j: int) -> Fraction:
    acc = Fraction(1)
    for i in range(j):
        acc = acc * (x - i) / (i + 1)
    return acc


def reduce_mod(value: Fraction, p: int) -> int:
    """Reduce an exact oracle value mod p; PoleError when p divides the denominator."""
    value = Fraction(value)
    if value.denominator % p == 0:
        raise PoleError(p, f"denominator of {value} divisible by p")
    return value.numerator * pow(value.denominator, -1, p) % p


# ---------------------------------------------------------------------------
# mod-p recurrences
# ---------------------------------------------------------------------------

def _check_vector_prime(p: int) -> None:
    if p >= 1 << 31:
        raise CapacityError(f"p={p} too large for vectorized recurrences")


@lru_cache(maxsize=256)
def _bernoulli_residues(n: int, p: int) -> Tuple[int, ...]:
    """B_0..B_n mod p for n <= p-2 (no pole reachable)."""
    _check_vector_prime(p)
    values = np.zeros(n + 1, dtype=np.int64)
    values[0] = 1
    row = np.zeros(n + 2, dtype=np.int64)
    row[:2] = 1  # binom(1, .)
    for m in range(1, n + 1):
        row[1:m + 2] = (row[1:m + 2] + row[0:m + 1]) % p  # now binom(m+1, .)
        if m >= 3 and m % 2:
            continue
        s = int(((row[:m] * values[:m]) % p).sum() % p)
        values[m] = (m + 1 - s) * pow(m + 1, -1, p) % p
    return tuple(values.tolist())


def bernoulli_mod(n: int, p: int) -> int:
    """B_n mod p; raises PoleError when p divides the denominator (n even, (p-1) | n)"""
    if p <= 3:
        raise DomainError(f"bernoulli_mod needs p > 3, got {p}")
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    if n == 0:
        return 1
    if n == 1:
        return pow(2, -1, p)
    if n % 2:
        return 0
    if n % (p - 1) == 0:
        raise PoleError(p, f"(p-1) divides {n}")
    if n <= p - 2:
        return _bernoulli_residues(n, p)[n]
    # Kummer: B_n / n = B_m / m (mod p) for n = m (mod p-1), p-1 not dividing n
    m = n % (p - 1)
    return n * _bernoulli_residues(m, p)[m] * pow(m, -1, p) % p


@lru_cache(maxsize=256)
def _euler_residues(n: int, p: int) -> Tuple[int, ...]:
    _check_vector_prime(p)
    values = np.zeros(n + 1, dtype=np.int64)
    values[0] = 1 % p
    row = np.zeros(n + 1, dtype=np.int64)
    row[0] = 1  # binom(0, .)
    for m in range(1, n + 1):
        row[1:m + 1] = (row[1:m + 1] + row[0:m]) % p  # now binom(m, .)
        if m % 2:
            continue
        values[m] = -int(((row[:m] * values[:m]) % p).sum()) % p
    return tuple(values.tolist())


def euler_mod(n: int, p: int) -> int:
    """E_n mod p (integers, so no pole)"""
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    if n % 2:
        return 0
    return _euler_residues(n, p)[n]


@lru_cache(maxsize=256)
def _gregory_residues(n: int, p: int) -> Tuple[int, ...]:
    _check_vector_prime(p)
    # c[m] = (-1)^m / (m+1) mod p, m = 1..n
    c = np.zeros(n + 1, dtype=np.int64)
    for m in range(1, n + 1):
        c[m] = (-1) ** m * pow(m + 1, -1, p) % p
    values = np.zeros(n + 1, dtype=np.int64)
    values[0] = 1
    for k in range(1, n + 1):
        # G_k = -sum_{i<k} G_i c[k-i]
        values[k] = -int(((values[:k] * c[k:0:-1]) % p).sum()) % p
    return tuple(values.tolist())


def _check_gregory(n: int, p: int) -> None:
    if n < 0:
        raise DomainError(f"index must be >= 0, got {n}")
    if n > p - 2:
        raise PoleError(p, f"Gregory index {n} needs denominators up to {n + 1} >= p")


def gregory_mod(n: int, p: int) -> int:
    _check_gregory(n, p)
    return _gregory_residues(n, p)[n]


def gregory_poly_mod(n: int, x: int, p: int) -> int:
    """G_n(x) mod p, convolving Gregory coefficients with binom(x, m) mod p"""
    _check_gregory(n, p)
    greg = _gregory_residues(n, p)
    binoms = [1]
    for j in range(1, n + 1):
        binoms.append(binoms[-1] * ((x - j + 1) % p) * pow(j, -1, p) % p)
    return sum(greg[m] * binoms[n - m] for m in range(n + 1)) % p


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

def z_A(k: int, window: PrimeWindow) -> TruncatedAdele:
    """Z_A(k) = (B_{p-k} / k mod p)_p; primes p <= k+2 are bad"""
    if k < 2:
        raise DomainError(f"Z_A(k) needs k >= 2, got {k}")

    def rule(p: int):
        if p <= k + 2:
            return None
        return bernoulli_mod(p - k, p) * pow(k, -1, p)

    return build(window, rule, provenance=f"Z_A({k})")


def script_B(window: PrimeWindow) -> TruncatedAdele:
    """B = (B_{(p+1)/2} mod p)_p; primes below 5 are bad"""
    return build(window, lambda p: None if p < 5 else bernoulli_mod((p + 1) // 2, p), provenance='scriptB')


def script_E(window: PrimeWindow) -> TruncatedAdele:
    """E = (E_{(p-1)/2} mod p)_p; primes below 5 are bad"""
    return build(window, lambda p: None if p < 5 else euler_mod((p - 1) // 2, p), provenance='scriptE')


def log_A_element(alpha: RationalLike, window: PrimeWindow) -> TruncatedAdele:
    """log_A(alpha) = (q_p(alpha) mod p)_p"""
    alpha = as_rational(alpha)
    return build(window, lambda p: fermat_quotient_value(alpha, p), provenance=f"logA({alpha})")


def _check_g_hypothesis(k: int, x: int) -> None:
    if k < 2:
        raise DomainError(f"G_A(k; x) needs k >= 2, got {k}")
    if -k - 1 <= x <= -1:
        raise DomainError(f"x={x} lies in the excluded interval [{-k - 1}, -1]")


def _g_bad(k: int, x: int, p: int) -> bool:
    if p <= max(k + 2, abs(x) + k + 2):
        return True
    return any((x + j + 1) % p == 0 for j in range(k + 1))


def g_A(k: int, x: int, window: PrimeWindow) -> Tuple[TruncatedAdele, TruncatedAdele]:
    """
    G_A(k; x) two ways:
      A: (G_{p-k}(x) mod p)_p
      B: (-1)^(k-1) sum_j (-1)^j binom(k, j) (x+j+1) q_p(x+j+1)
    """
    _check_g_hypothesis(k, x)
    sign = -1 if k % 2 == 0 else 1

    def path_a(p: int):
        return None if _g_bad(k, x, p) else gregory_poly_mod(p - k, x, p)

    def path_b(p: int):
        if _g_bad(k, x, p):
            return None
        total = 0
        for j in range(k + 1):
            base = x + j + 1
            total += (-1) ** j * comb(k, j) * base * fermat_quotient_value(base, p)
        return sign * total % p

    return (build(window, path_a, provenance=f"G_A({k};{x}) gregory"),
            build(window, path_b, provenance=f"G_A({k};{x}) log"))


def h_k_rational(k: int, x: int) -> Fraction:
    """h_k(x) = prod_j (x+j+1)^((-1)^j (x+j+1) binom(k, j))"""
    _check_g_hypothesis(k, x)
    value = Fraction(1)
    for j in range(k + 1):
        base = x + j + 1
        value *= Fraction(base) ** ((-1) ** j * base * comb(k, j))
    return value


def g_A_from_h(k: int, x: int, window: PrimeWindow) -> TruncatedAdele:
    """Third path: (-1)^(k-1) log_A(h_k(x))"""
    h = h_k_rational(k, x)
    sign = -1 if k % 2 == 0 else 1
    return build(
        window,
        lambda p: None if _g_bad(k, x, p) else sign * fermat_quotient_value(h, p),
        provenance=f"G_A({k};{x}) via h_k",
    )


def h_k_symmetry_holds(k: int, x: int) -> bool:
    """h_k(-k-2-x) == h_k(x)^((-1)^(k+1))"""
    return h_k_rational(k, -k - 2 - x) == h_k_rational(k, x) ** ((-1) ** (k + 1))


def bernoulli_recurrence_residual(n: int) -> Fraction:
    """sum_{j<=n} binom(n+1, j) B_j - (n+1); zero under the B_1 = +1/2 convention"""
    return sum((comb(n + 1, j) * bernoulli_exact(j) for j in range(n + 1)), Fraction(0)) - (n + 1)
