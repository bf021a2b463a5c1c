"""
Core arithmetic
Prime windows, segmented sieve and exact modular arithmetic

Everything here is a pure function of its inputs except the shared sieve,
which grows under a lock and is read-only between growth steps.
"""

import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterator, List, Union

import numpy as np

from .errors import BadPrimeError, CapacityError, DomainError
from .settings import parameter

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Residue:
    """A residue class ``value mod modulus`` with 0 <= value < modulus."""

    value: int
    modulus: int

    def __post_init__(self):
        if not 0 <= self.value < self.modulus:
            raise DomainError(f"residue {self.value} outside [0, {self.modulus})")

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.value} (mod {self.modulus})"


@dataclass(frozen=True)
class PrimeWindow:
    """Closed integer interval [lo, hi]; iterating yields its primes in order."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.hi < self.lo:
            raise DomainError(f"window hi={self.hi} below lo={self.lo}")

    @cached_property
    def primes(self) -> List[int]:
        return primes_in(self)

    def __iter__(self) -> Iterator[int]:
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def __contains__(self, p: object) -> bool:
        return isinstance(p, int) and self.lo <= p <= self.hi and is_prime(p)

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


def as_rational(value: RationalLike) -> Fraction:
    """ReducedRational from an int, Fraction or 'u/v' string (lowest terms, den > 0)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"not a rational number: {value!r}")


# ---------------------------------------------------------------------------
# Sieve
# ---------------------------------------------------------------------------

def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i::i] = False
    return flags


def _segmented_sieve(limit: int, segment_size: int) -> np.ndarray:
    """Primality flags for 0..limit, sieved one segment at a time."""
    base = np.flatnonzero(_simple_sieve(math.isqrt(limit))).tolist()
    flags = np.zeros(limit + 1, dtype=bool)
    for low in range(0, limit + 1, segment_size):
        high = min(low + segment_size, limit + 1)
        segment = np.ones(high - low, dtype=bool)
        for p in base:
            start = max(p * p, -(-low // p) * p)
            if start >= high:
                continue
            segment[start - low::p] = False
        flags[low:high] = segment
    flags[:2] = False
    return flags


class PrimeSieve:
    """
    Lazily grown prime table shared by every sweep.

    Growth doubles the covered range (capped at the configured ceiling) and
    happens under a lock; lookups never mutate.
    """

    def __init__(self, initial_limit: int = 1 << 16):
        self._lock = threading.Lock()
        self._limit = 0
        self._flags = np.zeros(0, dtype=bool)
        self._primes = np.zeros(0, dtype=np.int64)
        self._initial_limit = initial_limit

    @property
    def limit(self) -> int:
        return self._limit

    def ensure(self, n: int) -> None:
        if n <= self._limit:
            return
        ceiling = parameter('sieve', 'ceiling')
        if n > ceiling:
            raise CapacityError(f"{n} exceeds the sieve ceiling {ceiling}")
        with self._lock:
            if n <= self._limit:
                return
            target = min(ceiling, max(n, 2 * self._limit, self._initial_limit))
            flags = _segmented_sieve(target, parameter('sieve', 'segment_size'))
            self._primes = np.flatnonzero(flags).astype(np.int64)
            self._flags = flags
            self._limit = target
            logger.debug(f"Sieve extended to {target} ({len(self._primes)} primes)")

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        self.ensure(n)
        return bool(self._flags[n])

    def primes_between(self, lo: int, hi: int) -> np.ndarray:
        self.ensure(max(hi, 2))
        start = np.searchsorted(self._primes, lo, side='left')
        stop = np.searchsorted(self._primes, hi, side='right')
        return self._primes[start:stop]

    def count(self, x: int) -> int:
        if x < 2:
            return 0
        self.ensure(x)
        return int(np.searchsorted(self._primes, x, side='right'))

    def nth(self, n: int) -> int:
        if n < 1:
            raise DomainError(f"nth_prime needs n >= 1, got {n}")
        # Rosser: p_n < n (ln n + ln ln n) for n >= 6
        bound = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 1
        self.ensure(bound)
        return int(self._primes[n - 1])


_SIEVE = PrimeSieve()


def primes_array(window: PrimeWindow) -> np.ndarray:
    """Primes of the window as an int64 array (shared storage, do not mutate)."""
    return _SIEVE.primes_between(window.lo, window.hi)


def primes_in(window: PrimeWindow) -> List[int]:
    return primes_array(window).tolist()


def prime_count(x: int) -> int:
    """pi(x)"""
    return _SIEVE.count(x)


def nth_prime(n: int) -> int:
    return _SIEVE.nth(n)


def is_prime(n: int) -> bool:
    return _SIEVE.is_prime(n)


# ---------------------------------------------------------------------------
# Modular arithmetic
# ---------------------------------------------------------------------------

def _check_modulus(m: int) -> None:
    if m < 2:
        raise DomainError(f"modulus must be >= 2, got {m}")
    if m > 1 << parameter('arithmetic', 'modulus_bits'):
        raise CapacityError(f"modulus {m} exceeds the arithmetic width contract")


def pow_mod(base: int, exp: int, m: int) -> Residue:
    _check_modulus(m)
    if exp < 0:
        raise DomainError(f"negative exponent {exp}")
    return Residue(pow(base % m, exp, m), m)


def inverse_mod(a: int, m: int) -> int:
    try:
        return pow(a % m, -1, m)
    except ValueError:
        raise DomainError(f"{a} is not invertible modulo {m}")


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise DomainError(f"{p} is not an odd prime")
    if p <= parameter('sieve', 'ceiling') and not is_prime(p):
        raise DomainError(f"{p} is composite")


def legendre(a: int, p: int) -> int:
    _check_odd_prime(p)
    return legendre_unchecked(a, p)


def legendre_unchecked(a: int, p: int) -> int:
    """Euler's criterion for a prime p already known to be odd."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _tonelli_shanks(a: int, p: int) -> int:
    """A square root of the nonzero quadratic residue a modulo the odd prime p."""
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def sqrt_mod_values(a: int, p: int) -> List[int]:
    """Sorted square roots of a modulo the odd prime p (no validation)."""
    a %= p
    if a == 0:
        return [0]
    if legendre_unchecked(a, p) != 1:
        return []
    r = _tonelli_shanks(a, p)
    return sorted({r, p - r})


def sqrt_mod(a: int, p: int) -> FrozenSet[Residue]:
    _check_odd_prime(p)
    return frozenset(Residue(r, p) for r in sqrt_mod_values(a, p))


@lru_cache(maxsize=65536)
def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of n > 0 by trial division."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors.append(n)
    return factors


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    return all((n // ell) % ell for ell in prime_factors(n))


def reduce_rational(q: RationalLike, p: int) -> int:
    """q mod p for a p-integral unit q; raises BadPrimeError otherwise."""
    q = as_rational(q)
    if q.numerator % p == 0:
        raise BadPrimeError(p, f"p divides numerator of {q}")
    if q.denominator % p == 0:
        raise BadPrimeError(p, f"p divides denominator of {q}")
    return q.numerator * pow(q.denominator, -1, p) % p


def order_of_residue(r: int, p: int) -> int:
    """Multiplicative order of a nonzero residue r mod the prime p."""
    d = p - 1
    for ell in prime_factors(p - 1) if p > 2 else []:
        while d % ell == 0 and pow(r, d // ell, p) == 1:
            d //= ell
    return d


def mult_order(q: RationalLike, p: int) -> int:
    """ord_p(q)"""
    return order_of_residue(reduce_rational(q, p), p)


def index(q: RationalLike, p: int) -> int:
    """I_p(q) = (p - 1) / ord_p(q)"""
    return (p - 1) // mult_order(q, p)


def fermat_quotient_value(alpha: RationalLike, p: int) -> int:
    """(alpha^(p-1) - 1)/p mod p as a plain int, via lifting to p^2."""
    alpha = as_rational(alpha)
    if p >= parameter('arithmetic', 'fermat_quotient_max_prime'):
        raise CapacityError(f"p={p} too large for p^2 lifting")
    if alpha.numerator % p == 0 or alpha.denominator % p == 0:
        raise BadPrimeError(p, f"{alpha} is not a p-adic unit")
    m = p * p
    num = pow(alpha.numerator % m, p - 1, m)
    den = pow(alpha.denominator % m, p - 1, m)
    r = num * pow(den, -1, m) % m
    return (r - 1) // p % p


def fermat_quotient(alpha: RationalLike, p: int) -> Residue:
    return Residue(fermat_quotient_value(alpha, p), p)


def factor_multiplicities(n: int) -> Dict[int, int]:
    """Prime factorization of n > 0 by trial division."""
    result: Dict[int, int] = {}
    for ell in prime_factors(n):
        k = 0
        while n % ell == 0:
            n //= ell
            k += 1
        result[ell] = k
    return result
