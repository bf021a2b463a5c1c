"""
q-series modulo p
q-Pochhammer symbols, Gaussian binomials, q-Fibonacci (Schur) and Bressoud
polynomials evaluated at a rational q reduced mod p, with verifiers for
the congruences linking them to ord_p(q) and I_p(q).

q-binomials come from the q-Pascal recurrence, never from dividing
Pochhammer symbols: (q)_k vanishes mod p exactly where the congruences live.
q = 1 is routed to the classical integer paths.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Tuple

import numpy as np

from .adele import TruncatedAdele, build
from .core import PrimeWindow, RationalLike, Residue, as_rational, legendre, order_of_residue, reduce_rational
from .errors import BadPrimeError, CapacityError, ConsistencyError, DomainError
from .reports import CongruenceReport, compare, skipped

logger = logging.getLogger(__name__)

EXACT_FIBONACCI_CAP = 40


@dataclass(frozen=True)
class QContext:
    """q together with its reduction modulo p (p must not divide num or den of q)."""

    q: Fraction
    p: int
    qres: Residue

    @classmethod
    def make(cls, q: RationalLike, p: int) -> 'QContext':
        q = as_rational(q)
        return cls(q, p, Residue(reduce_rational(q, p), p))

    @property
    def r(self) -> int:
        return self.qres.value

    @property
    def is_one(self) -> bool:
        return self.q == 1

    def order(self) -> int:
        return order_of_residue(self.r, self.p)

    def index(self) -> int:
        return (self.p - 1) // self.order()


def q_pochhammer(ctx: QContext, n: int) -> Residue:
    """(q)_n = (1-q)(1-q^2)...(1-q^n) mod p"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    p, acc, qi = ctx.p, 1, 1
    for _ in range(n):
        qi = qi * ctx.r % p
        acc = acc * (1 - qi) % p
    return Residue(acc, p)


def _qpowers(ctx: QContext, n: int) -> np.ndarray:
    if ctx.p >= 1 << 31:
        raise CapacityError(f"p={ctx.p} too large for vectorized q-Pascal rows")
    out = np.ones(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        out[i] = out[i - 1] * ctx.r % ctx.p
    return out


def _pascal_rows(n: int, ctx: QContext):
    """Yield rows binom(m, .)_q mod p for m = 0..n as int64 arrays of length m+1."""
    p = ctx.p
    qpow = _qpowers(ctx, n)
    row = np.ones(1, dtype=np.int64)
    yield row
    for m in range(1, n + 1):
        new = np.ones(m + 1, dtype=np.int64)
        new[1:m] = (row[:m - 1] + qpow[1:m] * row[1:m]) % p
        row = new
        yield row


def q_binomial_row(n: int, ctx: QContext) -> np.ndarray:
    """binom(n, k)_q mod p for k = 0..n"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if ctx.is_one:
        return np.array([comb(n, k) % ctx.p for k in range(n + 1)], dtype=np.int64)
    row = None
    for row in _pascal_rows(n, ctx):
        pass
    return row


def q_binomial(n: int, k: int, ctx: QContext) -> Residue:
    if not 0 <= k <= n:
        raise DomainError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    if ctx.is_one:
        return Residue(comb(n, k) % ctx.p, ctx.p)
    return Residue(int(q_binomial_row(n, ctx)[k]), ctx.p)


# ---------------------------------------------------------------------------
# Fibonacci
# ---------------------------------------------------------------------------

def _fib_pair(n: int, m: int) -> Tuple[int, int]:
    """(F_n, F_{n+1}) mod m by fast doubling."""
    if n == 0:
        return 0, 1 % m
    a, b = _fib_pair(n >> 1, m)
    c = a * ((2 * b - a) % m) % m
    d = (a * a + b * b) % m
    return (d, (c + d) % m) if n & 1 else (c, d)


def fibonacci_mod(n: int, m: int) -> Residue:
    """Classical F_n mod m"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if m < 1:
        raise DomainError(f"modulus must be positive, got {m}")
    return Residue(_fib_pair(n, m)[0], m)


def q_fibonacci(n: int, ctx: QContext) -> Residue:
    """F_n(q) mod p from F_0 = 0, F_1 = 1, F_{m+2} = F_{m+1} + q^m F_m"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if ctx.is_one:
        return fibonacci_mod(n, ctx.p)
    p, r = ctx.p, ctx.r
    prev, cur, qm = 0, 1, 1
    if n == 0:
        return Residue(0, p)
    for _ in range(n - 1):
        prev, cur = cur, (cur + qm * prev) % p
        qm = qm * r % p
    return Residue(cur, p)


def q_fibonacci_exact(n: int, q: int) -> int:
    """F_n(q) as an exact integer, n <= 40"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > EXACT_FIBONACCI_CAP:
        raise CapacityError(f"exact q-Fibonacci limited to n <= {EXACT_FIBONACCI_CAP}")
    if n == 0:
        return 0
    prev, cur, qm = 0, 1, 1
    for _ in range(n - 1):
        prev, cur = cur, cur + qm * prev
        qm *= q
    return cur


def q_fibonacci_sum(n: int, ctx: QContext) -> Residue:
    """F_{n+1}(q) = sum_k q^(k^2) binom(n-k, k)_q"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    p, r = ctx.p, ctx.r
    rows = list(_pascal_rows(n, ctx)) if not ctx.is_one else None
    total = 0
    for k in range(n // 2 + 1):
        b = comb(n - k, k) % p if ctx.is_one else int(rows[n - k][k])
        total += pow(r, k * k, p) * b
    return Residue(total % p, p)


def _pentagonal_sum(top: int, lower, ctx: QContext, row: np.ndarray) -> int:
    """sum_k (-1)^k q^(k(5k+1)/2) binom(top, lower(k))_q over all k with a nonzero binomial."""
    p, r = ctx.p, ctx.r
    total = 0
    k = 0
    while lower(k) <= top:
        total += _pentagonal_term(k, top, lower, r, p, row)
        k += 1
    k = -1
    while lower(k) >= 0:
        total += _pentagonal_term(k, top, lower, r, p, row)
        k -= 1
    return total % p


def _pentagonal_term(k, top, lower, r, p, row) -> int:
    j = lower(k)
    if not 0 <= j <= top:
        return 0
    sign = -1 if k % 2 else 1
    return sign * pow(r, k * (5 * k + 1) // 2, p) * int(row[j])


def q_fibonacci_alternating(n: int, ctx: QContext) -> Residue:
    """F_{n+1}(q) = sum_k (-1)^k q^(k(5k+1)/2) binom(n, floor((n+5k+1)/2))_q"""
    row = q_binomial_row(n, ctx)
    return Residue(_pentagonal_sum(n, lambda k: (n + 5 * k + 1) // 2, ctx, row), ctx.p)


# ---------------------------------------------------------------------------
# Bressoud
# ---------------------------------------------------------------------------

def bressoud_recurrence(n: int, ctx: QContext) -> int:
    """D_n(q) mod p from D_n = (1+q-q^n+q^(2n-1)) D_{n-1} - q(1-q^(n-1)) D_{n-2}"""
    p, r = ctx.p, ctx.r
    if n == 0:
        return 1 % p
    d_prev, d_cur = 1, (1 + r) % p
    qn1 = r  # q^(n-1)
    for m in range(2, n + 1):
        qm = qn1 * r % p
        q2m1 = qm * qn1 % p
        d_prev, d_cur = d_cur, ((1 + r - qm + q2m1) * d_cur - r * (1 - qn1) * d_prev) % p
        qn1 = qm
    return d_cur


def bressoud_sum(n: int, ctx: QContext) -> int:
    """D_n(q) mod p as sum_k q^(k^2) binom(n, k)_q"""
    p, r = ctx.p, ctx.r
    row = q_binomial_row(n, ctx)
    total = 0
    for k in range(n + 1):
        total += pow(r, k * k, p) * int(row[k])
    return total % p


def bressoud_alternating(n: int, ctx: QContext) -> Residue:
    """D_n(q) = sum_k (-1)^k q^(k(5k+1)/2) binom(2n, n+2k)_q"""
    row = q_binomial_row(2 * n, ctx)
    return Residue(_pentagonal_sum(2 * n, lambda k: n + 2 * k, ctx, row), ctx.p)


def bressoud(n: int, ctx: QContext) -> Tuple[Residue, Residue]:
    """(recurrence path, sum path)"""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if ctx.is_one:
        two_n = pow(2, n, ctx.p)
        return Residue(two_n, ctx.p), Residue(int(q_binomial_row(n, ctx).sum()) % ctx.p, ctx.p)
    return Residue(bressoud_recurrence(n, ctx), ctx.p), Residue(bressoud_sum(n, ctx), ctx.p)


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------

def _context_or_skip(identity: str, q: Fraction, p: int, **extra):
    try:
        return QContext.make(q, p), None
    except BadPrimeError as e:
        return None, skipped(identity, p, e.reason, q=str(q), **extra)


def verify_af_congruence(q: RationalLike, p: int) -> CongruenceReport:
    """F_p(q) == F_{I_p(q) + (ord_p(q)/5)} (mod p) whenever 5 does not divide ord_p(q)"""
    q = as_rational(q)
    ctx, skip = _context_or_skip('af', q, p)
    if skip:
        return skip
    if ctx.is_one:
        rhs = 0 if p == 5 else legendre(p, 5)
        return compare('af', p, fibonacci_mod(p, p).value, rhs, q='1', order=1, index=p - 1)
    order = ctx.order()
    index = (p - 1) // order
    if order % 5 == 0:
        return skipped('af', p, '5 divides ord_p(q)', q=str(q), order=order, index=index)
    rhs = fibonacci_mod(index + legendre(order, 5), p).value
    return compare('af', p, q_fibonacci(p, ctx).value, rhs, q=str(q), order=order, index=index)


def verify_qbinom_congruence(q: RationalLike, p: int, k: int) -> CongruenceReport:
    """binom(p-1, k)_q == binom(I_p(q), k/ord_p(q)) if ord_p(q) | k, else 0 (mod p)"""
    q = as_rational(q)
    if not 0 <= k <= p - 1:
        raise DomainError(f"k must lie in [0, p-1], got k={k}, p={p}")
    ctx, skip = _context_or_skip('qbinom', q, p, k=k)
    if skip:
        return skip
    order = ctx.order()
    index = (p - 1) // order
    rhs = comb(index, k // order) if k % order == 0 else 0
    lhs = q_binomial(p - 1, k, ctx).value
    return compare('qbinom', p, lhs, rhs, q=str(q), order=order, index=index, k=k)


def verify_bressoud_congruence(q: RationalLike, p: int) -> CongruenceReport:
    """D_{p-1}(q) == 2^{I_p(q)} (mod p); both evaluation paths must agree"""
    q = as_rational(q)
    ctx, skip = _context_or_skip('bressoud', q, p)
    if skip:
        return skip
    rec, summed = bressoud(p - 1, ctx)
    if rec != summed:
        raise ConsistencyError(f"Bressoud paths disagree at q={q}, p={p}: {rec.value} vs {summed.value}")
    order = ctx.order()
    index = (p - 1) // order
    return compare('bressoud', p, rec.value, pow(2, index, p), q=str(q), order=order, index=index)


def sweep_af(q: RationalLike, window: PrimeWindow) -> List[CongruenceReport]:
    reports = [verify_af_congruence(q, p) for p in window]
    logger.info(f"AF sweep q={q} on {window}: {len(reports)} primes")
    return reports


def sweep_bressoud(q: RationalLike, window: PrimeWindow) -> List[CongruenceReport]:
    reports = [verify_bressoud_congruence(q, p) for p in window]
    logger.info(f"Bressoud sweep q={q} on {window}: {len(reports)} primes")
    return reports


def sweep_qbinom(q: RationalLike, window: PrimeWindow, k: int) -> List[CongruenceReport]:
    """q-binomial congruence at every window prime with k <= p - 1; larger k are skipped."""
    reports = []
    for p in window:
        if k > p - 1:
            reports.append(skipped('qbinom', p, 'k exceeds p-1', q=str(as_rational(q)), k=k))
        else:
            reports.append(verify_qbinom_congruence(q, p, k))
    return reports


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

def fib_element(q: RationalLike, window: PrimeWindow) -> TruncatedAdele:
    """F(q) = (F_p(q) mod p)_p; primes dividing num or den of q are bad"""
    q = as_rational(q)
    return build(window, lambda p: q_fibonacci(p, QContext.make(q, p)).value, provenance=f"fib({q})")


def bressoud_element(q: RationalLike, window: PrimeWindow) -> TruncatedAdele:
    """D(q) = (D_{p-1}(q) mod p)_p"""
    q = as_rational(q)

    def rule(p: int) -> int:
        ctx = QContext.make(q, p)
        return pow(2, p - 1, p) if ctx.is_one else bressoud_recurrence(p - 1, ctx)

    return build(window, rule, provenance=f"bressoud({q})")
