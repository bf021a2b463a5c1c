"""
Experiments
Element builders and finite-window audits for the transcendence criteria,
the pi(p) study (root equidistribution, smooth values) and the log_A
machinery (Wieferich scans, rational-value disproof, Phi_ell analysis).

Audits never claim a proof. They report measurements and one of
consistent / inconsistent / inconclusive.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime
from sympy.ntheory import pollard_rho

from .adele import IntPolynomial, TruncatedAdele, build
from .core import (
    PrimeWindow,
    RationalLike,
    as_rational,
    fermat_quotient_value,
    index,
    order_of_residue,
    prime_count,
    primes_array,
    primes_in,
    reduce_rational,
    sqrt_mod_values,
)
from .errors import BadPrimeError, CapacityError, DomainError
from .reports import CONSISTENT, INCONCLUSIVE, INCONSISTENT, CriterionAuditReport
from .settings import parameter

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Sequences and builders
# ---------------------------------------------------------------------------

def t_sequence(n: int) -> int:
    """t_n for (t_n) = 1, 1,2, 1,2,3, ... (position T(m-1)+j holds j)"""
    if n < 1:
        raise DomainError(f"t_n is indexed from 1, got {n}")
    m = (isqrt(8 * n + 1) - 1) // 2
    if m * (m + 1) // 2 < n:
        m += 1
    return n - (m - 1) * m // 2


def floor_log(p: int) -> int:
    return math.floor(math.log(p))


def floor_loglog(p: int) -> int:
    return math.floor(math.log(math.log(p)))


SEQUENCES: Dict[str, Callable[[int], int]] = {
    'floorlog': floor_log,
    'floorsqrt': isqrt,
    'floorloglog': floor_loglog,
    'tpi': lambda p: t_sequence(prime_count(p)),
    'pip': prime_count,
    'index2': lambda p: index(2, p),
    'constant': lambda p: 5,
}


def sequence_values(name: str, window: PrimeWindow) -> Dict[int, int]:
    """Exact integer values of a named per-prime sequence on a window"""
    if name not in SEQUENCES:
        raise DomainError(f"unknown sequence {name!r}; choose from {sorted(SEQUENCES)}")
    rule = SEQUENCES[name]
    values = {}
    for p in window:
        try:
            values[p] = rule(p)
        except BadPrimeError:
            continue
    return values


def sequence_element(name: str, window: PrimeWindow) -> TruncatedAdele:
    if name not in SEQUENCES:
        raise DomainError(f"unknown sequence {name!r}; choose from {sorted(SEQUENCES)}")
    return build(window, SEQUENCES[name], provenance=name)


def floor_log_element(window: PrimeWindow) -> TruncatedAdele:
    return build(window, floor_log, provenance='floorlog')


def floor_loglog_element(window: PrimeWindow) -> TruncatedAdele:
    return build(window, floor_loglog, provenance='floorloglog')


def floor_sqrt_element(window: PrimeWindow) -> TruncatedAdele:
    return build(window, isqrt, provenance='floorsqrt')


def index_element(q: RationalLike, window: PrimeWindow) -> TruncatedAdele:
    q = as_rational(q)
    return build(window, lambda p: index(q, p), provenance=f"index({q})")


def t_pi_element(window: PrimeWindow) -> TruncatedAdele:
    return build(window, SEQUENCES['tpi'], provenance='tpi')


def pi_p_element(window: PrimeWindow) -> TruncatedAdele:
    return build(window, prime_count, provenance='pip')


# ---------------------------------------------------------------------------
# Criterion audits
# ---------------------------------------------------------------------------

def af_criterion_audit(alpha: TruncatedAdele, b: Sequence[int], min_hits: Optional[int] = None) -> CriterionAuditReport:
    """For each b_n count window primes with a_p = b_n mod p and b_n < p."""
    if any(x >= y for x, y in zip(b, b[1:])):
        raise DomainError('b must be strictly increasing')
    min_hits = parameter('experiments', 'af_min_hits') if min_hits is None else min_hits
    measurements = []
    for bn in b:
        hits = [p for p, v in zip(alpha.primes, alpha.values) if v is not None and bn < p and v == bn % p]
        measurements.append({'b': bn, 'X': alpha.window.hi, 'value': len(hits), 'first_primes': hits[:5]})
    verdict = CONSISTENT if all(m['value'] >= min_hits for m in measurements) else INCONSISTENT
    return CriterionAuditReport(
        'af', {'b': list(b), 'min_hits': min_hits, 'element': alpha.provenance}, measurements, verdict,
        window={'lo': alpha.window.lo, 'hi': alpha.window.hi},
    )


def _decade_block(values: Mapping[int, float], X: int) -> List[Tuple[int, float]]:
    return [(p, v) for p, v in values.items() if X // 10 < p <= X]


def growth_audit(values: Mapping[int, int], d_max: int, decades: Optional[Sequence[int]] = None) -> CriterionAuditReport:
    """
    a_p -> infinity and a_p^d = o(p): block maxima over (X/10, X] must grow
    for a_p and shrink for a_p^d / p, for every d <= d_max.
    """
    decades = list(parameter('experiments', 'growth_decades') if decades is None else decades)
    measurements = []
    notes = []
    trend = []
    for X in decades:
        block = _decade_block(values, X)
        if not block:
            notes.append(f"no primes in ({X // 10}, {X}]")
            return CriterionAuditReport('growth', {'d_max': d_max, 'decades': decades}, measurements,
                                        INCONCLUSIVE, notes=notes)
        top = max(v for _, v in block)
        trend.append(top)
        measurements.append({'quantity': 'max_a', 'X': X, 'value': top})

    consistent = all(x < y for x, y in zip(trend, trend[1:]))
    if not consistent:
        notes.append('block maxima of a_p do not increase')
    for d in range(1, d_max + 1):
        series = []
        for X in decades:
            ratio = max(abs(v) ** d / p for p, v in _decade_block(values, X))
            series.append(ratio)
            measurements.append({'quantity': f"max_a^{d}/p", 'X': X, 'value': ratio})
        if not all(x > y for x, y in zip(series, series[1:])):
            consistent = False
            notes.append(f"a_p^{d}/p is not decreasing")
    return CriterionAuditReport('growth', {'d_max': d_max, 'decades': decades}, measurements,
                                CONSISTENT if consistent else INCONSISTENT, notes=notes)


def lz2_audit(S: Callable[[int], bool], b: Callable[[int], int], eps: float, eps_prime: float, X: int,
              decades: Optional[Sequence[int]] = None) -> CriterionAuditReport:
    """
    b_p = O(p^eps) on S and #(S cap [2, X]) >> X^eps'.

    The first holds when the block maximum of |b_p| / p^eps over the last
    decade does not exceed the earlier block maxima; the second when the
    count ratio at the last decade is at least half its largest value.
    """
    decades = [d for d in (parameter('experiments', 'lz2_decades') if decades is None else decades) if d <= X]
    params = {'eps': eps, 'eps_prime': eps_prime, 'X': X, 'decades': decades}
    if len(decades) < 2:
        return CriterionAuditReport('lz2', params, [], INCONCLUSIVE, notes=['fewer than two decades'])

    members = [p for p in primes_in(PrimeWindow(2, max(decades))) if S(p)]
    measurements = []
    block_max, count_ratio = [], []
    for Xd in decades:
        block = [p for p in members if Xd // 10 < p <= Xd]
        top = max((abs(b(p)) / p ** eps for p in block), default=0.0)
        count = sum(1 for p in members if p <= Xd)
        block_max.append(top)
        count_ratio.append(count / Xd ** eps_prime)
        measurements.append({'quantity': 'max_b/p^eps', 'X': Xd, 'value': top})
        measurements.append({'quantity': 'count/X^eps_prime', 'X': Xd, 'value': count_ratio[-1]})

    notes = []
    bounded = block_max[-1] <= max(block_max[:-1])
    if not bounded:
        notes.append('b_p / p^eps sets a new maximum in the last decade')
    dense = min(count_ratio) > 0 and count_ratio[-1] >= 0.5 * max(count_ratio)
    if not dense:
        notes.append('count ratio collapses')
    verdict = CONSISTENT if bounded and dense else INCONSISTENT
    return CriterionAuditReport('lz2', params, measurements, verdict, notes=notes)


def lz1_partition_count(q: RationalLike, r: int, c: int, N: int, X: int) -> CriterionAuditReport:
    """
    P(X) = {p in [X, 2X]: p = 1 mod r, p = c mod N, ord_p(q) | (p-1)/r}
    split by ord_p(q) <= sqrt(X)/log X (P1), I_p(q) <= sqrt(X)/log X (P2)
    and both large (P3).
    """
    q = as_rational(q)
    if r < 1 or r % 2 == 0:
        raise DomainError(f"r must be an odd positive integer, got {r}")
    if N < 1 or gcd(N, c) != 1:
        raise DomainError(f"need N >= 1 and gcd(N, c) = 1, got N={N}, c={c}")
    if gcd(r, N) != 1:
        raise DomainError(f"r={r} must be coprime to N={N}")
    if X < 3:
        raise DomainError(f"X must be at least 3, got {X}")
    if X > parameter('experiments', 'lz1_max_x'):
        raise CapacityError(f"X={X} exceeds the partition count cap")

    threshold = math.sqrt(X) / math.log(X)
    P, P1, P2, P3, five = [], set(), set(), set(), 0
    for p in primes_in(PrimeWindow(X, 2 * X)):
        if p % r != 1 % r or p % N != c % N:
            continue
        try:
            qr = reduce_rational(q, p)
        except BadPrimeError:
            continue
        order = order_of_residue(qr, p)
        if ((p - 1) // r) % order:
            continue
        P.append(p)
        idx = (p - 1) // order
        if order <= threshold:
            P1.add(p)
        if idx <= threshold:
            P2.add(p)
        if order > threshold and idx > threshold:
            P3.add(p)
        if order % 5 == 0:
            five += 1

    # ord * I_p = p - 1 >= X - 1 is too large for both to sit below the threshold
    overlap = P1 & P2
    measurements = [
        {'quantity': 'P', 'X': X, 'value': len(P)},
        {'quantity': 'P1', 'X': X, 'value': len(P1)},
        {'quantity': 'P2', 'X': X, 'value': len(P2)},
        {'quantity': 'P3', 'X': X, 'value': len(P3)},
        {'quantity': 'P1+P2+P3', 'X': X, 'value': len(P1) + len(P2) + len(P3)},
        {'quantity': 'P1_and_P2', 'X': X, 'value': len(overlap)},
        {'quantity': 'five_divides_ord', 'X': X, 'value': five},
        {'quantity': 'X/log X', 'X': X, 'value': X / math.log(X)},
    ]
    if overlap:
        logger.warning(f"lz1: primes {sorted(overlap)[:5]} have both ord and index below {threshold:.2f}")
        verdict = INCONSISTENT
    else:
        verdict = CONSISTENT if P else INCONCLUSIVE
    return CriterionAuditReport('lz1', {'q': str(q), 'r': r, 'c': c, 'N': N, 'X': X}, measurements, verdict)


# ---------------------------------------------------------------------------
# pi(p) study
# ---------------------------------------------------------------------------

def pi_linear_audit(window: PrimeWindow, a_bound: int, b_bound: int) -> Dict:
    """
    Primes p with b*pi(p) = a (mod p) for |a| <= a_bound, 1 <= b <= b_bound,
    and how many of them have 0 < b*pi(p) - a < p (always zero).
    """
    primes = primes_array(window)
    pis = np.arange(1, len(primes) + 1, dtype=np.int64) + prime_count(window.lo - 1)
    a_values = np.arange(-a_bound, a_bound + 1, dtype=np.int64)
    solutions: Dict[Tuple[int, int], List[int]] = {}
    in_range = 0
    for b in range(1, b_bound + 1):
        diff = b * pis[None, :] - a_values[:, None]
        divisible = diff % primes[None, :] == 0
        in_range += int((divisible & (diff > 0) & (diff < primes[None, :])).sum())
        for row in np.flatnonzero(divisible.any(axis=1)).tolist():
            solutions[(int(a_values[row]), b)] = primes[divisible[row]].tolist()
    largest = max((max(v) for v in solutions.values()), default=None)
    return {'solutions': solutions, 'in_range': in_range, 'largest_solution_prime': largest}


@dataclass
class EquidistReport:
    polynomial: str
    X: int
    alpha: Fraction
    beta: Fraction
    count: int
    prime_count: int

    @property
    def ratio(self) -> float:
        return self.count / self.prime_count if self.prime_count else 0.0

    @property
    def expected(self) -> float:
        return float(self.beta - self.alpha)

    def to_dict(self) -> Dict:
        return {'polynomial': self.polynomial, 'X': self.X, 'alpha': str(self.alpha), 'beta': str(self.beta),
                'count': self.count, 'prime_count': self.prime_count, 'ratio': self.ratio,
                'expected': self.expected}


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def quadratic_roots_mod(f: IntPolynomial, p: int) -> List[int]:
    """All roots of f mod p, ascending"""
    c0, c1, c2 = (c % p for c in f.coeffs)
    if c2 == 0:
        if c1:
            return [(-c0) * pow(c1, -1, p) % p]
        return list(range(p)) if c0 == 0 else []
    if p == 2:
        return [x for x in (0, 1) if (c2 * x * x + c1 * x + c0) % 2 == 0]
    inv = pow(2 * c2, -1, p)
    return sorted({(-c1 + s) * inv % p for s in sqrt_mod_values(c1 * c1 - 4 * c2 * c0, p)})


def root_equidist(f: IntPolynomial, X: int, alpha, beta) -> EquidistReport:
    """#{(p, nu): p <= X, f(nu) = 0 mod p, alpha <= nu/p < beta} / pi(X)"""
    if f.degree != 2:
        raise DomainError(f"root_equidist needs a quadratic, got degree {f.degree}")
    if _is_square(f.discriminant()):
        raise DomainError(f"{f} is reducible over Q")
    lo, hi = Fraction(str(alpha)), Fraction(str(beta))
    if not 0 <= lo <= hi <= 1:
        raise DomainError(f"need 0 <= alpha <= beta <= 1, got {alpha}, {beta}")
    count = 0
    primes = primes_in(PrimeWindow(2, X))
    for p in primes:
        for nu in quadratic_roots_mod(f, p):
            if lo * p <= nu < hi * p:
                count += 1
    logger.info(f"root_equidist {f} X={X} [{lo},{hi}): {count} roots over {len(primes)} primes")
    return EquidistReport(str(f), X, lo, hi, count, len(primes))


def largest_prime_factor(n: int) -> int:
    n = abs(n)
    return max(factorint(n)) if n > 1 else 1


def smooth_scan(f: IntPolynomial, theta: float, n_max: int) -> List[int]:
    """n in [1, n_max] with |f(n)| != 0 and every prime factor of f(n) at most n^theta"""
    if not 0 < theta < 1:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if f.degree < 1:
        raise DomainError('smooth_scan needs a nonconstant polynomial')
    if n_max > parameter('experiments', 'smooth_max_n'):
        raise CapacityError(f"n_max={n_max} exceeds the smoothness cap")
    hits = []
    for n in range(1, n_max + 1):
        value = abs(f(n))
        if value == 0:
            continue
        bound = n ** theta
        if value <= bound or largest_prime_factor(value) <= bound + 1e-9:
            hits.append(n)
    return hits


# ---------------------------------------------------------------------------
# log_A
# ---------------------------------------------------------------------------

def wieferich_scan(alpha: RationalLike, target: int, X: int) -> List[int]:
    """Primes p <= X, p not dividing num*den, with q_p(alpha) = target (mod p)"""
    alpha = as_rational(alpha)
    if X > parameter('experiments', 'wieferich_ceiling'):
        raise CapacityError(f"X={X} exceeds the Wieferich scan ceiling")
    u, v = alpha.numerator, alpha.denominator
    hits = []
    for p in primes_in(PrimeWindow(2, X)):
        if u % p == 0 or v % p == 0:
            continue
        if fermat_quotient_value(alpha, p) == target % p:
            hits.append(p)
    logger.info(f"wieferich_scan alpha={alpha} target={target} X={X}: {hits}")
    return hits


class DisproofResult(NamedTuple):
    witness: Optional[int]
    checked: int

    @property
    def exhausted(self) -> bool:
        return self.witness is None


def log_rational_disproof(alpha: RationalLike, a: int, b: int, X: int) -> DisproofResult:
    """Smallest p <= X, p not dividing num*den*b, with q_p(alpha) != a/b (mod p)"""
    alpha = as_rational(alpha)
    if b < 1 or gcd(a, b) != 1:
        raise DomainError(f"need b >= 1 and gcd(a, b) = 1, got a={a}, b={b}")
    if alpha in (0, 1, -1):
        raise DomainError(f"alpha must not be 0 or +-1, got {alpha}")
    checked = 0
    for p in primes_in(PrimeWindow(2, X)):
        if (alpha.numerator * alpha.denominator * b) % p == 0:
            continue
        checked += 1
        if fermat_quotient_value(alpha, p) != a * pow(b, -1, p) % p:
            return DisproofResult(p, checked)
    return DisproofResult(None, checked)


@dataclass
class PhiEllReport:
    """Phi_ell(u, v) = (u^ell - v^ell)/(u - v) and what the log_A argument extracts from it"""

    u: int
    v: int
    ell: int
    a: int
    b: int
    value: int
    factorization: List[Tuple[int, int]]
    complete: bool
    t_values: Dict[int, int]
    T_ell: int
    contra_residues: Dict[int, int]
    log_identity: Dict[int, bool]
    notes: List[str] = field(default_factory=list)

    @property
    def prime_factors(self) -> List[int]:
        return [p for p, _ in self.factorization]

    @property
    def factors_one_mod_ell(self) -> bool:
        return all(p % self.ell == 1 for p in self.prime_factors)

    @property
    def squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factorization)

    @property
    def reconstructs(self) -> bool:
        product = 1
        for p, e in self.factorization:
            product *= p ** e
        return product == self.value

    @property
    def consistent_mod_u_minus_v(self) -> bool:
        return (self.value - self.ell * self.v ** (self.ell - 1)) % (self.u - self.v) == 0

    @property
    def reciprocal_sum(self) -> float:
        return sum(1 / p for p in self.prime_factors)

    @property
    def harmonic_bound(self) -> float:
        return (1 + math.log(self.ell)) / self.ell

    def to_dict(self) -> Dict:
        return {
            'u': self.u, 'v': self.v, 'ell': self.ell, 'a': self.a, 'b': self.b,
            'value': str(self.value),
            'complete': self.complete,
            'factorization': [
                {'prime': str(p), 'exponent': e, 'one_mod_ell': p % self.ell == 1,
                 't_p': str(self.t_values.get(p, '')),
                 'contra_residue': str(self.contra_residues.get(p, '')),
                 'divides_T': self.T_ell % p == 0,
                 'log_identity': self.log_identity.get(p)}
                for p, e in self.factorization
            ],
            'T_ell': str(self.T_ell),
            'squarefree': self.squarefree,
            'factor_count': len(self.factorization),
            'factor_count_below_ell': len(self.factorization) < self.ell,
            'reconstructs': self.reconstructs,
            'consistent_mod_u_minus_v': self.consistent_mod_u_minus_v,
            'reciprocal_sum': self.reciprocal_sum,
            'harmonic_bound': self.harmonic_bound,
            'notes': self.notes,
        }


def _split_composite(n: int, steps: int) -> Tuple[Dict[int, int], bool]:
    """Factor n with Pollard rho; (factors, complete). Unsplit cofactors stay as keys."""
    if isprime(n):
        return {n: 1}, True
    d = pollard_rho(n, max_steps=steps)
    if d is None or d in (1, n):
        return {n: 1}, False
    left, ok_left = _split_composite(d, steps)
    right, ok_right = _split_composite(n // d, steps)
    for p, e in right.items():
        left[p] = left.get(p, 0) + e
    return left, ok_left and ok_right


def factorize(n: int) -> Tuple[List[Tuple[int, int]], bool]:
    """Trial division up to the configured limit, then Pollard rho on what is left."""
    raw = factorint(n, limit=parameter('experiments', 'factor_trial_limit'))
    steps = parameter('experiments', 'factor_rho_steps')
    merged: Dict[int, int] = {}
    complete = True
    for base, exp in raw.items():
        parts, ok = _split_composite(base, steps)
        complete = complete and ok
        for p, e in parts.items():
            merged[p] = merged.get(p, 0) + e * exp
    return sorted(merged.items()), complete


def phi_ell_analysis(u: int, v: int, ell: int, a: int, b: int) -> PhiEllReport:
    if not (u > v >= 1 and gcd(u, v) == 1):
        raise DomainError(f"need coprime u > v >= 1, got u={u}, v={v}")
    if b < 1:
        raise DomainError(f"b must be positive, got {b}")
    if not isprime(ell) or ell <= max(u, abs(a), b):
        raise DomainError(f"ell={ell} must be a prime exceeding max(u, |a|, b)")
    value = (u ** ell - v ** ell) // (u - v)
    factorization, complete = factorize(value)
    notes = [] if complete else ['factorization incomplete: composite cofactor left unsplit']
    if not complete:
        logger.warning(f"Phi_{ell}({u},{v}) only partially factored")

    t_values = {p: value // p for p, _ in factorization}
    T_ell = (u - v) * b * sum(t_values.values()) + a * ell * v ** ell
    contra = {p: ((u - v) * b * t + a * ell * v ** ell) % p for p, t in t_values.items()}
    alpha = Fraction(u, v)
    identity = {}
    for p, t in t_values.items():
        if not isprime(p) or u % p == 0 or v % p == 0:
            continue
        lhs = ell * _fermat_quotient_exact(alpha, p) % p
        rhs = -(u - v) * t * pow(pow(v, ell, p), -1, p) % p
        identity[p] = lhs == rhs
    return PhiEllReport(u, v, ell, a, b, value, factorization, complete, t_values, T_ell, contra, identity, notes)


def _fermat_quotient_exact(alpha: Fraction, p: int) -> int:
    """Fermat quotient with unbounded integers; factors of Phi_ell can exceed the p^2 lifting cap."""
    m = p * p
    r = pow(alpha.numerator, p - 1, m) * pow(pow(alpha.denominator, p - 1, m), -1, m) % m
    return (r - 1) // p % p
