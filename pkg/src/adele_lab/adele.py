"""
Truncated adeles
Finite-window stand-ins for elements of the ring A = prod Z/pZ / (+) Z/pZ

A TruncatedAdele stores one residue per prime of a window plus an explicit
set of bad coordinates. Ring operations work coordinatewise and union the bad
sets. Relation scans search a coefficient box for integer polynomials that
vanish on all but a few coordinates.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .core import PrimeWindow, Residue
from .errors import CapacityError, DomainError, StructuralError
from .settings import parameter

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
PrimeRule = Callable[[int], Optional[Union[int, Residue]]]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def _format_terms(terms: Sequence[Tuple[int, str]]) -> str:
    """Render (coefficient, monomial) pairs, highest first, as e.g. 'x^2-1'."""
    out = []
    for coeff, mono in terms:
        if coeff == 0:
            continue
        sign = '-' if coeff < 0 else ('+' if out else '')
        magnitude = abs(coeff)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = mono
        else:
            body = f"{magnitude}*{mono}"
        out.append(f"{sign}{body}")
    return ''.join(out) or '0'


def _power(var: str, k: int) -> str:
    if k == 0:
        return ''
    return var if k == 1 else f"{var}^{k}"


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients constant term first, no trailing zeros."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        trimmed = list(int(c) for c in self.coeffs)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        object.__setattr__(self, 'coeffs', tuple(trimmed))

    @classmethod
    def from_highest_first(cls, coeffs: Iterable[int]) -> 'IntPolynomial':
        return cls(tuple(reversed(list(coeffs))))

    @classmethod
    def parse(cls, text: str) -> 'IntPolynomial':
        """Comma separated coefficients, highest degree first: '1,0,1' is x^2+1."""
        try:
            return cls.from_highest_first(int(s) for s in text.split(','))
        except ValueError:
            raise DomainError(f"polynomial must be comma separated integers: {text!r}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def height(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_mod(self, x: int, p: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def discriminant(self) -> int:
        if self.degree != 2:
            raise DomainError(f"discriminant needs a quadratic, got degree {self.degree}")
        c0, c1, c2 = self.coeffs
        return c1 * c1 - 4 * c2 * c0

    def sort_key(self) -> Tuple:
        return (self.degree, self.height, tuple(reversed(self.coeffs)))

    def __str__(self) -> str:
        n = len(self.coeffs)
        return _format_terms([(self.coeffs[i], _power('x', i)) for i in range(n - 1, -1, -1)])


def monomials_deglex(total_degree: int) -> List[Tuple[int, int]]:
    """Exponent pairs (i, j) of x^i y^j ordered 1, x, y, x^2, xy, y^2, ..."""
    out = []
    for t in range(total_degree + 1):
        out.extend((t - j, j) for j in range(t + 1))
    return out


@dataclass(frozen=True)
class BivariatePolynomial:
    """Integer polynomial in x, y stored as (i, j, coefficient) in deg-lex order."""

    terms: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        order = {m: k for k, m in enumerate(monomials_deglex(self._max_degree(self.terms)))}
        cleaned = sorted(((i, j, c) for i, j, c in self.terms if c != 0),
                         key=lambda t: order[(t[0], t[1])])
        object.__setattr__(self, 'terms', tuple(cleaned))

    @staticmethod
    def _max_degree(terms) -> int:
        return max((i + j for i, j, _ in terms), default=0)

    @property
    def total_degree(self) -> int:
        return self._max_degree(self.terms) if self.terms else -1

    @property
    def height(self) -> int:
        return max((abs(c) for _, _, c in self.terms), default=0)

    def __call__(self, x: int, y: int) -> int:
        return sum(c * x ** i * y ** j for i, j, c in self.terms)

    def eval_mod(self, x: int, y: int, p: int) -> int:
        return sum(c * pow(x, i, p) * pow(y, j, p) for i, j, c in self.terms) % p

    def sort_key(self) -> Tuple:
        mons = monomials_deglex(max(self.total_degree, 0))
        coeff = {(i, j): c for i, j, c in self.terms}
        return (self.total_degree, self.height, tuple(coeff.get(m, 0) for m in reversed(mons)))

    def __str__(self) -> str:
        rendered = []
        for i, j, c in sorted(self.terms, key=lambda t: (-(t[0] + t[1]), -t[0])):
            mono = '*'.join(s for s in (_power('x', i), _power('y', j)) if s)
            rendered.append((c, mono))
        return _format_terms(rendered)


# ---------------------------------------------------------------------------
# Truncated adele
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedAdele:
    """
    One residue per window prime, ``None`` marking a bad coordinate.

    ``primes`` and ``values`` are parallel tuples in ascending prime order.
    Two elements are compatible when their prime tuples coincide.
    """

    window: PrimeWindow
    primes: Tuple[int, ...]
    values: Tuple[Optional[int], ...]
    provenance: str = ''

    def __post_init__(self):
        if len(self.primes) != len(self.values):
            raise StructuralError('primes and values differ in length')
        for p, v in zip(self.primes, self.values):
            if v is not None and not 0 <= v < p:
                raise StructuralError(f"residue {v} out of range at p={p}")

    # -- views ---------------------------------------------------------------

    @property
    def entries(self) -> Dict[int, Optional[Residue]]:
        return {p: (None if v is None else Residue(v, p)) for p, v in zip(self.primes, self.values)}

    def residue(self, p: int) -> Optional[Residue]:
        try:
            v = self.values[self.primes.index(p)]
        except ValueError:
            raise DomainError(f"{p} is not a prime of window {self.window}")
        return None if v is None else Residue(v, p)

    @property
    def bad_primes(self) -> List[int]:
        return [p for p, v in zip(self.primes, self.values) if v is None]

    def good_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(primes, values) restricted to good coordinates, as int64 arrays."""
        pairs = [(p, v) for p, v in zip(self.primes, self.values) if v is not None]
        if not pairs:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        arr = np.array(pairs, dtype=np.int64)
        return arr[:, 0], arr[:, 1]

    def __len__(self) -> int:
        return len(self.primes)

    # -- ring operations -----------------------------------------------------

    def _check_compatible(self, other: 'TruncatedAdele') -> None:
        if self.primes != other.primes:
            raise StructuralError(
                f"window mismatch: {self.window} ({len(self.primes)} primes) vs "
                f"{other.window} ({len(other.primes)} primes)"
            )

    def _combine(self, other: 'TruncatedAdele', op: Callable[[int, int, int], int], label: str) -> 'TruncatedAdele':
        self._check_compatible(other)
        values = tuple(
            None if a is None or b is None else op(a, b, p)
            for p, a, b in zip(self.primes, self.values, other.values)
        )
        return TruncatedAdele(self.window, self.primes, values, label)

    def add(self, other: 'TruncatedAdele') -> 'TruncatedAdele':
        return self._combine(other, lambda a, b, p: (a + b) % p, f"({self.provenance})+({other.provenance})")

    def sub(self, other: 'TruncatedAdele') -> 'TruncatedAdele':
        return self._combine(other, lambda a, b, p: (a - b) % p, f"({self.provenance})-({other.provenance})")

    def mul(self, other: 'TruncatedAdele') -> 'TruncatedAdele':
        return self._combine(other, lambda a, b, p: a * b % p, f"({self.provenance})*({other.provenance})")

    def negate(self) -> 'TruncatedAdele':
        values = tuple(None if v is None else (-v) % p for p, v in zip(self.primes, self.values))
        return TruncatedAdele(self.window, self.primes, values, f"-({self.provenance})")

    def scalar_mul(self, c: Union[Scalar, 'TruncatedAdele']) -> 'TruncatedAdele':
        """Multiply by an integer, a rational u/v (primes dividing v turn bad) or another element."""
        if isinstance(c, TruncatedAdele):
            return self.mul(c)
        c = Fraction(c)
        values = []
        for p, v in zip(self.primes, self.values):
            if v is None or c.denominator % p == 0:
                values.append(None)
            else:
                values.append(v * c.numerator * pow(c.denominator, -1, p) % p)
        return TruncatedAdele(self.window, self.primes, tuple(values), f"{c}*({self.provenance})")

    def power(self, n: int) -> 'TruncatedAdele':
        if n < 0:
            raise DomainError('negative powers are not defined coordinatewise')
        values = tuple(None if v is None else pow(v, n, p) for p, v in zip(self.primes, self.values))
        return TruncatedAdele(self.window, self.primes, values, f"({self.provenance})^{n}")

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __neg__(self):
        return self.negate()

    def __mul__(self, other):
        return self.scalar_mul(other)

    def __rmul__(self, other):
        return self.scalar_mul(other)

    def __pow__(self, n: int):
        return self.power(n)


def from_values(window: PrimeWindow, values: Sequence[Optional[int]], provenance: str = '') -> TruncatedAdele:
    """Wrap precomputed per-prime values (already aligned with the window primes)."""
    primes = tuple(window.primes)
    reduced = tuple(None if v is None else int(v) % p for p, v in zip(primes, values))
    return TruncatedAdele(window, primes, reduced, provenance)


def build(window: PrimeWindow, rule: PrimeRule, provenance: str = '',
          bad_cap: Optional[int] = None) -> TruncatedAdele:
    """
    Evaluate ``rule`` at every prime of the window.

    A rule returning None, or raising a domain/arithmetic error, marks the
    prime bad. More bad primes than ``bad_cap`` is a StructuralError.
    """
    cap = parameter('adele', 'bad_cap') if bad_cap is None else bad_cap
    primes = tuple(window.primes)
    values: List[Optional[int]] = []
    bad: List[int] = []
    for p in primes:
        try:
            v = rule(p)
        except (DomainError, ArithmeticError, ValueError) as e:
            logger.debug(f"{provenance or 'element'}: p={p} marked bad ({e})")
            v = None
        if v is None:
            bad.append(p)
            values.append(None)
        else:
            values.append(int(v) % p)
    if len(bad) > cap:
        raise StructuralError(f"{provenance or 'element'}: {len(bad)} bad primes exceed the cap {cap}")
    if bad:
        logger.info(f"{provenance or 'element'} on {window}: bad primes {bad}")
    return TruncatedAdele(window, primes, tuple(values), provenance)


def constant(window: PrimeWindow, c: Scalar) -> TruncatedAdele:
    c = Fraction(c)
    return build(
        window,
        lambda p: None if c.denominator % p == 0 else c.numerator * pow(c.denominator, -1, p),
        provenance=str(c),
    )


def add(alpha: TruncatedAdele, beta: TruncatedAdele) -> TruncatedAdele:
    return alpha.add(beta)


def mul(alpha: TruncatedAdele, beta: TruncatedAdele) -> TruncatedAdele:
    return alpha.mul(beta)


def negate(alpha: TruncatedAdele) -> TruncatedAdele:
    return alpha.negate()


def scalar_mul(alpha: TruncatedAdele, c: Union[Scalar, TruncatedAdele]) -> TruncatedAdele:
    return alpha.scalar_mul(c)


def eval_poly(f: IntPolynomial, alpha: TruncatedAdele) -> TruncatedAdele:
    values = tuple(None if v is None else f.eval_mod(v, p) for p, v in zip(alpha.primes, alpha.values))
    return TruncatedAdele(alpha.window, alpha.primes, values, f"({f})({alpha.provenance})")


def nonzero_positions(alpha: TruncatedAdele) -> List[int]:
    return [p for p, v in zip(alpha.primes, alpha.values) if v]


def is_zero(alpha: TruncatedAdele) -> bool:
    """Zero at every good coordinate."""
    return not nonzero_positions(alpha)


# ---------------------------------------------------------------------------
# Relation scans
# ---------------------------------------------------------------------------

class RelationHit(NamedTuple):
    polynomial: Union[IntPolynomial, BivariatePolynomial]
    exceptions: Tuple[int, ...]


@dataclass
class RelationScanReport:
    """Hits of an exhaustive coefficient-box scan, sorted by degree, height, coefficients."""

    hits: List[RelationHit]
    max_degree: int
    max_height: int
    max_exceptions: int
    window: PrimeWindow
    variables: str = 'x'
    candidates_checked: int = 0
    bad_primes: List[int] = field(default_factory=list)

    @property
    def minimal_hit(self) -> Optional[RelationHit]:
        return self.hits[0] if self.hits else None

    def to_dict(self) -> Dict:
        return {
            'variables': self.variables,
            'window': {'lo': self.window.lo, 'hi': self.window.hi},
            'max_degree': self.max_degree,
            'max_height': self.max_height,
            'max_exceptions': self.max_exceptions,
            'candidates_checked': self.candidates_checked,
            'bad_primes': list(self.bad_primes),
            'hits': [{'polynomial': str(h.polynomial), 'exceptions': list(h.exceptions)} for h in self.hits],
        }


_CHUNK = 1 << 16


def _survivors(candidates: np.ndarray, monomial_values: np.ndarray, primes: np.ndarray,
               max_exceptions: int) -> np.ndarray:
    """
    Rows of ``candidates`` vanishing at all but ``max_exceptions`` primes.

    ``monomial_values[k, j]`` is the k-th monomial at the j-th prime, reduced
    mod that prime. Rows are dropped as soon as they fail too often.
    """
    alive = np.arange(len(candidates))
    fails = np.zeros(len(candidates), dtype=np.int64)
    for j, p in enumerate(primes.tolist()):
        if not len(alive):
            break
        residues = (candidates[alive] @ monomial_values[:, j]) % p
        fails[alive] += residues != 0
        alive = alive[fails[alive] <= max_exceptions]
    return candidates[alive]


def _box_scan(blocks: List[Tuple[int, List[int]]], n_monomials: int, h_max: int,
              monomial_values: np.ndarray, primes: np.ndarray, max_exceptions: int,
              max_candidates: int) -> Tuple[List[np.ndarray], int]:
    """
    Enumerate coefficient vectors block by block.

    ``blocks`` pairs an exact degree with the indices of its top-degree
    monomials; a vector belongs to the block when those coefficients are not
    all zero and the first nonzero one is positive. Only the first
    ``n_monomials(block)`` monomials are used for each block.
    """
    side = 2 * h_max + 1
    raw_total = sum(side ** (top[-1] + 1) for _, top in blocks)
    if raw_total > max_candidates:
        raise CapacityError(f"relation scan needs {raw_total} candidates, cap is {max_candidates}")

    found: List[np.ndarray] = []
    checked = 0
    for degree, top in blocks:
        width = top[-1] + 1
        shape = (side,) * width
        total = side ** width
        for start in range(0, total, _CHUNK):
            flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
            coeffs = np.stack(np.unravel_index(flat, shape), axis=1).astype(np.int64) - h_max
            head = coeffs[:, top]
            nonzero = head != 0
            has_top = nonzero.any(axis=1)
            first = head[np.arange(len(head)), nonzero.argmax(axis=1)]
            keep = has_top & (first > 0)
            keep &= np.gcd.reduce(np.abs(coeffs), axis=1) == 1
            coeffs = coeffs[keep]
            checked += len(coeffs)
            if len(coeffs):
                hit = _survivors(coeffs, monomial_values[:width], primes, max_exceptions)
                if len(hit):
                    found.append(np.pad(hit, ((0, 0), (0, n_monomials - width))))
    return found, checked


def _exceptions(row: np.ndarray, monomial_values: np.ndarray, primes: np.ndarray) -> Tuple[int, ...]:
    residues = (row @ monomial_values) % primes
    return tuple(primes[residues != 0].tolist())


def _check_guardrails(degree: int, h_max: int, degree_cap: int) -> None:
    if degree < 1 or h_max < 1:
        raise DomainError('degree and height bounds must be positive')
    if degree > degree_cap or h_max > parameter('adele', 'max_height'):
        raise CapacityError(f"scan bounds d={degree}, h={h_max} exceed the guardrails")


def relation_scan(alpha: TruncatedAdele, d_max: int, h_max: int,
                  max_exceptions: Optional[int] = None,
                  max_candidates: Optional[int] = None) -> RelationScanReport:
    """Univariate polynomials of degree 1..d_max, height <= h_max, content 1, positive leading coefficient."""
    _check_guardrails(d_max, h_max, parameter('adele', 'max_degree'))
    max_exceptions = parameter('adele', 'max_exceptions') if max_exceptions is None else max_exceptions
    max_candidates = parameter('adele', 'max_candidates') if max_candidates is None else max_candidates

    primes, values = alpha.good_arrays()
    if not len(primes):
        logger.warning(f"relation_scan {alpha.provenance or 'element'}: no good primes in {alpha.window}")
        return RelationScanReport([], d_max, h_max, max_exceptions, alpha.window, 'x', 0, alpha.bad_primes)
    monomials = np.ones((d_max + 1, len(primes)), dtype=np.int64)
    for k in range(1, d_max + 1):
        monomials[k] = monomials[k - 1] * values % primes

    blocks = [(d, [d]) for d in range(1, d_max + 1)]
    found, checked = _box_scan(blocks, d_max + 1, h_max, monomials, primes, max_exceptions, max_candidates)

    hits = []
    for batch in found:
        for row in batch:
            hits.append(RelationHit(IntPolynomial(tuple(row.tolist())), _exceptions(row, monomials, primes)))
    hits.sort(key=lambda h: h.polynomial.sort_key())
    logger.info(f"relation_scan {alpha.provenance or 'element'}: {checked} candidates, {len(hits)} hits")
    return RelationScanReport(hits, d_max, h_max, max_exceptions, alpha.window, 'x', checked, alpha.bad_primes)


def relation_scan2(alpha: TruncatedAdele, beta: TruncatedAdele, total_degree: int, h_max: int,
                   max_exceptions: Optional[int] = None,
                   max_candidates: Optional[int] = None) -> RelationScanReport:
    """Bivariate version over monomials x^i y^j in deg-lex order."""
    alpha._check_compatible(beta)
    _check_guardrails(total_degree, h_max, parameter('adele', 'max_total_degree'))
    max_exceptions = parameter('adele', 'max_exceptions') if max_exceptions is None else max_exceptions
    max_candidates = parameter('adele', 'max_candidates') if max_candidates is None else max_candidates

    good = [(p, a, b) for p, a, b in zip(alpha.primes, alpha.values, beta.values) if a is not None and b is not None]
    bad = sorted(set(alpha.bad_primes) | set(beta.bad_primes))
    if not good:
        logger.warning(f"relation_scan2: no prime of {alpha.window} is good for both elements")
        return RelationScanReport([], total_degree, h_max, max_exceptions, alpha.window, 'x,y', 0, bad)
    table = np.array(good, dtype=np.int64).reshape(-1, 3)
    primes, xs, ys = table[:, 0], table[:, 1], table[:, 2]

    mons = monomials_deglex(total_degree)
    monomials = np.ones((len(mons), len(primes)), dtype=np.int64)
    for k, (i, j) in enumerate(mons):
        col = np.ones(len(primes), dtype=np.int64)
        for _ in range(i):
            col = col * xs % primes
        for _ in range(j):
            col = col * ys % primes
        monomials[k] = col

    blocks = []
    for t in range(1, total_degree + 1):
        top = [k for k, (i, j) in enumerate(mons) if i + j == t]
        blocks.append((t, top))
    found, checked = _box_scan(blocks, len(mons), h_max, monomials, primes, max_exceptions, max_candidates)

    hits = []
    for batch in found:
        for row in batch:
            poly = BivariatePolynomial(tuple((i, j, int(c)) for (i, j), c in zip(mons, row.tolist())))
            hits.append(RelationHit(poly, _exceptions(row, monomials, primes)))
    hits.sort(key=lambda h: h.polynomial.sort_key())
    logger.info(f"relation_scan2 ({alpha.provenance}, {beta.provenance}): {checked} candidates, {len(hits)} hits")
    return RelationScanReport(hits, total_degree, h_max, max_exceptions, alpha.window, 'x,y', checked, bad)


def linear_witness_scan(alpha: TruncatedAdele, beta: TruncatedAdele, bound: int) -> Dict[Tuple[int, int], Optional[int]]:
    """
    For every (b, e) in [-bound, bound]^2 other than (0, 0), the first good
    prime where b*alpha + e*beta is nonzero, or None when it vanishes on the
    whole window.
    """
    alpha._check_compatible(beta)
    good = [(p, a, b) for p, a, b in zip(alpha.primes, alpha.values, beta.values) if a is not None and b is not None]
    table = np.array(good, dtype=np.int64).reshape(-1, 3)
    primes, xs, ys = table[:, 0], table[:, 1], table[:, 2]
    pairs = [(b, e) for b in range(-bound, bound + 1) for e in range(-bound, bound + 1) if (b, e) != (0, 0)]
    if not good:
        return {pair: None for pair in pairs}
    coeffs = np.array(pairs, dtype=np.int64)
    combos = (np.outer(coeffs[:, 0], xs) + np.outer(coeffs[:, 1], ys)) % primes
    nonzero = combos != 0
    first = nonzero.argmax(axis=1)
    witnesses: Dict[Tuple[int, int], Optional[int]] = {}
    for k, pair in enumerate(pairs):
        witnesses[pair] = int(primes[first[k]]) if nonzero[k].any() else None
    return witnesses
