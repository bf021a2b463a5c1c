"""
Elliptic curves modulo p
Frobenius traces of y^2 = x^3 + ax + b, Sato-Tate angle statistics,
quadratic twists and the element alpha(E) = (a_p(E) mod p)_p.

Primes 2 and 3 and divisors of 4a^3 + 27b^2 are always treated as bad;
no minimal models are computed.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from scipy import integrate

from .adele import TruncatedAdele, build
from .core import PrimeWindow, is_squarefree, legendre_unchecked, primes_in
from .errors import BadPrimeError, CapacityError, DomainError
from .reports import VIOLATION, CongruenceReport, compare, skipped
from .settings import parameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShortWeierstrassCurve:
    """E: y^2 = x^3 + a x + b with 4a^3 + 27b^2 != 0"""

    a: int
    b: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise DomainError(f"singular curve: 4a^3 + 27b^2 = 0 for (a, b) = ({self.a}, {self.b})")

    @property
    def discriminant(self) -> int:
        return 4 * self.a ** 3 + 27 * self.b ** 2

    @classmethod
    def parse(cls, text: str) -> 'ShortWeierstrassCurve':
        parts = text.split(',')
        if len(parts) != 2:
            raise DomainError(f"curve must be given as 'a,b': {text!r}")
        try:
            return cls(int(parts[0]), int(parts[1]))
        except ValueError:
            raise DomainError(f"curve coefficients must be integers: {text!r}")

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


class TraceRecord(NamedTuple):
    """a_p(E) and its Sato-Tate angle"""
    p: int
    ap: int
    theta: float


def good_reduction(E: ShortWeierstrassCurve, p: int) -> bool:
    return p not in (2, 3) and E.discriminant % p != 0


def _square_counts(p: int) -> np.ndarray:
    """Number of y in F_p with y^2 = v, for v = 0..p-1"""
    return np.bincount((np.arange(p, dtype=np.int64) ** 2) % p, minlength=p)


def ap_trace(E: ShortWeierstrassCurve, p: int) -> int:
    """a_p = p + 1 - #E(F_p) = -sum_x (x^3 + ax + b / p)"""
    if not good_reduction(E, p):
        raise BadPrimeError(p, f"bad reduction of {E}")
    if p >= 1 << 21:
        raise CapacityError(f"p={p} too large for the vectorized trace")
    x = np.arange(p, dtype=np.int64)
    rhs = (x * x % p * x + (E.a % p) * x + E.b % p) % p
    affine = int(_square_counts(p)[rhs].sum())
    ap = p - affine  # #E = affine + 1
    if ap * ap > 4 * p:
        raise DomainError(f"Hasse bound violated: a_{p} = {ap}")
    return ap


def point_count_exhaustive(E: ShortWeierstrassCurve, p: int) -> int:
    """#E(F_p) by checking every (x, y), including the point at infinity."""
    count = 1
    for x in range(p):
        rhs = (x ** 3 + E.a * x + E.b) % p
        count += sum(1 for y in range(p) if y * y % p == rhs)
    return count


def theta(ap: int, p: int) -> float:
    return math.acos(max(-1.0, min(1.0, ap / (2 * math.sqrt(p)))))


def trace_sweep(E: ShortWeierstrassCurve, X: int) -> Tuple[List[TraceRecord], List[int]]:
    """(records for good primes <= X, bad primes <= X)"""
    if X > parameter('ecred', 'max_x'):
        raise CapacityError(f"X={X} exceeds the trace sweep cap")
    records, bad = [], []
    for p in primes_in(PrimeWindow(2, X)):
        if not good_reduction(E, p):
            bad.append(p)
            continue
        ap = ap_trace(E, p)
        records.append(TraceRecord(p, ap, theta(ap, p)))
    logger.info(f"trace sweep {E} up to {X}: {len(records)} good primes, bad {bad}")
    return records, bad


def alpha_E(E: ShortWeierstrassCurve, window: PrimeWindow) -> TruncatedAdele:
    """alpha(E) = (a_p(E) mod p)_p, bad-reduction primes marked bad"""
    return build(window, lambda p: ap_trace(E, p) if good_reduction(E, p) else None,
                 provenance=f"alphaE{E}")


# ---------------------------------------------------------------------------
# Sato-Tate
# ---------------------------------------------------------------------------

def _semicircle_mass(lo: float, hi: float) -> float:
    value, _ = integrate.quad(lambda t: (2 / math.pi) * math.sin(t) ** 2, lo, hi)
    return value


def _cm_mass(lo: float, hi: float, closed_right: bool) -> float:
    atom = 0.5 if (lo <= math.pi / 2 < hi or (closed_right and hi == math.pi / 2)) else 0.0
    return atom + (hi - lo) / (2 * math.pi)


@dataclass
class SatoTateHistogram:
    edges: List[float]
    empirical: List[float]
    non_cm: List[float]
    cm: List[float]
    tv_non_cm: float
    tv_cm: float
    count: int

    @property
    def closer(self) -> str:
        return 'cm' if self.tv_cm < self.tv_non_cm else 'non_cm'

    def rows(self) -> List[Dict]:
        return [
            {'bin': i, 'lo': self.edges[i], 'hi': self.edges[i + 1], 'empirical': self.empirical[i],
             'non_cm': self.non_cm[i], 'cm': self.cm[i]}
            for i in range(len(self.empirical))
        ]

    def to_dict(self) -> Dict:
        return {'count': self.count, 'tv_non_cm': self.tv_non_cm, 'tv_cm': self.tv_cm,
                'closer': self.closer, 'bins': self.rows()}


def histogram_from_traces(records: List[TraceRecord], bins: int) -> SatoTateHistogram:
    if bins < parameter('ecred', 'min_bins'):
        raise DomainError(f"need at least {parameter('ecred', 'min_bins')} bins, got {bins}")
    if not records:
        raise DomainError('no good primes to histogram')
    angles = np.array([r.theta for r in records])
    counts, edges = np.histogram(angles, bins=bins, range=(0.0, math.pi))
    empirical = counts / counts.sum()
    non_cm = [_semicircle_mass(edges[i], edges[i + 1]) for i in range(bins)]
    cm = [_cm_mass(edges[i], edges[i + 1], i == bins - 1) for i in range(bins)]
    tv_non_cm = 0.5 * float(np.abs(empirical - np.array(non_cm)).sum())
    tv_cm = 0.5 * float(np.abs(empirical - np.array(cm)).sum())
    return SatoTateHistogram(edges.tolist(), empirical.tolist(), non_cm, cm, tv_non_cm, tv_cm, len(records))


def sato_tate_histogram(E: ShortWeierstrassCurve, X: int, bins: int) -> SatoTateHistogram:
    records, _ = trace_sweep(E, X)
    hist = histogram_from_traces(records, bins)
    logger.info(f"Sato-Tate {E}, X={X}: TV non-CM {hist.tv_non_cm:.4f}, CM {hist.tv_cm:.4f}")
    return hist


def angle_fraction(records: List[TraceRecord], lo: float, hi: float) -> float:
    """Fraction of records with lo <= theta_p <= hi"""
    if not records:
        return 0.0
    return sum(1 for r in records if lo <= r.theta <= hi) / len(records)


def hasse_band_density(E: ShortWeierstrassCurve, X: int, c1: float, c2: float) -> float:
    """Fraction of good p <= X with 2 c1 sqrt(p) <= a_p <= 2 c2 sqrt(p)"""
    if not -1 <= c1 < c2 <= 1:
        raise DomainError(f"need -1 <= c1 < c2 <= 1, got {c1}, {c2}")
    records, _ = trace_sweep(E, X)
    hits = sum(1 for r in records if 2 * c1 * math.sqrt(r.p) <= r.ap <= 2 * c2 * math.sqrt(r.p))
    return hits / len(records) if records else 0.0


# ---------------------------------------------------------------------------
# Twists
# ---------------------------------------------------------------------------

def quadratic_twist(E: ShortWeierstrassCurve, d: int) -> ShortWeierstrassCurve:
    if d == 0 or not is_squarefree(d):
        raise DomainError(f"twist parameter must be squarefree and nonzero, got {d}")
    return ShortWeierstrassCurve(E.a * d * d, E.b * d ** 3)


def twist_trace_check(E: ShortWeierstrassCurve, d: int, window: PrimeWindow) -> List[CongruenceReport]:
    """a_p(E^d) = (d/p) a_p(E) at every prime of good reduction for both curves (exact equality)."""
    twist = quadratic_twist(E, d)
    reports = []
    for p in window:
        if not (good_reduction(E, p) and good_reduction(twist, p)):
            reports.append(skipped('twist', p, 'bad reduction', q=str(d)))
            continue
        lhs = ap_trace(twist, p)
        rhs = legendre_unchecked(d, p) * ap_trace(E, p)
        # both sides lie in [-2 sqrt p, 2 sqrt p]; compare as integers
        report = compare('twist', p, lhs, rhs, q=str(d))
        if lhs != rhs:
            report = report._replace(verdict=VIOLATION)
        reports.append(report)
    return reports
