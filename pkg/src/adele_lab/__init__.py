"""
Adele Lab
Truncations of elements of A = prod Z/pZ / (+) Z/pZ over prime windows,
congruence verifiers, relation scans and finite-window criterion audits.
"""

from .adele import IntPolynomial, BivariatePolynomial, TruncatedAdele, relation_scan, relation_scan2
from .core import PrimeWindow, Residue
from .errors import (
    AdeleLabError,
    BadPrimeError,
    CapacityError,
    ConfigError,
    ConsistencyError,
    DomainError,
    PoleError,
    StructuralError,
)
from .reports import CongruenceReport, CriterionAuditReport

__version__ = '0.1.0'

__all__ = [
    'AdeleLabError',
    'BadPrimeError',
    'BivariatePolynomial',
    'CapacityError',
    'ConfigError',
    'ConsistencyError',
    'CongruenceReport',
    'CriterionAuditReport',
    'DomainError',
    'IntPolynomial',
    'PoleError',
    'PrimeWindow',
    'Residue',
    'StructuralError',
    'TruncatedAdele',
    'relation_scan',
    'relation_scan2',
]
