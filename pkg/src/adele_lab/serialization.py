"""
TruncatedAdele serialization
JSON documents validated with marshmallow, and flat CSV tables via pandas.

JSON layout:
    {"window": {"lo": L, "hi": H},
     "entries": [{"prime": p, "residue": r, "flag": "ok"|"bad"}, ...],
     "provenance": "..."}

CSV columns: prime, residue, flag (bad rows leave residue empty), preceded
by a "# window LO HI" comment line.
"""

import json
import logging
from typing import Any, Dict, List, Optional

import pandas as pd
from marshmallow import Schema, ValidationError, fields, validate, validates_schema

from .adele import TruncatedAdele
from .core import PrimeWindow
from .errors import ConfigError, StructuralError
from .reports import frame, write_csv, write_json

logger = logging.getLogger(__name__)

GOOD = 'ok'
BAD = 'bad'
CSV_COLUMNS = ['prime', 'residue', 'flag']


class WindowSchema(Schema):
    lo = fields.Integer(required=True, validate=validate.Range(min=1))
    hi = fields.Integer(required=True, validate=validate.Range(min=1))


class EntrySchema(Schema):
    prime = fields.Integer(required=True)
    residue = fields.Integer(allow_none=True, load_default=None)
    flag = fields.String(required=True, validate=validate.OneOf([GOOD, BAD]))

    @validates_schema
    def check_flag(self, data, **kwargs):
        if data['flag'] == GOOD and data.get('residue') is None:
            raise ValidationError('good entries need a residue', 'residue')


class AdeleSchema(Schema):
    window = fields.Nested(WindowSchema, required=True)
    entries = fields.List(fields.Nested(EntrySchema), required=True)
    provenance = fields.String(load_default='')


def to_document(alpha: TruncatedAdele) -> Dict[str, Any]:
    return {
        'window': {'lo': alpha.window.lo, 'hi': alpha.window.hi},
        'entries': [
            {'prime': p, 'residue': v, 'flag': BAD if v is None else GOOD}
            for p, v in zip(alpha.primes, alpha.values)
        ],
        'provenance': alpha.provenance,
    }


def from_document(document: Dict[str, Any]) -> TruncatedAdele:
    """Rebuild an element, checking the entries against the window's primes."""
    try:
        data = AdeleSchema().load(document)
    except ValidationError as e:
        raise StructuralError(f"malformed adele document: {e.messages}")
    window = PrimeWindow(data['window']['lo'], data['window']['hi'])
    primes = tuple(e['prime'] for e in data['entries'])
    if primes != tuple(window.primes):
        raise StructuralError(f"entries do not list exactly the primes of {window}")
    values = tuple(None if e['flag'] == BAD else e['residue'] for e in data['entries'])
    return TruncatedAdele(window, primes, values, data['provenance'])


def adele_frame(alpha: TruncatedAdele) -> pd.DataFrame:
    return frame(to_document(alpha)['entries'], CSV_COLUMNS)


def save_adele(alpha: TruncatedAdele, fmt: str = 'json', out: Optional[str] = None) -> None:
    if fmt == 'csv':
        write_csv(adele_frame(alpha), out, preamble=f"window {alpha.window.lo} {alpha.window.hi}")
    else:
        write_json(to_document(alpha), out)


def _csv_window(path: str, entries: List[Dict[str, Any]]) -> Dict[str, int]:
    """Window from the '# window LO HI' line; files without one span their first to last prime."""
    with open(path, 'r', encoding='utf-8') as f:
        first = f.readline().split()
    if first[:2] == ['#', 'window'] and len(first) == 4:
        try:
            return {'lo': int(first[2]), 'hi': int(first[3])}
        except ValueError:
            raise StructuralError(f"{path}: bad window line {' '.join(first)!r}")
    return {'lo': entries[0]['prime'], 'hi': entries[-1]['prime']}


def _read_csv_document(path: str) -> Dict[str, Any]:
    try:
        df = pd.read_csv(path, comment='#', dtype={'flag': str})
    except pd.errors.EmptyDataError:
        raise StructuralError(f"{path}: no entries")
    except (pd.errors.ParserError, ValueError) as e:
        raise StructuralError(f"{path}: unreadable CSV ({e})")
    if list(df.columns) != CSV_COLUMNS:
        raise StructuralError(f"{path}: expected columns {CSV_COLUMNS}, got {list(df.columns)}")
    if df.empty:
        raise StructuralError(f"{path}: no entries")
    try:
        entries = [
            {'prime': int(row.prime),
             'residue': None if pd.isna(row.residue) else int(row.residue),
             'flag': row.flag}
            for row in df.itertuples(index=False)
        ]
    except (TypeError, ValueError) as e:
        raise StructuralError(f"{path}: non-integer prime or residue ({e})")
    return {'window': _csv_window(path, entries), 'entries': entries}


def load_adele(path: str) -> TruncatedAdele:
    """Load an element from a JSON document or a CSV table."""
    try:
        if path.endswith('.csv'):
            document = _read_csv_document(path)
        else:
            with open(path, 'r', encoding='utf-8') as f:
                document = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror or e}")
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise StructuralError(f"{path}: not valid JSON ({e})")
    if not isinstance(document, dict):
        raise StructuralError(f"{path}: expected a JSON object")
    alpha = from_document(document)
    logger.info(f"Loaded {alpha.provenance or 'element'} on {alpha.window} from {path}")
    return alpha
