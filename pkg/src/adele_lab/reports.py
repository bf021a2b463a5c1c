"""
Report containers and emission

Congruence verifiers return one CongruenceReport per prime; criterion audits
return a CriterionAuditReport. Tables are written with pandas (CSV) or as
JSON documents with a stable key order so identical runs give identical bytes.
"""

import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence

import pandas as pd

from .errors import ConfigError

logger = logging.getLogger(__name__)

OK = 'ok'
VIOLATION = 'violation'
SKIP = 'skip'

CONSISTENT = 'consistent'
INCONSISTENT = 'inconsistent'
INCONCLUSIVE = 'inconclusive'

CONGRUENCE_COLUMNS = ['identity', 'q', 'k', 'p', 'ord', 'index', 'lhs', 'rhs', 'verdict', 'skip_reason']


class CongruenceReport(NamedTuple):
    """Verdict of one congruence identity at one prime"""
    identity: str
    p: int
    lhs: Optional[int]
    rhs: Optional[int]
    verdict: str
    skip_reason: str = ''
    q: Optional[str] = None
    order: Optional[int] = None
    index: Optional[int] = None
    k: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.verdict == OK

    def as_row(self) -> Dict[str, Any]:
        return {
            'identity': self.identity,
            'q': self.q,
            'k': self.k,
            'p': self.p,
            'ord': self.order,
            'index': self.index,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'verdict': self.verdict,
            'skip_reason': self.skip_reason,
        }


def compare(identity: str, p: int, lhs: int, rhs: int, **extra) -> CongruenceReport:
    verdict = OK if (lhs - rhs) % p == 0 else VIOLATION
    if verdict == VIOLATION:
        logger.warning(f"{identity}: violation at p={p} (lhs={lhs}, rhs={rhs})")
    return CongruenceReport(identity, p, lhs % p, rhs % p, verdict, **extra)


def skipped(identity: str, p: int, reason: str, **extra) -> CongruenceReport:
    logger.debug(f"{identity}: skip p={p} ({reason})")
    return CongruenceReport(identity, p, None, None, SKIP, reason, **extra)


def summarize_congruences(reports: Iterable[CongruenceReport]) -> Dict[str, int]:
    counts = {OK: 0, VIOLATION: 0, SKIP: 0}
    for r in reports:
        counts[r.verdict] += 1
    return counts


@dataclass
class CriterionAuditReport:
    """Finite-window evidence for one transcendence criterion."""

    criterion: str
    params: Dict[str, Any]
    measurements: List[Dict[str, Any]]
    verdict: str
    window: Optional[Dict[str, int]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.verdict == CONSISTENT

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'criterion': self.criterion,
            'params': self.params,
            'measurements': self.measurements,
            'verdict': self.verdict,
        }
        if self.window is not None:
            out['window'] = self.window
        if self.notes:
            out['notes'] = self.notes
        return out


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def frame(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> pd.DataFrame:
    """Object-dtype frame so optional integers stay integers and None prints empty."""
    return pd.DataFrame(list(rows), columns=columns, dtype=object)


def congruence_frame(reports: Iterable[CongruenceReport]) -> pd.DataFrame:
    return frame([r.as_row() for r in reports], CONGRUENCE_COLUMNS)


def _open_target(out: Optional[str]):
    if not out:
        return None
    try:
        return open(out, 'w', encoding='utf-8', newline='')
    except OSError as e:
        raise ConfigError(f"cannot write {out}: {e.strerror or e}")


def write_csv(df: pd.DataFrame, out: Optional[str] = None, preamble: str = '') -> None:
    """``preamble`` lines are written first, each prefixed with '# '."""
    text = ''.join(f"# {line}\n" for line in preamble.splitlines()) + df.to_csv(index=False, lineterminator='\n')
    target = _open_target(out)
    if target is None:
        sys.stdout.write(text)
        return
    with target:
        target.write(text)
    logger.info(f"Wrote {len(df)} rows to {out}")


def write_json(document: Any, out: Optional[str] = None) -> None:
    text = json.dumps(document, indent=2, default=_json_default) + '\n'
    target = _open_target(out)
    if target is None:
        sys.stdout.write(text)
        return
    with target:
        target.write(text)
    logger.info(f"Wrote JSON report to {out}")


def write_table(df: pd.DataFrame, fmt: str, out: Optional[str] = None, meta: Optional[Dict[str, Any]] = None) -> None:
    if fmt == 'json':
        document = dict(meta or {})
        document['rows'] = [_clean_row(r) for r in df.to_dict(orient='records')]
        write_json(document, out)
    else:
        write_csv(df, out)


def _clean_row(row: Dict[str, Any]) -> Dict[str, Any]:
    return {k: (None if _is_missing(v) else v) for k, v in row.items()}


def _is_missing(v: Any) -> bool:
    try:
        return v is None or bool(pd.isna(v))
    except (TypeError, ValueError):
        return False


def _json_default(obj: Any) -> Any:
    if hasattr(obj, 'item'):
        return obj.item()
    if hasattr(obj, 'to_dict'):
        return obj.to_dict()
    return str(obj)
