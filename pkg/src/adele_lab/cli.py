"""
Adele Lab command line
Sweeps, element builders, relation scans, criterion audits, log_A tools and
pi(p) experiments, emitting CSV or JSON on stdout (or --out).

Exit codes: 0 completed with no violations, 1 a congruence violation or an
inconsistent audit, 2 usage/config/domain error, 3 capacity guardrail.

Polynomials are comma separated integer coefficients, highest degree first
("1,0,1" is x^2+1). Arguments starting with '-' must be attached with '='
(for example --curve=-1,1).
"""

import argparse
import logging
import math
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from . import classnum, ecred, experiments, qpoly, specialnums
from .adele import IntPolynomial, relation_scan, relation_scan2
from .core import PrimeWindow, as_rational
from .ecred import ShortWeierstrassCurve
from .errors import AdeleLabError, DomainError
from .reports import (
    INCONSISTENT,
    VIOLATION,
    CongruenceReport,
    CriterionAuditReport,
    congruence_frame,
    frame,
    summarize_congruences,
    write_csv,
    write_json,
    write_table,
)
from .serialization import load_adele, save_adele
from .settings import RunConfig, get_parameters, load_run_config, parameter, save_run_config

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Context:
    """Run configuration plus the global output options of one invocation."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_run_config(args.config) if args.config else RunConfig()
        self.out = args.out or self.config.output_path

    def fmt(self, default: str = 'csv') -> str:
        if self.args.format:
            return self.args.format
        if self.args.config:
            return self.config.output_format
        return default

    def window(self) -> PrimeWindow:
        lo = self.args.lo if getattr(self.args, 'lo', None) is not None else self.config.window_lo
        hi = self.args.hi if getattr(self.args, 'hi', None) is not None else self.config.window_hi
        return PrimeWindow(lo, hi)

    def q_list(self) -> List[Fraction]:
        qs = getattr(self.args, 'q', None)
        return [as_rational(q) for q in qs] if qs else list(self.config.q_list)


# ---------------------------------------------------------------------------
# Emission helpers
# ---------------------------------------------------------------------------

def _emit_congruences(ctx: Context, reports: List[CongruenceReport], meta: Dict[str, Any]) -> int:
    counts = summarize_congruences(reports)
    logger.info(f"{meta.get('sweep')}: {counts}")
    write_table(congruence_frame(reports), ctx.fmt(), ctx.out, dict(meta, summary=counts))
    return 1 if counts[VIOLATION] else 0


def _emit_audit(ctx: Context, report: CriterionAuditReport) -> int:
    logger.info(f"audit {report.criterion}: {report.verdict}")
    if ctx.fmt() == 'json':
        write_json(report.to_dict(), ctx.out)
    else:
        rows = [dict(m, criterion=report.criterion, verdict=report.verdict) for m in report.measurements]
        write_csv(frame(rows), ctx.out)
    return 1 if report.verdict == INCONSISTENT else 0


def _rational_pair(text: str):
    r = as_rational(text)
    return r.numerator, r.denominator


def _int_list(text: str) -> List[int]:
    try:
        return [int(s) for s in text.split(',') if s.strip()]
    except ValueError:
        raise DomainError(f"expected comma separated integers: {text!r}")


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(ctx: Context) -> int:
    args = ctx.args
    kind = args.kind
    if kind == 'ec':
        return _sweep_ec(ctx)
    window = ctx.window()
    if kind in ('fib', 'bressoud', 'qbinom'):
        reports: List[CongruenceReport] = []
        for q in ctx.q_list():
            if kind == 'fib':
                reports.extend(qpoly.sweep_af(q, window))
            elif kind == 'bressoud':
                reports.extend(qpoly.sweep_bressoud(q, window))
            else:
                reports.extend(qpoly.sweep_qbinom(q, window, args.k))
        meta = {'sweep': kind, 'window': {'lo': window.lo, 'hi': window.hi},
                'q': [str(q) for q in ctx.q_list()]}
        return _emit_congruences(ctx, reports, meta)
    if kind == 'bernoulli':
        reports = classnum.sweep_cauchy(window)
    else:
        reports = classnum.sweep_carlitz(window)
    return _emit_congruences(ctx, reports, {'sweep': kind, 'window': {'lo': window.lo, 'hi': window.hi}})


def _sweep_ec(ctx: Context) -> int:
    args = ctx.args
    curves = [ShortWeierstrassCurve.parse(args.curve)] if args.curve else \
        [ShortWeierstrassCurve(a, b) for a, b in ctx.config.curves]
    X = args.hi if args.hi is not None else ctx.config.window_hi
    fmt = ctx.fmt()
    if args.hist and fmt == 'csv' and not args.hist_out:
        raise DomainError('--hist with CSV output needs --hist-out for the histogram table')

    rows, documents, hist_rows = [], [], []
    for E in curves:
        records, bad = ecred.trace_sweep(E, X)
        by_prime = {r.p: r for r in records}
        for p in sorted(set(by_prime) | set(bad)):
            r = by_prime.get(p)
            rows.append({'curve': str(E), 'p': p, 'ap': None if r is None else r.ap,
                         'theta': None if r is None else r.theta, 'flag': 'bad' if r is None else 'ok'})
        doc: Dict[str, Any] = {'curve': str(E), 'X': X, 'bad_primes': bad}
        if args.hist:
            hist = ecred.histogram_from_traces(records, args.hist)
            doc['histogram'] = hist.to_dict()
            hist_rows.extend(dict(row, curve=str(E)) for row in hist.rows())
        documents.append(doc)

    if fmt == 'json':
        write_json({'curves': documents, 'traces': rows}, ctx.out)
    else:
        write_csv(frame(rows, ['p', 'ap', 'theta', 'flag', 'curve']), ctx.out)
        if hist_rows:
            write_csv(frame(hist_rows, ['curve', 'bin', 'lo', 'hi', 'empirical', 'non_cm', 'cm']), args.hist_out)
    return 0


# ---------------------------------------------------------------------------
# element
# ---------------------------------------------------------------------------

def _element_builders(args: argparse.Namespace) -> Dict[str, Callable[[PrimeWindow], Any]]:
    return {
        'fib': lambda w: qpoly.fib_element(args.q_value, w),
        'bressoud': lambda w: qpoly.bressoud_element(args.q_value, w),
        'zA': lambda w: specialnums.z_A(args.k, w),
        'scriptB': specialnums.script_B,
        'scriptE': specialnums.script_E,
        'gA': lambda w: specialnums.g_A(args.k, args.x, w)[0],
        'alphaE': lambda w: ecred.alpha_E(ShortWeierstrassCurve.parse(args.curve), w),
        'floorlog': experiments.floor_log_element,
        'floorloglog': experiments.floor_loglog_element,
        'floorsqrt': experiments.floor_sqrt_element,
        'index': lambda w: experiments.index_element(args.q_value, w),
        'tpi': experiments.t_pi_element,
        'pip': experiments.pi_p_element,
        'logA': lambda w: specialnums.log_A_element(args.alpha, w),
    }


def cmd_element(ctx: Context) -> int:
    args = ctx.args
    args.q_value = as_rational(args.q[0]) if args.q else ctx.config.q_list[0]
    if args.name == 'alphaE' and not args.curve:
        args.curve = '{},{}'.format(*ctx.config.curves[0])
    alpha = _element_builders(args)[args.name](ctx.window())
    save_adele(alpha, ctx.fmt('json'), ctx.out)
    return 0


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def cmd_scan(ctx: Context) -> int:
    args = ctx.args
    d_max = args.dmax if args.dmax is not None else ctx.config.d_max
    h_max = args.hmax if args.hmax is not None else ctx.config.h_max
    exceptions = args.max_exceptions if args.max_exceptions is not None else ctx.config.max_exceptions
    alpha = load_adele(args.input)
    if args.input2:
        report = relation_scan2(alpha, load_adele(args.input2), d_max, h_max, exceptions)
    else:
        report = relation_scan(alpha, d_max, h_max, exceptions)
    if ctx.fmt() == 'json':
        write_json(report.to_dict(), ctx.out)
    else:
        rows = [{'polynomial': str(h.polynomial), 'degree': h.polynomial.sort_key()[0],
                 'height': h.polynomial.height, 'exceptions': ' '.join(str(p) for p in h.exceptions)}
                for h in report.hits]
        write_csv(frame(rows, ['polynomial', 'degree', 'height', 'exceptions']), ctx.out)
    return 0


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

PRIME_SETS: Dict[str, Callable[[int], bool]] = {
    'all': lambda p: True,
    '1mod4': lambda p: p % 4 == 1,
    '3mod4': lambda p: p > 3 and p % 4 == 3,
}

LZ2_SEQUENCES: Dict[str, Callable[[int], int]] = {
    'floorsqrt': math.isqrt,
    'floorlog': experiments.floor_log,
    'h_minus_p': lambda p: classnum.class_number(-p),
    'h_minus_4p': lambda p: classnum.class_number(-4 * p),
}


def cmd_audit(ctx: Context) -> int:
    args = ctx.args
    if args.criterion == 'af':
        if args.input:
            alpha = load_adele(args.input)
        else:
            alpha = experiments.sequence_element(args.seq, ctx.window())
        report = experiments.af_criterion_audit(alpha, _int_list(args.b), args.min_hits)
    elif args.criterion == 'growth':
        decades = args.decades or parameter('experiments', 'growth_decades')
        values = experiments.sequence_values(args.seq, PrimeWindow(2, max(decades)))
        d_max = args.dmax if args.dmax is not None else ctx.config.d_max
        report = experiments.growth_audit(values, d_max, decades)
    elif args.criterion == 'lz1':
        report = experiments.lz1_partition_count(as_rational(args.q[0]) if args.q else ctx.config.q_list[0],
                                                 args.r, args.c, args.N, args.X)
    else:
        report = experiments.lz2_audit(PRIME_SETS[args.set], LZ2_SEQUENCES[args.b_seq],
                                       args.eps, args.eps_prime, args.X)
    return _emit_audit(ctx, report)


# ---------------------------------------------------------------------------
# log
# ---------------------------------------------------------------------------

def cmd_log(ctx: Context) -> int:
    args = ctx.args
    if args.tool == 'wieferich':
        primes = experiments.wieferich_scan(args.alpha, args.target, args.hi)
        write_table(frame([{'p': p} for p in primes], ['p']), ctx.fmt(), ctx.out,
                    {'alpha': args.alpha, 'target': args.target, 'X': args.hi})
        return 0
    if args.tool == 'disprove':
        a, b = _rational_pair(args.rat)
        result = experiments.log_rational_disproof(args.alpha, a, b, args.hi)
        row = {'alpha': str(as_rational(args.alpha)), 'rat': f"{a}/{b}", 'X': args.hi,
               'witness': result.witness, 'checked': result.checked, 'exhausted': result.exhausted}
        if ctx.fmt() == 'json':
            write_json(row, ctx.out)
        else:
            write_csv(frame([row]), ctx.out)
        return 0

    a, b = _rational_pair(args.rat)
    report = experiments.phi_ell_analysis(args.u, args.v, args.ell, a, b)
    document = report.to_dict()
    if ctx.fmt() == 'json':
        write_json(document, ctx.out)
    else:
        write_csv(frame(document['factorization']), ctx.out)
    if not (report.factors_one_mod_ell and report.reconstructs and report.consistent_mod_u_minus_v):
        logger.warning(f"Phi_{args.ell}({args.u},{args.v}) failed a structural check")
        return 1
    return 0


# ---------------------------------------------------------------------------
# exp
# ---------------------------------------------------------------------------

def cmd_exp(ctx: Context) -> int:
    args = ctx.args
    f = IntPolynomial.parse(args.f)
    if args.kind == 'equidist':
        report = experiments.root_equidist(f, args.hi, args.lo_frac, args.hi_frac)
        document = report.to_dict()
        if ctx.fmt() == 'json':
            write_json(document, ctx.out)
        else:
            write_csv(frame([document]), ctx.out)
        return 0
    hits = experiments.smooth_scan(f, args.theta, args.n)
    write_table(frame([{'n': n, 'value': f(n)} for n in hits], ['n', 'value']), ctx.fmt(), ctx.out,
                {'polynomial': str(f), 'theta': args.theta, 'n_max': args.n})
    return 0


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

def cmd_config(ctx: Context) -> int:
    if ctx.args.action == 'dump':
        if ctx.out:
            save_run_config(ctx.config, ctx.out)
        else:
            for key, value in ctx.config.to_flat().items():
                sys.stdout.write(f"{key}={value}\n")
    else:
        write_json(get_parameters(), ctx.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _window_options(p: argparse.ArgumentParser) -> None:
    p.add_argument('--lo', type=int, help='Window lower bound (default from --config)')
    p.add_argument('--hi', type=int, help='Window upper bound (default from --config)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='adele-lab',
        description='Truncated adeles: congruence sweeps, relation scans and criterion audits.',
        epilog='Polynomials: comma separated coefficients, highest degree first ("1,0,1" = x^2+1).',
    )
    parser.add_argument('--config', help='Flat key=value run configuration file')
    parser.add_argument('--format', choices=['csv', 'json'], help='Output format')
    parser.add_argument('--out', help='Output path (default: stdout)')
    parser.add_argument('--log-level', default=None, help='Logging level (default from system parameters)')
    sub = parser.add_subparsers(dest='command', required=True)

    sweep = sub.add_parser('sweep', help='Congruence sweeps and elliptic trace sweeps')
    sweep.add_argument('kind', choices=['fib', 'bressoud', 'qbinom', 'bernoulli', 'euler', 'ec'])
    sweep.add_argument('--q', action='append', help='q as an integer or u/v; repeatable')
    sweep.add_argument('--k', type=int, default=1, help='k for the q-binomial sweep')
    sweep.add_argument('--curve', help="Curve 'a,b' for y^2 = x^3 + ax + b")
    sweep.add_argument('--hist', type=int, help='Sato-Tate histogram bin count')
    sweep.add_argument('--hist-out', help='Histogram CSV path')
    _window_options(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    element = sub.add_parser('element', help='Build and serialize a truncated element')
    element.add_argument('action', choices=['build'])
    element.add_argument('name', choices=['fib', 'bressoud', 'zA', 'scriptB', 'scriptE', 'gA', 'alphaE',
                                          'floorlog', 'floorloglog', 'floorsqrt', 'index', 'tpi', 'pip',
                                          'logA'])
    element.add_argument('--q', action='append', help='q for fib, bressoud and index')
    element.add_argument('--k', type=int, default=2, help='k for zA and gA')
    element.add_argument('--x', type=int, default=0, help='x for gA')
    element.add_argument('--alpha', default='2', help='alpha for logA')
    element.add_argument('--curve', help="Curve 'a,b' for alphaE")
    _window_options(element)
    element.set_defaults(handler=cmd_element)

    scan = sub.add_parser('scan', help='Polynomial relation scans')
    scan.add_argument('action', choices=['relation'])
    scan.add_argument('--in', dest='input', required=True, help='Element file (JSON or CSV)')
    scan.add_argument('--in2', dest='input2', help='Second element for a bivariate scan')
    scan.add_argument('--dmax', type=int, help='Maximal (total) degree')
    scan.add_argument('--hmax', type=int, help='Maximal coefficient height')
    scan.add_argument('--max-exceptions', type=int, help='Allowed nonvanishing coordinates')
    scan.set_defaults(handler=cmd_scan)

    audit = sub.add_parser('audit', help='Finite-window audits of the transcendence criteria')
    audit.add_argument('criterion', choices=['af', 'growth', 'lz1', 'lz2'])
    audit.add_argument('--in', dest='input', help='Element file for af')
    audit.add_argument('--seq', default='tpi', choices=sorted(experiments.SEQUENCES),
                       help='Named sequence for af and growth')
    audit.add_argument('--b', default='1,2,3,4,5', help='Strictly increasing b_n for af')
    audit.add_argument('--min-hits', type=int, help='Hits required per b_n')
    audit.add_argument('--dmax', type=int, help='Largest exponent d for growth')
    audit.add_argument('--decades', type=int, nargs='+', help='Decade endpoints X')
    audit.add_argument('--q', action='append', help='q for lz1')
    audit.add_argument('--r', type=int, default=3)
    audit.add_argument('--c', type=int, default=1)
    audit.add_argument('--N', type=int, default=1)
    audit.add_argument('--X', type=int, default=10 ** 4)
    audit.add_argument('--set', default='all', choices=sorted(PRIME_SETS), help='Prime set S for lz2')
    audit.add_argument('--b-seq', default='floorsqrt', choices=sorted(LZ2_SEQUENCES), help='b_p for lz2')
    audit.add_argument('--eps', type=float, default=0.6)
    audit.add_argument('--eps-prime', type=float, default=0.8)
    _window_options(audit)
    audit.set_defaults(handler=cmd_audit)

    log = sub.add_parser('log', help='Fermat quotient tools')
    log.add_argument('tool', choices=['wieferich', 'disprove', 'phiell'])
    log.add_argument('--alpha', default='2', help='alpha as an integer or u/v')
    log.add_argument('--target', type=int, default=0)
    log.add_argument('--rat', default='1/1', help='Hypothesized value a/b')
    log.add_argument('--hi', type=int, default=10 ** 4)
    log.add_argument('--u', type=int, default=2)
    log.add_argument('--v', type=int, default=1)
    log.add_argument('--ell', type=int, default=5)
    log.set_defaults(handler=cmd_log)

    exp = sub.add_parser('exp', help='pi(p) experiments')
    exp.add_argument('kind', choices=['equidist', 'smooth'])
    exp.add_argument('--f', default='1,0,1', help='Polynomial, highest degree first')
    exp.add_argument('--hi', type=int, default=10 ** 5)
    exp.add_argument('--lo-frac', type=Fraction, default=Fraction(0))
    exp.add_argument('--hi-frac', type=Fraction, default=Fraction(1, 2))
    exp.add_argument('--theta', type=float, default=0.5)
    exp.add_argument('--n', type=int, default=100)
    exp.set_defaults(handler=cmd_exp)

    config = sub.add_parser('config', help='Show run configuration or system parameters')
    config.add_argument('action', choices=['dump', 'params'])
    config.set_defaults(handler=cmd_config)
    return parser


def configure_logging(level: Optional[str]) -> None:
    level = (level or get_parameters()['logging']['level']).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.log_level)
        return args.handler(Context(args))
    except AdeleLabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == '__main__':
    sys.exit(main())
