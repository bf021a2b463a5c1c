"""
Adele Lab settings
Guardrails, defaults and run configuration

System parameters live in config/system_parameters.json and may be overridden
from the environment (a local .env file is honoured). Run configurations are
flat key=value files validated with marshmallow before any sweep starts.
"""

import copy
import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Optional, Tuple

from dotenv import dotenv_values, load_dotenv
from marshmallow import (
    Schema,
    ValidationError,
    fields,
    post_load,
    validate,
    validates_schema,
)

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.normpath(
    os.path.join(os.path.dirname(__file__), '..', '..', 'config', 'system_parameters.json')
)

DEFAULT_PARAMETERS: Dict[str, Dict[str, Any]] = {
    'sieve': {'ceiling': 10_000_000, 'segment_size': 262_144},
    'arithmetic': {'modulus_bits': 62, 'fermat_quotient_max_prime': 2 ** 31},
    'adele': {
        'bad_cap': 32,
        'max_exceptions': 3,
        'max_degree': 6,
        'max_height': 64,
        'max_total_degree': 3,
        'max_candidates': 2_000_000,
    },
    'specialnums': {'exact_cap': 64},
    'classnum': {'max_abs_discriminant': 1_000_000, 'growth_exponent': 0.6},
    'ecred': {'max_x': 1_000_000, 'min_bins': 4},
    'experiments': {
        'growth_decades': [100, 1000, 10000],
        'lz2_decades': [1000, 10000, 100000],
        'af_min_hits': 3,
        'lz1_max_x': 500_000,
        'smooth_max_n': 100_000,
        'wieferich_ceiling': 10_000_000,
        'factor_trial_limit': 1_000_000,
        'factor_rho_steps': 200_000,
    },
    'logging': {'level': 'INFO'},
}

# env variable -> (section, key, cast)
ENV_OVERRIDES = {
    'ADELE_SIEVE_CEILING': ('sieve', 'ceiling', int),
    'ADELE_BAD_CAP': ('adele', 'bad_cap', int),
    'ADELE_MAX_EXCEPTIONS': ('adele', 'max_exceptions', int),
    'ADELE_LOG_LEVEL': ('logging', 'level', str),
}


def load_system_parameters(config_path: str = DEFAULT_CONFIG_PATH) -> Dict[str, Any]:
    """Load system parameters from JSON file, layered over the built-in defaults"""
    params = copy.deepcopy(DEFAULT_PARAMETERS)
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            loaded = json.load(f)
    except FileNotFoundError:
        logger.warning(f"System parameters not found at {config_path}, using defaults")
        return params
    except Exception as e:
        logger.error(f"Error loading system parameters: {e}")
        return params

    for section, values in loaded.items():
        if isinstance(values, dict) and section in params:
            params[section].update({k: v for k, v in values.items() if k != 'description'})
    return params


def _apply_env_overrides(params: Dict[str, Any]) -> Dict[str, Any]:
    for env_name, (section, key, cast) in ENV_OVERRIDES.items():
        raw = os.getenv(env_name)
        if raw is None or raw == '':
            continue
        try:
            params[section][key] = cast(raw)
            logger.debug(f"{env_name} overrides {section}.{key} = {raw}")
        except ValueError:
            raise ConfigError(f"{env_name}={raw!r} is not a valid {cast.__name__}")
    return params


@lru_cache(maxsize=1)
def get_parameters() -> Dict[str, Any]:
    """Effective parameters: JSON file, then environment overrides"""
    load_dotenv()
    path = os.getenv('ADELE_CONFIG', DEFAULT_CONFIG_PATH)
    return _apply_env_overrides(load_system_parameters(path))


def reset_parameters() -> None:
    """Forget cached parameters so the next lookup re-reads file and environment."""
    get_parameters.cache_clear()


def parameter(section: str, key: str) -> Any:
    try:
        return get_parameters()[section][key]
    except KeyError:
        raise ConfigError(f"missing system parameter {section}.{key}")


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """CLI run configuration; serialized as a flat key=value file."""

    window_lo: int = 2
    window_hi: int = 1000
    q_list: Tuple[Fraction, ...] = (Fraction(2),)
    curves: Tuple[Tuple[int, int], ...] = ((1, 0),)
    d_max: int = 3
    h_max: int = 10
    max_exceptions: int = 3
    output_format: str = 'csv'
    output_path: Optional[str] = None

    def to_flat(self) -> Dict[str, str]:
        return {
            'window_lo': str(self.window_lo),
            'window_hi': str(self.window_hi),
            'q_list': ','.join(str(q) for q in self.q_list),
            'curves': ';'.join(f"{a},{b}" for a, b in self.curves),
            'd_max': str(self.d_max),
            'h_max': str(self.h_max),
            'max_exceptions': str(self.max_exceptions),
            'output_format': self.output_format,
            'output_path': self.output_path or '',
        }


class RationalListField(fields.Field):
    """Comma separated rationals such as ``2,3,1/2``."""

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, (list, tuple)):
            items = [str(v) for v in value]
        else:
            items = [s for s in str(value).split(',') if s.strip()]
        try:
            parsed = tuple(Fraction(s.strip()) for s in items)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"not a rational list: {value!r}")
        if not parsed:
            raise ValidationError("at least one q is required")
        if any(q == 0 for q in parsed):
            raise ValidationError("q must be nonzero")
        return parsed


class CurveListField(fields.Field):
    """Semicolon separated ``a,b`` pairs such as ``1,0;-1,1``."""

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, (list, tuple)):
            return tuple((int(a), int(b)) for a, b in value)
        curves = []
        for chunk in str(value).split(';'):
            if not chunk.strip():
                continue
            parts = chunk.split(',')
            if len(parts) != 2:
                raise ValidationError(f"curve must be 'a,b': {chunk!r}")
            try:
                curves.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValidationError(f"curve coefficients must be integers: {chunk!r}")
        return tuple(curves)


class RunConfigSchema(Schema):
    window_lo = fields.Integer(load_default=2, validate=validate.Range(min=1))
    window_hi = fields.Integer(load_default=1000, validate=validate.Range(min=1))
    q_list = RationalListField(load_default=(Fraction(2),))
    curves = CurveListField(load_default=((1, 0),))
    d_max = fields.Integer(load_default=3, validate=validate.Range(min=1))
    h_max = fields.Integer(load_default=10, validate=validate.Range(min=1))
    max_exceptions = fields.Integer(load_default=3, validate=validate.Range(min=0))
    output_format = fields.String(load_default='csv', validate=validate.OneOf(['csv', 'json']))
    output_path = fields.String(load_default=None, allow_none=True)

    @validates_schema
    def check_bounds(self, data, **kwargs):
        if data['window_hi'] < data['window_lo']:
            raise ValidationError('window_hi must be >= window_lo', 'window_hi')
        if data['window_hi'] > parameter('sieve', 'ceiling'):
            raise ValidationError('window_hi exceeds the sieve ceiling', 'window_hi')
        if data['d_max'] > parameter('adele', 'max_degree'):
            raise ValidationError('d_max exceeds the scan guardrail', 'd_max')
        if data['h_max'] > parameter('adele', 'max_height'):
            raise ValidationError('h_max exceeds the scan guardrail', 'h_max')

    @post_load
    def make_config(self, data, **kwargs) -> RunConfig:
        data['output_path'] = data.get('output_path') or None
        return RunConfig(**data)


def parse_run_config(values: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfigSchema().load(values)
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e.messages}")


def load_run_config(path: str) -> RunConfig:
    """Read a flat key=value run configuration file"""
    if not os.path.exists(path):
        raise ConfigError(f"run configuration not found: {path}")
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    logger.info(f"Loaded run configuration from {path} ({len(values)} keys)")
    return parse_run_config(values)


def save_run_config(config: RunConfig, path: str) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        for key, value in config.to_flat().items():
            f.write(f"{key}={value}\n")
    logger.info(f"Run configuration saved to {path}")
