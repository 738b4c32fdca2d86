import json
import math
import re
import sys

import numpy as np
import pandas as pd

from errors import DomainError

LENGTH_UNITS = {
    'm': 1.0,
    'mm': 1e-3,
    'um': 1e-6,
    'nm': 1e-9,
    'pm': 1e-12,
}


def split_list(data, size):
    """
    Gets list of data + size
    Returns list of lists, size of them
    Last batch contains remainder of division on size
    """
    if size < 1:
        raise DomainError(f'size must be >= 1, got {size}')
    part_size = len(data) // size
    remainder = len(data) % size
    result = [[] for _ in range(size)]

    pointer = 0
    for i in range(size):
        result[i] = list(data[pointer: pointer + part_size])
        pointer += part_size

    if remainder > 0:
        result[size - 1].extend(data[-remainder:])
    return result


def parse_grid(spec):
    """
    Gets 'lo:hi:n'
    Returns n evenly spaced points from lo to hi inclusive
    """
    parts = spec.split(':')
    if len(parts) != 3:
        raise DomainError(f'grid must look like lo:hi:n, got {spec!r}')
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DomainError(f'grid must look like lo:hi:n, got {spec!r}') from None
    if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f'bad grid {spec!r}')
    if n > 1 and not lo < hi:
        raise DomainError(f'grid needs lo < hi, got {spec!r}')
    return np.linspace(lo, hi, n)


def parse_angle(text):
    """Accepts plain radians and multiples of pi like 'pi', '-pi/2', '0.5pi'"""
    value = text.strip().lower().replace(' ', '')
    match = re.fullmatch(r'([+-]?[0-9.e]*)\*?pi(?:/([0-9.]+))?', value)
    if match:
        factor = match.group(1)
        if factor in ('', '+'):
            factor = 1.0
        elif factor == '-':
            factor = -1.0
        else:
            factor = float(factor)
        divisor = float(match.group(2)) if match.group(2) else 1.0
        return factor * math.pi / divisor
    try:
        return float(value)
    except ValueError:
        raise DomainError(f'cannot read angle {text!r}') from None


def parse_length(text):
    """
    Gets length like '10nm', '1.5 um' or '2e-8'
    Returns metres
    """
    match = re.fullmatch(r'\s*([0-9.eE+-]+)\s*([a-z]*)\s*', text)
    if not match:
        raise DomainError(f'cannot read length {text!r}')
    number, unit = match.groups()
    unit = unit or 'm'
    if unit not in LENGTH_UNITS:
        raise DomainError(f'unknown length unit {unit!r}, use one of {sorted(LENGTH_UNITS)}')
    try:
        value = float(number) * LENGTH_UNITS[unit]
    except ValueError:
        raise DomainError(f'cannot read length {text!r}') from None
    if not value > 0:
        raise DomainError(f'length must be positive, got {text!r}')
    return value


def rows_to_df(rows, columns=None):
    """
    Gets list of dicts
    Returns dataframe in row order
    """
    df = pd.DataFrame(rows, columns=columns)
    return df.reset_index(drop=True)


def write_table(df, fmt='csv', path=None):
    """
    Writes dataframe as csv (17 significant digits) or json lines
    to path, or stdout when path is None
    """
    if fmt == 'csv':
        text = df.to_csv(index=False, float_format='%.17g', lineterminator='\n')
    elif fmt == 'jsonl':
        lines = [json.dumps(_plain(record)) for record in df.to_dict(orient='records')]
        text = '\n'.join(lines) + ('\n' if lines else '')
    else:
        raise DomainError(f'unknown format {fmt!r}')

    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)


def _plain(record):
    out = {}
    for key, value in record.items():
        if isinstance(value, np.generic):
            value = value.item()
        out[key] = value
    return out
