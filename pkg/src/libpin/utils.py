import json
import logging
import os
import re
from fractions import Fraction

import pandas as pd

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(verbose=False, quiet=False):
    """Configure the root logger once for command-line use."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)


def save_results(data, filename, directory='results'):
    """
    Save a report to a file.

    Parameters:
    -----------
    data : pandas.DataFrame, dict or list
        Tabular data is written as CSV, anything else as canonical JSON
    filename : str
        Filename to save to
    directory : str, optional
        Directory to save in, defaults to 'results'

    Returns:
    --------
    str
        Path of the written file
    """
    os.makedirs(directory, exist_ok=True)
    filepath = os.path.join(directory, filename)

    if isinstance(data, pd.DataFrame):
        data.to_csv(filepath, index=False)
    else:
        with open(filepath, 'w', encoding='utf-8') as fh:
            fh.write(dump_json(data))

    logger.info(f"Saved results to {filepath}")
    return filepath


def dump_json(data):
    """Serialize with stable key order and a trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def format_ratio(value, places=6):
    """
    Render an exact ratio as a fixed-point decimal string.

    Parameters:
    -----------
    value : fractions.Fraction or int
        Ratio to render
    places : int, optional
        Digits after the decimal point

    Returns:
    --------
    str
        Rounded decimal, e.g. Fraction(2, 3) -> '0.666667'
    """
    value = Fraction(value)
    scaled = round(value * 10 ** places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** places)
    return f"{sign}{whole}.{frac:0{places}d}"


def natural_key(version):
    """
    Sort key comparing digit runs numerically ('2.10' after '2.9').

    This is an ordering aid for version strings with no recorded release
    order, not a semantic-version parser.
    """
    parts = re.split(r'(\d+)', version)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts if p != "")
