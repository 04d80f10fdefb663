"""Parsing of complex literals such as 1.5, -2, 0.25+1.5i or 3-0.5i."""

import argparse
import re
from typing import List

_NUMBER = r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?"
_LITERAL = re.compile(rf"^(?P<real>[+-]?{_NUMBER})(?:(?P<sign>[+-])(?P<imag>{_NUMBER})?i)?$")
_RANGE = re.compile(r"^(?P<start>\d+)\.\.(?P<stop>\d+)$")


def parse_complex(text: str) -> complex:
    """Parse ``[-]a[.b][(+|-)c[.d]i]``; a bare ``+i`` or ``-i`` means unit imaginary part.

    Raises:
        argparse.ArgumentTypeError: If the text does not follow the grammar
    """
    match = _LITERAL.match(text.strip())
    if match is None:
        raise argparse.ArgumentTypeError(f"malformed complex literal '{text}' (expected a+bi)")
    real = float(match.group("real"))
    if match.group("sign") is None:
        return complex(real, 0.0)
    imag = float(match.group("imag")) if match.group("imag") else 1.0
    return complex(real, -imag if match.group("sign") == "-" else imag)


def parse_orders(text: str) -> List[int]:
    """Parse ``a..b`` (inclusive) or a comma-separated list of orders."""
    text = text.strip()
    match = _RANGE.match(text)
    if match:
        start, stop = int(match.group("start")), int(match.group("stop"))
        if stop < start:
            raise argparse.ArgumentTypeError(f"empty order range '{text}'")
        return list(range(start, stop + 1))
    try:
        orders = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed order list '{text}'") from None
    if not orders or min(orders) < 0:
        raise argparse.ArgumentTypeError(f"orders must be non-negative integers, got '{text}'")
    return orders


def format_complex(value: complex) -> str:
    """Exact text form: the real part alone when the imaginary part is zero."""
    value = complex(value)
    if value.imag == 0:
        return repr(value.real)
    return f"{value.real!r} {value.imag!r}"
