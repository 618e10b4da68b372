"""Rendering of log-scale values as mantissa times a power of ten."""

from __future__ import annotations

import math

import mpmath

__all__ = ["mantissa_exponent"]


def mantissa_exponent(log_value: float, sig_digits: int = 11) -> tuple[str, int]:
    """Split exp(log_value) into a decimal mantissa string in [1, 10) and
    an integer exponent, rounded to the requested significant digits."""
    if log_value == -math.inf:
        return "0", 0
    if not math.isfinite(log_value):
        raise ValueError(f"log value {log_value} is not renderable")
    with mpmath.workdps(40):
        l10 = mpmath.mpf(log_value) / mpmath.ln(10)
        exponent = int(mpmath.floor(l10))
        mant = mpmath.power(10, l10 - exponent)
        text = mpmath.nstr(mant, sig_digits, strip_zeros=False)
        if mpmath.mpf(text) >= 10:
            exponent += 1
            text = mpmath.nstr(mant / 10, sig_digits, strip_zeros=False)
    return text, exponent
