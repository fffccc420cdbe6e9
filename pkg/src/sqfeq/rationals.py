"""Exact rational arithmetic used everywhere in the package.

Python integers are unbounded, and ``fractions.Fraction`` already keeps
values in canonical reduced form (gcd-free, positive denominator, zero as
0/1), so this module is a thin contract layer over the standard library:
construction with explicit error handling, the four arithmetic operations
by name, exact integer square roots, and the ``p/q`` string form used in
every JSON report.

No floating point appears anywhere downstream of these helpers.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import InputError

Rational = Fraction

_ARITH_OPS = ("add", "sub", "mul", "div")

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


def make_rational(p: int, q: int = 1) -> Fraction:
    """Build p/q in canonical form; a zero denominator is an input error."""
    if q == 0:
        raise InputError("zero denominator")
    return Fraction(p, q)


def rational_arith(op: str, a: Fraction, b: Fraction) -> Fraction:
    """Apply one of add/sub/mul/div exactly.

    Division by zero raises ZeroDivisionError (an arithmetic error), not an
    input error: the operands were admissible, the operation was not.
    """
    if op not in _ARITH_OPS:
        raise InputError(f"unknown operation {op!r}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    return a / b


def isqrt_exact(n: int) -> tuple[int, bool]:
    """Return (floor(sqrt(n)), whether n is a perfect square)."""
    if n < 0:
        raise InputError("isqrt of a negative integer")
    r = math.isqrt(n)
    return r, r * r == n


def format_rational(x: Fraction) -> str:
    """Canonical string form: "p/q", with "/q" omitted when q = 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "p", "-p" or "p/q" (the inverse of format_rational)."""
    m = _RATIONAL_RE.match(text.strip())
    if not m:
        raise InputError(f"not a rational literal: {text!r}")
    p = int(m.group(1))
    q = int(m.group(2)) if m.group(2) else 1
    return make_rational(p, q)
