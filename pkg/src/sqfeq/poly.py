"""Sparse multivariate polynomial kernel over the rationals.

Everything symbolic in the package runs through this module: expansion of
the square-decomposition identities, the variable eliminations, the stated
factorizations (verified, never discovered), univariate GCDs and rational
root sets.  Polynomials are immutable and canonical: no zero coefficients
are stored, equal polynomials are structurally equal, and printing is
deterministic (terms in descending lexicographic order with variable
priority A, B, C, D, E, k, then any other names alphabetically).

The text grammar accepted by :func:`parse_poly`::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?          # exponent: bare nonnegative integer
    atom   := NUM | NAME | '(' expr ')'
    NUM    := INT ('/' INT)?           # rational literal, e.g. 25/9

Implicit multiplication is rejected; '/' only forms rational literals.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import InputError, ParseError
from .rationals import format_rational

Monomial = tuple[tuple[str, int], ...]
Scalar = Union[int, Fraction]

_VAR_PRIORITY = {"A": 0, "B": 1, "C": 2, "D": 3, "E": 4, "k": 5}


def _rank(name: str) -> tuple[int, str]:
    return _VAR_PRIORITY.get(name, 6), name


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    exps: dict[str, int] = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda item: _rank(item[0])))


class Poly:
    """Immutable polynomial in named variables with Fraction coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        canonical: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c == 0:
                    continue
                mono = tuple(sorted(((v, e) for v, e in mono if e != 0),
                                    key=lambda item: _rank(item[0])))
                for _, e in mono:
                    if e < 0:
                        raise InputError("negative exponent in monomial")
                canonical[mono] = canonical.get(mono, Fraction(0)) + c
                if canonical[mono] == 0:
                    del canonical[mono]
        self._terms = canonical

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        return cls({(): Fraction(value)})

    @classmethod
    def var(cls, name: str) -> "Poly":
        if not name:
            raise InputError("empty variable name")
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def _promote(cls, value: "Poly | Scalar") -> "Poly":
        if isinstance(value, Poly):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot treat {type(value).__name__} as a polynomial")

    # -- inspection --------------------------------------------------------

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        """Iterate terms in canonical (descending lexicographic) order."""
        order = self._variable_order()

        def key(item: tuple[Monomial, Fraction]) -> tuple[int, ...]:
            exps = dict(item[0])
            return tuple(exps.get(v, 0) for v in order)

        return iter(sorted(self._terms.items(), key=key, reverse=True))

    def _variable_order(self) -> list[str]:
        return sorted(self.variables(), key=_rank)

    def variables(self) -> set[str]:
        return {v for mono in self._terms for v, _ in mono}

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {()}

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError("polynomial is not a constant")
        return self._terms.get((), Fraction(0))

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(e for _, e in mono) for mono in self._terms)

    def degree_in(self, var: str) -> int:
        deg = 0
        for mono in self._terms:
            deg = max(deg, dict(mono).get(var, 0))
        return deg

    def coefficient(self, mono: Monomial) -> Fraction:
        mono = tuple(sorted(mono, key=lambda item: _rank(item[0])))
        return self._terms.get(mono, Fraction(0))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly | Scalar") -> "Poly":
        other = self._promote(other)
        merged = dict(self._terms)
        for mono, c in other._terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + c
        return Poly(merged)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({mono: -c for mono, c in self._terms.items()})

    def __sub__(self, other: "Poly | Scalar") -> "Poly":
        return self + (-self._promote(other))

    def __rsub__(self, other: "Poly | Scalar") -> "Poly":
        return self._promote(other) - self

    def __mul__(self, other: "Poly | Scalar") -> "Poly":
        other = self._promote(other)
        product: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                product[m] = product.get(m, Fraction(0)) + c1 * c2
        return Poly(product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise InputError("polynomial exponent must be a nonnegative integer")
        result = Poly.const(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- substitution and evaluation ----------------------------------------

    def substitute(self, var: str, replacement: "Poly | Scalar") -> "Poly":
        """Replace every occurrence of ``var`` and expand to canonical form."""
        replacement = self._promote(replacement)
        result = Poly.zero()
        powers: dict[int, Poly] = {0: Poly.const(1)}
        for mono, coeff in self._terms.items():
            exps = dict(mono)
            e = exps.pop(var, 0)
            if e not in powers:
                powers[e] = replacement ** e
            rest = Poly({tuple(sorted(exps.items(), key=lambda i: _rank(i[0]))): coeff})
            result = result + rest * powers[e]
        return result

    def evaluate(self, assignment: Mapping[str, Scalar]) -> Fraction:
        """Evaluate with every variable bound to a rational."""
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            value = coeff
            for v, e in mono:
                if v not in assignment:
                    raise InputError(f"no value supplied for variable {v}")
                value *= Fraction(assignment[v]) ** e
            total += value
        return total

    # -- printing ------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for mono, coeff in self.terms():
            mono_str = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            mag = abs(coeff)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono_str
            else:
                body = f"{format_rational(mag)}*{mono_str}"
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"{'-' if coeff < 0 else '+'} {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


# -- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()/]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip():
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad)
            break
        if m.group("int") is not None:
            tokens.append(("int", m.group("int"), m.start("int")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect_op(self, op: str) -> None:
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", pos)
        self.advance()

    def parse(self) -> Poly:
        poly = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return poly

    def expr(self) -> Poly:
        poly = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                poly = poly + rhs if value == "+" else poly - rhs
            else:
                return poly

    def term(self) -> Poly:
        poly = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                poly = poly * self.unary()
            else:
                return poly

    def unary(self) -> Poly:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            ekind, evalue, epos = self.peek()
            if ekind != "int":
                raise ParseError("exponent must be a nonnegative integer literal", epos)
            self.advance()
            return base ** int(evalue)
        return base

    def atom(self) -> Poly:
        kind, value, pos = self.advance()
        if kind == "int":
            nkind, nvalue, _ = self.peek()
            if nkind == "op" and nvalue == "/":
                self.advance()
                dkind, dvalue, dpos = self.peek()
                if dkind != "int":
                    raise ParseError("expected integer denominator", dpos)
                self.advance()
                if int(dvalue) == 0:
                    raise ParseError("zero denominator", dpos)
                return Poly.const(Fraction(int(value), int(dvalue)))
            return Poly.const(int(value))
        if kind == "name":
            return Poly.var(value)
        if kind == "op" and value == "(":
            poly = self.expr()
            self.expect_op(")")
            return poly
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse_poly(text: str) -> Poly:
    """Parse polynomial text into canonical expanded form."""
    return _Parser(text).parse()


def poly_arith(op: str, p: Poly, q: "Poly | int") -> Poly:
    """Named dispatch over the four polynomial operations."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "pow":
        if not isinstance(q, int):
            raise InputError("pow expects an integer exponent")
        return p ** q
    raise InputError(f"unknown operation {op!r}")


# -- structural comparisons ---------------------------------------------------

def equal_up_to_scalar(p: Poly, q: Poly) -> Fraction | None:
    """Return c with p = c*q (c nonzero), or None; (0, 0) gives 1."""
    if p.is_zero() and q.is_zero():
        return Fraction(1)
    if p.is_zero() or q.is_zero():
        return None
    if set(p._terms) != set(q._terms):
        return None
    mono = next(iter(sorted(q._terms)))
    c = p._terms[mono] / q._terms[mono]
    for m, coeff in q._terms.items():
        if p._terms[m] != c * coeff:
            return None
    return c


def verify_factorization(p: Poly, factors: Iterable[tuple[Poly, int]],
                         scalar: Scalar) -> bool:
    """Check p = scalar * product(factor_i ^ mult_i) exactly.

    A zero target never verifies: the stated factorizations all concern
    nonzero polynomials, and accepting 0 = scalar * 0 would let a degenerate
    factor list pass.
    """
    scalar = Fraction(scalar)
    if scalar == 0:
        raise InputError("scalar must be nonzero")
    if p.is_zero():
        return False
    product = Poly.const(scalar)
    for factor, mult in factors:
        if mult < 0:
            raise InputError("factor multiplicity must be nonnegative")
        product = product * factor ** mult
    return product == p


# -- univariate helpers -------------------------------------------------------

def _dense_coeffs(p: Poly, var: str) -> list[Fraction]:
    """Ascending-degree dense coefficient list; input error if multivariate."""
    extra = p.variables() - {var}
    if extra:
        names = ", ".join(sorted(extra))
        raise InputError(f"polynomial is not univariate in {var}: contains {names}")
    coeffs = [Fraction(0)] * (p.degree_in(var) + 1)
    for mono, c in p._terms.items():
        e = dict(mono).get(var, 0)
        coeffs[e] = c
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _from_dense(coeffs: list[Fraction], var: str) -> Poly:
    terms: dict[Monomial, Fraction] = {}
    for e, c in enumerate(coeffs):
        if c != 0:
            terms[((var, e),) if e else ()] = c
    return Poly(terms)


def _dense_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = list(num)
    quot = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    lead = den[-1]
    for shift in range(len(num) - len(den), -1, -1):
        factor = num[shift + len(den) - 1] / lead
        quot[shift] = factor
        if factor:
            for i, d in enumerate(den):
                num[shift + i] -= factor * d
    rem = num[:len(den) - 1]
    while len(rem) > 1 and rem[-1] == 0:
        rem.pop()
    if not rem:
        rem = [Fraction(0)]
    return quot, rem


def poly_divmod(p: Poly, q: Poly, var: str) -> tuple[Poly, Poly]:
    """Univariate division with remainder over the rationals."""
    den = _dense_coeffs(q, var)
    if den == [Fraction(0)]:
        raise ZeroDivisionError("polynomial division by zero")
    num = _dense_coeffs(p, var)
    if len(num) < len(den):
        return Poly.zero(), p
    quot, rem = _dense_divmod(num, den)
    return _from_dense(quot, var), _from_dense(rem, var)


def univariate_gcd(p: Poly, q: Poly, var: str) -> Poly:
    """Monic Euclidean GCD; gcd(p, 0) = monic(p), gcd(0, 0) = 0."""
    a = _dense_coeffs(p, var)
    b = _dense_coeffs(q, var)
    while b != [Fraction(0)]:
        _, r = _dense_divmod(a, b)
        a, b = b, r
    if a == [Fraction(0)]:
        return Poly.zero()
    lead = a[-1]
    return _from_dense([c / lead for c in a], var)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def clear_denominators(p: Poly) -> tuple[Poly, Fraction]:
    """Return (q, m) with q = m*p having coprime integer coefficients and a
    positive leading (canonical-order) coefficient; (0, 1) for the zero poly."""
    if p.is_zero():
        return p, Fraction(1)
    coeffs = [c for _, c in p._terms.items()]
    denom_lcm = 1
    for c in coeffs:
        denom_lcm = denom_lcm * c.denominator // math.gcd(denom_lcm, c.denominator)
    num_gcd = 0
    for c in coeffs:
        num_gcd = math.gcd(num_gcd, abs(c.numerator * (denom_lcm // c.denominator)))
    m = Fraction(denom_lcm, num_gcd)
    lead_coeff = next(iter(p.terms()))[1]
    if lead_coeff < 0:
        m = -m
    return p * m, m


def rational_roots(p: Poly, var: str) -> set[Fraction]:
    """All rational roots of a nonzero univariate polynomial.

    Uses the rational-root bound on the primitive integer form: any root
    r/s in lowest terms has r dividing the trailing and s dividing the
    leading coefficient.
    """
    coeffs = _dense_coeffs(p, var)
    if coeffs == [Fraction(0)]:
        raise InputError("rational_roots of the zero polynomial")
    roots: set[Fraction] = set()
    low = 0
    while coeffs[low] == 0:
        low += 1
    if low:
        roots.add(Fraction(0))
        coeffs = coeffs[low:]
    if len(coeffs) == 1:
        return roots
    primitive, _ = clear_denominators(_from_dense(coeffs, var))
    icoeffs = _dense_coeffs(primitive, var)
    trailing = icoeffs[0].numerator
    leading = icoeffs[-1].numerator
    for r in _divisors(trailing):
        for s in _divisors(leading):
            for cand in (Fraction(r, s), Fraction(-r, s)):
                if cand in roots:
                    continue
                value = Fraction(0)
                for c in reversed(icoeffs):
                    value = value * cand + c
                if value == 0:
                    roots.add(cand)
    return roots


def solve_linear(p: Poly, var: str) -> Poly:
    """Solve p = 0 for ``var`` when p = c*var + rest with constant c.

    Returns -rest/c; used by the eliminations, which only ever solve
    relations that are linear in the variable being removed.
    """
    c = Fraction(0)
    rest: dict[Monomial, Fraction] = {}
    for mono, coeff in p._terms.items():
        exps = dict(mono)
        e = exps.get(var, 0)
        if e == 0:
            rest[mono] = coeff
        elif e == 1 and len(exps) == 1:
            c = coeff
        else:
            raise InputError(f"relation is not linear in {var} with constant coefficient")
    if c == 0:
        raise InputError(f"relation does not involve {var}")
    return Poly(rest) * (Fraction(-1) / c)
