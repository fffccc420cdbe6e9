"""Instance enumeration, solution families, and squared-value sequences.

An *instance* is one concrete constraint f(x1^2+...+xk^2) = f(x1)^2+...+
f(xk)^2.  The three candidate solution families (zero, the identity with
free signs off the representable set, and the constant 1/k with the same
sign freedom) are evaluated exactly and checked against every instance up
to a bound.  The squared values A_n = f(n)^2 satisfy a linear recurrence
that pins the whole sequence from finitely many seeds; extending seeds and
cross-checking the result against all instances is the computational form
of the induction used in the classification.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InputError, StateError
from .squares import get_table, non_representable_up_to

FAMILY_KINDS = ("zero", "identity", "reciprocal")


@dataclass(frozen=True)
class Instance:
    """One equation instance: k parts xs (sorted multiset) with n = sum of squares."""

    k: int
    xs: tuple[int, ...]
    n: int


def enumerate_instances(limit: int, k: int) -> Iterator[Instance]:
    """Every multiset x1 <= ... <= xk with sum of squares <= limit, in (n, lex) order.

    The search walks prefixes in ascending order (so each bucket is already
    lexicographically sorted) and buffers one bucket per target value to
    emit the stream in deterministic (n, lex) order.
    """
    if k < 3:
        raise InputError(f"part count k must be at least 3, got {k}")
    buckets: dict[int, list[tuple[int, ...]]] = {}

    def rec(prefix: tuple[int, ...], total: int, min_x: int, parts: int) -> None:
        if parts == 0:
            buckets.setdefault(total, []).append(prefix)
            return
        x = min_x
        while total + parts * x * x <= limit:
            rec(prefix + (x,), total + x * x, x, parts - 1)
            x += 1

    if limit >= k:
        rec((), 0, 1, k)
    for n in range(k, limit + 1):
        for xs in buckets.get(n, ()):
            yield Instance(k=k, xs=xs, n=n)


# -- families -----------------------------------------------------------------


def random_signs(k: int, limit: int, seed: int) -> dict[int, int]:
    """Pseudo-random +-1 assignment on the non-representable n <= limit."""
    rng = random.Random(seed)
    return {n: rng.choice((1, -1)) for n in non_representable_up_to(limit, k)}


class Family:
    """One candidate solution on the domain [1..N], evaluated exactly.

    Values are held as integer numerators over one common denominator, so
    instance checks stay in unbounded-integer arithmetic; ``value`` exposes
    the canonical rational.  ``signs`` may only mention non-representable
    positions (values at representable positions are forced), while
    ``overrides`` may corrupt any position -- they exist so tests and the
    CLI can plant violations on purpose.
    """

    __slots__ = ("kind", "k", "N", "signs", "overrides", "_den", "_num")

    def __init__(self, kind: str, k: int, N: int,
                 signs: Mapping[int, int] | None = None,
                 overrides: Mapping[int, Fraction] | None = None):
        if kind not in FAMILY_KINDS:
            raise InputError(f"unknown family kind {kind!r}")
        if k < 3:
            raise InputError(f"part count k must be at least 3, got {k}")
        if N < 1:
            raise InputError(f"domain bound must be positive, got {N}")
        table = get_table(k, N)
        signs = dict(signs or {})
        for n, s in signs.items():
            if not 1 <= n <= N:
                raise InputError(f"sign assignment at {n} outside [1, {N}]")
            if s not in (1, -1):
                raise InputError(f"sign at {n} must be +1 or -1, got {s}")
            if table.representable(n):
                raise InputError(
                    f"sign assignment at representable n = {n}: that value is forced")
        overrides = {n: Fraction(v) for n, v in (overrides or {}).items()}
        for n in overrides:
            if not 1 <= n <= N:
                raise InputError(f"override at {n} outside [1, {N}]")
        self.kind = kind
        self.k = k
        self.N = N
        self.signs = signs
        self.overrides = overrides

        den = 1 if kind != "reciprocal" else k
        for v in overrides.values():
            den = den * v.denominator // gcd(den, v.denominator)
        num = [0] * (N + 1)
        for n in range(1, N + 1):
            if n in overrides:
                num[n] = overrides[n].numerator * (den // overrides[n].denominator)
            elif kind == "zero":
                num[n] = 0
            elif kind == "identity":
                num[n] = n * den if table.representable(n) else signs.get(n, 1) * n * den
            else:
                unit = den // k
                num[n] = unit if table.representable(n) else signs.get(n, 1) * unit
        self._den = den
        self._num = num

    def value(self, n: int) -> Fraction:
        """Exact f(n); n outside the built domain is an input error."""
        if not 1 <= n <= self.N:
            raise InputError(f"n = {n} outside the family domain [1, {self.N}]")
        return Fraction(self._num[n], self._den)

    def with_override(self, n: int, value: Fraction) -> "Family":
        merged = dict(self.overrides)
        merged[n] = Fraction(value)
        return Family(self.kind, self.k, self.N, self.signs, merged)

    def with_sign_flipped(self, n: int) -> "Family":
        if n not in self.signs and get_table(self.k, self.N).representable(n):
            raise InputError(f"cannot flip a sign at representable n = {n}")
        flipped = dict(self.signs)
        flipped[n] = -flipped.get(n, 1)
        return Family(self.kind, self.k, self.N, flipped, self.overrides)


def family_value(fam: Family, n: int) -> Fraction:
    return fam.value(n)


@dataclass(frozen=True)
class Violation:
    """An instance where the pinned left side differs from the sum of squares."""

    xs: tuple[int, ...]
    n: int
    lhs: Fraction
    rhs: Fraction


def check_instance(fam: Family, inst: Instance) -> Violation | None:
    """Compare f(n) with sum of f(x_i)^2 exactly; None means the instance holds."""
    if not 1 <= inst.n <= fam.N:
        raise InputError(f"instance target {inst.n} outside the family domain")
    num = fam._num
    den = fam._den
    total = 0
    for x in inst.xs:
        total += num[x] * num[x]
    if num[inst.n] * den == total:
        return None
    return Violation(xs=inst.xs, n=inst.n,
                     lhs=Fraction(num[inst.n], den),
                     rhs=Fraction(total, den * den))


@dataclass
class VerificationReport:
    k: int
    N: int
    family: str
    instances: int
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_block(fam: Family, block: Sequence[Instance]) -> list[Violation]:
    out = []
    for inst in block:
        v = check_instance(fam, inst)
        if v is not None:
            out.append(v)
    return out


def verify_family(fam: Family, limit: int, k: int,
                  instances: Iterable[Instance] | None = None,
                  threads: int = 1,
                  stop_after: int | None = None) -> VerificationReport:
    """Check every instance with n <= limit against the family.

    ``instances`` lets callers reuse a pre-enumerated stream across repeated
    verifications of the same (limit, k).  With ``stop_after`` the scan ends
    once that many violations are found (the report then covers only the
    instances checked so far); results are deterministic either way.
    """
    if k != fam.k:
        raise InputError(f"family was built for k = {fam.k}, not {k}")
    if limit > fam.N:
        raise InputError(f"family domain [1, {fam.N}] is smaller than {limit}")
    if threads < 1:
        raise InputError("threads must be at least 1")
    stream = instances if instances is not None else enumerate_instances(limit, k)

    violations: list[Violation] = []
    count = 0
    if threads == 1:
        for inst in stream:
            count += 1
            v = check_instance(fam, inst)
            if v is not None:
                violations.append(v)
                if stop_after is not None and len(violations) >= stop_after:
                    break
    else:
        todo = list(stream)
        count = len(todo)
        size = (len(todo) + threads - 1) // threads or 1
        blocks = [todo[i:i + size] for i in range(0, len(todo), size)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(lambda b: _check_block(fam, b), blocks):
                violations.extend(part)
        if stop_after is not None:
            violations = violations[:stop_after]
    return VerificationReport(k=k, N=limit, family=fam.kind,
                              instances=count, violations=violations)


# -- squared-value sequences ---------------------------------------------------


def recurrence_identity_parts(n: int, k: int) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """The two decompositions whose shared target yields the recurrence at n.

    For k = 3 the target 2n^2+9 is reached by {n-2, 1, n+2} and {n, n, 3};
    for k >= 4 the target 2n^2+k+6 is reached by {n-1, n+1, 2, 2, 1^(k-4)}
    and {n, n, 3, 1^(k-3)}.  Both sides have exactly k parts for n >= 3.
    """
    if n < 3:
        raise InputError("recurrence parts are defined for n >= 3")
    if k < 3:
        raise InputError(f"part count k must be at least 3, got {k}")
    if k == 3:
        return 2 * n * n + 9, tuple(sorted((n - 2, 1, n + 2))), tuple(sorted((n, n, 3)))
    target = 2 * n * n + k + 6
    lhs = tuple(sorted((n - 1, n + 1, 2, 2) + (1,) * (k - 4)))
    rhs = tuple(sorted((n, n, 3) + (1,) * (k - 3)))
    return target, lhs, rhs


class SquareSeq:
    """The sequence A_n = f(n)^2 on [1..N] with per-entry provenance."""

    __slots__ = ("k", "_values", "_provenance")

    def __init__(self, k: int, capacity: int):
        if k < 3:
            raise InputError(f"part count k must be at least 3, got {k}")
        if capacity < 1:
            raise InputError("capacity must be positive")
        self.k = k
        self._values: list[Fraction | None] = [None] * (capacity + 1)
        self._provenance: list[str | None] = [None] * (capacity + 1)

    @property
    def N(self) -> int:
        return len(self._values) - 1

    def get(self, n: int) -> Fraction:
        if not 1 <= n <= self.N or self._values[n] is None:
            raise StateError(f"sequence entry A_{n} is not available")
        return self._values[n]

    def provenance(self, n: int) -> str:
        self.get(n)
        return self._provenance[n]

    def set(self, n: int, value: Fraction, provenance: str) -> None:
        if provenance not in ("seed", "recurrence", "pinned"):
            raise InputError(f"unknown provenance {provenance!r}")
        if not 1 <= n <= self.N:
            raise InputError(f"entry index {n} outside [1, {self.N}]")
        self._values[n] = Fraction(value)
        self._provenance[n] = provenance

    def complete(self) -> bool:
        return all(v is not None for v in self._values[1:])

    @classmethod
    def from_family(cls, fam: Family) -> "SquareSeq":
        seq = cls(fam.k, fam.N)
        for n in range(1, fam.N + 1):
            v = fam.value(n)
            seq.set(n, v * v, "pinned")
        return seq


def recurrence_next(seq: SquareSeq, n: int) -> Fraction:
    """The next squared value implied by the recurrence anchored at n >= 3.

    For k = 3 this produces A_(n+2) = 2 A_n + A_3 - A_(n-2) - A_1; for
    k >= 4 it produces A_(n+1) = 2 A_n + A_3 - A_(n-1) - 2 A_2 + A_1.
    Missing prerequisite entries raise StateError.
    """
    if n < 3:
        raise InputError("recurrence is anchored at n >= 3")
    if seq.k == 3:
        return 2 * seq.get(n) + seq.get(3) - seq.get(n - 2) - seq.get(1)
    return 2 * seq.get(n) + seq.get(3) - seq.get(n - 1) - 2 * seq.get(2) + seq.get(1)


def extend_seq(seeds: Sequence[Fraction], limit: int, k: int) -> SquareSeq:
    """Fill [1..limit] from the seed prefix via the recurrence.

    k = 3 needs the four seeds A_1..A_4; k >= 4 needs A_1..A_3.  Longer
    prefixes are accepted verbatim and extension continues after them.
    """
    required = 4 if k == 3 else 3
    if len(seeds) < required:
        raise InputError(f"k = {k} needs at least {required} seed values")
    if limit < len(seeds):
        raise InputError(f"bound {limit} is smaller than the seed prefix")
    seq = SquareSeq(k, limit)
    for i, value in enumerate(seeds, start=1):
        seq.set(i, value, "seed")
    step = 2 if k == 3 else 1
    for m in range(len(seeds) + 1, limit + 1):
        seq.set(m, recurrence_next(seq, m - step), "recurrence")
    return seq


@dataclass(frozen=True)
class Conflict:
    """An instance whose pinned value contradicts the sequence."""

    instance: Instance
    forced: Fraction     # f(n) as pinned by the instance's right side
    lhs: Fraction        # forced^2
    rhs: Fraction        # stored A_n


def seq_cross_check(seq: SquareSeq, limit: int, k: int,
                    instances: Iterable[Instance] | None = None) -> list[Conflict]:
    """Check the sequence against every instance, not just recurrence ones.

    Each instance pins f(n) = sum of A_(x_i); consistency demands that the
    square of that pinned value equals A_n.  Returns the conflicts (empty
    list means ok).
    """
    if k != seq.k:
        raise InputError(f"sequence was built for k = {seq.k}, not {k}")
    if limit > seq.N:
        raise InputError(f"sequence covers [1, {seq.N}], cannot check up to {limit}")
    conflicts = []
    for inst in instances if instances is not None else enumerate_instances(limit, k):
        forced = sum(seq.get(x) for x in inst.xs)
        if forced * forced != seq.get(inst.n):
            conflicts.append(Conflict(instance=inst, forced=forced,
                                      lhs=forced * forced, rhs=seq.get(inst.n)))
    return conflicts
