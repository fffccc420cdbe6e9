"""Representations of integers as sums of exactly k positive squares.

The predicate "n is a sum of k positive squares" drives the whole case
split: values at representable arguments are forced, values elsewhere only
ever appear squared and so carry a free sign.  Representability is decided
by an exhaustive dynamic-programming table, not by classical square
theorems, so the module owes nothing to unproved external results.
"""

from __future__ import annotations

import math

from .errors import InputError

Witness = tuple[int, ...]


def _check_k(k: int) -> None:
    if k < 3:
        raise InputError(f"part count k must be at least 3, got {k}")


class ReprTable:
    """Memoized table entry(n, j) = "n is a sum of j positive squares".

    Row 1 marks the positive perfect squares; row j is reachable by
    removing one positive square from row j-1.  The table is built once,
    extends in place when a larger bound is needed, and is immutable from
    the callers' point of view, so concurrent queries are safe.
    """

    def __init__(self, k: int, limit: int):
        _check_k(k)
        if limit < 0:
            raise InputError("table limit must be nonnegative")
        self.k = k
        self.limit = -1
        self._rows: list[bytearray] = [bytearray() for _ in range(k + 1)]
        self.extend(limit)

    def extend(self, limit: int) -> None:
        """Grow the table bound in place; entries below the old bound are reused."""
        if limit <= self.limit:
            return
        old = self.limit
        for j in range(1, self.k + 1):
            self._rows[j].extend(b"\0" * (limit - old))
        row1 = self._rows[1]
        for x in range(1, math.isqrt(limit) + 1):
            if x * x > old:
                row1[x * x] = 1
        for j in range(2, self.k + 1):
            row, prev = self._rows[j], self._rows[j - 1]
            for n in range(max(j, old + 1), limit + 1):
                for x in range(1, math.isqrt(n - (j - 1)) + 1):
                    if prev[n - x * x]:
                        row[n] = 1
                        break
        self.limit = limit

    def entry(self, n: int, j: int) -> bool:
        if not 1 <= j <= self.k:
            raise InputError(f"part index {j} outside [1, {self.k}]")
        if not 0 <= n <= self.limit:
            raise InputError(f"value {n} outside the table bound {self.limit}")
        return bool(self._rows[j][n])

    def representable(self, n: int) -> bool:
        return self.entry(n, self.k)


_tables: dict[int, ReprTable] = {}


def get_table(k: int, limit: int) -> ReprTable:
    """Shared per-k table, grown on demand (single-writer, then read-only)."""
    _check_k(k)
    table = _tables.get(k)
    if table is None:
        table = _tables[k] = ReprTable(k, limit)
    else:
        table.extend(limit)
    return table


def _search(n: int, k: int, table: ReprTable, limit: int | None) -> list[Witness]:
    """Ascending depth-first search over multisets x1 <= ... <= xk.

    Visits witnesses in lexicographic order, so the first hit is the
    lexicographically smallest; the table prunes unreachable remainders.
    """
    found: list[Witness] = []

    def rec(prefix: tuple[int, ...], remaining: int, min_x: int, parts: int) -> bool:
        if parts == 1:
            root = math.isqrt(remaining)
            if root * root == remaining and root >= min_x:
                found.append(prefix + (root,))
                return limit is not None and len(found) >= limit
            return False
        for x in range(min_x, math.isqrt(remaining // parts) + 1):
            rest = remaining - x * x
            if table.entry(rest, parts - 1):
                if rec(prefix + (x,), rest, x, parts - 1):
                    return True
        return False

    rec((), n, 1, k)
    return found


def is_representable(n: int, k: int) -> tuple[bool, Witness | None]:
    """Decide representability; on success also return the smallest witness."""
    _check_k(k)
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    table = get_table(k, n)
    if not table.representable(n):
        return False, None
    return True, _search(n, k, table, limit=1)[0]


def representations(n: int, k: int, limit: int | None = None) -> list[Witness]:
    """All distinct multiset witnesses for n (up to limit), in lex order."""
    _check_k(k)
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    if limit is not None and limit < 1:
        raise InputError("limit must be positive when given")
    table = get_table(k, n)
    if not table.representable(n):
        return []
    return _search(n, k, table, limit)


def non_representable_up_to(limit: int, k: int) -> list[int]:
    """All n <= limit with no representation, ascending."""
    _check_k(k)
    if limit < 1:
        raise InputError(f"limit must be positive, got {limit}")
    table = get_table(k, limit)
    return [n for n in range(1, limit + 1) if not table.representable(n)]
