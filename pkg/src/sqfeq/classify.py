"""Identity ledger, elimination certificates, and the classification driver.

The ledger holds the displayed square-decomposition identities, each
validated against the representability machinery and turned into a
polynomial relation in the squared values A..E (A_1..A_5) and, for the
general case, the symbol k.  The certificate functions replay the
eliminations: every stated factored form is checked up to an exact scalar,
root sets come from the rational-root routine, completeness of each branch
is certified by a univariate GCD, and every surviving seed is re-checked
against the full ledger.  Nothing is discovered here; everything is
verified.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import (
    Family,
    enumerate_instances,
    extend_seq,
    seq_cross_check,
    verify_family,
)
from .errors import CertificateError, InputError, LedgerError
from .poly import (
    Poly,
    clear_denominators,
    equal_up_to_scalar,
    parse_poly,
    rational_roots,
    solve_linear,
    univariate_gcd,
    verify_factorization,
)
from .rationals import format_rational
from .squares import get_table, is_representable, non_representable_up_to, representations

SQUARE_VARS = {1: "A", 2: "B", 3: "C", 4: "D", 5: "E"}
CASE_VARS = ("A", "B", "C", "D", "E", "k")

_A, _B, _C, _D, _E = (Poly.var(v) for v in "ABCDE")
_K = Poly.var("k")

PartList = tuple[tuple[object, object], ...]  # (part, count), int or Poly each


@dataclass(frozen=True)
class Side:
    """One decomposition of a record's target; parts None marks the side
    that names the target's squared value by its own variable."""

    parts: PartList | None
    expr: Poly


@dataclass
class IdentityRecord:
    label: str
    target: object                 # int, or Poly in k for the general case
    sides: tuple[Side, Side]
    relation: Poly                 # sides[0].expr - sides[1].expr
    kind: str                      # "pair" or "definition"
    note: str = ""


@dataclass
class Ledger:
    k: int | None                  # None = symbolic (k >= 5)
    records: list[IdentityRecord]
    atoms: dict[object, tuple[PartList, Poly]]  # expanded part -> (decomposition, f-expression)

    def record(self, label: str) -> IdentityRecord:
        for rec in self.records:
            if rec.label == label:
                return rec
        raise InputError(f"no ledger record labeled {label!r}")

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


# -- concrete ledgers (k = 3 and k = 4) ----------------------------------------

# (label, target, lhs parts, rhs parts) with parts as (value, repeat) pairs,
# transcribed with each displayed equation's left side first.
_CASE1_PAIRS = [
    ("3b", 41, ((3, 1), (4, 2)), ((6, 1), (1, 1), (2, 1)), ""),
    ("3c", 146, ((1, 2), (12, 1)), ((11, 1), (3, 1), (4, 1)), ""),
    ("3d", 371, ((19, 1), (3, 1), (1, 1)), ((17, 1), (9, 1), (1, 1)), ""),
    ("3e", 27, ((5, 1), (1, 2)), ((3, 3)), ""),
    ("3f", 33, ((5, 1), (2, 2)), ((1, 1), (4, 2)),
     "transcription note: the stray uppercase '2F(2)^2' is read as 2*f(2)^2"),
    ("3g", 126, ((11, 1), (1, 1), (2, 1)), ((9, 1), (6, 1), (3, 1)), ""),
]

_CASE2_PAIRS = [
    ("4a", 274, ((13, 1), (10, 1), (1, 1), (2, 1)), ((16, 1), (4, 1), (1, 2)), ""),
    ("4b", 268, ((16, 1), (2, 3)), ((13, 1), (7, 2), (1, 1)), ""),
    ("4c", 52, ((7, 1), (1, 3)), ((4, 3), (2, 1)), ""),
    ("4d", 28, ((5, 1), (1, 3)), ((3, 3), (1, 1)), ""),
    ("4e", 37, ((5, 1), (2, 3)), ((4, 2), (1, 1), (2, 1)), ""),
]


def _variable_parts(k: int) -> set[int]:
    """Which small values keep their own squared-value variable A..E.

    Non-representable values below 6 are genuine unknowns.  For k = 3 the
    representable value 3 also keeps its variable C, tied to the expansion
    9*A^2 by the definitional record 3a.
    """
    parts = {m for m in range(1, 6) if not is_representable(m, k)[0]}
    if k == 3:
        parts.add(3)
    return parts


def _normalize_parts(parts) -> PartList:
    if parts and isinstance(parts[0], int):
        parts = (parts,)
    return tuple(parts)


class _ConcreteBuilder:
    def __init__(self, k: int):
        self.k = k
        self.var_parts = _variable_parts(k)
        self.atoms: dict[object, tuple[PartList, Poly]] = {}

    def f_expr(self, m: int) -> Poly:
        """f(m) for representable m, expanded via the smallest witness."""
        ok, witness = is_representable(m, self.k)
        if not ok:
            raise LedgerError(f"part {m} is not a sum of {self.k} positive squares")
        expr = Poly.zero()
        counts: dict[int, int] = {}
        for x in witness:
            counts[x] = counts.get(x, 0) + 1
        for x, c in sorted(counts.items()):
            expr = expr + c * self.a_expr(x)
        self.atoms.setdefault(m, (tuple(sorted(counts.items())), expr))
        return expr

    def a_expr(self, m: int) -> Poly:
        """The squared value A_m as a polynomial in the case variables."""
        if m in self.var_parts:
            return Poly.var(SQUARE_VARS[m])
        return self.f_expr(m) ** 2

    def side(self, parts: PartList) -> Side:
        expr = Poly.zero()
        for part, count in parts:
            expr = expr + count * self.a_expr(part)
        return Side(parts=parts, expr=expr)


def _validate_concrete_side(label: str, side: Side, target: int, k: int) -> None:
    if side.parts is None:
        return
    total_count = 0
    total_square = 0
    for part, count in side.parts:
        if not (isinstance(part, int) and isinstance(count, int)):
            raise LedgerError(f"record {label}: non-integer decomposition entry")
        if part < 1 or count < 1:
            raise LedgerError(f"record {label}: decomposition entries must be positive")
        total_count += count
        total_square += count * part * part
    if total_count != k:
        raise LedgerError(
            f"record {label}: decomposition has {total_count} parts, expected {k}")
    if total_square != target:
        raise LedgerError(
            f"record {label}: squares sum to {total_square}, expected {target}")
    if not is_representable(target, k)[0]:
        raise LedgerError(f"record {label}: target {target} is not representable")


def _build_concrete_records(k: int, pairs, builder: _ConcreteBuilder) -> list[IdentityRecord]:
    records = []
    for label, target, lhs, rhs, note in pairs:
        lhs_side = builder.side(_normalize_parts(lhs))
        rhs_side = builder.side(_normalize_parts(rhs))
        _validate_concrete_side(label, lhs_side, target, k)
        _validate_concrete_side(label, rhs_side, target, k)
        records.append(IdentityRecord(
            label=label, target=target, sides=(lhs_side, rhs_side),
            relation=lhs_side.expr - rhs_side.expr, kind="pair", note=note))
    return records


def _build_ledger_k3() -> Ledger:
    builder = _ConcreteBuilder(3)
    # 3a defines C: the value at the representable 3 expands to (3*A)^2.
    expansion = builder.side(((1, 3),))
    _validate_concrete_side("3a", expansion, 3, 3)
    defined = Side(parts=None, expr=_C)
    squared = Side(parts=expansion.parts, expr=expansion.expr ** 2)
    records = [IdentityRecord(label="3a", target=3, sides=(defined, squared),
                              relation=defined.expr - squared.expr, kind="definition")]
    records.extend(_build_concrete_records(3, _CASE1_PAIRS, builder))
    return Ledger(k=3, records=records, atoms=builder.atoms)


def _build_ledger_k4() -> Ledger:
    builder = _ConcreteBuilder(4)
    return Ledger(k=4, records=_build_concrete_records(4, _CASE2_PAIRS, builder),
                  atoms=builder.atoms)


# -- symbolic ledger (k >= 5) ---------------------------------------------------

def _symbolic_atoms() -> dict[object, tuple[PartList, Poly]]:
    """Expansions of the three k-dependent parts k, k+3 and k+6."""
    return {
        _K: (((1, _K),), _K * _A),
        _K + 3: (((2, 1), (1, _K - 1)), _B + (_K - 1) * _A),
        _K + 6: (((2, 2), (1, _K - 2)), 2 * _B + (_K - 2) * _A),
    }


def _sym_a_expr(part, atoms) -> Poly:
    if isinstance(part, int):
        if part not in (1, 2, 3, 4):
            raise LedgerError(f"symbolic ledger uses only parts 1..4, got {part}")
        return Poly.var(SQUARE_VARS[part])
    return atoms[part][1] ** 2


def _sym_side(parts: PartList, atoms) -> Side:
    expr = Poly.zero()
    for part, count in parts:
        expr = expr + Poly._promote(count) * _sym_a_expr(part, atoms)
    return Side(parts=parts, expr=expr)


def _validate_symbolic_decomposition(label: str, parts: PartList, target, k_expr: Poly) -> None:
    total_count = Poly.zero()
    total_square = Poly.zero()
    for part, count in parts:
        part = Poly._promote(part)
        count = Poly._promote(count)
        total_count = total_count + count
        total_square = total_square + count * part * part
    if total_count != k_expr:
        raise LedgerError(f"record {label}: symbolic part count {total_count} != {k_expr}")
    if total_square != Poly._promote(target):
        raise LedgerError(f"record {label}: symbolic square sum {total_square} != {target}")


def _build_ledger_symbolic() -> Ledger:
    atoms = _symbolic_atoms()
    for value, (parts, f_expr) in atoms.items():
        _validate_symbolic_decomposition(f"atom {value}", parts, value, _K)
        expected = Poly.zero()
        for part, count in parts:
            expected = expected + Poly._promote(count) * Poly.var(SQUARE_VARS[part])
        if expected != f_expr:
            raise LedgerError(f"atom {value}: expansion does not match its parts")

    definitions = [
        ("III-main", 2 * _K ** 2 + 13 * _K + 40,
         ((_K, 1), (_K + 6, 1), (2, 2), (1, _K - 4)),
         ((_K + 3, 2), (3, 3), (1, _K - 5)),
         "main identity for k >= 5"),
        ("III-P1", _K + 15,
         ((4, 1), (1, _K - 1)),
         ((2, 5), (1, _K - 5)),
         "one-argument padding of the value-at-20 identity to all k >= 5"),
        ("III-P2", _K + 24,
         ((3, 3), (1, _K - 3)),
         ((4, 1), (2, 3), (1, _K - 4)),
         "one-argument padding of the value-at-28 identity to all k >= 5"),
    ]
    records = []
    for label, target, lhs, rhs, note in definitions:
        _validate_symbolic_decomposition(label, lhs, target, _K)
        _validate_symbolic_decomposition(label, rhs, target, _K)
        lhs_side = _sym_side(lhs, atoms)
        rhs_side = _sym_side(rhs, atoms)
        records.append(IdentityRecord(
            label=label, target=target, sides=(lhs_side, rhs_side),
            relation=lhs_side.expr - rhs_side.expr, kind="pair", note=note))
    return Ledger(k=None, records=records, atoms=atoms)


def _as_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise LedgerError(f"{what} is not an integer: {value}")
    return value.numerator


def _instantiate_symbolic(k: int) -> Ledger:
    """Specialize the symbolic ledger to a concrete k >= 5 and revalidate."""
    sym = _build_ledger_symbolic()
    kv = Fraction(k)
    records = []
    for rec in sym.records:
        target = _as_int(Poly._promote(rec.target).evaluate({"k": kv}), "target")
        sides = []
        for side in rec.sides:
            merged: dict[int, int] = {}
            for part, count in side.parts:
                pv = _as_int(Poly._promote(part).evaluate({"k": kv}), "part")
                cv = _as_int(Poly._promote(count).evaluate({"k": kv}), "repeat count")
                if cv < 0:
                    raise LedgerError(f"record {rec.label}: negative count at k = {k}")
                if cv:
                    merged[pv] = merged.get(pv, 0) + cv
            sides.append(Side(parts=tuple(sorted(merged.items())),
                              expr=side.expr.substitute("k", kv)))
        relation = rec.relation.substitute("k", kv)
        concrete = IdentityRecord(label=rec.label, target=target,
                                  sides=(sides[0], sides[1]),
                                  relation=relation, kind=rec.kind, note=rec.note)
        _validate_concrete_side(rec.label, concrete.sides[0], target, k)
        _validate_concrete_side(rec.label, concrete.sides[1], target, k)
        records.append(concrete)
    atoms = {}
    for value, (parts, f_expr) in sym.atoms.items():
        pv = _as_int(Poly._promote(value).evaluate({"k": kv}), "atom value")
        merged = {}
        for part, count in parts:
            cv = _as_int(Poly._promote(count).evaluate({"k": kv}), "atom count")
            if cv:
                merged[_as_int(Poly._promote(part).evaluate({"k": kv}), "atom part")] = cv
        atoms[pv] = (tuple(sorted(merged.items())), f_expr.substitute("k", kv))
    return Ledger(k=k, records=records, atoms=atoms)


def build_ledger(k: int | None) -> Ledger:
    """The validated identity ledger for k = 3, k = 4, a concrete k >= 5,
    or the symbolic general case (k = None)."""
    if k is None:
        return _build_ledger_symbolic()
    if k == 3:
        return _build_ledger_k3()
    if k == 4:
        return _build_ledger_k4()
    if k >= 5:
        return _instantiate_symbolic(k)
    raise InputError(f"part count k must be at least 3, got {k}")


# -- certificates ---------------------------------------------------------------

@dataclass
class CertStep:
    label: str
    description: str
    inputs: tuple[str, ...] = ()
    produced: Poly | None = None
    claimed: str | None = None
    scalar: Fraction | None = None
    cleared: Poly | None = None
    gcd: Poly | None = None
    roots: tuple[Fraction, ...] | None = None
    note: str = ""


@dataclass
class SeedSolution:
    family: str
    a_values: tuple[Fraction, ...] | None   # None for the symbolic general case
    a_texts: tuple[str, ...]
    pinned: dict[str, str] = field(default_factory=dict)


@dataclass
class Rejection:
    branch: str
    point: dict[str, Fraction]
    identity: str
    lhs: Fraction
    rhs: Fraction


@dataclass
class CaseCertificate:
    case: str
    k: int | None
    ledger: Ledger
    steps: list[CertStep]
    seeds: list[SeedSolution]
    rejections: list[Rejection]

    def step(self, label: str) -> CertStep:
        for s in self.steps:
            if s.label == label:
                return s
        raise InputError(f"no certificate step labeled {label!r}")


def _scalar_step(label: str, description: str, inputs: tuple[str, ...],
                 produced: Poly, claimed: str, **extra) -> CertStep:
    scalar = equal_up_to_scalar(produced, parse_poly(claimed))
    if scalar is None:
        raise CertificateError(label, f"residual {produced} is not a scalar multiple of {claimed}")
    return CertStep(label=label, description=description, inputs=inputs,
                    produced=produced, claimed=claimed, scalar=scalar, **extra)


def _evaluate_point(ledger: Ledger, point: dict[str, Fraction], branch: str,
                    expect_fail: str | None = None) -> Rejection | None:
    """Check a fully pinned point against every ledger relation.

    With expect_fail set, that record must fail and its two sides become
    the rejection witness; further failing records only strengthen the
    rejection and are noted, not required.
    """
    failing: dict[str, IdentityRecord] = {}
    for rec in ledger.records:
        if rec.relation.evaluate(point) != 0:
            failing[rec.label] = rec
    if expect_fail is None:
        if failing:
            labels = ", ".join(sorted(failing))
            raise CertificateError(branch, f"seed fails ledger identities {labels}")
        return None
    if expect_fail not in failing:
        raise CertificateError(branch, f"expected {expect_fail} to fail, but it holds")
    rec = failing[expect_fail]
    return Rejection(branch=branch, point=dict(point), identity=expect_fail,
                     lhs=rec.sides[0].expr.evaluate(point),
                     rhs=rec.sides[1].expr.evaluate(point))


def _fmt_point(point: dict[str, Fraction]) -> str:
    return ", ".join(f"{v} = {format_rational(point[v])}" for v in sorted(point))


def eliminate_case_k3(ledger: Ledger | None = None) -> CaseCertificate:
    """Replay the k = 3 elimination and certify its seed set."""
    ledger = ledger or build_ledger(3)
    steps: list[CertStep] = []
    seeds: list[SeedSolution] = []
    rejections: list[Rejection] = []

    r3a = ledger.record("3a").relation
    r3b = ledger.record("3b").relation
    r3d = ledger.record("3d").relation
    r3e = ledger.record("3e").relation
    r3f = ledger.record("3f").relation

    c_of_a = solve_linear(r3a, "C")              # 9*A^2
    residual = (r3b
                .substitute("D", solve_linear(r3f, "D"))
                .substitute("E", solve_linear(r3e, "E"))
                .substitute("C", c_of_a))
    steps.append(_scalar_step(
        "I.elim", "eliminate C via 3a, E via 3e, D via 3f, then reduce 3b",
        ("3a", "3b", "3e", "3f"), residual, "(B-4*A)*(B+8*A-1)"))

    def pin(a: Fraction, b: Fraction) -> dict[str, Fraction]:
        point = {"A": a, "B": b, "C": c_of_a.evaluate({"A": a})}
        sub = r3b.substitute("A", a).substitute("B", b).substitute("C", point["C"])
        point["D"] = solve_linear(sub, "D").constant_value()
        sub = r3e.substitute("A", a).substitute("C", point["C"])
        point["E"] = solve_linear(sub, "E").constant_value()
        return point

    # branch (i): B = 4*A
    branch_i = r3d.substitute("B", 4 * _A).substitute("C", c_of_a)
    if not verify_factorization(branch_i, [(_A, 2), (_A - 1, 1), (9 * _A + 5, 1)], 27):
        raise CertificateError("I.branch-i", "residual is not 27*A^2*(A-1)*(9*A+5)")
    roots_i = tuple(sorted(rational_roots(branch_i, "A")))
    steps.append(_scalar_step(
        "I.branch-i", "branch (i): substitute B = 4*A and C = 9*A^2 into 3d",
        ("3d", "I.elim"), branch_i, "27*A^2*(A-1)*(9*A+5)", roots=roots_i))
    if roots_i != (Fraction(-5, 9), Fraction(0), Fraction(1)):
        raise CertificateError("I.branch-i", f"unexpected root set {roots_i}")

    for a, family in ((Fraction(0), "zero"), (Fraction(1), "identity")):
        point = pin(a, 4 * a)
        _evaluate_point(ledger, point, f"I.branch-i.A={format_rational(a)}")
        steps.append(CertStep(
            label=f"I.branch-i.A={format_rational(a)}",
            description=f"pin B, C, D from 3a/3b and E from 3e at A = {format_rational(a)}",
            inputs=("3a", "3b", "3e"),
            note=f"point: {_fmt_point(point)}; all ledger identities hold"))
        seeds.append(SeedSolution(
            family=family,
            a_values=(point["A"], point["B"], point["C"], point["D"]),
            a_texts=tuple(format_rational(point[v]) for v in "ABCD"),
            pinned={"E": format_rational(point["E"])}))

    bad = pin(Fraction(-5, 9), Fraction(-20, 9))
    rejection = _evaluate_point(ledger, bad, "I.branch-i.A=-5/9", expect_fail="3g")
    rejections.append(rejection)
    steps.append(CertStep(
        label="I.branch-i.A=-5/9",
        description="candidate A = -5/9 is rejected: 3g evaluates to unequal sides",
        inputs=("3g",),
        note=(f"point: {_fmt_point(bad)}; 3g gives "
              f"{format_rational(rejection.lhs)} != {format_rational(rejection.rhs)}")))

    # branch (ii): B = 1 - 8*A
    b_rule = 1 - 8 * _A
    from_3d = r3d.substitute("B", b_rule).substitute("C", c_of_a)
    from_3g = ledger.record("3g").relation.substitute("B", b_rule).substitute("C", c_of_a)
    steps.append(_scalar_step(
        "I.branch-ii.3d", "branch (ii): substitute B = 1-8*A and C = 9*A^2 into 3d",
        ("3d", "I.elim"), from_3d, "(9*A-1)*(27*A^3+39*A^2-52*A+8)"))
    steps.append(_scalar_step(
        "I.branch-ii.3g", "branch (ii): substitute B = 1-8*A and C = 9*A^2 into 3g",
        ("3g", "I.elim"), from_3g, "(9*A-1)*(9*A^3+5*A^2-29*A+4)"))

    cubic1 = parse_poly("27*A^3+39*A^2-52*A+8")
    cubic2 = parse_poly("9*A^3+5*A^2-29*A+4")
    cofactor_gcd = univariate_gcd(cubic1, cubic2, "A")
    if not (cofactor_gcd.is_constant() and not cofactor_gcd.is_zero()):
        raise CertificateError("I.branch-ii.gcd", f"cofactor gcd {cofactor_gcd} is not constant")
    shared = univariate_gcd(from_3d, from_3g, "A")
    if shared != _A - Fraction(1, 9):
        raise CertificateError("I.branch-ii.gcd", f"shared gcd is {shared}, expected A - 1/9")
    steps.append(CertStep(
        label="I.branch-ii.gcd",
        description=("the cubic cofactors share no root (constant gcd), so over the "
                     "complex numbers both residuals vanish only at the shared factor"),
        inputs=("I.branch-ii.3d", "I.branch-ii.3g"),
        gcd=shared, roots=(Fraction(1, 9),),
        note=f"gcd of the cofactors = {cofactor_gcd}; gcd of the residuals = {shared}"))

    point = pin(Fraction(1, 9), Fraction(1, 9))
    _evaluate_point(ledger, point, "I.branch-ii.A=1/9")
    steps.append(CertStep(
        label="I.branch-ii.A=1/9",
        description="pin B, C, D, E at the shared root A = 1/9",
        inputs=("3a", "3b", "3e"),
        note=f"point: {_fmt_point(point)}; all ledger identities hold"))
    seeds.append(SeedSolution(
        family="reciprocal",
        a_values=(point["A"], point["B"], point["C"], point["D"]),
        a_texts=tuple(format_rational(point[v]) for v in "ABCD"),
        pinned={"E": format_rational(point["E"])}))

    seeds.sort(key=lambda s: s.a_values)
    return CaseCertificate(case="I", k=3, ledger=ledger, steps=steps,
                           seeds=seeds, rejections=rejections)


def eliminate_case_k4(ledger: Ledger | None = None) -> CaseCertificate:
    """Replay the k = 4 elimination and certify its seed set."""
    ledger = ledger or build_ledger(4)
    steps: list[CertStep] = []
    seeds: list[SeedSolution] = []

    r4a = ledger.record("4a").relation
    r4b = ledger.record("4b").relation
    r4c = ledger.record("4c").relation
    r4d = ledger.record("4d").relation
    r4e = ledger.record("4e").relation

    steps.append(_scalar_step(
        "II.elim", "the relation of 4a factors directly",
        ("4a",), r4a, "(A-B)*(11*A-3*B+1)"))

    def pin(a: Fraction, b: Fraction) -> dict[str, Fraction]:
        point = {"A": a, "B": b}
        e_expr = solve_linear(r4d.substitute("A", a), "E")       # 3*C - 2a, C still free
        in_c = r4e.substitute("A", a).substitute("B", b).substitute("E", e_expr)
        point["C"] = solve_linear(in_c, "C").constant_value()
        point["E"] = e_expr.substitute("C", point["C"]).constant_value()
        return point

    # branch (i): B = A
    branch_i = r4b.substitute("B", _A)
    roots_i = tuple(sorted(rational_roots(branch_i, "A")))
    steps.append(_scalar_step(
        "II.branch-i", "branch (i): substitute B = A into 4b",
        ("4b", "II.elim"), branch_i, "32*A^2-2*A", roots=roots_i))
    if roots_i != (Fraction(0), Fraction(1, 16)):
        raise CertificateError("II.branch-i", f"unexpected root set {roots_i}")

    for a, family in ((Fraction(0), "zero"), (Fraction(1, 16), "reciprocal")):
        point = pin(a, a)
        _evaluate_point(ledger, point, f"II.branch-i.A={format_rational(a)}")
        steps.append(CertStep(
            label=f"II.branch-i.A={format_rational(a)}",
            description=f"pin C and E from 4d and 4e at A = B = {format_rational(a)}",
            inputs=("4d", "4e"),
            note=f"point: {_fmt_point(point)}; all ledger identities hold"))
        seeds.append(SeedSolution(
            family=family,
            a_values=(point["A"], point["B"], point["C"]),
            a_texts=tuple(format_rational(point[v]) for v in "ABC"),
            pinned={"E": format_rational(point["E"])}))

    # branch (ii): B = (11*A + 1)/3
    b_rule = parse_poly("1/3*(11*A+1)")
    from_4b = r4b.substitute("B", b_rule)
    from_4c = r4c.substitute("B", b_rule)
    cleared_4b, _ = clear_denominators(from_4b)
    cleared_4c, _ = clear_denominators(from_4c)
    steps.append(_scalar_step(
        "II.branch-ii.4b", "branch (ii): substitute B = (11*A+1)/3 into 4b",
        ("4b", "II.elim"), from_4b, "(A-1)*(160*A+14)", cleared=cleared_4b))
    steps.append(_scalar_step(
        "II.branch-ii.4c", "branch (ii): substitute B = (11*A+1)/3 into 4c",
        ("4c", "II.elim"), from_4c, "(A-1)*(16*A-1)", cleared=cleared_4c))

    shared = univariate_gcd(parse_poly("(A-1)*(160*A+14)"),
                            parse_poly("(A-1)*(16*A-1)"), "A")
    if shared != _A - 1:
        raise CertificateError("II.branch-ii.gcd", f"shared gcd is {shared}, expected A - 1")
    steps.append(CertStep(
        label="II.branch-ii.gcd",
        description=("the quadratics share only the factor A - 1, so over the complex "
                     "numbers the branch admits no solution besides A = 1"),
        inputs=("II.branch-ii.4b", "II.branch-ii.4c"),
        gcd=shared, roots=(Fraction(1),)))

    point = pin(Fraction(1), Fraction(4))
    _evaluate_point(ledger, point, "II.branch-ii.A=1")
    steps.append(CertStep(
        label="II.branch-ii.A=1",
        description="pin C and E from 4d and 4e at A = 1, B = 4",
        inputs=("4d", "4e"),
        note=f"point: {_fmt_point(point)}; all ledger identities hold"))
    seeds.append(SeedSolution(
        family="identity",
        a_values=(point["A"], point["B"], point["C"]),
        a_texts=tuple(format_rational(point[v]) for v in "ABC"),
        pinned={"E": format_rational(point["E"])}))

    seeds.sort(key=lambda s: s.a_values)
    return CaseCertificate(case="II", k=4, ledger=ledger, steps=steps,
                           seeds=seeds, rejections=[])


def eliminate_case_general(ledger: Ledger | None = None) -> CaseCertificate:
    """Replay the symbolic k >= 5 elimination and certify its seed set."""
    ledger = ledger or build_ledger(None)
    steps: list[CertStep] = []

    main = ledger.record("III-main").relation
    p1 = ledger.record("III-P1").relation
    p2 = ledger.record("III-P2").relation

    five_a = parse_poly("2*(A-B)^2+A+2*B-3*C")
    steps.append(_scalar_step(
        "5a", "the main identity reduces to 2*(A-B)^2 + A + 2*B = 3*C",
        ("III-main",), main, "2*(A-B)^2+A+2*B-3*C"))

    five_b = parse_poly("5*A+3*C-8*B")
    steps.append(_scalar_step(
        "5b", "the padded identities sum to 5*A + 3*C = 8*B",
        ("III-P1", "III-P2"), p1 + p2, "5*A+3*C-8*B"))

    c_rule = solve_linear(five_b, "C")           # (8*B - 5*A)/3
    factored = five_a.substitute("C", c_rule)
    if not verify_factorization(factored, [(_A - _B, 1), (_A - _B + 3, 1)], 2):
        raise CertificateError("III.factor", "residual is not 2*(A-B)*(A-B+3)")
    steps.append(_scalar_step(
        "III.factor", "substitute C = (8*B-5*A)/3 from 5b into 5a",
        ("5a", "5b"), factored, "2*(A-B)*(A-B+3)"))

    # branch (i): B = A, hence C = A; the sequence is constant.
    c_i = c_rule.substitute("B", _A)
    if c_i != _A:
        raise CertificateError("III.branch-i", f"5b gives C = {c_i}, expected A")
    second_diff = (_C - 2 * _B + _A).substitute("B", _A).substitute("C", _A)
    first_diff = (_B - _A).substitute("B", _A)
    if not (second_diff.is_zero() and first_diff.is_zero()):
        raise CertificateError("III.branch-i", "constant propagation check failed")
    constraint_i = _K ** 2 * _A ** 2 - _A
    if not verify_factorization(constraint_i, [(_A, 1), (_K ** 2 * _A - 1, 1)], 1):
        raise CertificateError("III.branch-i", "constraint does not factor as A*(k^2*A-1)")
    steps.append(CertStep(
        label="III.branch-i",
        description=("branch (i): B = A forces C = A by 5b; the recurrence then keeps "
                     "the sequence constant (first and second differences vanish), and "
                     "the value at the all-ones instance forces A = k^2*A^2"),
        inputs=("5b", "III.factor"),
        produced=constraint_i, claimed="A*(k^2*A-1)", scalar=Fraction(1),
        note="roots: A = 0 or A = 1/k^2"))

    # branch (ii): B = A + 3, hence C = A + 8; the sequence is n^2 + (A - 1).
    c_ii = c_rule.substitute("B", _A + 3)
    if c_ii != _A + 8:
        raise CertificateError("III.branch-ii", f"5b gives C = {c_ii}, expected A + 8")
    second_diff = (_C - 2 * _B + _A).substitute("B", _A + 3).substitute("C", _A + 8)
    first_diff = (_B - _A).substitute("B", _A + 3)
    if second_diff != Poly.const(2) or first_diff != Poly.const(3):
        raise CertificateError("III.branch-ii", "quadratic propagation check failed")
    atoms = ledger.atoms
    a_k3 = atoms[_K + 3][1].substitute("B", _A + 3) ** 2    # squared value at k+3
    a_k = atoms[_K][1] ** 2                                  # squared value at k
    constraint_ii = a_k3 - (_K + 3) ** 2 - (a_k - _K ** 2)
    steps.append(_scalar_step(
        "III.branch-ii",
        ("branch (ii): B = A + 3 forces C = A + 8 by 5b; the recurrence gives the "
         "second difference 2 and first difference 3, so the squared values are "
         "n^2 + (A - 1); comparing the pinned values at k and k+3 forces A = 1"),
        ("5b", "III.factor"), constraint_ii, "k*(A-1)",
        note="k >= 5 is nonzero, so the only root is A = 1"))
    if not verify_factorization(constraint_ii, [(_K, 1), (_A - 1, 1)], 6):
        raise CertificateError("III.branch-ii", "constraint does not factor as 6*k*(A-1)")

    # seed checks: identity and zero seeds satisfy the ledger for every k;
    # the common-value seeds reduce every relation to zero identically.
    for label, values in (("zero", (0, 0, 0, 0)), ("identity", (1, 4, 9, 16))):
        point = dict(zip("ABCD", map(Fraction, values)))
        for rec in ledger.records:
            residual = rec.relation
            for v, val in point.items():
                residual = residual.substitute(v, val)
            if not residual.is_zero():
                raise CertificateError("III.seeds", f"{label} seed fails {rec.label}")
    for rec in ledger.records:
        residual = rec.relation
        for v in "BCD":
            residual = residual.substitute(v, _A)
        if not residual.is_zero():
            raise CertificateError("III.seeds", f"constant seed fails {rec.label}")
    steps.append(CertStep(
        label="III.seeds",
        description=("the zero and identity seeds satisfy every ledger identity for "
                     "all k; any constant assignment satisfies them identically, and "
                     "the all-ones instance restricts the constant to 0 or 1/k^2"),
        inputs=("III-main", "III-P1", "III-P2")))

    seeds = [
        SeedSolution(family="zero", a_values=None, a_texts=("0", "0", "0")),
        SeedSolution(family="reciprocal", a_values=None,
                     a_texts=("1/k^2", "1/k^2", "1/k^2")),
        SeedSolution(family="identity", a_values=None, a_texts=("1", "4", "9")),
    ]
    return CaseCertificate(case="III", k=None, ledger=ledger, steps=steps,
                           seeds=seeds, rejections=[])


def case_certificate(k: int) -> CaseCertificate:
    if k == 3:
        return eliminate_case_k3()
    if k == 4:
        return eliminate_case_k4()
    if k >= 5:
        return eliminate_case_general()
    raise InputError(f"part count k must be at least 3, got {k}")


# -- classification --------------------------------------------------------------

def seed_values(family: str, k: int) -> tuple[Fraction, ...]:
    """The seed tuple (A_1..A_4 for k = 3, A_1..A_3 otherwise) of a family."""
    length = 4 if k == 3 else 3
    if family == "zero":
        return (Fraction(0),) * length
    if family == "identity":
        return tuple(Fraction(n * n) for n in range(1, length + 1))
    if family == "reciprocal":
        return (Fraction(1, k * k),) * length
    raise InputError(f"unknown family {family!r}")


@dataclass
class SeedReport:
    seed: tuple[Fraction, ...]
    family: str
    cross_check_ok: bool
    violations: int


@dataclass
class Classification:
    k: int
    N: int
    seeds: list[tuple[Fraction, ...]]
    families: list[str]
    sign_dof: int
    instances: int
    seed_reports: list[SeedReport]
    certificate: CaseCertificate


def classify(limit: int, k: int, threads: int = 1) -> Classification:
    """Certify the seed set for k, extend every seed to [1..limit], and
    verify the induced families against every instance."""
    if k < 3:
        raise InputError(f"part count k must be at least 3, got {k}")
    minimum = 4 if k == 3 else k
    if limit < minimum:
        raise InputError(f"bound must be at least {minimum} for k = {k}")
    cert = case_certificate(k)
    if k >= 5:
        build_ledger(k)      # revalidates the decompositions at this concrete k
    instances = list(enumerate_instances(limit, k))

    reports: list[SeedReport] = []
    for seed in cert.seeds:
        values = seed.a_values if seed.a_values is not None else seed_values(seed.family, k)
        seq = extend_seq(values, limit, k)
        conflicts = seq_cross_check(seq, limit, k, instances)
        if conflicts:
            first = conflicts[0].instance
            raise CertificateError(
                "classify", f"seed {values} conflicts at instance {first.xs} -> {first.n}")
        expected = seed_values(seed.family, k)
        if tuple(seq.get(i) for i in range(1, len(expected) + 1)) != expected:
            raise CertificateError("classify", f"seed {values} does not match {seed.family}")
        fam = Family(seed.family, k, limit)
        extended = [seq.get(n) for n in range(1, limit + 1)]
        direct = [fam.value(n) ** 2 for n in range(1, limit + 1)]
        if extended != direct:
            raise CertificateError(
                "classify", f"extended sequence disagrees with the {seed.family} family")
        report = verify_family(fam, limit, k, instances, threads=threads)
        if report.violations:
            v = report.violations[0]
            raise CertificateError(
                "classify", f"{seed.family} family violates instance {v.xs} -> {v.n}")
        reports.append(SeedReport(seed=tuple(values), family=seed.family,
                                  cross_check_ok=True, violations=0))

    reports.sort(key=lambda r: r.seed)
    return Classification(
        k=k, N=limit,
        seeds=[r.seed for r in reports],
        families=[r.family for r in reports],
        sign_dof=len(non_representable_up_to(limit, k)),
        instances=len(instances),
        seed_reports=reports,
        certificate=cert)


# -- negative controls ------------------------------------------------------------

@dataclass
class PerturbationReport:
    family: str
    k: int
    N: int
    mode: str
    trials: int
    detected: int
    details: list[tuple[int, str, int]]   # (position, change, violations found)


def perturbation_test(fam: Family, limit: int, k: int, trials: int, seed: int,
                      mode: str = "value") -> PerturbationReport:
    """Corrupt the family once per trial and count detections.

    mode "value" bumps f at a pseudo-random representable position by 1
    (1/k for the reciprocal family) and expects a violation every time;
    mode "sign" flips the sign at a pseudo-random non-representable
    position and expects no violation at all (sign independence).
    """
    if mode not in ("value", "sign"):
        raise InputError(f"unknown perturbation mode {mode!r}")
    if trials < 1:
        raise InputError("trials must be positive")
    rng = random.Random(seed)
    instances = list(enumerate_instances(limit, k))
    table = get_table(k, limit)
    if mode == "value":
        positions = [n for n in range(1, limit + 1) if table.representable(n)]
    else:
        positions = non_representable_up_to(limit, k)
    if not positions:
        raise InputError(f"no {mode}-perturbable positions below {limit}")

    detected = 0
    details: list[tuple[int, str, int]] = []
    for _ in range(trials):
        n0 = rng.choice(positions)
        if mode == "value":
            delta = Fraction(1, k) if fam.kind == "reciprocal" else Fraction(1)
            corrupted = fam.with_override(n0, fam.value(n0) + delta)
            report = verify_family(corrupted, limit, k, instances, stop_after=1)
            change = f"+{format_rational(delta)}"
        else:
            corrupted = fam.with_sign_flipped(n0)
            report = verify_family(corrupted, limit, k, instances)
            change = "sign"
        found = len(report.violations)
        detected += 1 if found else 0
        details.append((n0, change, found))
    return PerturbationReport(family=fam.kind, k=k, N=limit, mode=mode,
                              trials=trials, detected=detected, details=details)
