"""Deterministic JSON and markdown rendering for reports.

Rationals appear as "p/q" strings (just "p" when the denominator is 1) in
every JSON document; key order is fixed by construction and markdown is
plain CommonMark, so identical inputs render byte-identically.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .classify import CaseCertificate, Classification, Ledger, Side
from .engine import VerificationReport
from .rationals import format_rational


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _rat(x: Fraction) -> str:
    return format_rational(x)


# -- representability ---------------------------------------------------------

def repr_obj(n: int, k: int, representable: bool, witness) -> dict:
    return {"n": n, "k": k, "representable": representable,
            "witness": list(witness) if witness is not None else None}


# -- verification ----------------------------------------------------------------

def verification_obj(report: VerificationReport) -> dict:
    return {
        "k": report.k,
        "N": report.N,
        "instances": report.instances,
        "violations": [
            {"xs": list(v.xs), "n": v.n, "lhs": _rat(v.lhs), "rhs": _rat(v.rhs)}
            for v in report.violations
        ],
    }


def verification_markdown(report: VerificationReport) -> str:
    lines = [
        "# Family verification",
        "",
        f"- family: {report.family}",
        f"- k: {report.k}",
        f"- N: {report.N}",
        f"- instances checked: {report.instances}",
        f"- violations: {len(report.violations)}",
    ]
    if report.violations:
        lines += ["", "| n | parts | lhs | rhs |", "| - | - | - | - |"]
        for v in report.violations:
            xs = ", ".join(map(str, v.xs))
            lines.append(f"| {v.n} | {xs} | {_rat(v.lhs)} | {_rat(v.rhs)} |")
    lines.append("")
    return "\n".join(lines)


# -- ledger ---------------------------------------------------------------------

def _parts_str(parts) -> str:
    if parts is None:
        return "-"
    pieces = []
    for part, count in parts:
        if isinstance(count, int):
            pieces.append(str(part) if count == 1 else f"{part} x {count}")
        else:
            pieces.append(f"{part} x ({count})")
    return ", ".join(pieces)


def _side_obj(side: Side) -> dict:
    parts = None
    if side.parts is not None:
        parts = [[str(p), c if isinstance(c, int) else str(c)] for p, c in side.parts]
    return {"parts": parts, "expr": str(side.expr)}


def ledger_obj(ledger: Ledger) -> dict:
    return {
        "k": ledger.k if ledger.k is not None else "general",
        "records": [
            {
                "label": rec.label,
                "target": str(rec.target),
                "kind": rec.kind,
                "sides": [_side_obj(s) for s in rec.sides],
                "relation": str(rec.relation),
                "note": rec.note,
            }
            for rec in ledger.records
        ],
    }


def ledger_markdown(ledger: Ledger, level: int = 1) -> str:
    scope = f"k = {ledger.k}" if ledger.k is not None else "general k >= 5"
    lines = [
        f"{'#' * level} Identity ledger ({scope})",
        "",
        "All decompositions validated: part counts equal k and squares sum to the target.",
        "",
        "| label | target | left parts | right parts | relation |",
        "| - | - | - | - | - |",
    ]
    for rec in ledger.records:
        lines.append(
            f"| {rec.label} | {rec.target} | {_parts_str(rec.sides[0].parts)} "
            f"| {_parts_str(rec.sides[1].parts)} | `{rec.relation}` |")
    notes = [(rec.label, rec.note) for rec in ledger.records if rec.note]
    if notes:
        lines.append("")
        for label, note in notes:
            lines.append(f"- {label}: {note}")
    lines.append("")
    return "\n".join(lines)


# -- certificates -----------------------------------------------------------------

def certificate_obj(cert: CaseCertificate) -> dict:
    steps = []
    for s in cert.steps:
        entry: dict = {"label": s.label, "description": s.description,
                       "inputs": list(s.inputs)}
        if s.produced is not None:
            entry["residual"] = str(s.produced)
        if s.claimed is not None:
            entry["claimed"] = s.claimed
        if s.scalar is not None:
            entry["scalar"] = _rat(s.scalar)
        if s.cleared is not None:
            entry["cleared"] = str(s.cleared)
        if s.gcd is not None:
            entry["gcd"] = str(s.gcd)
        if s.roots is not None:
            entry["roots"] = [_rat(r) for r in s.roots]
        if s.note:
            entry["note"] = s.note
        steps.append(entry)
    return {
        "case": cert.case,
        "k": cert.k if cert.k is not None else "general",
        "steps": steps,
        "seeds": [
            {"family": s.family, "values": list(s.a_texts), "pinned": s.pinned}
            for s in cert.seeds
        ],
        "rejections": [
            {
                "branch": r.branch,
                "identity": r.identity,
                "point": {v: _rat(r.point[v]) for v in sorted(r.point)},
                "lhs": _rat(r.lhs),
                "rhs": _rat(r.rhs),
            }
            for r in cert.rejections
        ],
    }


def certificate_markdown(cert: CaseCertificate) -> str:
    scope = f"k = {cert.k}" if cert.k is not None else "general k >= 5"
    lines = [f"# Case {cert.case} elimination certificate ({scope})", ""]
    lines.append(ledger_markdown(cert.ledger, level=2))
    lines.append("## Derivation steps")
    for s in cert.steps:
        lines += ["", f"### {s.label}", "", s.description, ""]
        if s.inputs:
            lines.append(f"- inputs: {', '.join(s.inputs)}")
        if s.produced is not None:
            lines.append(f"- residual: `{s.produced}`")
        if s.claimed is not None:
            lines.append(f"- claimed form: `{s.claimed}` (scalar {_rat(s.scalar)})")
        if s.cleared is not None:
            lines.append(f"- denominator-cleared form: `{s.cleared}`")
        if s.gcd is not None:
            lines.append(f"- gcd: `{s.gcd}`")
        if s.roots is not None:
            lines.append(f"- rational roots: {', '.join(_rat(r) for r in s.roots)}")
        if s.note:
            lines.append(f"- note: {s.note}")
    lines += ["", "## Seeds", ""]
    width = len(cert.seeds[0].a_texts)
    header = " | ".join(f"A_{i}" for i in range(1, width + 1))
    lines.append(f"| family | {header} | pinned |")
    lines.append("| - |" + " - |" * width + " - |")
    for s in cert.seeds:
        pinned = ", ".join(f"{k} = {v}" for k, v in s.pinned.items()) or "-"
        lines.append(f"| {s.family} | {' | '.join(s.a_texts)} | {pinned} |")
    if cert.rejections:
        lines += ["", "## Rejected points", ""]
        for r in cert.rejections:
            point = ", ".join(f"{v} = {_rat(r.point[v])}" for v in sorted(r.point))
            lines.append(
                f"- {r.branch}: identity {r.identity} fails at {point}: "
                f"{_rat(r.lhs)} != {_rat(r.rhs)}")
    lines.append("")
    return "\n".join(lines)


# -- classification -----------------------------------------------------------------

def classification_obj(cls: Classification) -> dict:
    return {
        "k": cls.k,
        "N": cls.N,
        "instances": cls.instances,
        "sign_dof": cls.sign_dof,
        "seeds": [[_rat(v) for v in seed] for seed in cls.seeds],
        "families": list(cls.families),
    }


def classification_markdown(cls: Classification) -> str:
    lines = [
        f"# Classification (k = {cls.k}, N = {cls.N})",
        "",
        f"- instances checked: {cls.instances}",
        f"- sign degrees of freedom (non-representable n <= {cls.N}): {cls.sign_dof}",
        "",
    ]
    width = len(cls.seeds[0])
    header = " | ".join(f"A_{i}" for i in range(1, width + 1))
    lines.append(f"| {header} | family | cross-check | violations |")
    lines.append("|" + " - |" * (width + 3))
    for report in cls.seed_reports:
        values = " | ".join(_rat(v) for v in report.seed)
        check = "ok" if report.cross_check_ok else "conflict"
        lines.append(f"| {values} | {report.family} | {check} | {report.violations} |")
    lines.append("")
    return "\n".join(lines)
