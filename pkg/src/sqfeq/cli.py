"""Command-line front end.

Exit codes: 0 when every requested check passed, 1 when a mathematical
check failed (a violation, a conflicting sequence, a failed certificate
step), 2 for usage or input errors.  Primary output goes to stdout, error
messages to stderr, and identical invocations produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from . import render
from .classify import build_ledger, case_certificate, classify
from .engine import Family, random_signs, verify_family
from .errors import CertificateError, InputError, LedgerError
from .rationals import parse_rational
from .squares import is_representable

_OVERRIDE_RE = re.compile(r"^f\((\d+)\)=(-?\d+(?:/\d+)?)$")
_SIGN_LINE_RE = re.compile(r"^(\d+)\s*:\s*([+-]1)$")


def _parse_overrides(items: list[str]) -> dict[int, Fraction]:
    overrides: dict[int, Fraction] = {}
    for item in items:
        m = _OVERRIDE_RE.match(item)
        if not m:
            raise InputError(f"override must look like f(3)=2 or f(3)=-1/3, got {item!r}")
        overrides[int(m.group(1))] = parse_rational(m.group(2))
    return overrides


def _parse_sign_file(path: str) -> dict[int, int]:
    signs: dict[int, int] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read sign file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        m = _SIGN_LINE_RE.match(line)
        if not m:
            raise InputError(f"{path}:{lineno}: expected 'n:+1' or 'n:-1', got {line!r}")
        signs[int(m.group(1))] = int(m.group(2))
    return signs


def _signs_for(args, k: int, limit: int) -> dict[int, int]:
    if args.sign_seed is not None and args.sign_file is not None:
        raise InputError("--sign-seed and --sign-file are mutually exclusive")
    if args.sign_seed is not None:
        return random_signs(k, limit, args.sign_seed)
    if args.sign_file is not None:
        return _parse_sign_file(args.sign_file)
    return {}


def _cmd_repr(args) -> int:
    ok, witness = is_representable(args.n, args.k)
    print(render.dumps(render.repr_obj(args.n, args.k, ok, witness)))
    return 0


def _cmd_verify(args) -> int:
    signs = _signs_for(args, args.k, args.N)
    overrides = _parse_overrides(args.override or [])
    fam = Family(args.family, args.k, args.N, signs=signs, overrides=overrides)
    report = verify_family(fam, args.N, args.k, threads=args.threads)
    if args.json:
        print(render.dumps(render.verification_obj(report)))
    else:
        print(render.verification_markdown(report), end="")
    return 0 if report.ok else 1


def _cmd_classify(args) -> int:
    result = classify(args.N, args.k, threads=args.threads)
    if args.json:
        print(render.dumps(render.classification_obj(result)))
    else:
        print(render.classification_markdown(result), end="")
    return 0


def _parse_case(value: str, allow_concrete: bool) -> int | None:
    if value == "general":
        return None
    try:
        k = int(value)
    except ValueError:
        raise InputError(f"--k must be an integer or 'general', got {value!r}") from None
    if k < 3:
        raise InputError(f"part count k must be at least 3, got {k}")
    if not allow_concrete and k >= 5:
        raise InputError("certify takes --k 3, --k 4 or --k general")
    return k


def _cmd_identities(args) -> int:
    ledger = build_ledger(_parse_case(args.k, allow_concrete=True))
    if args.json:
        print(render.dumps(render.ledger_obj(ledger)))
    else:
        print(render.ledger_markdown(ledger), end="")
    return 0


def _cmd_certify(args) -> int:
    k = _parse_case(args.k, allow_concrete=False)
    cert = case_certificate(k) if k is not None else case_certificate(5)
    if args.json:
        print(render.dumps(render.certificate_obj(cert)))
    else:
        print(render.certificate_markdown(cert), end="")
    return 0


def _cmd_report(args) -> int:
    result = classify(args.N, args.k)
    signs = _signs_for(args, args.k, args.N)
    reports = [
        verify_family(Family(kind, args.k, args.N, signs=signs), args.N, args.k)
        for kind in ("zero", "identity", "reciprocal")
    ]
    ok = all(r.ok for r in reports)
    if args.json:
        print(render.dumps({
            "classification": render.classification_obj(result),
            "certificate": render.certificate_obj(result.certificate),
            "verifications": [render.verification_obj(r) for r in reports],
        }))
    else:
        sections = [render.classification_markdown(result),
                    render.certificate_markdown(result.certificate)]
        sections.extend(render.verification_markdown(r) for r in reports)
        print("\n".join(sections), end="")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqfeq",
        description=("Exact verification and classification of the solutions of "
                     "f(x_1^2 + ... + x_k^2) = f(x_1)^2 + ... + f(x_k)^2 over the "
                     "positive integers, k >= 3."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("repr", help="decide sum-of-k-positive-squares representability")
    p.add_argument("--k", type=int, required=True, help="number of squares")
    p.add_argument("--n", type=int, required=True, help="value to decompose")
    p.set_defaults(func=_cmd_repr)

    p = sub.add_parser("verify", help="check a solution family against every instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True, help="check instances with n <= N")
    p.add_argument("--family", choices=("zero", "identity", "reciprocal"), required=True)
    p.add_argument("--sign-seed", type=int, default=None,
                   help="seed for pseudo-random signs at non-representable n")
    p.add_argument("--sign-file", default=None,
                   help="file of 'n:+1' / 'n:-1' lines (non-representable n only)")
    p.add_argument("--override", action="append", metavar="f(N)=V",
                   help="corrupt one value, e.g. f(3)=2 (repeatable)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true", help="emit JSON instead of markdown")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("classify", help="certify seeds and verify all induced families")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("identities", help="print the validated identity ledger")
    p.add_argument("--k", required=True, help="3, 4, a concrete k >= 5, or 'general'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_identities)

    p = sub.add_parser("certify", help="replay one case's elimination certificate")
    p.add_argument("--k", required=True, help="3, 4 or 'general'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("report", help="classification, certificate and verifications")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--sign-seed", type=int, default=None)
    p.add_argument("--sign-file", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (LedgerError, CertificateError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
