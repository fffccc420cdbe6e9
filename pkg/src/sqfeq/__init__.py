"""Exact verification of the sum-of-k-squares functional equation.

The package decides which functions f from the positive integers to the
complex numbers satisfy f(x_1^2 + ... + x_k^2) = f(x_1)^2 + ... + f(x_k)^2
for a fixed k >= 3: the zero function, the identity (up to a free sign at
every value that is not a sum of k positive squares), and the constant 1/k
with the same sign freedom.  Everything is computed in exact rational
arithmetic: instance-by-instance verification of the three families,
recurrence propagation of the squared values, and replayable certificates
for the symbolic eliminations behind the seed sets.
"""

from .classify import (
    CaseCertificate,
    Classification,
    IdentityRecord,
    Ledger,
    build_ledger,
    case_certificate,
    classify,
    eliminate_case_general,
    eliminate_case_k3,
    eliminate_case_k4,
    perturbation_test,
    seed_values,
)
from .engine import (
    Family,
    Instance,
    SquareSeq,
    VerificationReport,
    Violation,
    check_instance,
    enumerate_instances,
    extend_seq,
    family_value,
    random_signs,
    recurrence_identity_parts,
    recurrence_next,
    seq_cross_check,
    verify_family,
)
from .errors import (
    CertificateError,
    InputError,
    LedgerError,
    ParseError,
    StateError,
)
from .poly import (
    Poly,
    equal_up_to_scalar,
    parse_poly,
    poly_arith,
    rational_roots,
    univariate_gcd,
    verify_factorization,
)
from .rationals import (
    Rational,
    format_rational,
    isqrt_exact,
    make_rational,
    parse_rational,
    rational_arith,
)
from .squares import (
    ReprTable,
    is_representable,
    non_representable_up_to,
    representations,
)

__version__ = "0.1.0"
