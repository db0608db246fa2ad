"""Divided differences of a closed function catalog, checked by independent algorithms.

The package evaluates f[x_1, ..., x_n] exactly where the inputs are
rational, cross-checks float results against quadrature and Monte Carlo
representations, and verifies sign laws and lower bounds for divided
differences of powers and exponentials.
"""

from .core import (
    Affine,
    Constant,
    Derivative,
    Exponential,
    FunctionSpec,
    Interval,
    Mode,
    Monomial,
    NodeSet,
    Polynomial,
    PowerLaw,
    RationalH,
    ReciprocalPower,
    ScalarPolicy,
    ShiftedReciprocal,
    SignClass,
    SignLabel,
    eval_derivative,
    make_node_set,
    parse_function,
)
from .divdiff import (
    EvalReport,
    chain_identity_residual,
    divdiff,
    divdiff_direct,
    divdiff_exact,
    divdiff_recurrence,
    divdiff_report,
)

__version__ = "0.1.0"
