"""Node sets, the closed function catalog, and the scalar policy.

Every catalog function knows its maximal domain and has a closed-form
derivative of every order, so nothing in the library differentiates
numerically.  Evaluation is exact (``Fraction`` in, ``Fraction`` out) whenever
the function is rational-valued at the given rational point, and ``float``
otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import (
    DomainError,
    DuplicateNodes,
    ExactnessUnavailable,
    OutOfDomain,
    TooFewNodes,
)

Scalar = Union[Fraction, float]

__all__ = [
    "Scalar",
    "Interval",
    "REALS",
    "POSITIVE",
    "Mode",
    "ScalarPolicy",
    "SignLabel",
    "SignClass",
    "NodeSet",
    "make_node_set",
    "FunctionSpec",
    "Monomial",
    "PowerLaw",
    "ReciprocalPower",
    "Exponential",
    "ShiftedReciprocal",
    "Polynomial",
    "Constant",
    "Affine",
    "RationalH",
    "Derivative",
    "eval_derivative",
    "parse_function",
    "to_rational",
    "falling",
    "sign_of",
]


# ---------------------------------------------------------------------------
# scalar helpers
# ---------------------------------------------------------------------------

def to_rational(v) -> Fraction:
    """Convert ints, Fractions, finite floats and ``"p/q"``/decimal strings exactly."""
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r} has no rational form")
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    if hasattr(v, "item"):  # numpy scalar
        return to_rational(v.item())
    raise TypeError(f"cannot interpret {v!r} as a rational number")


def _is_rational_literal(v) -> bool:
    return isinstance(v, (int, Fraction, str)) and not isinstance(v, bool)


def falling(r, k: int):
    """Falling factorial r(r-1)...(r-k+1); 1 for k = 0."""
    out = Fraction(1) if isinstance(r, (int, Fraction)) else 1.0
    for i in range(k):
        out *= r - i
    return out


def sign_of(v) -> int:
    return (v > 0) - (v < 0)


# ---------------------------------------------------------------------------
# intervals and policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi); endpoints may be infinite."""

    lo: Scalar = -math.inf
    hi: Scalar = math.inf

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, t) -> bool:
        return self.lo < t < self.hi

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __str__(self) -> str:
        return f"({self.lo}, {self.hi})"


REALS = Interval()
POSITIVE = Interval(0, math.inf)


def as_interval(domain) -> Interval:
    if domain is None:
        return REALS
    if isinstance(domain, Interval):
        return domain
    lo, hi = domain
    return Interval(lo, hi)


class Mode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class ScalarPolicy:
    """Arithmetic backend selection.

    ``distinctness_threshold`` is relative to the node span and ``sign_margin``
    is an absolute half-width; both only matter in float mode.
    """

    mode: Mode = Mode.EXACT
    distinctness_threshold: float = 1e-10
    sign_margin: float = 0.0

    @classmethod
    def exact(cls) -> "ScalarPolicy":
        return cls(Mode.EXACT)

    @classmethod
    def floating(cls, distinctness_threshold: float = 1e-10, sign_margin: float = 0.0) -> "ScalarPolicy":
        return cls(Mode.FLOAT, distinctness_threshold, sign_margin)

    @property
    def is_exact(self) -> bool:
        return self.mode is Mode.EXACT


class SignLabel(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"
    UNCERTAIN = "uncertain"

    @classmethod
    def of(cls, v) -> "SignLabel":
        s = sign_of(v)
        return cls.POSITIVE if s > 0 else cls.NEGATIVE if s < 0 else cls.ZERO


@dataclass(frozen=True)
class SignClass:
    label: SignLabel
    value: Scalar
    error_bound: Scalar = 0

    @classmethod
    def exact(cls, value: Fraction) -> "SignClass":
        return cls(SignLabel.of(value), value, Fraction(0))

    @classmethod
    def from_float(cls, value: float, error_bound: float, predicted_zero: bool,
                   sign_margin: float = 0.0) -> "SignClass":
        """Classify a float whose true value is within ``error_bound`` of ``value``.

        Zero is only reported when the analytic oracle predicts zero; otherwise
        a value inside the error band is Uncertain.
        """
        half_width = max(error_bound, sign_margin)
        if abs(value) <= half_width:
            label = SignLabel.ZERO if predicted_zero else SignLabel.UNCERTAIN
        else:
            label = SignLabel.of(value)
        return cls(label, value, error_bound)


# ---------------------------------------------------------------------------
# node sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NodeSet:
    """Validated pairwise-distinct nodes, stored ascending.

    ``original`` keeps the caller's order; the pairing in the chain identity
    depends on it.
    """

    values: tuple
    original: tuple
    domain: Interval = REALS
    exact: bool = True

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def span(self) -> tuple:
        return self.values[0], self.values[-1]

    @property
    def width(self):
        return self.values[-1] - self.values[0]

    def floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


def make_node_set(values: Iterable, domain=None, policy: ScalarPolicy | None = None) -> NodeSet:
    """Validate nodes and return a sorted :class:`NodeSet`.

    With ``policy=None`` the set is exact unless some input is a Python float.
    """
    raw = list(values)
    if len(raw) < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {len(raw)}")
    domain = as_interval(domain)
    if policy is None:
        exact = all(_is_rational_literal(v) for v in raw)
        threshold = ScalarPolicy().distinctness_threshold
    else:
        exact = policy.is_exact
        threshold = policy.distinctness_threshold

    conv = [to_rational(v) for v in raw] if exact else [float(to_rational(v)) for v in raw]
    for v in conv:
        if not domain.contains(v):
            raise OutOfDomain(f"node {v} outside {domain}")
    ordered = sorted(conv)
    width = ordered[-1] - ordered[0]
    for a, b in zip(ordered, ordered[1:]):
        if a == b:
            raise DuplicateNodes(f"node {a} repeated")
        if not exact and (b - a) <= threshold * width:
            raise DuplicateNodes(f"nodes {a!r} and {b!r} closer than {threshold:g} x span")
    return NodeSet(tuple(ordered), tuple(conv), domain, exact)


# ---------------------------------------------------------------------------
# function catalog
# ---------------------------------------------------------------------------

class FunctionSpec:
    """Base class for catalog functions.

    Subclasses implement ``_exact(order, t)`` for Fraction ``t``,
    ``_float(order, t)`` for float ``t``, ``is_exact_at`` and ``derivative_sign``.
    """

    domain: Interval = REALS

    def derivative(self, order: int, t) -> Scalar:
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if isinstance(t, int) and not isinstance(t, bool):
            t = Fraction(t)
        if not self.domain.contains(t):
            raise DomainError(f"{self.label()} undefined at {t} (domain {self.domain})")
        if isinstance(t, Fraction) and self.is_exact_at(t, order):
            return self._exact(order, t)
        return self._float(order, float(t))

    def value(self, t) -> Scalar:
        return self.derivative(0, t)

    __call__ = value

    def is_exact_at(self, t, order: int = 0) -> bool:
        return True

    def derivative_sign(self, order: int, lo, hi) -> int | None:
        """Sign of the ``order``-th derivative on [lo, hi].

        +1 means nonnegative throughout, -1 nonpositive, 0 identically zero and
        None unknown or sign-changing.
        """
        return None

    def differentiate(self, k: int = 1) -> "FunctionSpec":
        return Derivative(self, k) if k else self

    def label(self) -> str:
        raise NotImplementedError

    def _exact(self, order: int, t: Fraction) -> Fraction:
        raise NotImplementedError

    def _float(self, order: int, t: float) -> float:
        raise NotImplementedError


def _fix(obj, name, value):
    object.__setattr__(obj, name, value)


@dataclass(frozen=True)
class Monomial(FunctionSpec):
    """t**degree on the whole real line."""

    degree: int

    def __post_init__(self):
        if self.degree < 0 or int(self.degree) != self.degree:
            raise ValueError("monomial degree must be a nonnegative integer")
        _fix(self, "degree", int(self.degree))

    def _exact(self, order, t):
        d = self.degree
        if order > d:
            return Fraction(0)
        return falling(d, order) * t ** (d - order)

    def _float(self, order, t):
        d = self.degree
        if order > d:
            return 0.0
        return float(falling(d, order)) * t ** (d - order)

    def derivative_sign(self, order, lo, hi):
        e = self.degree - order
        if e < 0:
            return 0
        if e % 2 == 0:
            return 1
        if lo >= 0:
            return 1
        if hi <= 0:
            return -1
        return None

    def label(self):
        return f"monomial:{self.degree}"


@dataclass(frozen=True)
class PowerLaw(FunctionSpec):
    """t**exponent on (0, inf)."""

    exponent: Fraction
    domain: Interval = field(default=POSITIVE, init=False, repr=False)

    def __post_init__(self):
        _fix(self, "exponent", to_rational(self.exponent))

    def is_exact_at(self, t, order=0):
        return self.exponent.denominator == 1

    def _exact(self, order, t):
        return falling(self.exponent, order) * t ** int(self.exponent - order)

    def _float(self, order, t):
        return float(falling(self.exponent, order)) * t ** float(self.exponent - order)

    def derivative_sign(self, order, lo, hi):
        return sign_of(falling(self.exponent, order))

    def label(self):
        return f"power:{self.exponent}"


@dataclass(frozen=True)
class ReciprocalPower(FunctionSpec):
    """1/t**s on (0, inf); the order-k derivative is (-1)^k s(s+1)...(s+k-1) t^(-s-k)."""

    s: Fraction
    domain: Interval = field(default=POSITIVE, init=False, repr=False)

    def __post_init__(self):
        _fix(self, "s", to_rational(self.s))

    @property
    def _power(self) -> PowerLaw:
        return PowerLaw(-self.s)

    def is_exact_at(self, t, order=0):
        return self.s.denominator == 1

    def _exact(self, order, t):
        return self._power._exact(order, t)

    def _float(self, order, t):
        return self._power._float(order, t)

    def derivative_sign(self, order, lo, hi):
        return self._power.derivative_sign(order, lo, hi)

    def label(self):
        return f"recip:{self.s}"


E_APPROX = Fraction(math.e)


@dataclass(frozen=True)
class Exponential(FunctionSpec):
    """a**t; rational-valued only at integer t (or everywhere when a = 1)."""

    base: Fraction

    def __post_init__(self):
        a = to_rational(self.base)
        if a <= 0:
            raise ValueError("exponential base must be positive")
        _fix(self, "base", a)

    def is_exact_at(self, t, order=0):
        if self.base == 1:
            return True
        # exp:e stores e rounded to a double; its powers are not e^k
        return order == 0 and t.denominator == 1 and self.base != E_APPROX

    def _exact(self, order, t):
        if self.base == 1:
            return Fraction(1) if order == 0 else Fraction(0)
        return self.base ** int(t)

    def _float(self, order, t):
        a = float(self.base)
        if order == 0:
            return a ** t
        return a ** t * math.log(a) ** order

    def derivative_sign(self, order, lo, hi):
        if order == 0:
            return 1
        if self.base == 1:
            return 0
        if self.base > 1:
            return 1
        return 1 if order % 2 == 0 else -1

    def label(self):
        return "exp:e" if self.base == E_APPROX else f"exp:{self.base}"


@dataclass(frozen=True)
class ShiftedReciprocal(FunctionSpec):
    """1/(t + c) on (-c, inf); the Laplace transform of exp(-c t)."""

    shift: Fraction

    def __post_init__(self):
        _fix(self, "shift", to_rational(self.shift))

    @property
    def domain(self) -> Interval:
        return Interval(-self.shift, math.inf)

    def _exact(self, order, t):
        return (-1) ** order * math.factorial(order) / (t + self.shift) ** (order + 1)

    def _float(self, order, t):
        return (-1) ** order * math.factorial(order) / (t + float(self.shift)) ** (order + 1)

    def derivative_sign(self, order, lo, hi):
        return 1 if order % 2 == 0 else -1

    def label(self):
        return f"shiftrecip:{self.shift}"


@dataclass(frozen=True)
class Polynomial(FunctionSpec):
    """Polynomial with ascending rational coefficients (constants and affine maps included)."""

    coeffs: tuple

    def __post_init__(self):
        cs = [to_rational(c) for c in self.coeffs] or [Fraction(0)]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        _fix(self, "coeffs", tuple(cs))

    def _derived(self, order):
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * c for i, c in enumerate(cs)][1:] or [Fraction(0)]
        return cs

    @staticmethod
    def _horner(cs, t):
        acc = cs[-1]
        for c in reversed(cs[:-1]):
            acc = acc * t + c
        return acc

    def _exact(self, order, t):
        return Fraction(self._horner(self._derived(order), t))

    def _float(self, order, t):
        return float(self._horner([float(c) for c in self._derived(order)], t))

    def derivative_sign(self, order, lo, hi):
        cs = self._derived(order)
        if len(cs) == 1:
            return sign_of(cs[0])
        if len(cs) == 2 and math.isfinite(lo) and math.isfinite(hi):
            a, b = (self._horner(cs, lo), self._horner(cs, hi))
            if a >= 0 and b >= 0:
                return 1
            if a <= 0 and b <= 0:
                return -1
        return None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def label(self):
        if len(self.coeffs) == 1:
            return f"const:{self.coeffs[0]}"
        return "poly:" + ",".join(str(c) for c in self.coeffs)


def Constant(c=1) -> Polynomial:
    return Polynomial((c,))


def Affine(slope, intercept=0) -> Polynomial:
    return Polynomial((intercept, slope))


@dataclass(frozen=True)
class RationalH(FunctionSpec):
    """H(s) = s**(n-2) * G(1/s) for a Laplace transform G from the catalog.

    ``inner`` is either ``ReciprocalPower(q+1)`` (transform of t^q/q!) or
    ``ShiftedReciprocal(c)`` (transform of exp(-c t)).  The singular factor
    1/s is folded away analytically, so H is evaluated through its
    continuous extension at s = 0.
    """

    inner: FunctionSpec
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("RationalH needs n >= 2")
        if isinstance(self.inner, ShiftedReciprocal):
            if self.inner.shift <= 0:
                raise ValueError("ShiftedReciprocal inner transform needs a positive shift")
        elif not isinstance(self.inner, ReciprocalPower):
            raise ValueError(f"no closed form for H with inner transform {self.inner.label()}")

    @property
    def _reduced(self) -> FunctionSpec | None:
        # G(u) = u^(-p)  =>  H(s) = s^(n-2+p)
        if isinstance(self.inner, ReciprocalPower):
            e = self.n - 2 + self.inner.s
            if e.denominator == 1 and e >= 0:
                return Monomial(int(e))
            return PowerLaw(e)
        return None

    @property
    def domain(self) -> Interval:
        red = self._reduced
        if red is not None:
            return red.domain
        return Interval(-1 / self.inner.shift, math.inf)

    def is_exact_at(self, t, order=0):
        red = self._reduced
        return red.is_exact_at(t, order) if red is not None else True

    def _leibniz(self, order, t, c, one):
        # H = s^m * u(s) with u(s) = s/(1+cs); u^(j) = (-1)^(j+1) j! c^(j-1) / (1+cs)^(j+1) for j >= 1
        m = self.n - 2
        denom = one + c * t
        total = 0 * one
        for i in range(min(order, m) + 1):
            j = order - i
            if j == 0:
                u = t / denom
            else:
                u = (-1) ** (j + 1) * math.factorial(j) * c ** (j - 1) / denom ** (j + 1)
            total += math.comb(order, i) * falling(m, i) * t ** (m - i) * u
        return total

    def _exact(self, order, t):
        red = self._reduced
        if red is not None:
            return red._exact(order, t)
        return self._leibniz(order, t, self.inner.shift, Fraction(1))

    def _float(self, order, t):
        red = self._reduced
        if red is not None:
            return red._float(order, t)
        return float(self._leibniz(order, t, float(self.inner.shift), 1.0))

    def derivative_sign(self, order, lo, hi):
        red = self._reduced
        return red.derivative_sign(order, lo, hi) if red is not None else None

    def label(self):
        return f"lapH:{self.n}:{self.inner.label()}"


@dataclass(frozen=True)
class Derivative(FunctionSpec):
    """The ``shift``-th derivative of a catalog function, as a function in its own right."""

    base: FunctionSpec
    shift: int = 1

    @property
    def domain(self) -> Interval:
        return self.base.domain

    def is_exact_at(self, t, order=0):
        return self.base.is_exact_at(t, order + self.shift)

    def _exact(self, order, t):
        return self.base._exact(order + self.shift, t)

    def _float(self, order, t):
        return self.base._float(order + self.shift, t)

    def derivative_sign(self, order, lo, hi):
        return self.base.derivative_sign(order + self.shift, lo, hi)

    def label(self):
        return f"d{self.shift}:{self.base.label()}"


def eval_derivative(f: FunctionSpec, order: int, t) -> Scalar:
    """Closed-form ``order``-th derivative of ``f`` at ``t`` (exact when possible)."""
    return f.derivative(order, t)


def is_exact_eligible(f: FunctionSpec, values: Sequence, order: int = 0) -> bool:
    """True when every value is an int or Fraction at which ``f`` is rational-valued."""
    return all(
        isinstance(v, (int, Fraction)) and not isinstance(v, bool) and f.is_exact_at(Fraction(v), order)
        for v in values
    )


def require_exact(f: FunctionSpec, values: Sequence, order: int = 0) -> None:
    if not is_exact_eligible(f, values, order):
        raise ExactnessUnavailable(f"{f.label()} is not rational-valued at the given nodes")


def parse_function(text: str) -> FunctionSpec:
    """Inverse of ``FunctionSpec.label``.

    >>> parse_function("monomial:4")
    Monomial(degree=4)
    >>> parse_function("lapH:3:shiftrecip:1").label()
    'lapH:3:shiftrecip:1'
    """
    kind, _, rest = text.strip().partition(":")
    kind = kind.lower()
    if kind in ("monomial", "mono"):
        return Monomial(int(rest))
    if kind in ("recip", "reciprocal"):
        return ReciprocalPower(rest)
    if kind == "power":
        return PowerLaw(rest)
    if kind == "exp":
        return Exponential(math.e if rest in ("", "e") else rest)
    if kind == "shiftrecip":
        return ShiftedReciprocal(rest or 1)
    if kind == "const":
        return Constant(rest or 1)
    if kind == "affine":
        slope, _, intercept = rest.partition(",")
        return Affine(slope, intercept or 0)
    if kind == "poly":
        return Polynomial(tuple(rest.split(",")))
    if kind == "laph":
        n, _, inner = rest.partition(":")
        return RationalH(parse_function(inner), int(n))
    if kind.startswith("d") and kind[1:].isdigit():
        return Derivative(parse_function(rest), int(kind[1:]))
    raise ValueError(f"unknown function {text!r}")
